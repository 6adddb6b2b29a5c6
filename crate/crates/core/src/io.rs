//! Text formats: network TSV, block labels and motif edge lists.
//!
//! Network TSV: a header `n<TAB>d`, then `i<TAB>j<TAB>mask` for each pair with
//! at least one edge (1-based, `i < j`, `mask` the decimal layer bitmask).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graphon::CommunityAssignment;
use crate::motif::Motif;
use crate::network::MultiplexNetwork;

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("line {line}: cannot parse {s:?}")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn read_network(text: &str) -> Result<MultiplexNetwork> {
    let mut lines = content_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::Parse("empty network file".into()))?;
    let f: Vec<&str> = head.split('\t').collect();
    if f.len() != 2 {
        return Err(Error::Parse(format!("line {ln}: expected header \"n<TAB>d\"")));
    }
    let n: usize = parse_num(f[0], ln)?;
    let d: usize = parse_num(f[1], ln)?;
    let mut pairs = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("line {ln}: expected \"i<TAB>j<TAB>mask\"")));
        }
        let i: usize = parse_num(f[0], ln)?;
        let j: usize = parse_num(f[1], ln)?;
        let mask: u32 = parse_num(f[2], ln)?;
        if i == 0 || j == 0 || i > n || j > n || i >= j {
            return Err(Error::Parse(format!("line {ln}: need 1 <= i < j <= {n}")));
        }
        if mask == 0 || mask >> d != 0 {
            return Err(Error::Parse(format!("line {ln}: mask {mask} invalid for {d} layers")));
        }
        pairs.push((i - 1, j - 1, mask));
    }
    MultiplexNetwork::from_masks(n, d, &pairs).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_network(net: &MultiplexNetwork) -> String {
    let mut s = format!("{}\t{}\n", net.n(), net.d());
    for (i, j, m) in net.pairs() {
        writeln!(s, "{}\t{}\t{}", i + 1, j + 1, m).unwrap();
    }
    s
}

/// One 1-based block label per line.
pub fn read_labels(text: &str) -> Result<CommunityAssignment> {
    let labels: Vec<usize> = content_lines(text).map(|(ln, l)| parse_num(l, ln)).collect::<Result<_>>()?;
    CommunityAssignment::from_labels(&labels).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_labels(z: &CommunityAssignment) -> String {
    z.to_labels().iter().map(|l| format!("{l}\n")).collect()
}

/// Motif edge list in the network format with `d = 1`.
pub fn read_motif(text: &str) -> Result<Motif> {
    let net = read_network(text)?;
    if net.d() != 1 {
        return Err(Error::Parse("motif files must have d = 1".into()));
    }
    let edges: Vec<_> = net.layer(1).edges().into_iter().map(|(i, j)| (i + 1, j + 1)).collect();
    Motif::new(net.n(), &edges)
}

pub fn write_motif(f: &Motif) -> String {
    let mut s = format!("{}\t1\n", f.vertex_count());
    for &(a, b) in f.edges() {
        writeln!(s, "{a}\t{b}\t1").unwrap();
    }
    s
}
