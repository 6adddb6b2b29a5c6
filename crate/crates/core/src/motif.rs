//! Small simple motif graphs `F` with their automorphism counts and copy sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_MOTIF_VERTICES: usize = 8;

/// A simple undirected graph on vertices `1..=v`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Motif {
    v: usize,
    edges: Vec<(usize, usize)>,
    aut_count: u64,
}

pub type EdgeSet = Vec<(usize, usize)>;

impl Motif {
    /// Edges are 1-based; each pair is normalized to `(min, max)` and the list sorted.
    pub fn new(v: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if v == 0 || v > MAX_MOTIF_VERTICES {
            return Err(Error::SizeLimit(format!("motif must have 1..={MAX_MOTIF_VERTICES} vertices, got {v}")));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidMotif(format!("self-loop at {a}")));
            }
            if a == 0 || b == 0 || a > v || b > v {
                return Err(Error::InvalidMotif(format!("edge ({a},{b}) outside 1..={v}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidMotif(format!("duplicate edge ({a},{b})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let aut_count = count_automorphisms(v, &edges);
        Ok(Motif { v, edges, aut_count })
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn aut_count(&self) -> u64 {
        self.aut_count
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Neighbour bitmask of 1-based vertex `a` (bit `b-1` set for each neighbour `b`).
    pub fn neighbor_mask(&self, a: usize) -> u32 {
        let mut m = 0;
        for &(x, y) in &self.edges {
            if x == a {
                m |= 1 << (y - 1);
            } else if y == a {
                m |= 1 << (x - 1);
            }
        }
        m
    }

    pub fn degree(&self, a: usize) -> usize {
        self.neighbor_mask(a).count_ones() as usize
    }

    /// Every distinct edge set of a copy of `F` in `K_v`.
    pub fn copies(&self) -> Vec<EdgeSet> {
        let mut seen = BTreeSet::new();
        for perm in permutations(self.v) {
            seen.insert(relabel(&self.edges, &perm));
        }
        seen.into_iter().collect()
    }

    /// Whether every edge can be made bichromatic by some 2-colouring.
    pub fn is_bipartite(&self) -> bool {
        (0u32..1 << self.v).any(|c| self.edges.iter().all(|&(a, b)| (c >> (a - 1) & 1) != (c >> (b - 1) & 1)))
    }

    /// 2-colourings (bit `t-1` set means vertex `t` takes the second colour)
    /// with no monochromatic edge.
    pub fn proper_colorings(&self) -> Vec<u32> {
        (0u32..1 << self.v)
            .filter(|&c| self.edges.iter().all(|&(a, b)| (c >> (a - 1) & 1) != (c >> (b - 1) & 1)))
            .collect()
    }
}

fn relabel(edges: &[(usize, usize)], perm: &[usize]) -> EdgeSet {
    let mut out: Vec<_> = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a - 1] + 1, perm[b - 1] + 1);
            (x.min(y), x.max(y))
        })
        .collect();
    out.sort_unstable();
    out
}

/// All permutations of `0..v` in lexicographic order.
pub(crate) fn permutations(v: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..v).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..v).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..v).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

fn count_automorphisms(v: usize, edges: &[(usize, usize)]) -> u64 {
    permutations(v).into_iter().filter(|p| relabel(edges, p) == edges).count() as u64
}

/// Names accepted by [`builtin_motif`].
pub const BUILTIN_MOTIFS: [&str; 5] = ["edge", "triangle", "twostar", "path3", "cycle4"];

/// `edge` = K_2, `triangle` = K_3, `twostar` = K_{1,2} centred at 1,
/// `path3` = the three-edge path 1-2-3-4, `cycle4` = C_4.
pub fn builtin_motif(name: &str) -> Result<Motif> {
    match name {
        "edge" => Motif::new(2, &[(1, 2)]),
        "triangle" => Motif::new(3, &[(1, 2), (2, 3), (1, 3)]),
        "twostar" => Motif::new(3, &[(1, 2), (1, 3)]),
        "path3" => Motif::new(4, &[(1, 2), (2, 3), (3, 4)]),
        "cycle4" => Motif::new(4, &[(1, 2), (2, 3), (3, 4), (1, 4)]),
        other => Err(Error::UnknownMotif(other.to_string())),
    }
}

/// `I_{F,{1,2}}`: copies of `F` in `K_v` whose edge set contains `(1,2)`.
pub fn copies_containing_edge12(f: &Motif) -> Result<Vec<EdgeSet>> {
    if f.v > MAX_MOTIF_VERTICES {
        return Err(Error::SizeLimit(format!("v = {} exceeds {MAX_MOTIF_VERTICES}", f.v)));
    }
    Ok(f.copies().into_iter().filter(|e| e.binary_search(&(1, 2)).is_ok()).collect())
}

/// `F^alt`: the bichromatic edges of the best 2-colouring of `F`; ties broken
/// by edge count, then by the lexicographically smallest edge list.
pub fn alternate_motif(f: &Motif) -> Motif {
    let mut best: Option<EdgeSet> = None;
    for c in 0u32..1 << f.v {
        let kept: EdgeSet =
            f.edges.iter().copied().filter(|&(a, b)| (c >> (a - 1) & 1) != (c >> (b - 1) & 1)).collect();
        let better = match &best {
            None => true,
            Some(b) => kept.len() > b.len() || (kept.len() == b.len() && kept < *b),
        };
        if better {
            best = Some(kept);
        }
    }
    Motif::new(f.v, &best.unwrap_or_default()).expect("subgraph of a valid motif")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: u64) -> u64 {
        (1..=n).product()
    }

    #[test]
    fn builtin_aut_counts() {
        let expect = [("edge", 2), ("triangle", 6), ("twostar", 2), ("path3", 2), ("cycle4", 8)];
        for (name, aut) in expect {
            assert_eq!(builtin_motif(name).unwrap().aut_count(), aut, "{name}");
        }
        assert!(builtin_motif("hexagon").is_err());
    }

    #[test]
    fn triangle_shape() {
        let t = builtin_motif("triangle").unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edges(), &[(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(Motif::new(3, &[(1, 1)]).is_err());
        assert!(Motif::new(3, &[(1, 2), (2, 1)]).is_err());
        assert!(Motif::new(3, &[(1, 4)]).is_err());
        assert!(Motif::new(9, &[]).is_err());
    }

    #[test]
    fn copy_counts_match_orbit_formula() {
        for name in BUILTIN_MOTIFS {
            let f = builtin_motif(name).unwrap();
            let v = f.vertex_count() as u64;
            assert_eq!(f.copies().len() as u64, fact(v) / f.aut_count());
            let i12 = copies_containing_edge12(&f).unwrap().len() as u64;
            assert_eq!(i12, 2 * fact(v - 2) * f.edge_count() as u64 / f.aut_count(), "{name}");
        }
    }

    #[test]
    fn edge12_copies() {
        let n = |name| copies_containing_edge12(&builtin_motif(name).unwrap()).unwrap().len();
        assert_eq!(n("edge"), 1);
        assert_eq!(n("triangle"), 1);
        assert_eq!(n("twostar"), 2);
    }

    #[test]
    fn alternate_motifs() {
        let tri = builtin_motif("triangle").unwrap();
        let alt = alternate_motif(&tri);
        assert_eq!(alt.edges(), &[(1, 2), (1, 3)]);
        assert_eq!(alt, builtin_motif("twostar").unwrap());
        for name in ["edge", "cycle4", "twostar", "path3"] {
            let f = builtin_motif(name).unwrap();
            assert_eq!(alternate_motif(&f), f);
        }
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(5).len(), 120);
        assert_eq!(permutations(0).len(), 1);
    }
}
