//! Slow brute-force reference implementations. Nothing here calls the fast
//! counting or transform code; graphs are read only through `has_edge`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::CommunityAssignment;
use crate::motif::Motif;
use crate::motifs::BicolorKind;
use crate::multibern::{MomentVector, ProbVector};
use crate::network::{Adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub max_n: usize,
    pub max_d: usize,
    pub max_reps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_n: 8, max_d: 3, max_reps: 1_000_000 }
    }
}

pub const MAX_N: usize = 8;
pub const MAX_D: usize = 3;
pub const MAX_PROB_D: usize = 4;

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::SizeLimit(format!("oracle supports n <= {MAX_N}, got {n}")));
    }
    Ok(())
}

fn check_d(d: usize) -> Result<()> {
    if d > MAX_D {
        return Err(Error::SizeLimit(format!("oracle supports d <= {MAX_D}, got {d}")));
    }
    Ok(())
}

type Dense = Vec<Vec<bool>>;

fn dense(adj: &Adjacency) -> Dense {
    let n = adj.n();
    (0..n).map(|i| (0..n).map(|j| adj.has_edge(i, j)).collect()).collect()
}

fn dense_subset(net: &MultiplexNetwork, k: LayerSubset) -> Dense {
    let n = net.n();
    let ls = k.layers();
    (0..n)
        .map(|i| (0..n).map(|j| ls.iter().all(|&l| net.layer(l).has_edge(i, j))).collect())
        .collect()
}

/// Visits every map `V → [n]` (injective or not) restricted by `allowed`.
fn for_each_map(v: usize, n: usize, injective: bool, allowed: &dyn Fn(usize, usize) -> bool, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        t: usize,
        v: usize,
        n: usize,
        injective: bool,
        allowed: &dyn Fn(usize, usize) -> bool,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if t == v {
            visit(cur);
            return;
        }
        for x in 0..n {
            if !allowed(t, x) || (injective && cur.contains(&x)) {
                continue;
            }
            cur.push(x);
            rec(t + 1, v, n, injective, allowed, cur, visit);
            cur.pop();
        }
    }
    rec(0, v, n, injective, allowed, &mut Vec::new(), visit);
}

fn preserves(g: &Dense, edges: &[(usize, usize)], s: &[usize]) -> bool {
    edges.iter().all(|&(a, b)| g[s[a - 1]][s[b - 1]])
}

/// `|Aut(F)|` by checking every permutation of `V(F)`.
pub fn brute_aut(f: &Motif) -> u64 {
    let v = f.vertex_count();
    let mut g = vec![vec![false; v]; v];
    for &(a, b) in f.edges() {
        g[a - 1][b - 1] = true;
        g[b - 1][a - 1] = true;
    }
    let mut count = 0;
    for_each_map(v, v, true, &|_, _| true, &mut |s| {
        if f.edges().iter().all(|&(a, b)| g[s[a - 1]][s[b - 1]]) {
            count += 1;
        }
    });
    count
}

fn injective_count(g: &Dense, f: &Motif, allowed: &dyn Fn(usize, usize) -> bool) -> u128 {
    let mut c = 0u128;
    for_each_map(f.vertex_count(), g.len(), true, allowed, &mut |s| {
        if preserves(g, f.edges(), s) {
            c += 1;
        }
    });
    c
}

fn exact_div(raw: u128, aut: u64) -> u128 {
    assert_eq!(raw % aut as u128, 0, "orbit count not divisible by |Aut|");
    raw / aut as u128
}

pub fn brute_count(adj: &Adjacency, f: &Motif) -> Result<u128> {
    check_n(adj.n())?;
    Ok(exact_div(injective_count(&dense(adj), f, &|_, _| true), brute_aut(f)))
}

pub fn brute_count_cross_layer(net: &MultiplexNetwork, k: LayerSubset, f: &Motif) -> Result<u128> {
    check_n(net.n())?;
    check_d(net.d())?;
    Ok(exact_div(injective_count(&dense_subset(net, k), f, &|_, _| true), brute_aut(f)))
}

/// `(raw tuple sum, ∏ |Aut(F_l)|)`.
pub fn brute_aligned(net: &MultiplexNetwork, motifs: &[Motif]) -> Result<(u128, u128)> {
    check_n(net.n())?;
    check_d(net.d())?;
    if motifs.len() != net.d() {
        return Err(Error::InvalidArgument("one motif per layer".into()));
    }
    let gs: Vec<Dense> = net.layers().iter().map(dense).collect();
    let k = motifs.iter().map(|f| f.vertex_count()).max().unwrap_or(0);
    let mut raw = 0u128;
    for_each_map(k, net.n(), true, &|_, _| true, &mut |s| {
        if motifs.iter().zip(&gs).all(|(f, g)| preserves(g, f.edges(), s)) {
            raw += 1;
        }
    });
    Ok((raw, motifs.iter().map(|f| brute_aut(f) as u128).product()))
}

/// Largest edge subset of `F` with a 2-colouring leaving no edge
/// monochromatic; ties go to the lexicographically smallest edge list.
pub fn brute_alternate_motif(f: &Motif) -> Result<Motif> {
    let e = f.edges();
    if e.len() > 20 {
        return Err(Error::SizeLimit("oracle alternate motif supports at most 20 edges".into()));
    }
    let v = f.vertex_count();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for sub in 0u32..1 << e.len() {
        let edges: Vec<_> = (0..e.len()).filter(|i| sub >> i & 1 == 1).map(|i| e[i]).collect();
        let two_colourable = (0u32..1 << v).any(|c| edges.iter().all(|&(a, b)| (c >> (a - 1) & 1) != (c >> (b - 1) & 1)));
        if !two_colourable {
            continue;
        }
        let take = match &best {
            None => true,
            Some(b) => edges.len() > b.len() || (edges.len() == b.len() && edges < *b),
        };
        if take {
            best = Some(edges);
        }
    }
    Motif::new(v, &best.unwrap_or_default())
}

pub fn brute_bicolored(
    net: &MultiplexNetwork,
    k: LayerSubset,
    z: &CommunityAssignment,
    a: usize,
    b: usize,
    f: &Motif,
    kind: BicolorKind,
) -> Result<u128> {
    check_n(net.n())?;
    check_d(net.d())?;
    let g = dense_subset(net, k);
    let lab = z.labels();
    match kind {
        BicolorKind::Red | BicolorKind::Blue => {
            let blk = if kind == BicolorKind::Red { a } else { b };
            Ok(exact_div(injective_count(&g, f, &|_, x| lab[x] == blk), brute_aut(f)))
        }
        BicolorKind::Alternate => {
            let alt = brute_alternate_motif(f)?;
            let aut = brute_aut(&alt);
            if a == b {
                return Ok(exact_div(injective_count(&g, &alt, &|_, x| lab[x] == a), aut));
            }
            let v = alt.vertex_count();
            let mut raw = 0u128;
            for c in 0u32..1 << v {
                let proper = alt.edges().iter().all(|&(x, y)| (c >> (x - 1) & 1) != (c >> (y - 1) & 1));
                if !proper {
                    continue;
                }
                let want = |t: usize| if c >> t & 1 == 0 { a } else { b };
                raw += injective_count(&g, &alt, &|t, x| lab[x] == want(t));
            }
            Ok(exact_div(raw, aut))
        }
    }
}

/// `t̃_a(v)` by enumerating injective maps of the other vertices into `[n] ∖ {v}`.
pub fn brute_one_point(v: usize, a: usize, f: &Motif, adj: &Adjacency) -> Result<f64> {
    check_n(adj.n())?;
    let g = dense(adj);
    let c = injective_count(&g, f, &|t, x| (t == a - 1) == (x == v));
    Ok(c as f64 / (adj.n() as f64).powi(f.vertex_count() as i32 - 1))
}

/// `Ŵ_F((u,v))` with the free sum over the other vertices.
pub fn brute_two_point(u: usize, v: usize, f: &Motif, adj: &Adjacency) -> Result<f64> {
    check_n(adj.n())?;
    if u == v {
        return Err(Error::InvalidArgument("distinct nodes required".into()));
    }
    let g = dense(adj);
    let vc = f.vertex_count();
    let n = adj.n();
    let mut total = 0u128;
    for a in 0..vc {
        for b in 0..vc {
            if a == b {
                continue;
            }
            for_each_map(vc, n, false, &|t, x| (t != a || x == u) && (t != b || x == v), &mut |s| {
                if preserves(&g, f.edges(), s) {
                    total += 1;
                }
            });
        }
    }
    Ok(total as f64 / (n as f64).powi(vc as i32 - 2) / (2.0 * brute_aut(f) as f64))
}

pub fn brute_join(a: usize, b: usize, f: &Motif, adj: &Adjacency) -> Result<f64> {
    let n = adj.n();
    let mut s = 0.0;
    for v in 0..n {
        s += brute_one_point(v, a, f, adj)? * brute_one_point(v, b, f, adj)?;
    }
    Ok(s / n as f64)
}

/// Joint outcome probabilities by inclusion–exclusion:
/// `P(exactly the layers in S) = Σ_{T ⊇ S} (-1)^{|T∖S|} μ_T`.
pub fn brute_joint_probs(mu: &MomentVector) -> Result<ProbVector> {
    if mu.d > MAX_PROB_D {
        return Err(Error::SizeLimit(format!("oracle supports d <= {MAX_PROB_D}")));
    }
    let cells = 1usize << mu.d;
    let mut p = vec![0.0; cells];
    for (s, slot) in p.iter_mut().enumerate() {
        let mut acc = 0.0;
        for t in 0..cells {
            if t & s == s {
                let sign = if (t & !s).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * mu.mu[t];
            }
        }
        *slot = acc;
    }
    Ok(ProbVector { d: mu.d, p, clamped: false })
}

/// Integer inclusion–exclusion on moment numerators over a common denominator.
pub fn brute_joint_probs_int(d: usize, mu: &[i64]) -> Result<Vec<i64>> {
    if d > MAX_PROB_D || mu.len() != 1 << d {
        return Err(Error::SizeLimit(format!("oracle supports d <= {MAX_PROB_D}")));
    }
    let cells = 1usize << d;
    Ok((0..cells)
        .map(|s| {
            (0..cells)
                .filter(|t| t & s == s)
                .map(|t| if (t & !s).count_ones() % 2 == 0 { mu[t] } else { -mu[t] })
                .sum()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub reps: usize,
    pub mean: Vec<f64>,
    /// Row-major sample covariance (divisor `reps - 1`).
    pub cov: Vec<f64>,
    /// Standard errors of the means.
    pub se: Vec<f64>,
}

impl MonteCarloSummary {
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.mean.len() + j]
    }
}

/// splitmix64 finalizer, used to derive replicate seeds from a master seed.
pub fn mix_seed(seed: u64, rep: u64) -> u64 {
    let mut z = seed ^ rep.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `statistic(replicate_seed)` for `reps` replicates and accumulates the
/// mean and covariance with a streaming update.
pub fn monte_carlo_moments<F>(mut statistic: F, reps: usize, seed: u64) -> Result<MonteCarloSummary>
where
    F: FnMut(u64) -> Vec<f64>,
{
    if reps < 100 {
        return Err(Error::InsufficientReplicates(reps));
    }
    let mut summ = Streaming::default();
    for r in 0..reps {
        summ.push(&statistic(mix_seed(seed, r as u64)));
    }
    Ok(summ.finish())
}

/// Welford-style mean and co-moment accumulator.
#[derive(Default, Clone, Debug)]
pub struct Streaming {
    count: usize,
    mean: Vec<f64>,
    comoment: Vec<f64>,
}

impl Streaming {
    pub fn push(&mut self, x: &[f64]) {
        let k = x.len();
        if self.count == 0 {
            self.mean = vec![0.0; k];
            self.comoment = vec![0.0; k * k];
        }
        assert_eq!(k, self.mean.len(), "statistic length changed between replicates");
        self.count += 1;
        let nf = self.count as f64;
        let delta: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        for (m, dl) in self.mean.iter_mut().zip(&delta) {
            *m += dl / nf;
        }
        for i in 0..k {
            for j in 0..k {
                self.comoment[i * k + j] += delta[i] * (x[j] - self.mean[j]);
            }
        }
    }

    pub fn finish(&self) -> MonteCarloSummary {
        let k = self.mean.len();
        let denom = (self.count.max(2) - 1) as f64;
        let cov: Vec<f64> = self.comoment.iter().map(|c| c / denom).collect();
        let se = (0..k).map(|i| (cov[i * k + i].max(0.0) / self.count as f64).sqrt()).collect();
        MonteCarloSummary { reps: self.count, mean: self.mean.clone(), cov, se }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motif::builtin_motif;

    #[test]
    fn hand_counts() {
        let c4 = builtin_motif("cycle4").unwrap();
        assert_eq!(brute_count(&Adjacency::complete(4), &c4).unwrap(), 3);
        assert_eq!(brute_count(&Adjacency::empty(5), &c4).unwrap(), 0);
        assert!(brute_count(&Adjacency::empty(9), &c4).is_err());
    }

    #[test]
    fn aut_matches_motif() {
        for name in crate::motif::BUILTIN_MOTIFS {
            let f = builtin_motif(name).unwrap();
            assert_eq!(brute_aut(&f), f.aut_count());
        }
    }

    #[test]
    fn joint_probs_cases() {
        let p = brute_joint_probs(&MomentVector::new(1, vec![1.0, 0.3]).unwrap()).unwrap();
        assert!((p.p[0] - 0.7).abs() < 1e-15 && (p.p[1] - 0.3).abs() < 1e-15);
        let p = brute_joint_probs(&MomentVector::new(2, vec![1.0, 0.5, 0.4, 0.2]).unwrap()).unwrap();
        for (x, y) in p.p.iter().zip([0.5 * 0.6, 0.5 * 0.6, 0.5 * 0.4, 0.5 * 0.4]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(brute_joint_probs_int(2, &[100, 30, 40, 12]).unwrap(), vec![42, 18, 28, 12]);
    }

    #[test]
    fn monte_carlo_summary() {
        let s = monte_carlo_moments(|_| vec![3.0, -1.0], 100, 1).unwrap();
        assert_eq!(s.mean, vec![3.0, -1.0]);
        assert!(s.cov.iter().all(|&c| c == 0.0));
        let f = |seed: u64| vec![(seed % 1000) as f64, (seed % 7) as f64];
        assert_eq!(monte_carlo_moments(f, 200, 5).unwrap(), monte_carlo_moments(f, 200, 5).unwrap());
        assert!(monte_carlo_moments(f, 99, 5).is_err());
    }
}
