//! Community fitting and moment-based estimation of every connectivity
//! matrix `θ^(u)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{BlockGraphonVector, CommunityAssignment};
use crate::motif::{alternate_motif, Motif};
use crate::motifs::count_motif;
use crate::multibern::{project_feasible, raw_probs, FEASIBLE_TOL};
use crate::network::{intersection_adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

pub const LOG_FLOOR: f64 = 1e-9;
pub const MIN_GAIN: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;
const KMEANS_RESTARTS: usize = 10;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvertKind {
    Red,
    Blue,
    Alternate,
    Monochrome,
}

fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|i| (n - i) as f64).product()
}

/// Number of admissible injective placements `C` with `E[X] = C θ^{|E|}`,
/// together with the exponent `|E|` of the motif actually counted.
pub fn placement_count(pool_a: usize, pool_b: usize, f: &Motif, kind: InvertKind) -> (f64, usize) {
    let v = f.vertex_count();
    match kind {
        InvertKind::Red | InvertKind::Monochrome => (falling(pool_a, v) / f.aut_count() as f64, f.edge_count()),
        InvertKind::Blue => (falling(pool_b, v) / f.aut_count() as f64, f.edge_count()),
        InvertKind::Alternate => {
            let alt = alternate_motif(f);
            let c: f64 = alt
                .proper_colorings()
                .into_iter()
                .map(|c| {
                    let in_b = c.count_ones() as usize;
                    falling(pool_a, v - in_b) * falling(pool_b, in_b)
                })
                .sum();
            (c / alt.aut_count() as f64, alt.edge_count())
        }
    }
}

/// `θ̂ = clamp((count / C)^{1/|E|}, 0, 1)`.
pub fn moment_invert(count: u128, pool_a: usize, pool_b: usize, f: &Motif, kind: InvertKind) -> Result<f64> {
    let (c, e) = placement_count(pool_a, pool_b, f, kind);
    if c <= 0.0 {
        return Err(Error::DegeneratePool(format!(
            "no placements of a {}-vertex motif in pools ({pool_a}, {pool_b})",
            f.vertex_count()
        )));
    }
    if e == 0 {
        return Err(Error::DegeneratePool("motif has no edges to invert".into()));
    }
    Ok((count as f64 / c).powf(1.0 / e as f64).clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClampedEntry {
    pub subset: LayerSubset,
    pub a: usize,
    pub b: usize,
    pub before: f64,
    pub after: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountUsed {
    pub subset: LayerSubset,
    pub a: usize,
    pub b: usize,
    pub kind: InvertKind,
    pub count: u128,
}

/// Estimated `θ̂` with the feasibility repairs applied and the counts used.
/// Block indices in `clamped` and `counts_used` are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFitReport {
    pub theta_hat: BlockGraphonVector,
    pub clamped: Vec<ClampedEntry>,
    pub counts_used: Vec<CountUsed>,
}

/// Diagonal entries invert monochrome counts of `F` inside each block,
/// off-diagonal entries invert alternate counts of `F^alt` across each pair of
/// blocks. The result is then made monotone over the subset lattice and, when
/// every subset is requested, multivariate Bernoulli feasible.
pub fn estimate_theta(
    net: &MultiplexNetwork,
    z: &CommunityAssignment,
    f: &Motif,
    subsets: &[LayerSubset],
) -> Result<MomentFitReport> {
    if z.n() != net.n() {
        return Err(Error::InvalidArgument(format!("{} labels for {} nodes", z.n(), net.n())));
    }
    let k = z.k();
    let blocks = z.blocks();
    let sizes = z.sizes();
    let alt = alternate_motif(f);
    let mut tasks = Vec::new();
    for &u in subsets {
        for a in 0..k {
            for b in a..k {
                tasks.push((u, a, b));
            }
        }
    }
    let adjs: BTreeMap<LayerSubset, _> =
        subsets.iter().map(|&u| Ok((u, intersection_adjacency(net, u)?))).collect::<Result<_>>()?;
    let results: Vec<Result<(LayerSubset, usize, usize, InvertKind, u128, f64)>> = tasks
        .par_iter()
        .map(|&(u, a, b)| {
            let adj = &adjs[&u];
            if a == b {
                let c = count_motif(&adj.induced(&blocks[a]), f);
                let t = moment_invert(c, sizes[a], sizes[a], f, InvertKind::Monochrome)
                    .map_err(|e| Error::DegeneratePool(format!("block {}: {e}", a + 1)))?;
                Ok((u, a, b, InvertKind::Monochrome, c, t))
            } else {
                let c = count_motif(&adj.cross(&blocks[a], &blocks[b]), &alt);
                let t = moment_invert(c, sizes[a], sizes[b], f, InvertKind::Alternate)
                    .map_err(|e| Error::DegeneratePool(format!("blocks ({},{}): {e}", a + 1, b + 1)))?;
                Ok((u, a, b, InvertKind::Alternate, c, t))
            }
        })
        .collect();
    let mut theta: BTreeMap<LayerSubset, Vec<f64>> = subsets.iter().map(|&u| (u, vec![0.0; k * k])).collect();
    let mut counts_used = Vec::new();
    for r in results {
        let (u, a, b, kind, count, t) = r?;
        let m = theta.get_mut(&u).unwrap();
        m[a * k + b] = t;
        m[b * k + a] = t;
        counts_used.push(CountUsed { subset: u, a: a + 1, b: b + 1, kind, count });
    }
    let mut w = BlockGraphonVector::new(net.d(), k, net.n() / k, theta)?;
    let clamped = project_theta(&mut w);
    Ok(MomentFitReport { theta_hat: w, clamped, counts_used })
}

/// Monotone repair (each entry capped by its present proper subsets, smaller
/// subsets first) followed by Bernoulli projection of every block pair.
pub fn project_theta(w: &mut BlockGraphonVector) -> Vec<ClampedEntry> {
    let k = w.k();
    let mut order: Vec<LayerSubset> = w.subsets().collect();
    order.sort_by_key(|s| (s.len(), s.layers()));
    let mut out = Vec::new();
    for a in 0..k {
        for b in a..k {
            for (i, &u) in order.iter().enumerate() {
                let cap = order[..i]
                    .iter()
                    .filter(|s| s.is_subset_of(u))
                    .map(|&s| w.get(s, a, b))
                    .fold(f64::INFINITY, f64::min);
                let x = w.get(u, a, b);
                if x > cap {
                    w.set(u, a, b, cap);
                    out.push(ClampedEntry { subset: u, a: a + 1, b: b + 1, before: x, after: cap, reason: "monotonicity".into() });
                }
            }
            if w.is_complete() {
                let mu = w.moments(a, b);
                if raw_probs(&mu.mu).iter().any(|&p| p < -FEASIBLE_TOL) {
                    let (_, fixed) = project_feasible(&mu);
                    for &u in &order {
                        let before = w.get(u, a, b);
                        let after = fixed.mu[u.mask() as usize].clamp(0.0, 1.0);
                        if (before - after).abs() > 1e-15 {
                            w.set(u, a, b, after);
                            out.push(ClampedEntry { subset: u, a: a + 1, b: b + 1, before, after, reason: "feasibility".into() });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Piecewise-constant evaluation `Ŵ^(u)(x,y) = θ̂^(u)_{min(⌈nx/h⌉,K), min(⌈ny/h⌉,K)}`.
#[derive(Clone, Debug)]
pub struct NetworkHistogram {
    theta: BlockGraphonVector,
    n: usize,
}

pub fn network_histogram(theta_hat: &BlockGraphonVector, n: usize) -> Result<NetworkHistogram> {
    if theta_hat.h() == 0 || n == 0 {
        return Err(Error::InvalidArgument("histogram needs positive n and h".into()));
    }
    Ok(NetworkHistogram { theta: theta_hat.clone(), n })
}

impl NetworkHistogram {
    pub fn block_index(&self, x: f64) -> usize {
        let i = (self.n as f64 * x / self.theta.h() as f64).ceil() as usize;
        i.clamp(1, self.theta.k())
    }

    pub fn eval(&self, u: LayerSubset, x: f64, y: f64) -> Result<f64> {
        for t in [x, y] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidArgument(format!("histogram argument {t} outside (0,1)")));
            }
        }
        if self.theta.matrix(u).is_none() {
            return Err(Error::InvalidSubset(format!("no estimate for subset {u}")));
        }
        Ok(self.theta.get(u, self.block_index(x) - 1, self.block_index(y) - 1))
    }
}

/// Outcome masks `o_ij` for every ordered pair.
fn outcome_matrix(net: &MultiplexNetwork) -> Vec<u16> {
    let n = net.n();
    let mut o = vec![0u16; n * n];
    for (l, layer) in net.layers().iter().enumerate() {
        for (i, j) in layer.edges() {
            o[i * n + j] |= 1 << l;
            o[j * n + i] |= 1 << l;
        }
    }
    o
}

struct LikState {
    n: usize,
    k: usize,
    cells: usize,
    o: Vec<u16>,
    z: Vec<usize>,
    /// `cnt[(i*k + b)*cells + o]`: neighbours of `i` in block `b` with outcome `o`.
    cnt: Vec<u32>,
    logp: Vec<f64>,
}

impl LikState {
    fn new(net: &MultiplexNetwork, k: usize, z: Vec<usize>) -> Self {
        let n = net.n();
        let cells = 1 << net.d();
        let o = outcome_matrix(net);
        let mut cnt = vec![0u32; n * k * cells];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cnt[(i * k + z[j]) * cells + o[i * n + j] as usize] += 1;
                }
            }
        }
        let mut s = LikState { n, k, cells, o, z, cnt, logp: vec![0.0; k * k * cells] };
        s.refit();
        s
    }

    /// Block-pair tuple frequencies `N_ab[o]` and pair counts over unordered pairs.
    fn block_counts(&self) -> (Vec<f64>, Vec<f64>) {
        let (k, c) = (self.k, self.cells);
        let mut nab = vec![0.0; k * k * c];
        for i in 0..self.n {
            for b in 0..k {
                for o in 0..c {
                    nab[(self.z[i] * k + b) * c + o] += self.cnt[(i * k + b) * c + o] as f64;
                }
            }
        }
        let mut pairs = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                let s: f64 = nab[(a * k + b) * c..(a * k + b + 1) * c].iter().sum();
                pairs[a * k + b] = s;
            }
        }
        (nab, pairs)
    }

    fn refit(&mut self) {
        let (nab, pairs) = self.block_counts();
        let c = self.cells;
        for ab in 0..self.k * self.k {
            for o in 0..c {
                let p = if pairs[ab] > 0.0 { nab[ab * c + o] / pairs[ab] } else { 1.0 / c as f64 };
                self.logp[ab * c + o] = p.clamp(LOG_FLOOR, 1.0).ln();
            }
        }
    }

    /// Profile log-likelihood over unordered pairs at the current `θ̂`.
    fn loglik(&self) -> f64 {
        let (nab, _) = self.block_counts();
        let k = self.k;
        let c = self.cells;
        let mut l = 0.0;
        for a in 0..k {
            for b in 0..k {
                for o in 0..c {
                    l += 0.5 * nab[(a * k + b) * c + o] * self.logp[(a * k + b) * c + o];
                }
            }
        }
        l
    }

    fn node_score(&self, i: usize, block: usize) -> f64 {
        let (k, c) = (self.k, self.cells);
        let mut s = 0.0;
        for b in 0..k {
            let cnt = &self.cnt[(i * k + b) * c..(i * k + b + 1) * c];
            let lp = &self.logp[(block * k + b) * c..(block * k + b + 1) * c];
            for o in 0..c {
                if cnt[o] != 0 {
                    s += cnt[o] as f64 * lp[o];
                }
            }
        }
        s
    }

    fn relocate(&mut self, i: usize, to: usize) {
        let from = self.z[i];
        let (n, k, c) = (self.n, self.k, self.cells);
        for j in 0..n {
            if j != i {
                let o = self.o[i * n + j] as usize;
                self.cnt[(j * k + from) * c + o] -= 1;
                self.cnt[(j * k + to) * c + o] += 1;
            }
        }
        self.z[i] = to;
    }

    fn pair_lp(&self, a: usize, b: usize, o: usize) -> f64 {
        self.logp[(a * self.k + b) * self.cells + o]
    }
}

/// Fit trace: final assignment and the profile log-likelihood after each sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityFit {
    pub z: CommunityAssignment,
    pub loglik: Vec<f64>,
}

pub fn fit_communities(net: &MultiplexNetwork, k: usize, balanced: bool, seed: u64) -> Result<CommunityAssignment> {
    Ok(fit_communities_traced(net, k, balanced, seed)?.z)
}

/// Spectral initialization followed by greedy profile-likelihood ascent:
/// single-node moves, or pairwise swaps in balanced mode.
pub fn fit_communities_traced(net: &MultiplexNetwork, k: usize, balanced: bool, seed: u64) -> Result<CommunityFit> {
    let n = net.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("cannot fit K = {k} blocks to {n} nodes")));
    }
    if k == 1 {
        return Ok(CommunityFit { z: CommunityAssignment::new(1, vec![0; n])?, loglik: Vec::new() });
    }
    let init = spectral_init(net, k, balanced, seed);
    let mut st = LikState::new(net, k, init);
    let mut trace = vec![st.loglik()];
    for _ in 0..MAX_SWEEPS {
        let moved = if balanced { swap_sweep(&mut st) } else { move_sweep(&mut st) };
        st.refit();
        let l = st.loglik();
        let prev = *trace.last().unwrap();
        assert!(l >= prev - 1e-9 * (1.0 + prev.abs()), "profile likelihood decreased: {prev} -> {l}");
        trace.push(l);
        if !moved {
            break;
        }
    }
    let z = canonical_labels(&st.z, k, balanced);
    Ok(CommunityFit { z: CommunityAssignment::new(k, z)?, loglik: trace })
}

fn move_sweep(st: &mut LikState) -> bool {
    let mut sizes = vec![0usize; st.k];
    for &b in &st.z {
        sizes[b] += 1;
    }
    let mut moved = false;
    for i in 0..st.n {
        let cur = st.z[i];
        if sizes[cur] == 1 {
            continue;
        }
        let base = st.node_score(i, cur);
        let (best, gain) = (0..st.k)
            .filter(|&c| c != cur)
            .map(|c| (c, st.node_score(i, c) - base))
            .fold((cur, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain > MIN_GAIN {
            st.relocate(i, best);
            sizes[cur] -= 1;
            sizes[best] += 1;
            moved = true;
        }
    }
    moved
}

fn swap_sweep(st: &mut LikState) -> bool {
    let mut moved = false;
    let (n, k) = (st.n, st.k);
    for i in 0..n {
        let mut gains = vec![0.0; n * k];
        for j in 0..n {
            let base = st.node_score(j, st.z[j]);
            for c in 0..k {
                gains[j * k + c] = st.node_score(j, c) - base;
            }
        }
        let a = st.z[i];
        let mut best = None;
        let mut best_gain = MIN_GAIN;
        for j in 0..n {
            let c = st.z[j];
            if c == a {
                continue;
            }
            let o = st.o[i * n + j] as usize;
            let corr = (st.pair_lp(c, c, o) - st.pair_lp(a, c, o)) + (st.pair_lp(a, a, o) - st.pair_lp(c, a, o));
            let g = gains[i * k + c] + gains[j * k + a] - corr;
            if g > best_gain {
                best_gain = g;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            let c = st.z[j];
            st.relocate(i, c);
            st.relocate(j, a);
            moved = true;
        }
    }
    moved
}

/// Relabels blocks by first appearance; in balanced mode the block holding the
/// remainder becomes block `K`.
fn canonical_labels(z: &[usize], k: usize, balanced: bool) -> Vec<usize> {
    let mut sizes = vec![0usize; k];
    for &b in z {
        sizes[b] += 1;
    }
    let mut order: Vec<usize> = Vec::new();
    for &b in z {
        if !order.contains(&b) {
            order.push(b);
        }
    }
    for b in 0..k {
        if !order.contains(&b) {
            order.push(b);
        }
    }
    if balanced {
        let h = z.len() / k;
        if let Some(pos) = order.iter().position(|&b| sizes[b] > h) {
            let big = order.remove(pos);
            order.push(big);
        }
    }
    let mut map = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        map[old] = new;
    }
    z.iter().map(|&b| map[b]).collect()
}

/// Top-`K` eigenvectors of the mean adjacency, clustered by k-means
/// (size-constrained when balanced).
fn spectral_init(net: &MultiplexNetwork, k: usize, balanced: bool, seed: u64) -> Vec<usize> {
    let n = net.n();
    let d = net.d() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for layer in net.layers() {
        for (i, j) in layer.edges() {
            m[(i, j)] += 1.0 / d;
            m[(j, i)] += 1.0 / d;
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()).then(a.cmp(&b)));
    let points: Vec<Vec<f64>> = (0..n).map(|i| idx[..k].iter().map(|&c| eig.eigenvectors[(i, c)]).collect()).collect();
    let caps = if balanced { Some(CommunityAssignment::balanced_sizes(n, k)) } else { None };
    kmeans(&points, k, caps.as_deref(), seed)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn centroids(points: &[Vec<f64>], z: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut c = vec![vec![0.0; dim]; k];
    let mut cnt = vec![0usize; k];
    for (p, &b) in points.iter().zip(z) {
        cnt[b] += 1;
        for (x, y) in c[b].iter_mut().zip(p) {
            *x += y;
        }
    }
    for (row, &m) in c.iter_mut().zip(&cnt) {
        if m > 0 {
            row.iter_mut().for_each(|x| *x /= m as f64);
        }
    }
    c
}

fn assign(points: &[Vec<f64>], cents: &[Vec<f64>], caps: Option<&[usize]>) -> Vec<usize> {
    let k = cents.len();
    match caps {
        None => points
            .iter()
            .map(|p| (0..k).min_by(|&a, &b| dist2(p, &cents[a]).total_cmp(&dist2(p, &cents[b]))).unwrap())
            .collect(),
        Some(caps) => {
            let mut caps_sorted: Vec<usize> = caps.to_vec();
            caps_sorted.sort_unstable_by(|a, b| b.cmp(a));
            let free = assign(points, cents, None);
            let mut pop = vec![0usize; k];
            for &b in &free {
                pop[b] += 1;
            }
            let mut by_pop: Vec<usize> = (0..k).collect();
            by_pop.sort_by(|&a, &b| pop[b].cmp(&pop[a]).then(a.cmp(&b)));
            let mut cap = vec![0usize; k];
            for (c, &b) in caps_sorted.iter().zip(&by_pop) {
                cap[b] = *c;
            }
            let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(points.len() * k);
            for (i, p) in points.iter().enumerate() {
                for (b, c) in cents.iter().enumerate() {
                    cand.push((dist2(p, c), i, b));
                }
            }
            cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
            let mut z = vec![usize::MAX; points.len()];
            for (_, i, b) in cand {
                if z[i] == usize::MAX && cap[b] > 0 {
                    z[i] = b;
                    cap[b] -= 1;
                }
            }
            z
        }
    }
}

fn kmeans(points: &[Vec<f64>], k: usize, caps: Option<&[usize]>, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let mut cents = vec![points[rng.random_range(0..points.len())].clone()];
        while cents.len() < k {
            let w: Vec<f64> = points
                .iter()
                .map(|p| cents.iter().map(|c| dist2(p, c)).fold(f64::INFINITY, f64::min))
                .collect();
            let total: f64 = w.iter().sum();
            let pick = if total > 0.0 {
                let mut r = rng.random::<f64>() * total;
                let mut idx = points.len() - 1;
                for (i, x) in w.iter().enumerate() {
                    if r < *x {
                        idx = i;
                        break;
                    }
                    r -= x;
                }
                idx
            } else {
                rng.random_range(0..points.len())
            };
            cents.push(points[pick].clone());
        }
        let mut z = assign(points, &cents, caps);
        for _ in 0..100 {
            cents = centroids(points, &z, k);
            let nz = assign(points, &cents, caps);
            if nz == z {
                break;
            }
            z = nz;
        }
        let inertia: f64 = points.iter().zip(&z).map(|(p, &b)| dist2(p, &cents[b])).sum();
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, z));
        }
    }
    best.unwrap().1
}

/// Fraction of nodes labelled correctly under the best block permutation.
pub fn label_accuracy(truth: &CommunityAssignment, fit: &CommunityAssignment) -> f64 {
    let k = truth.k().max(fit.k());
    let perms = crate::motif::permutations(k);
    let n = truth.n();
    perms
        .iter()
        .map(|p| (0..n).filter(|&i| p[fit.block_of(i)] == truth.block_of(i)).count())
        .max()
        .unwrap_or(0) as f64
        / n as f64
}
