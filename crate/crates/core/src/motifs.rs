//! Exact injective motif counting on bit-packed adjacency, with the
//! vertex- and pair-conditioned densities used by the variance and
//! sampling-statistic machinery.
//!
//! All counts go through one backtracking engine: motif vertices are placed in
//! a greedy most-constrained order, candidates for the next vertex are the AND
//! of the rows of its already-placed neighbours, and the final vertex is
//! counted by popcount.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::CommunityAssignment;
pub use crate::motif::alternate_motif;
use crate::motif::Motif;
use crate::network::{intersection_adjacency, Adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

/// Placement order and, for each position, the earlier positions it must be
/// adjacent to together with the layers the adjacency is required in.
struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<(usize, u32)>>,
    fixed: usize,
}

impl Plan {
    /// `req[i*k + j]` is the layer mask required between motif vertices `i` and `j`
    /// (0-based). The first `fixed.len()` positions are the given vertices.
    fn new(k: usize, req: &[u32], fixed: &[usize]) -> Plan {
        let deg = |i: usize| (0..k).filter(|&j| req[i * k + j] != 0).count();
        let mut order: Vec<usize> = fixed.to_vec();
        let mut placed = vec![false; k];
        for &f in fixed {
            placed[f] = true;
        }
        while order.len() < k {
            let next = (0..k)
                .filter(|&i| !placed[i])
                .max_by_key(|&i| {
                    let links = order.iter().filter(|&&j| req[i * k + j] != 0).count();
                    (links, deg(i), std::cmp::Reverse(i))
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        let back = (0..k)
            .map(|p| (0..p).filter_map(|q| {
                let m = req[order[p] * k + order[q]];
                (m != 0).then_some((q, m))
            }).collect())
            .collect();
        Plan { order, back, fixed: fixed.len() }
    }
}

struct Engine<'a> {
    layers: &'a [&'a Adjacency],
    n: usize,
    words: usize,
    plan: &'a Plan,
    injective: bool,
}

impl Engine<'_> {
    fn candidates(&self, pos: usize, assign: &[usize], used: &[u64], out: &mut [u64]) {
        let back = &self.plan.back[pos];
        if back.is_empty() {
            out.iter_mut().for_each(|w| *w = !0);
            let rem = self.n % 64;
            if rem != 0 {
                out[self.words - 1] = (1u64 << rem) - 1;
            }
        } else {
            let mut first = true;
            for &(q, mask) in back {
                let mut m = mask;
                while m != 0 {
                    let l = m.trailing_zeros() as usize;
                    m &= m - 1;
                    let row = self.layers[l].row(assign[q]);
                    if first {
                        out.copy_from_slice(row);
                        first = false;
                    } else {
                        out.iter_mut().zip(row).for_each(|(a, b)| *a &= b);
                    }
                }
            }
        }
        if self.injective {
            out.iter_mut().zip(used).for_each(|(a, b)| *a &= !b);
        }
    }

    fn search(&self, pos: usize, assign: &mut [usize], used: &mut [u64], scratch: &mut [Vec<u64>]) -> u128 {
        let (cur, rest) = scratch.split_first_mut().unwrap();
        self.candidates(pos, assign, used, cur);
        let last = pos + 1 == self.plan.order.len();
        if pos < self.plan.fixed {
            let node = assign[pos];
            if cur[node / 64] >> (node % 64) & 1 == 0 {
                return 0;
            }
            if last {
                return 1;
            }
            let fresh = used[node / 64] >> (node % 64) & 1 == 0;
            used[node / 64] |= 1 << (node % 64);
            let r = self.search(pos + 1, assign, used, rest);
            if fresh {
                used[node / 64] &= !(1 << (node % 64));
            }
            return r;
        }
        if last {
            return cur.iter().map(|w| w.count_ones() as u128).sum();
        }
        let mut total = 0;
        for w in 0..self.words {
            let mut x = cur[w];
            while x != 0 {
                let node = w * 64 + x.trailing_zeros() as usize;
                x &= x - 1;
                assign[pos] = node;
                used[w] |= 1 << (node % 64);
                total += self.search(pos + 1, assign, used, rest);
                used[w] &= !(1 << (node % 64));
            }
        }
        total
    }

    /// Count with the fixed positions bound to `roots`.
    fn run(&self, roots: &[usize]) -> u128 {
        let k = self.plan.order.len();
        if k == 0 {
            return 1;
        }
        let mut assign = vec![0; k];
        assign[..roots.len()].copy_from_slice(roots);
        let mut used = vec![0u64; self.words];
        let mut scratch = vec![vec![0u64; self.words]; k];
        self.search(0, &mut assign, &mut used, &mut scratch)
    }

    /// Unrooted count, parallel over the node taken by the first position.
    fn run_parallel(&self) -> u128 {
        let k = self.plan.order.len();
        if k == 0 {
            return 1;
        }
        if self.injective && k > self.n {
            return 0;
        }
        if k == 1 {
            return self.n as u128;
        }
        (0..self.n)
            .into_par_iter()
            .map(|first| {
                let mut assign = vec![0; k];
                assign[0] = first;
                let mut used = vec![0u64; self.words];
                used[first / 64] |= 1 << (first % 64);
                let mut scratch = vec![vec![0u64; self.words]; k];
                self.search(1, &mut assign, &mut used, &mut scratch[1..])
            })
            .sum()
    }
}

fn motif_req(f: &Motif) -> Vec<u32> {
    let k = f.vertex_count();
    let mut req = vec![0u32; k * k];
    for &(a, b) in f.edges() {
        req[(a - 1) * k + (b - 1)] = 1;
        req[(b - 1) * k + (a - 1)] = 1;
    }
    req
}

/// Number of injective homomorphisms `V(F) → [n]` (ordered tuples).
pub fn count_injective(adj: &Adjacency, f: &Motif) -> u128 {
    if f.vertex_count() > adj.n() {
        return 0;
    }
    let plan = Plan::new(f.vertex_count(), &motif_req(f), &[]);
    let layers = [adj];
    Engine { layers: &layers, n: adj.n(), words: adj.words(), plan: &plan, injective: true }.run_parallel()
}

/// `X_F`: copies of `F` in `adj` (injective tuples divided by `|Aut(F)|`).
pub fn count_motif(adj: &Adjacency, f: &Motif) -> u128 {
    let raw = count_injective(adj, f);
    let aut = f.aut_count() as u128;
    assert_eq!(raw % aut, 0, "injective count not divisible by |Aut|");
    raw / aut
}

pub fn count_cross_layer(net: &MultiplexNetwork, k: LayerSubset, f: &Motif) -> Result<u128> {
    Ok(count_motif(&intersection_adjacency(net, k)?, f))
}

/// `X_F(G^(k))` for every `k ∈ Λ_d`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CountVector {
    pub motif: Motif,
    pub counts: BTreeMap<LayerSubset, u128>,
}

pub fn count_vector(net: &MultiplexNetwork, f: &Motif) -> CountVector {
    let counts = LayerSubset::all(net.d())
        .into_iter()
        .map(|k| (k, count_cross_layer(net, k, f).expect("subset from Λ_d")))
        .collect();
    CountVector { motif: f.clone(), counts }
}

/// The aligned vector-motif count as an exact fraction `raw / divisor`;
/// the tuple sum need not be divisible by `∏ |Aut(F_l)|`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AlignedCount {
    pub raw: u128,
    pub divisor: u128,
}

impl AlignedCount {
    pub fn as_f64(&self) -> f64 {
        self.raw as f64 / self.divisor as f64
    }
}

/// Sum over injective `k`-tuples (`k` the largest motif size) of
/// `∏_l ∏_{(i,j) ∈ E(F_l)} A^(l)_{s_i s_j}`, over `∏_l |Aut(F_l)|`.
pub fn count_aligned_vector(net: &MultiplexNetwork, motifs: &[Motif]) -> Result<AlignedCount> {
    if motifs.len() != net.d() {
        return Err(Error::InvalidArgument(format!("{} motifs for {} layers", motifs.len(), net.d())));
    }
    let k = motifs.iter().map(|f| f.vertex_count()).max().unwrap_or(0);
    let divisor = motifs.iter().map(|f| f.aut_count() as u128).product();
    if k > net.n() {
        return Ok(AlignedCount { raw: 0, divisor });
    }
    let mut req = vec![0u32; k * k];
    for (l, f) in motifs.iter().enumerate() {
        for &(a, b) in f.edges() {
            req[(a - 1) * k + (b - 1)] |= 1 << l;
            req[(b - 1) * k + (a - 1)] |= 1 << l;
        }
    }
    let plan = Plan::new(k, &req, &[]);
    let layers: Vec<&Adjacency> = net.layers().iter().collect();
    let raw = Engine { layers: &layers, n: net.n(), words: net.layer(1).words(), plan: &plan, injective: true }
        .run_parallel();
    Ok(AlignedCount { raw, divisor })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BicolorKind {
    Red,
    Blue,
    Alternate,
}

/// Red (`F` inside block `a`), blue (inside block `b`) or alternate (`F^alt`
/// with every edge between `a` and `b`) counts on `A^(k)`. Blocks are 0-based.
/// With `a == b` the alternate count is the count of `F^alt` inside block `a`.
pub fn count_bicolored(
    net: &MultiplexNetwork,
    k: LayerSubset,
    z: &CommunityAssignment,
    a: usize,
    b: usize,
    f: &Motif,
    kind: BicolorKind,
) -> Result<u128> {
    if a >= z.k() || b >= z.k() {
        return Err(Error::InvalidArgument(format!("block out of range 1..={}", z.k())));
    }
    if z.n() != net.n() {
        return Err(Error::InvalidArgument("assignment length differs from node count".into()));
    }
    let adj = intersection_adjacency(net, k)?;
    let blocks = z.blocks();
    Ok(match kind {
        BicolorKind::Red => count_motif(&adj.induced(&blocks[a]), f),
        BicolorKind::Blue => count_motif(&adj.induced(&blocks[b]), f),
        BicolorKind::Alternate => {
            let alt = alternate_motif(f);
            if a == b {
                count_motif(&adj.induced(&blocks[a]), &alt)
            } else {
                count_motif(&adj.cross(&blocks[a], &blocks[b]), &alt)
            }
        }
    })
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// `t̂(F, G) = |Aut(F)| X_F / (n)_v`.
pub fn empirical_density(adj: &Adjacency, f: &Motif) -> f64 {
    let v = f.vertex_count();
    if v > adj.n() {
        return 0.0;
    }
    count_injective(adj, f) as f64 / falling(adj.n(), v)
}

fn rooted_engine<'a>(layers: &'a [&'a Adjacency], plan: &'a Plan, injective: bool) -> Engine<'a> {
    Engine { layers, n: layers[0].n(), words: layers[0].words(), plan, injective }
}

/// `t̃_a(v)`: injective homomorphisms with motif vertex `a` (1-based) sent to
/// node `v` (0-based), over `n^{v-1}`.
pub fn one_point_density(v: usize, a: usize, f: &Motif, adj: &Adjacency) -> f64 {
    let plan = Plan::new(f.vertex_count(), &motif_req(f), &[a - 1]);
    let layers = [adj];
    let c = rooted_engine(&layers, &plan, true).run(&[v]);
    c as f64 / (adj.n() as f64).powi(f.vertex_count() as i32 - 1)
}

/// `t̃_a(v)` for every motif vertex and node: `out[a-1][v]`.
pub fn one_point_densities(adj: &Adjacency, f: &Motif) -> Vec<Vec<f64>> {
    let vc = f.vertex_count();
    let req = motif_req(f);
    let layers = [adj];
    let scale = (adj.n() as f64).powi(vc as i32 - 1);
    (0..vc)
        .map(|a| {
            let plan = Plan::new(vc, &req, &[a]);
            let eng = rooted_engine(&layers, &plan, true);
            (0..adj.n()).into_par_iter().map(|v| eng.run(&[v]) as f64 / scale).collect()
        })
        .collect()
}

/// `t̂(v) = (1/|Aut|) Σ_a t̃_a(v)` for every node.
pub fn vertex_densities(adj: &Adjacency, f: &Motif) -> Vec<f64> {
    let t = one_point_densities(adj, f);
    let aut = f.aut_count() as f64;
    (0..adj.n()).map(|v| t.iter().map(|ta| ta[v]).sum::<f64>() / aut).collect()
}

/// `t̃_{a,b}((u,v))`: homomorphisms with `a ↦ u`, `b ↦ v`, the remaining
/// vertices free, over `n^{v-2}`; the `(a,b)` factor is `A_uv` when `(a,b)` is
/// an edge of `F` and 1 otherwise.
fn pair_plans(f: &Motif) -> Vec<((usize, usize), Plan)> {
    let vc = f.vertex_count();
    let req = motif_req(f);
    let mut out = Vec::new();
    for a in 0..vc {
        for b in 0..vc {
            if a != b {
                out.push(((a, b), Plan::new(vc, &req, &[a, b])));
            }
        }
    }
    out
}

/// `Ŵ_F((u,v))` for `u ≠ v` (0-based nodes).
pub fn two_point_kernel(u: usize, v: usize, f: &Motif, adj: &Adjacency) -> Result<f64> {
    if u == v {
        return Err(Error::InvalidArgument(format!("two-point kernel needs distinct nodes, got ({u},{u})")));
    }
    if f.vertex_count() < 2 {
        return Ok(0.0);
    }
    let layers = [adj];
    let scale = (adj.n() as f64).powi(f.vertex_count() as i32 - 2);
    let sum: u128 = pair_plans(f).iter().map(|(_, p)| rooted_engine(&layers, p, false).run(&[u, v])).sum();
    Ok(sum as f64 / scale / (2.0 * f.aut_count() as f64))
}

/// Row-major `n×n` matrix of `Ŵ_F((u,v))`, zero on the diagonal.
pub fn two_point_matrix(adj: &Adjacency, f: &Motif) -> Vec<f64> {
    let n = adj.n();
    if f.vertex_count() < 2 {
        return vec![0.0; n * n];
    }
    let plans = pair_plans(f);
    let layers = [adj];
    let norm = (n as f64).powi(f.vertex_count() as i32 - 2) * 2.0 * f.aut_count() as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = vec![0.0; n];
            for (v, slot) in row.iter_mut().enumerate().skip(u + 1) {
                let s: u128 = plans.iter().map(|(_, p)| rooted_engine(&layers, p, false).run(&[u, v])).sum();
                *slot = s as f64 / norm;
            }
            row
        })
        .collect();
    let mut m = vec![0.0; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            m[u * n + v] = rows[u][v];
            m[v * n + u] = rows[u][v];
        }
    }
    m
}

/// `W̄_F = n^{-2} Σ_{u,v} Ŵ_F((u,v))`.
pub fn mean_kernel(kernel: &[f64], n: usize) -> f64 {
    kernel.iter().sum::<f64>() / (n as f64 * n as f64)
}

/// `(1/n) Σ_v t̃_a(v) t̃_b(v)` (1-based motif vertices).
pub fn vertex_join_density(a: usize, b: usize, f: &Motif, adj: &Adjacency) -> f64 {
    let t = one_point_densities(adj, f);
    join_from_one_point(&t, a - 1, b - 1)
}

pub(crate) fn join_from_one_point(t: &[Vec<f64>], a: usize, b: usize) -> f64 {
    let n = t[a].len();
    t[a].iter().zip(&t[b]).map(|(x, y)| x * y).sum::<f64>() / n as f64
}
