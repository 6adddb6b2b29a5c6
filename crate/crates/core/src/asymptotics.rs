//! Limiting covariances of normalized motif counts, the empirical regularity
//! statistics, the Gaussian multiplier sampling statistic and its quantiles.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genmodel::row_rng;
use crate::graphon::BlockGraphonVector;
use crate::motif::{copies_containing_edge12, Motif};
use crate::motifs::{empirical_density, join_from_one_point, mean_kernel, one_point_densities, two_point_matrix, CountVector};
use crate::network::{intersection_adjacency, Adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

pub const MIN_REPLICATES: usize = 100;
pub const DEFAULT_REPLICATES: usize = 1000;
const MAX_BLOCK_ASSIGNMENTS: f64 = 1e8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceMode {
    /// `|I_{F,{1,2}}|² (p_i p_j)^{|E|-1} φ_ij / (2 (v-2)!²)` with `I_{F,{1,2}}`
    /// enumerated.
    #[default]
    Enumerated,
    /// `(p_i p_j)^{|E|-1} (p_i ∧ p_j - p_i p_j) / (2 |Aut(F)|²)`.
    Literal,
}

/// Square matrix indexed by layer subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetMatrix {
    pub subsets: Vec<LayerSubset>,
    pub values: Vec<Vec<f64>>,
}

impl SubsetMatrix {
    pub fn get(&self, i: LayerSubset, j: LayerSubset) -> Option<f64> {
        let a = self.subsets.iter().position(|&s| s == i)?;
        let b = self.subsets.iter().position(|&s| s == j)?;
        Some(self.values[a][b])
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn lookup(p: &BTreeMap<LayerSubset, f64>, u: LayerSubset) -> Result<f64> {
    p.get(&u).copied().ok_or_else(|| Error::InvalidArgument(format!("missing parameter for subset {u}")))
}

/// Covariance of the joint edge indicators: `E[A^(i) A^(j)] - p_i p_j`, where
/// the product of indicators is the indicator of the union subset. For nested
/// subsets this is `min(p_i, p_j) - p_i p_j`.
fn phi_joint(p: &BTreeMap<LayerSubset, f64>, i: LayerSubset, j: LayerSubset) -> Result<f64> {
    Ok(lookup(p, i.union(j))? - lookup(p, i)? * lookup(p, j)?)
}

/// Limiting covariance of `Z_F = (X_F - E X_F) / n^{v-1}` under a multiplex
/// Erdős–Rényi model with moments `p` (one per subset of `Λ_d`).
pub fn mer_covariance(p: &BTreeMap<LayerSubset, f64>, f: &Motif, mode: CovarianceMode) -> Result<SubsetMatrix> {
    let subsets: Vec<LayerSubset> = {
        let mut s: Vec<_> = p.keys().copied().collect();
        s.sort_by_key(|u| (u.len(), u.layers()));
        s
    };
    let e = f.edge_count() as i32;
    let v = f.vertex_count();
    let i12 = copies_containing_edge12(f)?.len() as f64;
    let mut values = vec![vec![0.0; subsets.len()]; subsets.len()];
    for (a, &i) in subsets.iter().enumerate() {
        for (b, &j) in subsets.iter().enumerate() {
            let (pi, pj) = (p[&i], p[&j]);
            let base = (pi * pj).powi(e - 1);
            values[a][b] = match mode {
                CovarianceMode::Enumerated => {
                    i12 * i12 * base * phi_joint(p, i, j)? / (2.0 * factorial(v - 2).powi(2))
                }
                CovarianceMode::Literal => {
                    let aut = f.aut_count() as f64;
                    base * (pi.min(pj) - pi * pj) / (2.0 * aut * aut)
                }
            };
        }
    }
    Ok(SubsetMatrix { subsets, values })
}

fn block_assignments(k: usize, len: usize) -> Result<usize> {
    let total = (k as f64).powi(len as i32);
    if total > MAX_BLOCK_ASSIGNMENTS {
        return Err(Error::SizeLimit(format!("{k}^{len} block assignments")));
    }
    Ok(total as usize)
}

fn decode(mut code: usize, k: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = code % k;
        code /= k;
    }
}

fn matrix_of(w: &BlockGraphonVector, u: LayerSubset) -> Result<&[f64]> {
    w.matrix(u).ok_or_else(|| Error::InvalidArgument(format!("graphon has no entry for subset {u}")))
}

/// `Σ_{F' ∈ I_{F,{1,2}}} t⁻_{1,2}(α, β, F', W)` for every block pair, as a `K×K`
/// row-major table. Blocks have measure `1/K`.
fn tminus_sums(w: &[f64], k: usize, f: &Motif, copies: &[Vec<(usize, usize)>]) -> Result<Vec<f64>> {
    let v = f.vertex_count();
    let rest = block_assignments(k, v - 2)?;
    let scale = (k as f64).powi(v as i32 - 2);
    let mut out = vec![0.0; k * k];
    let mut blk = vec![0usize; v];
    for alpha in 0..k {
        for beta in 0..k {
            let mut total = 0.0;
            for code in 0..rest {
                blk[0] = alpha;
                blk[1] = beta;
                decode(code, k, &mut blk[2..]);
                for copy in copies {
                    let mut prod = 1.0;
                    for &(x, y) in copy {
                        if (x, y) != (1, 2) {
                            prod *= w[blk[x - 1] * k + blk[y - 1]];
                        }
                    }
                    total += prod;
                }
            }
            out[alpha * k + beta] = total / scale;
        }
    }
    Ok(out)
}

/// `σ_ij = Ω_ij / (2 (v-2)!²)` for a block graphon with equal-measure blocks.
pub fn graphon_covariance(w: &BlockGraphonVector, f: &Motif, i: LayerSubset, j: LayerSubset) -> Result<f64> {
    let k = w.k();
    let copies = copies_containing_edge12(f)?;
    let (wi, wj, wij) = (matrix_of(w, i)?, matrix_of(w, j)?, matrix_of(w, i.union(j))?);
    let ti = tminus_sums(wi, k, f, &copies)?;
    let tj = tminus_sums(wj, k, f, &copies)?;
    let mut omega = 0.0;
    for ab in 0..k * k {
        omega += ti[ab] * tj[ab] * (wij[ab] - wi[ab] * wj[ab]);
    }
    omega /= (k * k) as f64;
    Ok(omega / (2.0 * factorial(f.vertex_count() - 2).powi(2)))
}

/// `t_a(α)` for every motif vertex `a` and block `α`: `out[a][α]`.
fn block_one_point(w: &[f64], k: usize, f: &Motif) -> Result<Vec<Vec<f64>>> {
    let v = f.vertex_count();
    let total = block_assignments(k, v)?;
    let scale = (k as f64).powi(v as i32 - 1);
    let mut out = vec![vec![0.0; k]; v];
    let mut blk = vec![0usize; v];
    for code in 0..total {
        decode(code, k, &mut blk);
        let prod: f64 = f.edges().iter().map(|&(x, y)| w[blk[x - 1] * k + blk[y - 1]]).product();
        if prod != 0.0 {
            for a in 0..v {
                out[a][blk[a]] += prod / scale;
            }
        }
    }
    Ok(out)
}

/// `σ²(k) = |Aut(F)|^{-2} [Σ_{a,b} t(F ⊕_{a,b} F, W_(k)) - v² t(F, W_(k))²]`.
pub fn theoretical_sigma2(w: &BlockGraphonVector, f: &Motif, k: LayerSubset) -> Result<f64> {
    let kb = w.k();
    let ta = block_one_point(matrix_of(w, k)?, kb, f)?;
    let v = f.vertex_count();
    let mut join = 0.0;
    for a in 0..v {
        for b in 0..v {
            join += ta[a].iter().zip(&ta[b]).map(|(x, y)| x * y).sum::<f64>() / kb as f64;
        }
    }
    let t: f64 = ta[0].iter().sum::<f64>() / kb as f64;
    let aut = f.aut_count() as f64;
    Ok((join - (v * v) as f64 * t * t) / (aut * aut))
}

/// Empirical `σ²` on a single adjacency, floored at zero.
pub fn empirical_sigma2_adj(adj: &Adjacency, f: &Motif) -> f64 {
    let v = f.vertex_count();
    if v > adj.n() {
        return 0.0;
    }
    let t = one_point_densities(adj, f);
    let mut join = 0.0;
    for a in 0..v {
        for b in 0..v {
            join += join_from_one_point(&t, a, b);
        }
    }
    let th = empirical_density(adj, f);
    let aut = f.aut_count() as f64;
    ((join - (v * v) as f64 * th * th) / (aut * aut)).max(0.0)
}

pub fn empirical_sigma2(net: &MultiplexNetwork, f: &Motif, k: LayerSubset) -> Result<f64> {
    Ok(empirical_sigma2_adj(&intersection_adjacency(net, k)?, f))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub n: usize,
    pub sigma2: BTreeMap<LayerSubset, f64>,
    /// Subsets with `√n σ̂² > 1`.
    pub rejected: BTreeSet<LayerSubset>,
}

impl RegularityReport {
    pub fn is_rejected(&self, k: LayerSubset) -> bool {
        self.rejected.contains(&k)
    }

    /// `v - 1/2` for rejected subsets, `v - 1` otherwise.
    pub fn exponent(&self, f: &Motif, k: LayerSubset) -> f64 {
        let v = f.vertex_count() as f64;
        if self.is_rejected(k) {
            v - 0.5
        } else {
            v - 1.0
        }
    }

    /// `r_k = n^{-exponent}`.
    pub fn scaling(&self, f: &Motif, k: LayerSubset) -> f64 {
        (self.n as f64).powf(-self.exponent(f, k))
    }
}

pub fn regularity_set(net: &MultiplexNetwork, f: &Motif) -> RegularityReport {
    regularity_set_for(net, f, &LayerSubset::all(net.d())).expect("subsets from Λ_d")
}

pub fn regularity_set_for(net: &MultiplexNetwork, f: &Motif, subsets: &[LayerSubset]) -> Result<RegularityReport> {
    let n = net.n();
    let mut sigma2 = BTreeMap::new();
    let mut rejected = BTreeSet::new();
    for &k in subsets {
        let s = empirical_sigma2(net, f, k)?;
        if (n as f64).sqrt() * s > 1.0 {
            rejected.insert(k);
        }
        sigma2.insert(k, s);
    }
    Ok(RegularityReport { n, sigma2, rejected })
}

enum Part {
    /// `(1/√n) Σ_v w_v Z_v` with `w_v = t̂(v) - t̄`.
    Linear(Vec<f64>),
    /// `(1/n) (Zᵀ M Z - tr M)` with `M = Ŵ - W̄` (diagonal `-W̄`).
    Quadratic(Vec<f64>, f64),
}

/// Precomputed weights of the multiplier sampling statistic for a set of subsets.
pub struct SamplingStatistic {
    n: usize,
    subsets: Vec<LayerSubset>,
    parts: Vec<Part>,
}

/// Replicate draws, one row per replicate, columns aligned with `subsets`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replicates {
    pub subsets: Vec<LayerSubset>,
    pub values: Vec<Vec<f64>>,
}

impl SamplingStatistic {
    /// Subsets default to those in the report.
    pub fn new(net: &MultiplexNetwork, f: &Motif, report: &RegularityReport, subsets: Option<&[LayerSubset]>) -> Result<Self> {
        let n = net.n();
        let subsets: Vec<LayerSubset> = match subsets {
            Some(s) => s.to_vec(),
            None => report.sigma2.keys().copied().collect(),
        };
        let aut = f.aut_count() as f64;
        let parts = subsets
            .iter()
            .map(|&k| {
                let adj = intersection_adjacency(net, k)?;
                if report.is_rejected(k) {
                    let t = one_point_densities(&adj, f);
                    let th: Vec<f64> = (0..n).map(|v| t.iter().map(|ta| ta[v]).sum::<f64>() / aut).collect();
                    let bar = th.iter().sum::<f64>() / n as f64;
                    Ok(Part::Linear(th.into_iter().map(|x| x - bar).collect()))
                } else {
                    let mut m = two_point_matrix(&adj, f);
                    let bar = mean_kernel(&m, n);
                    m.iter_mut().for_each(|x| *x -= bar);
                    let trace = -bar * n as f64;
                    Ok(Part::Quadratic(m, trace))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SamplingStatistic { n, subsets, parts })
    }

    pub fn subsets(&self) -> &[LayerSubset] {
        &self.subsets
    }

    /// Evaluates every subset at one multiplier vector `z`.
    pub fn evaluate(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let nf = n as f64;
        self.parts
            .iter()
            .map(|p| match p {
                Part::Linear(w) => w.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() / nf.sqrt(),
                Part::Quadratic(m, trace) => {
                    let mut q = 0.0;
                    for u in 0..n {
                        let row = &m[u * n..(u + 1) * n];
                        let s: f64 = row.iter().zip(z).map(|(a, b)| a * b).sum();
                        q += z[u] * s;
                    }
                    (q - trace) / nf
                }
            })
            .collect()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.n).map(|_| rng.sample(StandardNormal)).collect();
        self.evaluate(&z)
    }

    /// `b` replicates; replicate `r` uses ChaCha8 stream `r` under `seed`.
    pub fn replicates(&self, b: usize, seed: u64) -> Replicates {
        let values = (0..b)
            .into_par_iter()
            .map(|r| self.draw(&mut row_rng(seed, r as u64)))
            .collect();
        Replicates { subsets: self.subsets.clone(), values }
    }
}

/// One replicate of `Ẑ_F`, sharing the multiplier draw across all subsets.
pub fn sampling_statistic<R: Rng + ?Sized>(
    net: &MultiplexNetwork,
    f: &Motif,
    report: &RegularityReport,
    rng: &mut R,
) -> Result<BTreeMap<LayerSubset, f64>> {
    let s = SamplingStatistic::new(net, f, report, None)?;
    Ok(s.subsets.iter().copied().zip(s.draw(rng)).collect())
}

/// Type-7 (linear interpolation) quantile of `xs` at probability `prob`.
pub fn quantile_type7(xs: &mut [f64], prob: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let h = (xs.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(xs.len() - 1);
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

/// `(1-α)` quantile of the Euclidean norm of each replicate restricted to `subset`.
pub fn quantile_norm(reps: &Replicates, subset: &[LayerSubset], alpha: f64) -> Result<f64> {
    if reps.values.len() < MIN_REPLICATES {
        return Err(Error::InsufficientReplicates(reps.values.len()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [0,1]")));
    }
    let cols: Vec<usize> = subset
        .iter()
        .map(|s| {
            reps.subsets
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| Error::InvalidSubset(format!("no replicates for subset {s}")))
        })
        .collect::<Result<_>>()?;
    let mut norms: Vec<f64> =
        reps.values.iter().map(|r| cols.iter().map(|&c| r[c] * r[c]).sum::<f64>().sqrt()).collect();
    Ok(quantile_type7(&mut norms, 1.0 - alpha))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCountVector {
    pub motif: Motif,
    pub z: BTreeMap<LayerSubset, f64>,
    pub exponent: BTreeMap<LayerSubset, f64>,
}

/// `Z_F(k) = (X_F(G^(k)) - mean[k]) / n^{exponent[k]}`.
pub fn normalized_counts(
    counts: &CountVector,
    reference_mean: &BTreeMap<LayerSubset, f64>,
    report: &RegularityReport,
) -> Result<NormalizedCountVector> {
    let mut z = BTreeMap::new();
    let mut exponent = BTreeMap::new();
    for (&k, &x) in &counts.counts {
        let m = lookup(reference_mean, k)?;
        let e = report.exponent(&counts.motif, k);
        z.insert(k, (x as f64 - m) / (report.n as f64).powf(e));
        exponent.insert(k, e);
    }
    Ok(NormalizedCountVector { motif: counts.motif.clone(), z, exponent })
}

/// `(n)_v / |Aut(F)| · t`: the expected count for homomorphism density `t`.
pub fn expected_count(n: usize, f: &Motif, t: f64) -> f64 {
    let v = f.vertex_count();
    if v > n {
        return 0.0;
    }
    (0..v).map(|i| (n - i) as f64).product::<f64>() / f.aut_count() as f64 * t
}
