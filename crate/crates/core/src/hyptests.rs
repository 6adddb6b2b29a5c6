//! Structural-similarity and block-wise edge-independence tests, and the joint
//! confidence set for homomorphism densities.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    expected_count, mer_covariance, normalized_counts, quantile_norm, quantile_type7, regularity_set,
    regularity_set_for, CovarianceMode, SamplingStatistic, MIN_REPLICATES,
};
use crate::error::{Error, Result};
use crate::estimation::{moment_invert, placement_count, InvertKind};
use crate::genmodel::row_rng;
use crate::graphon::CommunityAssignment;
use crate::motif::{alternate_motif, Motif};
use crate::motifs::{count_motif, count_vector};
use crate::network::{intersection_adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

pub const GRID: usize = 64;
pub const STARTS: usize = 3;
pub const MAX_NEWTON: usize = 200;
pub const GRAD_TOL: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestName {
    Similarity,
    Independence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityDetails {
    pub layers: (usize, usize),
    pub counts: (u128, u128),
    pub sigma2: (f64, f64),
    pub exponents: (f64, f64),
    pub scaling: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDiagnostics {
    /// 1-based blocks, `a ≤ b`.
    pub a: usize,
    pub b: usize,
    pub motif: Motif,
    pub n_ab: usize,
    pub c_ab: f64,
    /// `X` on the first subset, the second subset and their union.
    pub counts: [u128; 3],
    pub theta_hat: [f64; 3],
    pub theta_star: (f64, f64),
    pub f: f64,
    /// Projected gradient norm of `f` at `θ*`.
    pub residual: f64,
    pub iterations: usize,
    /// 1 on the diagonal, 2 off it: the pair `(a,b)` and `(b,a)` both enter `D`.
    pub weight: f64,
    pub quantile: f64,
    pub reject: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceDetails {
    pub subsets: (LayerSubset, LayerSubset),
    pub blocks: Vec<BlockDiagnostics>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestDetails {
    Similarity(SimilarityDetails),
    Independence(IndependenceDetails),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: TestName,
    pub statistic: f64,
    pub quantile: f64,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub b: usize,
    pub reject: bool,
    pub details: TestDetails,
    pub seed: u64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha = {alpha} outside (0,1)")))
    }
}

fn check_b(b: usize) -> Result<()> {
    if b < MIN_REPLICATES {
        Err(Error::InsufficientReplicates(b))
    } else {
        Ok(())
    }
}

/// Similarity of layers `layers.0` and `layers.1` (1-based).
pub fn similarity_test(
    net: &MultiplexNetwork,
    f: &Motif,
    layers: (usize, usize),
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    if net.d() < 2 {
        return Err(Error::InvalidArgument(format!("similarity test needs d >= 2, got d = {}", net.d())));
    }
    let (l1, l2) = layers;
    if l1 == l2 || l1 == 0 || l2 == 0 || l1 > net.d() || l2 > net.d() {
        return Err(Error::InvalidArgument(format!("invalid layer pair ({l1},{l2}) for d = {}", net.d())));
    }
    check_alpha(alpha)?;
    check_b(b)?;
    let (s1, s2) = (LayerSubset::singleton(l1), LayerSubset::singleton(l2));
    let subsets = [s1, s2];
    let report = regularity_set_for(net, f, &subsets)?;
    let x1 = count_motif(net.layer(l1), f);
    let x2 = count_motif(net.layer(l2), f);
    let (r1, r2) = (report.scaling(f, s1), report.scaling(f, s2));
    let diff = if x1 >= x2 { (x1 - x2) as f64 } else { (x2 - x1) as f64 };
    let statistic = r1 * r2 * diff / (r1 * r1 + r2 * r2).sqrt();
    let sampler = SamplingStatistic::new(net, f, &report, Some(&subsets))?;
    let quantile = quantile_norm(&sampler.replicates(b, seed), &subsets, alpha)?;
    Ok(TestResult {
        name: TestName::Similarity,
        statistic,
        quantile,
        alpha,
        b,
        reject: statistic > quantile,
        details: TestDetails::Similarity(SimilarityDetails {
            layers,
            counts: (x1, x2),
            sigma2: (report.sigma2[&s1], report.sigma2[&s2]),
            exponents: (report.exponent(f, s1), report.exponent(f, s2)),
            scaling: (r1, r2),
        }),
        seed,
    })
}

/// Result of minimizing `g(x,y) = (m1-x^E)² + (m2-y^E)² + (m12-(xy)^E)²`
/// over `[0,1]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockSolution {
    pub x: f64,
    pub y: f64,
    pub g: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

struct Objective {
    m: [f64; 3],
    e: i32,
}

fn pw(x: f64, k: i32) -> f64 {
    if k <= 0 {
        1.0
    } else {
        x.powi(k)
    }
}

impl Objective {
    fn value(&self, x: f64, y: f64) -> f64 {
        let (xe, ye) = (pw(x, self.e), pw(y, self.e));
        (self.m[0] - xe).powi(2) + (self.m[1] - ye).powi(2) + (self.m[2] - xe * ye).powi(2)
    }

    fn derivatives(&self, x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let e = self.e as f64;
        let ee1 = e * (e - 1.0);
        let (xe, ye) = (pw(x, self.e), pw(y, self.e));
        let (xe1, ye1) = (e * pw(x, self.e - 1), e * pw(y, self.e - 1));
        let (xe2, ye2) = if ee1 == 0.0 { (0.0, 0.0) } else { (ee1 * pw(x, self.e - 2), ee1 * pw(y, self.e - 2)) };
        let r1 = self.m[0] - xe;
        let r2 = self.m[1] - ye;
        let r3 = self.m[2] - xe * ye;
        let (r3x, r3y) = (-xe1 * ye, -xe * ye1);
        let grad = [2.0 * (r1 * -xe1 + r3 * r3x), 2.0 * (r2 * -ye1 + r3 * r3y)];
        let hxx = 2.0 * (xe1 * xe1 - r1 * xe2 + r3x * r3x - r3 * xe2 * ye);
        let hyy = 2.0 * (ye1 * ye1 - r2 * ye2 + r3y * r3y - r3 * xe * ye2);
        let hxy = 2.0 * (r3x * r3y - r3 * xe1 * ye1);
        (grad, [[hxx, hxy], [hxy, hyy]])
    }
}

fn projected(grad: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let mut out = grad;
    for i in 0..2 {
        if (p[i] <= 0.0 && grad[i] > 0.0) || (p[i] >= 1.0 && grad[i] < 0.0) {
            out[i] = 0.0;
        }
    }
    out
}

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn newton(obj: &Objective, start: [f64; 2]) -> BlockSolution {
    let mut p = start;
    let mut g = obj.value(p[0], p[1]);
    let mut iterations = 0;
    loop {
        let (grad, h) = obj.derivatives(p[0], p[1]);
        let pg = projected(grad, p);
        if norm2(pg) < GRAD_TOL || iterations >= MAX_NEWTON {
            return BlockSolution { x: p[0], y: p[1], g, grad_norm: norm2(pg), iterations };
        }
        iterations += 1;
        // Free coordinates only; bound-active ones stay put.
        let free = [pg[0] != 0.0, pg[1] != 0.0];
        let mut dir = [0.0; 2];
        let mut lambda = 0.0;
        for _ in 0..60 {
            let (a, bb, d) = (h[0][0] + lambda, h[0][1], h[1][1] + lambda);
            let step = match free {
                [true, true] => {
                    let det = a * d - bb * bb;
                    if a > 0.0 && det > 0.0 {
                        Some([-(d * pg[0] - bb * pg[1]) / det, -(a * pg[1] - bb * pg[0]) / det])
                    } else {
                        None
                    }
                }
                [true, false] if a > 0.0 => Some([-pg[0] / a, 0.0]),
                [false, true] if d > 0.0 => Some([0.0, -pg[1] / d]),
                _ => None,
            };
            if let Some(s) = step {
                dir = s;
                break;
            }
            lambda = if lambda == 0.0 { 1e-8 + (h[0][0].abs() + h[1][1].abs()) * 1e-6 } else { lambda * 10.0 };
        }
        if dir == [0.0, 0.0] {
            dir = [-pg[0], -pg[1]];
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let q = [(p[0] + t * dir[0]).clamp(0.0, 1.0), (p[1] + t * dir[1]).clamp(0.0, 1.0)];
            let gq = obj.value(q[0], q[1]);
            if gq <= g {
                moved = q != p;
                p = q;
                g = gq;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            let (grad, _) = obj.derivatives(p[0], p[1]);
            let pg = projected(grad, p);
            return BlockSolution { x: p[0], y: p[1], g, grad_norm: norm2(pg), iterations };
        }
    }
}

/// Minimizes `g` for normalized counts `m = X / c`: grid scan over cell
/// centres, then projected damped Newton from the best cells.
pub fn solve_block(m: [f64; 3], edges: usize) -> BlockSolution {
    let obj = Objective { m, e: edges as i32 };
    let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(GRID * GRID);
    for i in 0..GRID {
        for j in 0..GRID {
            let (x, y) = ((i as f64 + 0.5) / GRID as f64, (j as f64 + 0.5) / GRID as f64);
            cells.push((obj.value(x, y), i, j));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut best: Option<BlockSolution> = None;
    for &(_, i, j) in cells.iter().take(STARTS) {
        let s = newton(&obj, [(i as f64 + 0.5) / GRID as f64, (j as f64 + 0.5) / GRID as f64]);
        if best.is_none_or(|b| s.g < b.g) {
            best = Some(s);
        }
    }
    best.expect("at least one start")
}

struct BlockInput {
    a: usize,
    b: usize,
    motif: Motif,
    n_ab: usize,
    c: f64,
    /// Pair-coverage factor `P N_e²` for off-diagonal blocks.
    coverage: Option<f64>,
    counts: [u128; 3],
    theta_hat: [f64; 3],
}

fn block_covariance(blk: &BlockInput) -> Result<Matrix3<f64>> {
    let [t1, t2, t12] = blk.theta_hat;
    let union_of = |i: usize, j: usize| if i == j && i < 2 { [t1, t2][i] } else { t12 };
    let th = |i: usize| [t1, t2, t12][i];
    let v = blk.motif.vertex_count();
    let e = blk.motif.edge_count() as i32;
    let mut s = Matrix3::zeros();
    match blk.coverage {
        None => {
            let (u1, u2) = (LayerSubset::singleton(1), LayerSubset::singleton(2));
            let u12 = u1.union(u2);
            let p = BTreeMap::from([(u1, t1), (u2, t2), (u12, t12)]);
            let m = mer_covariance(&p, &blk.motif, CovarianceMode::Enumerated)?;
            let order = [u1, u2, u12];
            for i in 0..3 {
                for j in 0..3 {
                    s[(i, j)] = m.get(order[i], order[j]).expect("all three subsets present");
                }
            }
        }
        Some(cov) => {
            let norm = (blk.n_ab as f64).powi(2 * (v as i32 - 1));
            for i in 0..3 {
                for j in 0..3 {
                    let phi = union_of(i, j) - th(i) * th(j);
                    s[(i, j)] = cov * pw(th(i) * th(j), e - 1) * phi / norm;
                }
            }
        }
    }
    Ok(s)
}

fn psd_sqrt(s: Matrix3<f64>) -> Matrix3<f64> {
    let eig = SymmetricEigen::new(s);
    let d = Matrix3::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Edge-wise independence of the layer subsets `subsets.0` and `subsets.1`
/// given the communities `z`. Diagonal blocks count `f_diag`, off-diagonal
/// blocks count `f_offdiag`, which must be its own bichromatic alternate.
#[allow(clippy::too_many_arguments)]
pub fn independence_test(
    net: &MultiplexNetwork,
    z: &CommunityAssignment,
    f_offdiag: &Motif,
    f_diag: &Motif,
    subsets: (LayerSubset, LayerSubset),
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_b(b)?;
    let (u1, u2) = subsets;
    if u1.is_empty() || u2.is_empty() || !u1.union(u2).is_subset_of(LayerSubset::full(net.d())) {
        return Err(Error::InvalidSubset(format!("subsets {u1} and {u2} not in Λ_{}", net.d())));
    }
    if u1.mask() & u2.mask() != 0 {
        return Err(Error::InvalidSubset(format!("subsets {u1} and {u2} overlap")));
    }
    if z.n() != net.n() {
        return Err(Error::InvalidArgument("assignment length differs from node count".into()));
    }
    if alternate_motif(f_offdiag) != *f_offdiag {
        return Err(Error::InvalidMotif("off-diagonal motif is not its own bichromatic alternate".into()));
    }
    let u12 = u1.union(u2);
    let adjs = [intersection_adjacency(net, u1)?, intersection_adjacency(net, u2)?, intersection_adjacency(net, u12)?];
    let blocks = z.blocks();
    let k = z.k();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let inputs: Vec<BlockInput> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (na, nb) = (blocks[a].len(), blocks[b].len());
            let (motif, n_ab, kind) =
                if a == b { (f_diag, na, InvertKind::Monochrome) } else { (f_offdiag, na + nb, InvertKind::Alternate) };
            let (c, _) = placement_count(na, nb, motif, kind);
            if c <= 0.0 || n_ab < motif.vertex_count() {
                return Err(Error::DegeneratePool(format!(
                    "block pair ({},{}) of sizes ({na},{nb}) too small for a {}-vertex motif",
                    a + 1,
                    b + 1,
                    motif.vertex_count()
                )));
            }
            let mut counts = [0u128; 3];
            let mut theta_hat = [0.0; 3];
            for (i, adj) in adjs.iter().enumerate() {
                counts[i] = if a == b {
                    count_motif(&adj.induced(&blocks[a]), motif)
                } else {
                    count_motif(&adj.cross(&blocks[a], &blocks[b]), motif)
                };
                theta_hat[i] = moment_invert(counts[i], na, nb, motif, kind)?;
            }
            let coverage = (a != b).then(|| {
                let p = (na * nb) as f64;
                let ne = motif.edge_count() as f64 * c / p;
                p * ne * ne
            });
            Ok(BlockInput { a, b, motif: motif.clone(), n_ab, c, coverage, counts, theta_hat })
        })
        .collect::<Result<_>>()?;

    let mut diag = Vec::with_capacity(inputs.len());
    let mut roots = Vec::with_capacity(inputs.len());
    for blk in &inputs {
        let m = [blk.counts[0] as f64 / blk.c, blk.counts[1] as f64 / blk.c, blk.counts[2] as f64 / blk.c];
        let sol = solve_block(m, blk.motif.edge_count());
        let scale = blk.c * blk.c / (blk.n_ab as f64).powi(2 * (blk.motif.vertex_count() as i32 - 1));
        let residual = scale * sol.grad_norm;
        if !(residual < RESIDUAL_TOL * blk.c) {
            return Err(Error::NonConvergence(format!(
                "block pair ({},{}): residual {residual:e} after {} iterations",
                blk.a + 1,
                blk.b + 1,
                sol.iterations
            )));
        }
        roots.push(psd_sqrt(block_covariance(blk)?));
        diag.push(BlockDiagnostics {
            a: blk.a + 1,
            b: blk.b + 1,
            motif: blk.motif.clone(),
            n_ab: blk.n_ab,
            c_ab: blk.c,
            counts: blk.counts,
            theta_hat: blk.theta_hat,
            theta_star: (sol.x, sol.y),
            f: scale * sol.g,
            residual,
            iterations: sol.iterations,
            weight: if blk.a == blk.b { 1.0 } else { 2.0 },
            quantile: 0.0,
            reject: false,
        });
    }
    let statistic = diag.iter().map(|d| d.weight * d.f).sum::<f64>().sqrt();

    // One replicate: a standard normal triple per block pair, in block order.
    let draws: Vec<Vec<f64>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = row_rng(seed, r as u64);
            roots
                .iter()
                .map(|l| {
                    let eps = Vector3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
                    (l * eps).norm_squared()
                })
                .collect()
        })
        .collect();
    let mut composite: Vec<f64> =
        draws.iter().map(|row| row.iter().zip(&diag).map(|(s, d)| d.weight * s).sum::<f64>().sqrt()).collect();
    let quantile = quantile_type7(&mut composite, 1.0 - alpha);
    for (i, d) in diag.iter_mut().enumerate() {
        let mut col: Vec<f64> = draws.iter().map(|row| row[i].sqrt()).collect();
        d.quantile = quantile_type7(&mut col, 1.0 - alpha);
        d.reject = d.f.sqrt() > d.quantile;
    }
    Ok(TestResult {
        name: TestName::Independence,
        statistic,
        quantile,
        alpha,
        b,
        reject: statistic > quantile,
        details: TestDetails::Independence(IndependenceDetails { subsets, blocks: diag }),
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceCheck {
    pub norm: f64,
    pub quantile: f64,
    pub inside: bool,
    pub z: BTreeMap<LayerSubset, f64>,
}

/// `‖Z_F‖₂` with reference means `(n)_v/|Aut| · t_k`, against the joint
/// `(1-α)` quantile over `Λ_d`.
pub fn confidence_set_details(
    net: &MultiplexNetwork,
    f: &Motif,
    t: &BTreeMap<LayerSubset, f64>,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<ConfidenceCheck> {
    check_alpha(alpha)?;
    check_b(b)?;
    let all = LayerSubset::all(net.d());
    let mut mean = BTreeMap::new();
    for &k in &all {
        let tk = *t.get(&k).ok_or_else(|| Error::InvalidSubset(format!("no candidate density for subset {k}")))?;
        if !(0.0..=1.0).contains(&tk) {
            return Err(Error::InvalidArgument(format!("density {tk} for subset {k} outside [0,1]")));
        }
        mean.insert(k, expected_count(net.n(), f, tk));
    }
    let report = regularity_set(net, f);
    let zf = normalized_counts(&count_vector(net, f), &mean, &report)?;
    let norm = zf.z.values().map(|x| x * x).sum::<f64>().sqrt();
    let sampler = SamplingStatistic::new(net, f, &report, Some(&all))?;
    let quantile = quantile_norm(&sampler.replicates(b, seed), &all, alpha)?;
    Ok(ConfidenceCheck { norm, quantile, inside: norm <= quantile, z: zf.z })
}

pub fn confidence_set_check(
    net: &MultiplexNetwork,
    f: &Motif,
    t: &BTreeMap<LayerSubset, f64>,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<bool> {
    Ok(confidence_set_details(net, f, t, alpha, b, seed)?.inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmodel::{parse_mer_params, sample_mer};
    use crate::motif::builtin_motif;
    use crate::network::Adjacency;

    #[test]
    fn identical_layers_never_reject() {
        let base = sample_mer(40, 1, &parse_mer_params("1=0.5", 1).unwrap(), 4).unwrap();
        let net = MultiplexNetwork::new(vec![base.layer(1).clone(), base.layer(1).clone()]).unwrap();
        let r = similarity_test(&net, &builtin_motif("triangle").unwrap(), (1, 2), 0.05, 200, 1).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.reject);
    }

    #[test]
    fn similarity_rejects_bad_arguments() {
        let net = sample_mer(10, 1, &parse_mer_params("1=0.5", 1).unwrap(), 4).unwrap();
        let e = builtin_motif("edge").unwrap();
        assert!(similarity_test(&net, &e, (1, 2), 0.05, 200, 1).is_err());
        let net = sample_mer(10, 2, &parse_mer_params("1=0.5,2=0.5,12=0.25", 2).unwrap(), 4).unwrap();
        assert!(similarity_test(&net, &e, (1, 1), 0.05, 200, 1).is_err());
        assert!(matches!(similarity_test(&net, &e, (1, 2), 0.05, 50, 1), Err(Error::InsufficientReplicates(50))));
    }

    #[test]
    fn solver_recovers_exact_null_point() {
        for e in 1..=4 {
            let (x, y) = (0.6f64, 0.35f64);
            let m = [x.powi(e), y.powi(e), (x * y).powi(e)];
            let s = solve_block(m, e as usize);
            assert!(s.g < 1e-20, "E={e}: g={}", s.g);
            assert!((s.x - x).abs() < 1e-6 && (s.y - y).abs() < 1e-6, "E={e}: {s:?}");
        }
    }

    #[test]
    fn solver_handles_boundary_minimum() {
        let s = solve_block([0.0, 0.5, 0.0], 1);
        assert_eq!(s.x, 0.0);
        assert!((s.y - 0.5).abs() < 1e-9);
        assert!(s.grad_norm < GRAD_TOL);
    }

    #[test]
    fn offdiag_motif_must_be_alternate() {
        let net = sample_mer(12, 2, &parse_mer_params("1=0.5,2=0.5,12=0.25", 2).unwrap(), 4).unwrap();
        let z = CommunityAssignment::balanced(12, 2).unwrap();
        let tri = builtin_motif("triangle").unwrap();
        let subsets = (LayerSubset::singleton(1), LayerSubset::singleton(2));
        assert!(matches!(
            independence_test(&net, &z, &tri, &tri, subsets, 0.05, 200, 1),
            Err(Error::InvalidMotif(_))
        ));
    }

    #[test]
    fn tiny_blocks_are_rejected() {
        let net = MultiplexNetwork::new(vec![Adjacency::complete(5), Adjacency::complete(5)]).unwrap();
        let z = CommunityAssignment::from_labels(&[1, 1, 2, 2, 2]).unwrap();
        let tri = builtin_motif("triangle").unwrap();
        let star = builtin_motif("twostar").unwrap();
        let subsets = (LayerSubset::singleton(1), LayerSubset::singleton(2));
        assert!(matches!(
            independence_test(&net, &z, &star, &tri, subsets, 0.05, 200, 1),
            Err(Error::DegeneratePool(_))
        ));
    }

    #[test]
    fn empirical_densities_lie_inside_confidence_set() {
        let net = sample_mer(30, 2, &parse_mer_params("1=0.3,2=0.4,12=0.12", 2).unwrap(), 2).unwrap();
        let f = builtin_motif("triangle").unwrap();
        let t: BTreeMap<_, _> = LayerSubset::all(2)
            .into_iter()
            .map(|k| (k, crate::motifs::empirical_density(&intersection_adjacency(&net, k).unwrap(), &f)))
            .collect();
        let c = confidence_set_details(&net, &f, &t, 0.05, 200, 5).unwrap();
        assert!(c.norm < 1e-9);
        assert!(c.inside);
    }
}
