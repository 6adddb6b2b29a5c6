//! Teugels' representation of the multivariate Bernoulli law.
//!
//! Vectors of length `2^d` are indexed by outcome bitmask: entry `m` holds the
//! moment `E[∏_{i ∈ m} X_i]` or the probability of the outcome with exactly
//! the layers in `m` present. Layer 1 is the least significant bit, so entry
//! `m` is Teugels' index `k = 1 + m`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::BlockGraphonVector;
use crate::subset::{LayerSubset, MAX_LAYERS};

/// Entries below this are an infeasibility error.
pub const INFEASIBLE_TOL: f64 = 1e-9;
/// Entries below zero but above `-INFEASIBLE_TOL` are clamped; feasibility
/// checks use this tolerance.
pub const FEASIBLE_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct MomentVector {
    pub d: usize,
    pub mu: Vec<f64>,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ProbVector {
    pub d: usize,
    pub p: Vec<f64>,
    /// Set when negative entries were clamped or the vector renormalized.
    pub clamped: bool,
}

impl MomentVector {
    pub fn new(d: usize, mu: Vec<f64>) -> Result<Self> {
        if d > MAX_LAYERS || mu.len() != 1 << d {
            return Err(Error::InvalidArgument(format!("moment vector of length {} for d = {d}", mu.len())));
        }
        Ok(MomentVector { d, mu })
    }

    pub fn get(&self, k: LayerSubset) -> f64 {
        self.mu[k.mask() as usize]
    }
}

impl ProbVector {
    pub fn new(d: usize, p: Vec<f64>) -> Result<Self> {
        if d > MAX_LAYERS || p.len() != 1 << d {
            return Err(Error::InvalidArgument(format!("probability vector of length {} for d = {d}", p.len())));
        }
        if let Some((i, &x)) = p.iter().enumerate().find(|(_, x)| **x < -FEASIBLE_TOL || !x.is_finite()) {
            return Err(Error::Infeasible(format!("outcome {} has probability {x}", outcome_label(i, d))));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > FEASIBLE_TOL {
            return Err(Error::Infeasible(format!("probabilities sum to {s}")));
        }
        Ok(ProbVector { d, p: p.into_iter().map(|x| x.max(0.0)).collect(), clamped: false })
    }

    /// Cumulative sums in index order, for inverse-CDF sampling.
    pub fn sampler(&self) -> TupleSampler {
        let mut acc = 0.0;
        let cdf = self.p.iter().map(|x| {
            acc += x;
            acc
        });
        TupleSampler { cdf: cdf.collect() }
    }
}

/// Outcome as the `d`-digit string `k_1 k_2 .. k_d`.
pub fn outcome_label(m: usize, d: usize) -> String {
    (0..d).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn check_moments(mu: &MomentVector) -> Result<()> {
    if mu.mu.len() != 1 << mu.d {
        return Err(Error::InvalidArgument("moment vector length mismatch".into()));
    }
    if (mu.mu[0] - 1.0).abs() > FEASIBLE_TOL {
        return Err(Error::Infeasible(format!("leading moment is {}, expected 1", mu.mu[0])));
    }
    if let Some((i, x)) = mu.mu.iter().enumerate().find(|(_, x)| !(-FEASIBLE_TOL..=1.0 + FEASIBLE_TOL).contains(*x)) {
        return Err(Error::Infeasible(format!("moment {} = {x} outside [0,1]", outcome_label(i, mu.d))));
    }
    Ok(())
}

/// Applies `[[1,-1],[0,1]]` along every bit, without clamping.
pub fn raw_probs(mu: &[f64]) -> Vec<f64> {
    let mut x = mu.to_vec();
    let len = x.len();
    let mut bit = 1;
    while bit < len {
        for j in 0..len {
            if j & bit == 0 {
                x[j] -= x[j | bit];
            }
        }
        bit <<= 1;
    }
    x
}

/// `p = [[1,-1],[0,1]]^{⊗d} μ` in `O(d 2^d)`.
pub fn moments_to_probs(mu: &MomentVector) -> Result<ProbVector> {
    check_moments(mu)?;
    let mut p = raw_probs(&mu.mu);
    let mut clamped = false;
    for (i, x) in p.iter_mut().enumerate() {
        if *x < -INFEASIBLE_TOL {
            return Err(Error::Infeasible(format!("outcome {} has probability {x}", outcome_label(i, mu.d))));
        }
        if *x < 0.0 {
            if *x < -FEASIBLE_TOL {
                clamped = true;
            }
            *x = 0.0;
        }
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > FEASIBLE_TOL {
        clamped = true;
        p.iter_mut().for_each(|x| *x /= s);
    }
    Ok(ProbVector { d: mu.d, p, clamped })
}

/// Inverse transform `μ = [[1,1],[0,1]]^{⊗d} p`.
pub fn probs_to_moments(p: &ProbVector) -> MomentVector {
    let mut x = p.p.clone();
    let len = x.len();
    let mut bit = 1;
    while bit < len {
        for j in 0..len {
            if j & bit == 0 {
                x[j] += x[j | bit];
            }
        }
        bit <<= 1;
    }
    MomentVector { d: p.d, mu: x }
}

/// Nearest-feasible repair of an estimated moment vector: negative cells are
/// set to zero and the vector renormalized. `clamped` reports whether anything
/// changed beyond `FEASIBLE_TOL`.
pub fn project_feasible(mu: &MomentVector) -> (ProbVector, MomentVector) {
    let mut p = raw_probs(&mu.mu);
    let mut clamped = false;
    for x in p.iter_mut() {
        if *x < 0.0 {
            clamped |= *x < -FEASIBLE_TOL;
            *x = 0.0;
        }
    }
    let s: f64 = p.iter().sum();
    if s <= 0.0 {
        p.iter_mut().for_each(|x| *x = 0.0);
        p[0] = 1.0;
        clamped = true;
    } else if (s - 1.0).abs() > FEASIBLE_TOL {
        clamped = true;
        p.iter_mut().for_each(|x| *x /= s);
    }
    let pv = ProbVector { d: mu.d, p, clamped };
    let m = probs_to_moments(&pv);
    (pv, m)
}

/// Moment vector of the edge-indicator tuple for a pair in blocks `(a, b)`
/// (0-based): `1` at index 0 and `θ^(u)_{ab}` at index `mask(u)`.
pub fn graphon_moments(w: &BlockGraphonVector, a: usize, b: usize) -> Result<MomentVector> {
    let d = w.d();
    let mut mu = vec![0.0; 1 << d];
    mu[0] = 1.0;
    for u in LayerSubset::all(d) {
        let m = w.matrix(u).ok_or_else(|| Error::InvalidArgument(format!("missing θ for subset {u}")))?;
        mu[u.mask() as usize] = m[a * w.k() + b];
    }
    let mv = MomentVector { d, mu };
    moments_to_probs(&mv)?;
    Ok(mv)
}

/// Inverse-CDF sampler over the `2^d` outcome cells in index order.
#[derive(Clone, Debug)]
pub struct TupleSampler {
    cdf: Vec<f64>,
}

impl TupleSampler {
    pub fn outcome(&self, u: f64) -> u32 {
        let last = self.cdf.len() - 1;
        self.cdf.iter().position(|&c| u < c).unwrap_or(last) as u32
    }
}

pub fn sample_edge_tuple<R: Rng + ?Sized>(p: &ProbVector, rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    p.sampler().outcome(u)
}
