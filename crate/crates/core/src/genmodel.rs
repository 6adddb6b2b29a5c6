//! Seeded generators for multiplex Erdős–Rényi, multiplex SBM and
//! block-exchangeable networks.
//!
//! Row `i` draws its pairs `(i, j)`, `j > i`, in order from its own ChaCha8
//! stream `i` under the master seed, so the output does not depend on the
//! number of worker threads. Latent positions use stream `u64::MAX`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{BlockGraphonVector, CommunityAssignment};
use crate::multibern::{moments_to_probs, TupleSampler};
use crate::network::{words_for, Adjacency, MultiplexNetwork};
use crate::subset::LayerSubset;

const LATENT_STREAM: u64 = u64::MAX;

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct LatentDraw {
    pub xi: Vec<f64>,
}

pub(crate) fn row_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn samplers(w: &BlockGraphonVector) -> Result<Vec<TupleSampler>> {
    if !w.is_complete() {
        return Err(Error::InvalidArgument("θ must be given for every layer subset".into()));
    }
    w.check_feasible()?;
    let k = w.k();
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            out.push(moments_to_probs(&w.moments(a, b))?.sampler());
        }
    }
    Ok(out)
}

fn generate(n: usize, d: usize, k: usize, z: &[usize], samplers: &[TupleSampler], seed: u64) -> MultiplexNetwork {
    let words = words_for(n);
    let upper: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = row_rng(seed, i as u64);
            let mut bits = vec![0u64; d * words];
            let row = &samplers[z[i] * k..(z[i] + 1) * k];
            for j in (i + 1)..n {
                let o = row[z[j]].outcome(rng.random());
                let mut m = o;
                while m != 0 {
                    let l = m.trailing_zeros() as usize;
                    bits[l * words + j / 64] |= 1 << (j % 64);
                    m &= m - 1;
                }
            }
            bits
        })
        .collect();
    let layers = (0..d)
        .into_par_iter()
        .map(|l| {
            let mut rows = vec![0u64; n * words];
            for (i, bits) in upper.iter().enumerate() {
                let src = &bits[l * words..(l + 1) * words];
                rows[i * words..(i + 1) * words].copy_from_slice(src);
            }
            for (i, bits) in upper.iter().enumerate() {
                for (w, &word) in bits[l * words..(l + 1) * words].iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        let j = w * 64 + x.trailing_zeros() as usize;
                        rows[j * words + i / 64] |= 1 << (i % 64);
                        x &= x - 1;
                    }
                }
            }
            Adjacency::from_rows(n, rows)
        })
        .collect();
    MultiplexNetwork::new(layers).expect("consistent layers")
}

/// Multiplex Erdős–Rényi: every pair draws its edge tuple independently from
/// the moment vector `p` (one entry per subset of `Λ_d`).
pub fn sample_mer(n: usize, d: usize, p: &BTreeMap<LayerSubset, f64>, seed: u64) -> Result<MultiplexNetwork> {
    let w = BlockGraphonVector::constant(d, p)?;
    let s = samplers(&w)?;
    Ok(generate(n, d, 1, &vec![0; n], &s, seed))
}

/// Multiplex SBM with the given assignment, or the balanced contiguous one.
pub fn sample_msbm(
    n: usize,
    theta: &BlockGraphonVector,
    z: Option<&CommunityAssignment>,
    seed: u64,
) -> Result<(MultiplexNetwork, CommunityAssignment)> {
    let z = match z {
        Some(z) => {
            if z.n() != n {
                return Err(Error::InvalidArgument(format!("assignment has {} labels for {n} nodes", z.n())));
            }
            if z.k() != theta.k() {
                return Err(Error::InvalidArgument(format!("assignment has K = {}, θ has K = {}", z.k(), theta.k())));
            }
            z.clone()
        }
        None => CommunityAssignment::balanced(n, theta.k())?,
    };
    let s = samplers(theta)?;
    Ok((generate(n, theta.d(), theta.k(), z.labels(), &s, seed), z))
}

/// Exchangeable network from an equal-measure block graphon: `ξ_i ~ U[0,1]`
/// and node `i` joins block `⌈K ξ_i⌉`.
pub fn sample_exchangeable(
    n: usize,
    w: &BlockGraphonVector,
    seed: u64,
) -> Result<(MultiplexNetwork, LatentDraw, CommunityAssignment)> {
    let s = samplers(w)?;
    let k = w.k();
    let mut rng = row_rng(seed, LATENT_STREAM);
    let xi: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let labels: Vec<usize> = xi.iter().map(|&x| ((k as f64 * x).ceil() as usize).clamp(1, k) - 1).collect();
    let z = CommunityAssignment::new(k, labels)?;
    let net = generate(n, w.d(), k, z.labels(), &s, seed);
    Ok((net, LatentDraw { xi }, z))
}

/// Parses `1=0.3,2=0.4,12=0.12` into a subset map for `d` layers.
pub fn parse_mer_params(s: &str, d: usize) -> Result<BTreeMap<LayerSubset, f64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("expected subset=value, got {part:?}")))?;
        let u = LayerSubset::parse(k, d).map_err(|e| Error::Parse(e.to_string()))?;
        let x: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad probability {v:?}")))?;
        out.insert(u, x);
    }
    if let Some(u) = LayerSubset::all(d).into_iter().find(|u| !out.contains_key(u)) {
        return Err(Error::Parse(format!("missing value for subset {u}")));
    }
    Ok(out)
}
