//! Piecewise-constant multivariate graphons and community assignments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multibern::{self, MomentVector, FEASIBLE_TOL};
use crate::subset::LayerSubset;

/// `θ^(u)` for layer subsets `u`: symmetric `K×K` matrices, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct BlockGraphonVector {
    d: usize,
    k: usize,
    h: usize,
    theta: BTreeMap<LayerSubset, Vec<f64>>,
}

impl BlockGraphonVector {
    /// Validates shape, symmetry and range; monotonicity and Bernoulli
    /// feasibility are checked separately by [`check_feasible`](Self::check_feasible).
    pub fn new(d: usize, k: usize, h: usize, theta: BTreeMap<LayerSubset, Vec<f64>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be positive".into()));
        }
        for (u, m) in &theta {
            if u.mask() >> d != 0 {
                return Err(Error::InvalidSubset(format!("subset {u} not valid for {d} layers")));
            }
            if m.len() != k * k {
                return Err(Error::InvalidArgument(format!("θ^({u}) has {} entries, expected {}", m.len(), k * k)));
            }
            for a in 0..k {
                for b in 0..k {
                    let x = m[a * k + b];
                    if !(0.0..=1.0).contains(&x) {
                        return Err(Error::Infeasible(format!("θ^({u})_({},{}) = {x} outside [0,1]", a + 1, b + 1)));
                    }
                    if x != m[b * k + a] {
                        return Err(Error::InvalidArgument(format!("θ^({u}) is not symmetric")));
                    }
                }
            }
        }
        Ok(BlockGraphonVector { d, k, h, theta })
    }

    /// Builds from nested `K×K` matrices.
    pub fn from_matrices(d: usize, h: usize, theta: BTreeMap<LayerSubset, Vec<Vec<f64>>>) -> Result<Self> {
        let k = theta.values().next().map(|m| m.len()).unwrap_or(0);
        let mut flat = BTreeMap::new();
        for (u, m) in theta {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(Error::InvalidArgument(format!("θ^({u}) is not {k}×{k}")));
            }
            flat.insert(u, m.into_iter().flatten().collect());
        }
        BlockGraphonVector::new(d, k, h, flat)
    }

    /// `K = 1` graphon with value `p[u]` for every subset.
    pub fn constant(d: usize, p: &BTreeMap<LayerSubset, f64>) -> Result<Self> {
        let theta = p.iter().map(|(&u, &x)| (u, vec![x])).collect();
        let w = BlockGraphonVector::new(d, 1, 1, theta)?;
        w.check_feasible()?;
        Ok(w)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn subsets(&self) -> impl Iterator<Item = LayerSubset> + '_ {
        self.theta.keys().copied()
    }

    pub fn matrix(&self, u: LayerSubset) -> Option<&[f64]> {
        self.theta.get(&u).map(|v| v.as_slice())
    }

    pub fn is_complete(&self) -> bool {
        LayerSubset::all(self.d).iter().all(|u| self.theta.contains_key(u))
    }

    /// `θ^(u)_{ab}` with 0-based blocks.
    pub fn get(&self, u: LayerSubset, a: usize, b: usize) -> f64 {
        self.theta[&u][a * self.k + b]
    }

    pub(crate) fn set(&mut self, u: LayerSubset, a: usize, b: usize, x: f64) {
        let k = self.k;
        let m = self.theta.get_mut(&u).expect("subset present");
        m[a * k + b] = x;
        m[b * k + a] = x;
    }

    pub fn as_matrices(&self) -> BTreeMap<LayerSubset, Vec<Vec<f64>>> {
        self.theta.iter().map(|(&u, m)| (u, m.chunks(self.k).map(|r| r.to_vec()).collect())).collect()
    }

    /// Monotonicity over the present subsets and, when every subset is
    /// present, multivariate Bernoulli feasibility of every block pair.
    pub fn check_feasible(&self) -> Result<()> {
        for (&u, mu) in &self.theta {
            for (&w, mw) in &self.theta {
                if u != w && u.is_subset_of(w) {
                    for i in 0..self.k * self.k {
                        if mw[i] > mu[i] + FEASIBLE_TOL {
                            return Err(Error::Infeasible(format!(
                                "θ^({w}) exceeds θ^({u}) at block pair ({},{})",
                                i / self.k + 1,
                                i % self.k + 1
                            )));
                        }
                    }
                }
            }
        }
        if self.is_complete() {
            for a in 0..self.k {
                for b in a..self.k {
                    let p = multibern::raw_probs(&self.moments(a, b).mu);
                    if let Some((i, x)) = p.iter().enumerate().find(|(_, x)| **x < -FEASIBLE_TOL) {
                        return Err(Error::Infeasible(format!(
                            "block pair ({},{}): outcome {} has probability {x}",
                            a + 1,
                            b + 1,
                            multibern::outcome_label(i, self.d)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Moment vector for block pair `(a, b)`; requires a complete subset map.
    pub fn moments(&self, a: usize, b: usize) -> MomentVector {
        let mut mu = vec![0.0; 1 << self.d];
        mu[0] = 1.0;
        for (u, m) in &self.theta {
            mu[u.mask() as usize] = m[a * self.k + b];
        }
        MomentVector { d: self.d, mu }
    }
}

/// Serialized form: `{"K":..,"h":..,"theta":{"1":[[..]],"12":[[..]]}}`.
#[derive(Serialize, Deserialize)]
pub struct GraphonFile {
    #[serde(rename = "K")]
    pub k: usize,
    pub h: usize,
    pub theta: BTreeMap<String, Vec<Vec<f64>>>,
}

impl BlockGraphonVector {
    pub fn to_file(&self) -> GraphonFile {
        let theta = self.as_matrices().into_iter().map(|(u, m)| (u.label(), m)).collect();
        GraphonFile { k: self.k, h: self.h, theta }
    }

    /// The layer count is the largest layer named by any key, unless `d` is given.
    pub fn from_file(file: GraphonFile, d: Option<usize>) -> Result<Self> {
        let mut parsed = BTreeMap::new();
        for (key, m) in file.theta {
            let u = LayerSubset::parse(&key, crate::subset::MAX_LAYERS)?;
            parsed.insert(u, m);
        }
        let d_found = parsed.keys().flat_map(|u| u.layers()).max().unwrap_or(1);
        let d = d.unwrap_or(d_found);
        let w = BlockGraphonVector::from_matrices(d, file.h, parsed)?;
        if w.k != file.k {
            return Err(Error::Parse(format!("K = {} but matrices are {}×{}", file.k, w.k, w.k)));
        }
        Ok(w)
    }
}

/// Block labels `z_i ∈ 0..K` (0-based internally).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CommunityAssignment {
    k: usize,
    z: Vec<usize>,
}

impl CommunityAssignment {
    pub fn new(k: usize, z: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("K must be positive".into()));
        }
        if let Some(&b) = z.iter().find(|&&b| b >= k) {
            return Err(Error::InvalidArgument(format!("label {} exceeds K = {k}", b + 1)));
        }
        Ok(CommunityAssignment { k, z })
    }

    /// From 1-based labels; `K` is the largest label.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidArgument("labels are 1-based".into()));
        }
        let k = labels.iter().copied().max().unwrap_or(1);
        CommunityAssignment::new(k, labels.iter().map(|l| l - 1).collect())
    }

    /// Contiguous blocks of `h = ⌊n/K⌋` nodes, block `K` absorbing the remainder.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("cannot split {n} nodes into {k} blocks")));
        }
        let h = n / k;
        CommunityAssignment::new(k, (0..n).map(|i| (i / h).min(k - 1)).collect())
    }

    /// Sizes `h, .., h, h + r` of the balanced design.
    pub fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
        let h = n / k;
        let mut s = vec![h; k];
        s[k - 1] += n - h * k;
        s
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.z
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.z[i]
    }

    /// 1-based labels.
    pub fn to_labels(&self) -> Vec<usize> {
        self.z.iter().map(|b| b + 1).collect()
    }

    /// Nodes of each block, ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &b) in self.z.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &b in &self.z {
            s[b] += 1;
        }
        s
    }

    pub fn is_balanced(&self) -> bool {
        let mut s = self.sizes();
        let want = CommunityAssignment::balanced_sizes(self.n(), self.k);
        s.sort_unstable();
        let mut w = want;
        w.sort_unstable();
        s == w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_layer(t1: f64, t2: f64, t12: f64) -> BlockGraphonVector {
        let p: BTreeMap<_, _> = [("1", t1), ("2", t2), ("12", t12)]
            .iter()
            .map(|(s, x)| (LayerSubset::parse(s, 2).unwrap(), *x))
            .collect();
        BlockGraphonVector::new(2, 1, 1, p.into_iter().map(|(u, x)| (u, vec![x])).collect()).unwrap()
    }

    #[test]
    fn feasibility() {
        assert!(two_layer(0.3, 0.4, 0.12).check_feasible().is_ok());
        assert!(two_layer(0.3, 0.4, 0.35).check_feasible().is_err());
        assert!(two_layer(0.8, 0.9, 0.5).check_feasible().is_err());
    }

    #[test]
    fn rejects_asymmetric() {
        let u = LayerSubset::singleton(1);
        let theta = BTreeMap::from([(u, vec![0.1, 0.2, 0.3, 0.1])]);
        assert!(BlockGraphonVector::new(1, 2, 1, theta).is_err());
    }

    #[test]
    fn balanced_assignment_sizes() {
        let z = CommunityAssignment::balanced(11, 3).unwrap();
        assert_eq!(z.sizes(), vec![3, 3, 5]);
        assert!(z.is_balanced());
        assert!(CommunityAssignment::balanced(2, 3).is_err());
    }

    #[test]
    fn file_round_trip() {
        let w = two_layer(0.3, 0.4, 0.12);
        let text = serde_json::to_string(&w.to_file()).unwrap();
        assert!(text.contains("\"12\""));
        let back = BlockGraphonVector::from_file(serde_json::from_str(&text).unwrap(), None).unwrap();
        assert_eq!(back, w);
    }
}

impl Serialize for BlockGraphonVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockGraphonVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = GraphonFile::deserialize(d)?;
        BlockGraphonVector::from_file(f, None).map_err(serde::de::Error::custom)
    }
}
