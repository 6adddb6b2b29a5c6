//! Bit-packed symmetric adjacency matrices and multiplex networks.

use crate::error::{Error, Result};
use crate::subset::{LayerSubset, MAX_LAYERS};

/// Symmetric loop-free adjacency over `0..n`, one bit row per vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Adjacency {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Adjacency { n, words, rows: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        let mut a = Adjacency::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                a.add_edge(i, j);
            }
        }
        a
    }

    /// Builds from 0-based edges; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Adjacency::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!("edge ({i},{j}) outside {n} vertices")));
            }
            if i == j {
                return Err(Error::InvalidArgument(format!("self-loop at {i}")));
            }
            a.add_edge(i, j);
        }
        Ok(a)
    }

    pub(crate) fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        let words = words_for(n);
        debug_assert_eq!(rows.len(), n * words);
        Adjacency { n, words, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j && i < self.n && j < self.n);
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.neighbors(i) {
                if j > i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(i))
    }

    /// Entry-wise product with another adjacency on the same vertex set.
    pub fn and(&self, other: &Adjacency) -> Adjacency {
        assert_eq!(self.n, other.n);
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect();
        Adjacency::from_rows(self.n, rows)
    }

    /// Subgraph induced on `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Adjacency {
        let mut a = Adjacency::empty(nodes.len());
        for (x, &i) in nodes.iter().enumerate() {
            for (y, &j) in nodes.iter().enumerate().skip(x + 1) {
                if self.has_edge(i, j) {
                    a.add_edge(x, y);
                }
            }
        }
        a
    }

    /// Bipartite subgraph keeping only edges between `left` and `right`,
    /// relabelled with `left` first.
    pub fn cross(&self, left: &[usize], right: &[usize]) -> Adjacency {
        let m = left.len();
        let mut a = Adjacency::empty(m + right.len());
        for (x, &i) in left.iter().enumerate() {
            for (y, &j) in right.iter().enumerate() {
                if self.has_edge(i, j) {
                    a.add_edge(x, m + y);
                }
            }
        }
        a
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Adjacency {
        let mut a = Adjacency::empty(self.n);
        for (i, j) in self.edges() {
            a.add_edge(perm[i], perm[j]);
        }
        a
    }

    pub fn to_dense(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.has_edge(i, j)).collect()).collect()
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                None
            } else {
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + b)
            }
        })
    })
}

/// `d` layers on a shared vertex set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiplexNetwork {
    n: usize,
    layers: Vec<Adjacency>,
}

impl MultiplexNetwork {
    pub fn new(layers: Vec<Adjacency>) -> Result<Self> {
        if layers.is_empty() || layers.len() > MAX_LAYERS {
            return Err(Error::InvalidArgument(format!(
                "layer count must be in 1..={MAX_LAYERS}, got {}",
                layers.len()
            )));
        }
        let n = layers[0].n();
        if layers.iter().any(|l| l.n() != n) {
            return Err(Error::InvalidArgument("layers disagree on vertex count".into()));
        }
        Ok(MultiplexNetwork { n, layers })
    }

    /// Builds from 0-based pairs with a layer bitmask each.
    pub fn from_masks(n: usize, d: usize, pairs: &[(usize, usize, u32)]) -> Result<Self> {
        if d == 0 || d > MAX_LAYERS {
            return Err(Error::InvalidArgument(format!("layer count {d} out of range")));
        }
        let mut layers = vec![Adjacency::empty(n); d];
        for &(i, j, mask) in pairs {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidArgument(format!("bad pair ({i},{j})")));
            }
            if mask >> d != 0 {
                return Err(Error::InvalidArgument(format!("mask {mask} outside {d} layers")));
            }
            for (l, layer) in layers.iter_mut().enumerate() {
                if mask >> l & 1 == 1 {
                    layer.add_edge(i, j);
                }
            }
        }
        MultiplexNetwork::new(layers)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.layers.len()
    }

    /// 1-based layer access.
    pub fn layer(&self, l: usize) -> &Adjacency {
        &self.layers[l - 1]
    }

    pub fn layers(&self) -> &[Adjacency] {
        &self.layers
    }

    /// Bitmask of layers containing edge `(i, j)`.
    pub fn edge_mask(&self, i: usize, j: usize) -> u32 {
        let mut m = 0;
        for (l, layer) in self.layers.iter().enumerate() {
            if i != j && layer.has_edge(i, j) {
                m |= 1 << l;
            }
        }
        m
    }

    /// Nonzero-mask pairs `(i, j, mask)` with `i < j`, lexicographic.
    pub fn pairs(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let m = self.edge_mask(i, j);
                if m != 0 {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    pub fn intersection(&self, k: LayerSubset) -> Result<Adjacency> {
        intersection_adjacency(self, k)
    }

    pub fn induced(&self, nodes: &[usize]) -> MultiplexNetwork {
        MultiplexNetwork { n: nodes.len(), layers: self.layers.iter().map(|l| l.induced(nodes)).collect() }
    }

    pub fn permuted(&self, perm: &[usize]) -> MultiplexNetwork {
        MultiplexNetwork { n: self.n, layers: self.layers.iter().map(|l| l.permuted(perm)).collect() }
    }
}

/// `A^(k)`: entry-wise product of the layers in `S(k)`.
pub fn intersection_adjacency(net: &MultiplexNetwork, k: LayerSubset) -> Result<Adjacency> {
    if k.mask() >> net.d() != 0 {
        return Err(Error::InvalidSubset(format!("subset {k} not valid for {} layers", net.d())));
    }
    let mut it = k.layers().into_iter();
    let first = it.next().ok_or_else(|| Error::InvalidSubset("empty subset".into()))?;
    let mut acc = net.layer(first).clone();
    for l in it {
        acc = acc.and(net.layer(l));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_loop_free() {
        let a = Adjacency::from_edges(70, &[(0, 69), (3, 64), (5, 6)]).unwrap();
        assert!(a.has_edge(69, 0) && a.has_edge(64, 3));
        assert_eq!(a.edge_count(), 3);
        assert!(Adjacency::from_edges(3, &[(1, 1)]).is_err());
        assert_eq!(a.edges(), vec![(0, 69), (3, 64), (5, 6)]);
    }

    #[test]
    fn singleton_intersection_is_identity() {
        let net = MultiplexNetwork::from_masks(4, 2, &[(0, 1, 1), (1, 2, 3), (2, 3, 2)]).unwrap();
        assert_eq!(net.intersection(LayerSubset::singleton(1)).unwrap(), *net.layer(1));
        let both = net.intersection(LayerSubset::full(2)).unwrap();
        assert_eq!(both.edges(), vec![(1, 2)]);
        assert!(net.intersection(LayerSubset::singleton(3)).is_err());
    }

    #[test]
    fn disjoint_layers_have_empty_intersection() {
        let net = MultiplexNetwork::from_masks(5, 2, &[(0, 1, 1), (1, 2, 2), (3, 4, 1), (0, 4, 2)]).unwrap();
        assert_eq!(net.intersection(LayerSubset::full(2)).unwrap().edge_count(), 0);
    }

    #[test]
    fn cross_keeps_only_bipartite_edges() {
        let a = Adjacency::from_edges(4, &[(0, 1), (0, 2), (2, 3), (1, 3)]).unwrap();
        let c = a.cross(&[0, 1], &[2, 3]);
        assert_eq!(c.edges(), vec![(0, 2), (1, 3)]);
    }
}
