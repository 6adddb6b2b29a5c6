//! Nonempty layer subsets `k ∈ Λ_d`, stored as bitmasks with layer 1 in the
//! least significant bit.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_LAYERS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LayerSubset(u32);

impl LayerSubset {
    pub fn new(mask: u32, d: usize) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        if d > MAX_LAYERS || (mask >> d) != 0 {
            return Err(Error::InvalidSubset(format!("mask {mask} outside {d} layers")));
        }
        Ok(LayerSubset(mask))
    }

    /// Subset holding the single (1-based) layer `layer`.
    pub fn singleton(layer: usize) -> Self {
        assert!((1..=MAX_LAYERS).contains(&layer));
        LayerSubset(1 << (layer - 1))
    }

    pub fn full(d: usize) -> Self {
        assert!((1..=MAX_LAYERS).contains(&d));
        LayerSubset((1u32 << d) - 1)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    /// `S(k)`: the 1-based layers in the subset, ascending.
    pub fn layers(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 >> i & 1 == 1).map(|i| i + 1).collect()
    }

    /// `S̄(k)`: the layers of `[d]` not in the subset.
    pub fn complement(self, d: usize) -> Vec<usize> {
        (0..d).filter(|i| self.0 >> i & 1 == 0).map(|i| i + 1).collect()
    }

    pub fn is_subset_of(self, other: LayerSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: LayerSubset) -> LayerSubset {
        LayerSubset(self.0 | other.0)
    }

    pub fn contains_layer(self, layer: usize) -> bool {
        layer >= 1 && self.0 >> (layer - 1) & 1 == 1
    }

    /// All of `Λ_d`, ordered by cardinality and then lexicographically by layers:
    /// `1, 2, .., d, 12, 13, ..`.
    pub fn all(d: usize) -> Vec<LayerSubset> {
        assert!((1..=MAX_LAYERS).contains(&d));
        let mut out: Vec<LayerSubset> = (1..(1u32 << d)).map(LayerSubset).collect();
        out.sort_by_key(|s| (s.len(), s.layers()));
        out
    }

    /// Concatenated ascending layer digits, e.g. `"12"`. Layers above 9 are
    /// written in brackets.
    pub fn label(self) -> String {
        self.layers()
            .into_iter()
            .map(|l| if l <= 9 { l.to_string() } else { format!("[{l}]") })
            .collect()
    }

    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let bad = || Error::InvalidSubset(format!("cannot parse subset {s:?}"));
        let mut mask = 0u32;
        let mut chars = s.trim().chars().peekable();
        while let Some(c) = chars.next() {
            let layer = if c == '[' {
                let mut num = String::new();
                loop {
                    match chars.next() {
                        Some(']') => break,
                        Some(c) if c.is_ascii_digit() => num.push(c),
                        _ => return Err(bad()),
                    }
                }
                num.parse::<usize>().map_err(|_| bad())?
            } else {
                c.to_digit(10).ok_or_else(bad)? as usize
            };
            if layer == 0 || layer > d {
                return Err(Error::InvalidSubset(format!("layer {layer} outside 1..={d}")));
            }
            let bit = 1u32 << (layer - 1);
            if mask & bit != 0 {
                return Err(bad());
            }
            mask |= bit;
        }
        LayerSubset::new(mask, d)
    }

    fn parse_any(s: &str) -> Result<Self> {
        LayerSubset::parse(s, MAX_LAYERS)
    }
}

impl fmt::Display for LayerSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for LayerSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for LayerSubset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LayerSubset::parse_any(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_has_two_pow_d_minus_one_elements() {
        for d in 1..=6 {
            assert_eq!(LayerSubset::all(d).len(), (1 << d) - 1);
        }
    }

    #[test]
    fn ordering_and_labels() {
        let labels: Vec<String> = LayerSubset::all(3).iter().map(|s| s.label()).collect();
        assert_eq!(labels, ["1", "2", "3", "12", "13", "23", "123"]);
    }

    #[test]
    fn parse_round_trip() {
        for s in LayerSubset::all(4) {
            assert_eq!(LayerSubset::parse(&s.label(), 4).unwrap(), s);
        }
        assert!(LayerSubset::parse("", 2).is_err());
        assert!(LayerSubset::parse("13", 2).is_err());
        assert!(LayerSubset::parse("11", 2).is_err());
        assert!(LayerSubset::new(0, 2).is_err());
    }

    #[test]
    fn s_and_complement() {
        let k = LayerSubset::parse("13", 4).unwrap();
        assert_eq!(k.layers(), vec![1, 3]);
        assert_eq!(k.complement(4), vec![2, 4]);
        assert_eq!(k.mask(), 0b101);
    }
}
