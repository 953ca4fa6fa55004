//! Fixed-width bit vectors over vertex indices.

use std::fmt;

use crate::error::{Error, Result};

/// A subset of `{0, .., universe - 1}` stored as a little-endian bit vector.
///
/// Bit `v` of word `v / 64` is vertex `v`. Bits at or beyond `universe` are
/// always zero, so equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: Vec<u64>,
    universe: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = VertexSet {
            words: vec![!0; universe.div_ceil(64)],
            universe,
        };
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, items: I) -> Result<Self> {
        let mut s = Self::empty(universe);
        for v in items {
            if v >= universe {
                return Err(Error::Domain(format!(
                    "vertex {v} outside universe of size {universe}"
                )));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Builds a set from the low `universe` bits of a mask.
    pub fn from_mask(universe: usize, mask: u128) -> Self {
        assert!(universe <= 128 || mask >> 127 == 0);
        let mut s = Self::empty(universe);
        for (i, w) in s.words.iter_mut().enumerate().take(2) {
            *w = (mask >> (64 * i)) as u64;
        }
        s.trim();
        s
    }

    /// The set as a `u128` mask; `None` if the universe is wider than 128.
    pub fn to_mask(&self) -> Option<u128> {
        if self.universe > 128 {
            return None;
        }
        let lo = self.words.first().copied().unwrap_or(0) as u128;
        let hi = self.words.get(1).copied().unwrap_or(0) as u128;
        Some(lo | (hi << 64))
    }

    fn trim(&mut self) {
        let r = self.universe % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && self.words[v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        assert!(v < self.universe, "vertex {v} outside universe {}", self.universe);
        self.words[v / 64] |= 1 << (v % 64);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        if v < self.universe {
            self.words[v / 64] &= !(1 << (v % 64));
        }
    }

    pub fn toggle(&mut self, v: usize) {
        assert!(v < self.universe);
        self.words[v / 64] ^= 1 << (v % 64);
    }

    /// Cardinality (population count).
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.universe, other.universe,
            "vertex sets bound to different universes"
        );
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        self.check_same(other);
        let mut out = VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            universe: self.universe,
        };
        out.trim();
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut out = VertexSet {
            words: self.words.iter().map(|w| !w).collect(),
            universe: self.universe,
        };
        out.trim();
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.check_same(other);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Lowercase hex of the bit vector read as an integer (vertex 0 is the
    /// least significant bit), padded to `ceil(universe / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.universe.div_ceil(4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let w = self.words.get(bit / 64).copied().unwrap_or(0);
            let nib = (w >> (bit % 64)) & 0xf;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(universe: usize, hex: &str) -> Result<Self> {
        let mut s = Self::empty(universe);
        for (pos, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let v = pos * 4 + b;
                    if v >= universe {
                        return Err(Error::Parse(format!(
                            "hex set names vertex {v} outside universe {universe}"
                        )));
                    }
                    s.insert(v);
                }
            }
        }
        Ok(s)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl serde::Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// Ascending iterator over members.
pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + tz);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_set(universe: usize) -> impl Strategy<Value = VertexSet> {
        proptest::collection::vec(any::<bool>(), universe).prop_map(move |bits| {
            VertexSet::from_indices(
                universe,
                bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i),
            )
            .unwrap()
        })
    }

    #[test]
    fn hex_layout() {
        let s = VertexSet::from_indices(9, [0, 4, 8]).unwrap();
        assert_eq!(s.to_hex(), "111");
        let s = VertexSet::from_indices(9, [1, 5]).unwrap();
        assert_eq!(s.to_hex(), "022");
        assert_eq!(VertexSet::empty(1).to_hex(), "0");
        assert_eq!(VertexSet::full(70).to_hex(), format!("3{}", "f".repeat(17)));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(VertexSet::from_indices(5, [5]).is_err());
        assert!(VertexSet::from_hex(5, "20").is_err());
        assert!(VertexSet::from_hex(5, "xz").is_err());
    }

    #[test]
    fn mask_round_trip() {
        let s = VertexSet::from_indices(100, [0, 63, 64, 99]).unwrap();
        let m = s.to_mask().unwrap();
        assert_eq!(VertexSet::from_mask(100, m), s);
        assert!(VertexSet::empty(200).to_mask().is_none());
    }

    proptest! {
        #[test]
        fn set_algebra(a in arb_set(130), b in arb_set(130)) {
            let u = a.union(&b);
            let i = a.intersection(&b);
            prop_assert_eq!(u.len() + i.len(), a.len() + b.len());
            prop_assert_eq!(a.difference(&b).len(), a.len() - i.len());
            prop_assert_eq!(u.complement(), a.complement().intersection(&b.complement()));
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.complement().len(), 130 - a.len());
            prop_assert!(i.is_subset(&a) && a.is_subset(&u));
            prop_assert_eq!(a.is_disjoint(&b), i.is_empty());
            prop_assert_eq!(a.iter().count(), a.len());
            prop_assert_eq!(VertexSet::from_hex(130, &a.to_hex()).unwrap(), a);
        }
    }
}
