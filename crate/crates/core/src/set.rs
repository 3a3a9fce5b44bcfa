//! Fixed-width vertex sets.
//!
//! Every set in this crate (edges, kernels, petals, blobs, patterns over
//! `[r]`) lives inside `[64]`, so a single `u64` holds it: element `v` is
//! bit `v - 1`. Intersections and disjointness tests are then one
//! instruction each, which is what all the inner loops need.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest vertex (or index) a [`VertexSet`] can hold.
pub const MAX_VERTEX: usize = 64;

/// A sorted, duplicate-free set of elements of `[64]`.
///
/// Ordering is lexicographic on the sorted element lists, so
/// `{1,2,3} < {1,2,4} < {1,3,4} < {2,3,4}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The interval `{lo, ..., hi}`; empty when `lo > hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1 && hi <= MAX_VERTEX || lo > hi, "range out of [64]");
        if lo > hi {
            return Self::EMPTY;
        }
        let width = hi - lo + 1;
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        VertexSet(mask << (lo - 1))
    }

    /// `[n] = {1, ..., n}`.
    pub fn full(n: usize) -> Self {
        Self::range(1, n)
    }

    pub fn singleton(v: usize) -> Self {
        assert!((1..=MAX_VERTEX).contains(&v), "vertex {v} out of [64]");
        VertexSet(1u64 << (v - 1))
    }

    /// Builds a set from elements; panics on an element outside `[64]`.
    /// Repeated elements collapse.
    pub fn from_slice(elems: &[usize]) -> Self {
        elems.iter().fold(Self::EMPTY, |acc, &v| acc.with(v))
    }

    /// Like [`from_slice`](Self::from_slice) but reports bad elements instead of panicking.
    pub fn try_from_slice(elems: &[usize]) -> Option<Self> {
        let mut bits = 0u64;
        for &v in elems {
            if !(1..=MAX_VERTEX).contains(&v) {
                return None;
            }
            bits |= 1u64 << (v - 1);
        }
        Some(VertexSet(bits))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        (1..=MAX_VERTEX).contains(&v) && self.0 & (1u64 << (v - 1)) != 0
    }

    #[inline]
    pub fn with(self, v: usize) -> Self {
        self | Self::singleton(v)
    }

    #[inline]
    pub fn without(self, v: usize) -> Self {
        if (1..=MAX_VERTEX).contains(&v) {
            VertexSet(self.0 & !(1u64 << (v - 1)))
        } else {
            self
        }
    }

    #[inline]
    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn intersection(self, other: VertexSet) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub fn union(self, other: VertexSet) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub fn difference(self, other: VertexSet) -> Self {
        VertexSet(self.0 & !other.0)
    }

    /// Smallest element.
    #[inline]
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Largest element.
    #[inline]
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    #[inline]
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self` with exactly `k` elements, in lexicographic order.
    pub fn subsets_of_size(self, k: usize) -> impl Iterator<Item = VertexSet> {
        use itertools::Itertools;
        let elems = self.to_vec();
        elems
            .into_iter()
            .combinations(k)
            .map(|c| VertexSet::from_slice(&c))
    }

    /// All subsets of `self` (including `∅` and `self`), by bit enumeration.
    pub fn all_subsets(self) -> impl Iterator<Item = VertexSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(VertexSet(cur))
        })
    }

    /// Image of the set under a vertex map (`map[v]` is the image of `v`;
    /// index 0 unused).
    pub fn map(self, map: &[usize]) -> VertexSet {
        self.iter().fold(VertexSet::EMPTY, |acc, v| acc.with(map[v]))
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        // Below the lowest differing element both sorted lists agree.
        let low = diff & diff.wrapping_neg();
        let above = !(low | (low - 1));
        if self.0 & low != 0 {
            // `self` has the element; `other` either continues with a larger
            // element (self smaller) or has already ended (other is a prefix).
            if other.0 & above != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if self.0 & above != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::BitOr for VertexSet {
    type Output = VertexSet;
    fn bitor(self, rhs: VertexSet) -> VertexSet {
        self.union(rhs)
    }
}

impl std::ops::BitAnd for VertexSet {
    type Output = VertexSet;
    fn bitand(self, rhs: VertexSet) -> VertexSet {
        self.intersection(rhs)
    }
}

impl std::ops::Sub for VertexSet {
    type Output = VertexSet;
    fn sub(self, rhs: VertexSet) -> VertexSet {
        self.difference(rhs)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(VertexSet::EMPTY, |acc, v| acc.with(v))
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Vec<usize> {
        s.to_vec()
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = String;
    fn try_from(v: Vec<usize>) -> Result<Self, String> {
        VertexSet::try_from_slice(&v).ok_or_else(|| format!("element outside [1, {MAX_VERTEX}]"))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Increasing iterator over the elements of a [`VertexSet`].
#[derive(Clone)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Serde adapter for maps keyed by sets: JSON object keys must be strings,
/// so the map travels as a list of `[key, value]` pairs.
pub(crate) mod as_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(
        map: &BTreeMap<K, V>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        ser.collect_seq(map.iter())
    }

    pub fn deserialize<'de, K, V, D>(de: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(de)?.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from_slice(v)
    }

    #[test]
    fn lexicographic_order_on_triples() {
        let mut sets = vec![vs(&[2, 3, 4]), vs(&[1, 3, 4]), vs(&[1, 2, 4]), vs(&[1, 2, 3])];
        sets.sort();
        assert_eq!(sets, vec![vs(&[1, 2, 3]), vs(&[1, 2, 4]), vs(&[1, 3, 4]), vs(&[2, 3, 4])]);
    }

    #[test]
    fn prefix_sorts_first() {
        assert!(vs(&[1, 2]) < vs(&[1, 2, 3]));
        assert!(VertexSet::EMPTY < vs(&[5]));
        assert!(vs(&[1, 9]) < vs(&[2]));
    }

    #[test]
    fn range_edges() {
        assert_eq!(VertexSet::full(64).len(), 64);
        assert_eq!(VertexSet::full(0), VertexSet::EMPTY);
        assert_eq!(VertexSet::range(3, 5), vs(&[3, 4, 5]));
    }

    #[test]
    fn all_subsets_counts() {
        assert_eq!(vs(&[2, 5, 7]).all_subsets().count(), 8);
        assert_eq!(VertexSet::EMPTY.all_subsets().count(), 1);
    }

    proptest! {
        #[test]
        fn ord_matches_sorted_vec_order(a in proptest::collection::btree_set(1usize..=64, 0..8),
                                        b in proptest::collection::btree_set(1usize..=64, 0..8)) {
            let va: Vec<usize> = a.iter().copied().collect();
            let vb: Vec<usize> = b.iter().copied().collect();
            prop_assert_eq!(vs(&va).cmp(&vs(&vb)), va.cmp(&vb));
        }
    }
}
