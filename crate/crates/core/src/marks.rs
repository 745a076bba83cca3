use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest number of markings any routine accepts.
pub const MAX_MARKINGS: usize = 16;

/// A subset of the markings `{1, …, n}`, stored as a bitmask over 0-based
/// indices. Displays and serialises with 1-based labels.
///
/// The order is the canonical one used throughout: first by size, then
/// lexicographically by the sorted member list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MarkSet(u16);

impl MarkSet {
    pub const EMPTY: MarkSet = MarkSet(0);

    pub fn from_bits(bits: u16) -> Self {
        MarkSet(bits)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    /// `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_MARKINGS);
        MarkSet(((1u32 << n) - 1) as u16)
    }

    pub fn singleton(index: usize) -> Self {
        MarkSet(1 << index)
    }

    /// From 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        MarkSet(indices.into_iter().fold(0u16, |acc, i| acc | (1 << i)))
    }

    /// From 1-based labels, as written in the literature and on the CLI.
    /// Panics on label 0.
    pub fn of(labels: &[usize]) -> Self {
        MarkSet::from_indices(labels.iter().map(|&l| {
            assert!((1..=MAX_MARKINGS).contains(&l), "marking labels are 1-based");
            l - 1
        }))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn complement(self, n: usize) -> Self {
        MarkSet(!self.0 & MarkSet::full(n).0)
    }

    pub fn union(self, other: Self) -> Self {
        MarkSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        MarkSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest 0-based member.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// 0-based members in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..MAX_MARKINGS).filter(move |i| bits & (1 << i) != 0)
    }

    /// 1-based labels in increasing order.
    pub fn labels(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// Image under a permutation of 0-based indices.
    pub fn permute(self, perm: &[usize]) -> Self {
        MarkSet::from_indices(self.indices().map(|i| perm[i]))
    }

    /// All subsets of `{0, …, n-1}` with exactly `k` members, canonical order.
    pub fn subsets_of_size(n: usize, k: usize) -> Vec<MarkSet> {
        let mut out: Vec<MarkSet> = (0u32..(1 << n))
            .filter(|b| b.count_ones() as usize == k)
            .map(|b| MarkSet(b as u16))
            .collect();
        out.sort();
        out
    }
}

impl Ord for MarkSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for MarkSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, label) in self.labels().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{label}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for MarkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MarkSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MarkSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let labels = Vec::<usize>::deserialize(deserializer)?;
        if labels.iter().any(|&l| l == 0 || l > MAX_MARKINGS) {
            return Err(serde::de::Error::custom("marking labels must lie in 1..=16"));
        }
        Ok(MarkSet::of(&labels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_size_then_lex() {
        let mut sets = vec![MarkSet::of(&[2, 3]), MarkSet::of(&[1, 2, 3]), MarkSet::of(&[1, 4])];
        sets.sort();
        assert_eq!(
            sets,
            vec![MarkSet::of(&[1, 4]), MarkSet::of(&[2, 3]), MarkSet::of(&[1, 2, 3])]
        );
    }

    #[test]
    fn complement_and_display() {
        let s = MarkSet::of(&[1, 2]);
        assert_eq!(s.complement(5), MarkSet::of(&[3, 4, 5]));
        assert_eq!(s.to_string(), "{1,2}");
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,2]");
        assert_eq!(MarkSet::subsets_of_size(5, 3).len(), 10);
    }
}
