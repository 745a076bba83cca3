//! Boundary divisors, vital curves and their intersection pairing on the
//! moduli space of stable `n`-pointed rational curves.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::Rational;
use crate::marks::{MarkSet, MAX_MARKINGS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntersectionError {
    #[error("number of markings {0} outside 4..=16")]
    OutOfRange(usize),
    #[error("ambient mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} does not index a boundary divisor for n = {1}")]
    InvalidIndex(MarkSet, usize),
    #[error("invalid vital curve: {0}")]
    InvalidCurve(String),
    #[error("operation requires n = 5, got n = {0}")]
    NotFive(usize),
    #[error("pairing of {index} with {curve} depends on the distinguished block")]
    AnchorDependence { index: BoundaryIndex, curve: VitalCurve },
}

fn check_n(n: usize) -> Result<(), IntersectionError> {
    if (4..=MAX_MARKINGS).contains(&n) {
        Ok(())
    } else {
        Err(IntersectionError::OutOfRange(n))
    }
}

fn same_n(expected: usize, found: usize) -> Result<(), IntersectionError> {
    if expected == found {
        Ok(())
    } else {
        Err(IntersectionError::DimensionMismatch { expected, found })
    }
}

/// The unordered split `{I, I^c}`, stored as its smaller side (the side
/// containing marking 1 when both have the same size).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryIndex {
    n: usize,
    subset: MarkSet,
}

impl BoundaryIndex {
    /// Canonicalises either side of the split.
    pub fn new(n: usize, side: MarkSet) -> Result<Self, IntersectionError> {
        check_n(n)?;
        if !side.is_subset(MarkSet::full(n)) {
            return Err(IntersectionError::InvalidIndex(side, n));
        }
        let other = side.complement(n);
        let subset = match side.len().cmp(&other.len()) {
            Ordering::Less => side,
            Ordering::Greater => other,
            Ordering::Equal if side.contains(0) => side,
            Ordering::Equal => other,
        };
        if subset.len() < 2 {
            return Err(IntersectionError::InvalidIndex(side, n));
        }
        Ok(BoundaryIndex { n, subset })
    }

    /// From 1-based labels, e.g. `BoundaryIndex::of(5, &[4, 5])`.
    pub fn of(n: usize, labels: &[usize]) -> Result<Self, IntersectionError> {
        Self::new(n, MarkSet::of(labels))
    }

    /// Every boundary index for `n`, in canonical order.
    pub fn all(n: usize) -> Result<Vec<Self>, IntersectionError> {
        check_n(n)?;
        let mut out = Vec::new();
        for k in 2..=n / 2 {
            for s in MarkSet::subsets_of_size(n, k) {
                let idx = BoundaryIndex::new(n, s)?;
                if idx.subset == s {
                    out.push(idx);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subset(&self) -> MarkSet {
        self.subset
    }

    pub fn complement(&self) -> MarkSet {
        self.subset.complement(self.n)
    }

    /// True if `s` is either side of the split.
    pub fn is_side(&self, s: MarkSet) -> bool {
        s == self.subset || s == self.complement()
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        BoundaryIndex::new(self.n, self.subset.permute(perm)).expect("permutation preserves sizes")
    }
}

impl Ord for BoundaryIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.subset).cmp(&(other.n, other.subset))
    }
}

impl PartialOrd for BoundaryIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BoundaryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.subset)
    }
}

impl Serialize for BoundaryIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.subset.serialize(serializer)
    }
}

/// A rational combination of boundary divisors. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorClass {
    n: usize,
    coefficients: BTreeMap<BoundaryIndex, Rational>,
}

impl DivisorClass {
    pub fn zero(n: usize) -> Self {
        DivisorClass {
            n,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn boundary(index: BoundaryIndex) -> Self {
        let mut d = Self::zero(index.n);
        d.coefficients.insert(index, Rational::one());
        d
    }

    /// `coefficient * sum_{J in indices} D_J`.
    pub fn sum_of<'a, I>(n: usize, indices: I, coefficient: &Rational) -> Result<Self, IntersectionError>
    where
        I: IntoIterator<Item = &'a BoundaryIndex>,
    {
        let mut d = Self::zero(n);
        for j in indices {
            same_n(n, j.n)?;
            d.add_term(*j, coefficient.clone());
        }
        Ok(d)
    }

    /// `E`, the sum of all boundary divisors.
    pub fn total_boundary(n: usize) -> Result<Self, IntersectionError> {
        Self::sum_of(n, &BoundaryIndex::all(n)?, &Rational::one())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficient(&self, index: &BoundaryIndex) -> Rational {
        self.coefficients.get(index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BoundaryIndex, &Rational)> {
        self.coefficients.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    fn add_term(&mut self, index: BoundaryIndex, value: Rational) {
        let entry = self.coefficients.entry(index).or_insert_with(Rational::zero);
        *entry += value;
        if entry.is_zero() {
            self.coefficients.remove(&index);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, IntersectionError> {
        same_n(self.n, other.n)?;
        let mut out = self.clone();
        for (j, c) in &other.coefficients {
            out.add_term(*j, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, IntersectionError> {
        self.add(&other.scale(&Rational::from_integer(-1)))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.n);
        }
        DivisorClass {
            n: self.n,
            coefficients: self.coefficients.iter().map(|(j, c)| (*j, c * factor)).collect(),
        }
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero(self.n);
        for (j, c) in &self.coefficients {
            out.add_term(j.permute(perm), c.clone());
        }
        out
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coefficients.iter().map(|(j, c)| format!("{c}*{j}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Serialised as a map from the canonical side (e.g. `"{4,5}"`) to `"p/q"`.
impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coefficients.len()))?;
        for (j, c) in &self.coefficients {
            map.serialize_entry(&j.subset.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

/// The curve class of a partition of the markings into four blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VitalCurve {
    n: usize,
    /// Sorted by smallest element.
    blocks: [MarkSet; 4],
}

impl VitalCurve {
    pub fn new(n: usize, blocks: [MarkSet; 4]) -> Result<Self, IntersectionError> {
        check_n(n)?;
        let mut seen = MarkSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(IntersectionError::InvalidCurve("empty block".into()));
            }
            if !b.is_disjoint(seen) {
                return Err(IntersectionError::InvalidCurve(format!("block {b} overlaps another")));
            }
            seen = seen.union(*b);
        }
        if seen != MarkSet::full(n) {
            return Err(IntersectionError::InvalidCurve(format!("blocks do not cover 1..={n}")));
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| MarkSet::min(*b));
        Ok(VitalCurve { n, blocks })
    }

    /// From 1-based label lists, e.g. `VitalCurve::of(5, [&[1], &[2], &[3], &[4, 5]])`.
    pub fn of(n: usize, blocks: [&[usize]; 4]) -> Result<Self, IntersectionError> {
        Self::new(n, blocks.map(MarkSet::of))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[MarkSet; 4] {
        &self.blocks
    }

    /// Block sizes `(a, b, c, d)` in block order.
    pub fn shape(&self) -> [usize; 4] {
        self.blocks.map(MarkSet::len)
    }

    /// The unique block of size 2 when `n = 5`.
    pub fn doubleton(&self) -> Option<MarkSet> {
        let mut twos = self.blocks.iter().filter(|b| b.len() == 2);
        match (twos.next(), twos.next()) {
            (Some(b), None) if self.n == 5 => Some(*b),
            _ => None,
        }
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        VitalCurve::new(self.n, self.blocks.map(|b| b.permute(perm))).expect("permutation preserves partitions")
    }

    fn key(&self) -> [Vec<usize>; 4] {
        self.blocks.map(MarkSet::labels)
    }
}

impl Ord for VitalCurve {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.key()).cmp(&(other.n, other.key()))
    }
}

impl PartialOrd for VitalCurve {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VitalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C")?;
        for b in &self.blocks {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl Serialize for VitalCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.blocks.serialize(serializer)
    }
}

/// All partitions of `{1..n}` into four nonempty blocks, in canonical order.
pub fn all_vital_curves(n: usize) -> Result<Vec<VitalCurve>, IntersectionError> {
    check_n(n)?;
    // Restricted growth strings: label[i] <= 1 + max(label[..i]).
    fn grow(n: usize, labels: &mut Vec<usize>, used: usize, out: &mut Vec<VitalCurve>) {
        let i = labels.len();
        if i == n {
            if used == 4 {
                let mut blocks = [MarkSet::EMPTY; 4];
                for (m, &l) in labels.iter().enumerate() {
                    blocks[l] = blocks[l].union(MarkSet::singleton(m));
                }
                out.push(VitalCurve::new(n, blocks).expect("growth strings give partitions"));
            }
            return;
        }
        if used + (n - i) < 4 {
            return;
        }
        for l in 0..(used + 1).min(4) {
            labels.push(l);
            grow(n, labels, used.max(l + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(n, &mut Vec::with_capacity(n), 0, &mut out);
    out.sort();
    Ok(out)
}

/// The pairing computed with block `anchor` playing the role of `T_1`:
/// pairs `{T_anchor, T_i}` whose union is a side of `index`, minus blocks
/// that are themselves a side.
pub fn intersect_with_anchor(index: &BoundaryIndex, curve: &VitalCurve, anchor: usize) -> Result<i64, IntersectionError> {
    same_n(index.n, curve.n)?;
    let b = &curve.blocks;
    let t = b[anchor % 4];
    let unions = (0..4)
        .filter(|&i| i != anchor % 4 && index.is_side(t.union(b[i])))
        .count() as i64;
    let singles = b.iter().filter(|x| index.is_side(**x)).count() as i64;
    Ok(unions - singles)
}

/// `D_J . C`, checked to agree for every choice of distinguished block.
pub fn intersect(index: &BoundaryIndex, curve: &VitalCurve) -> Result<Rational, IntersectionError> {
    let first = intersect_with_anchor(index, curve, 0)?;
    for anchor in 1..4 {
        if intersect_with_anchor(index, curve, anchor)? != first {
            return Err(IntersectionError::AnchorDependence {
                index: *index,
                curve: curve.clone(),
            });
        }
    }
    Ok(Rational::from_integer(first))
}

pub fn pair(divisor: &DivisorClass, curve: &VitalCurve) -> Result<Rational, IntersectionError> {
    same_n(divisor.n, curve.n)?;
    let mut total = Rational::zero();
    for (j, c) in &divisor.coefficients {
        total += c * &intersect(j, curve)?;
    }
    Ok(total)
}

/// Pairings against `all_vital_curves(n)`, in canonical order.
pub fn pairing_vector(divisor: &DivisorClass) -> Result<Vec<Rational>, IntersectionError> {
    all_vital_curves(divisor.n)?.iter().map(|c| pair(divisor, c)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FNef {
    Nef,
    /// First curve in canonical order with a negative pairing.
    Violated { curve: VitalCurve, value: Rational },
}

impl FNef {
    pub fn is_nef(&self) -> bool {
        matches!(self, FNef::Nef)
    }
}

pub fn is_f_nef(divisor: &DivisorClass) -> Result<FNef, IntersectionError> {
    for curve in all_vital_curves(divisor.n)? {
        let value = pair(divisor, &curve)?;
        if value.is_negative() {
            return Ok(FNef::Violated { curve, value });
        }
    }
    Ok(FNef::Nef)
}

/// Numerical equivalence on `M_{0,5}`, where the ten vital curves separate
/// classes.
pub fn classes_equal(x: &DivisorClass, y: &DivisorClass) -> Result<bool, IntersectionError> {
    if x.n != 5 {
        return Err(IntersectionError::NotFive(x.n));
    }
    same_n(5, y.n)?;
    Ok(pairing_vector(x)? == pairing_vector(y)?)
}

/// First curve on which two `n = 5` classes differ, if any.
pub fn first_difference(x: &DivisorClass, y: &DivisorClass) -> Result<Option<VitalCurve>, IntersectionError> {
    if x.n != 5 {
        return Err(IntersectionError::NotFive(x.n));
    }
    same_n(5, y.n)?;
    for c in all_vital_curves(5)? {
        if pair(x, &c)? != pair(y, &c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}
