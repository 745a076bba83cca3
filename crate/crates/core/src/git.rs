//! Hilbert-Mumford stability for `n` weighted points on the projective
//! line, with weights normalised to total 2 so the threshold is 1.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, Rational};
use crate::chamber::ChamberSet;
use crate::marks::{MarkSet, MAX_MARKINGS};

#[derive(Debug, Error)]
pub enum GitError {
    #[error(transparent)]
    Parse(#[from] ArithError),
    #[error("weight r_{index} = {value} is not positive")]
    NonPositive { index: usize, value: Rational },
    #[error("number of points {0} outside 4..=16")]
    OutOfRange(usize),
    #[error("ambient mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid collision pattern: {0}")]
    InvalidPattern(String),
    #[error("weight is atypical: {0} strictly semistable point(s)")]
    Atypical(usize),
    #[error("chamber matching requires n = 5, got n = {0}")]
    NotFive(usize),
    #[error("normalised weight r_{index} = {value} is not below 1")]
    HeavyPoint { index: usize, value: Rational },
    #[error("no chamber has D-set {0}")]
    NoChamber(String),
}

/// A linearisation `O(r_1, ..., r_n)` scaled so that `sum r_i = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GitWeight {
    r: Vec<Rational>,
}

impl GitWeight {
    pub fn new(raw: Vec<Rational>) -> Result<Self, GitError> {
        if !(4..=MAX_MARKINGS).contains(&raw.len()) {
            return Err(GitError::OutOfRange(raw.len()));
        }
        for (i, x) in raw.iter().enumerate() {
            if !x.is_positive() {
                return Err(GitError::NonPositive {
                    index: i + 1,
                    value: x.clone(),
                });
            }
        }
        let total: Rational = raw.iter().cloned().sum();
        let factor = Rational::from_integer(2) / total;
        Ok(GitWeight {
            r: raw.iter().map(|x| x * &factor).collect(),
        })
    }

    /// Comma-separated rationals, e.g. `"1,1,1,1,1"`.
    pub fn parse(text: &str) -> Result<Self, GitError> {
        let raw = text
            .split(',')
            .map(|t| Rational::parse(t.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw)
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.r
    }

    pub fn mass(&self, s: MarkSet) -> Rational {
        s.indices().map(|i| self.r[i].clone()).sum()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut r = vec![Rational::zero(); self.r.len()];
        for (i, x) in self.r.iter().enumerate() {
            r[perm[i]] = x.clone();
        }
        GitWeight { r }
    }
}

impl fmt::Display for GitWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.r.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Markings grouped by the point they collide at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionPattern {
    n: usize,
    groups: Vec<MarkSet>,
}

impl CollisionPattern {
    pub fn new(n: usize, groups: Vec<MarkSet>) -> Result<Self, GitError> {
        let mut seen = MarkSet::EMPTY;
        for g in &groups {
            if g.is_empty() || !g.is_disjoint(seen) {
                return Err(GitError::InvalidPattern(format!("group {g} is empty or overlaps")));
            }
            seen = seen.union(*g);
        }
        if seen != MarkSet::full(n) {
            return Err(GitError::InvalidPattern(format!("groups do not cover 1..={n}")));
        }
        let mut groups = groups;
        groups.sort();
        Ok(CollisionPattern { n, groups })
    }

    /// From 1-based labels, e.g. `CollisionPattern::of(5, &[&[1, 2], &[3], &[4], &[5]])`.
    pub fn of(n: usize, groups: &[&[usize]]) -> Result<Self, GitError> {
        Self::new(n, groups.iter().map(|g| MarkSet::of(g)).collect())
    }

    /// All points distinct.
    pub fn distinct(n: usize) -> Self {
        CollisionPattern {
            n,
            groups: (0..n).map(MarkSet::singleton).collect(),
        }
    }

    pub fn groups(&self) -> &[MarkSet] {
        &self.groups
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    StrictlySemistable,
    Unstable,
}

pub fn classify_configuration(w: &GitWeight, p: &CollisionPattern) -> Result<Stability, GitError> {
    if w.n() != p.n {
        return Err(GitError::DimensionMismatch {
            expected: w.n(),
            found: p.n,
        });
    }
    let one = Rational::one();
    let heaviest = p.groups.iter().map(|g| w.mass(*g)).max().expect("n >= 4 gives a group");
    Ok(if heaviest > one {
        Stability::Unstable
    } else if heaviest == one {
        Stability::StrictlySemistable
    } else {
        Stability::Stable
    })
}

/// A closed strictly semistable orbit: `t` at one point, its complement at
/// another. `t` is the side containing marking 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SemistablePair {
    pub t: MarkSet,
    pub complement: MarkSet,
}

pub fn strictly_semistable_points(w: &GitWeight) -> Vec<SemistablePair> {
    let n = w.n();
    let one = Rational::one();
    let mut out = Vec::new();
    for size in 2..=n - 2 {
        for t in MarkSet::subsets_of_size(n, size) {
            if t.contains(0) && w.mass(t) == one {
                out.push(SemistablePair {
                    t,
                    complement: t.complement(n),
                });
            }
        }
    }
    out.sort();
    out
}

pub fn is_typical(w: &GitWeight) -> bool {
    strictly_semistable_points(w).is_empty()
}

/// Smallest `|r(T) - 1|` over `2 <= |T| <= n - 2`; positive iff typical.
pub fn min_wall_slack(w: &GitWeight) -> Rational {
    let n = w.n();
    let one = Rational::one();
    (2..=n - 2)
        .flat_map(|k| MarkSet::subsets_of_size(n, k))
        .map(|t| (w.mass(t) - one.clone()).abs())
        .min()
        .expect("n >= 4 gives a subset")
}

/// `{S^c : |S| = 3, r(S) < 1}` for five points, in canonical order.
pub fn d_set_of(w: &GitWeight) -> Result<Vec<MarkSet>, GitError> {
    if w.n() != 5 {
        return Err(GitError::NotFive(w.n()));
    }
    let one = Rational::one();
    let mut d: Vec<MarkSet> = MarkSet::subsets_of_size(5, 3)
        .into_iter()
        .filter(|s| w.mass(*s) < one)
        .map(|s| s.complement(5))
        .collect();
    d.sort();
    Ok(d)
}

/// The five-marking chamber with the same D-set as a typical weight.
pub fn match_chamber(w: &GitWeight, chambers: &ChamberSet) -> Result<usize, GitError> {
    if w.n() != 5 {
        return Err(GitError::NotFive(w.n()));
    }
    if chambers.n != 5 {
        return Err(GitError::DimensionMismatch {
            expected: 5,
            found: chambers.n,
        });
    }
    let pairs = strictly_semistable_points(w);
    if !pairs.is_empty() {
        return Err(GitError::Atypical(pairs.len()));
    }
    for (i, x) in w.entries().iter().enumerate() {
        if *x >= Rational::one() {
            return Err(GitError::HeavyPoint {
                index: i + 1,
                value: x.clone(),
            });
        }
    }
    let d = d_set_of(w)?;
    chambers
        .find_by_d_set(&d)
        .map(|c| c.id)
        .ok_or_else(|| GitError::NoChamber(format!("{d:?}")))
}
