//! Walls of the weight domain, enumeration of its nonempty coarse chambers,
//! and classification of individual weights.

mod cache;
mod enumerate;
mod kind;
mod weight;

pub use cache::{default_cache_path, load_cache, save_cache, wall_hash, CACHE_DIR_ENV, CACHE_SCHEMA};
pub use enumerate::{enumerate_arrangement, enumerate_chambers};
pub use kind::ChamberType;
pub use weight::{domain_system, Weight};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{strict_feasible, ArithError, LinearForm, Rational, StrictSystem};
use crate::marks::MarkSet;
use weight::subset_form;

pub const MIN_N: usize = 4;
pub const MAX_N: usize = 8;

#[derive(Debug, Error)]
pub enum ChamberError {
    #[error("number of markings {n} outside supported range 4..=8")]
    OutOfRange { n: usize },
    #[error("weight outside the domain: {0}")]
    Domain(String),
    #[error("operation requires n = 5, got n = {0}")]
    NotFive(usize),
    #[error("no chamber matches sign vector {0}")]
    UnknownChamber(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("chamber cache {path}: {reason}")]
    Cache { path: String, reason: String },
    #[error("chamber cache {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn check_n(n: usize) -> Result<(), ChamberError> {
    if (MIN_N..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(ChamberError::OutOfRange { n })
    }
}

/// The hyperplane `sum_{j in S} a_j = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub subset: MarkSet,
    pub form: LinearForm,
}

impl Wall {
    pub fn new(n: usize, subset: MarkSet) -> Self {
        Wall {
            subset,
            form: subset_form(n, subset, -1),
        }
    }

    /// `A(S) - 1` at `w`.
    pub fn value(&self, w: &Weight) -> Rational {
        w.mass(self.subset) - Rational::one()
    }

    /// Constraint form whose positivity means "strictly on the `sign` side".
    pub fn side(&self, sign: Sign) -> LinearForm {
        match sign {
            Sign::Plus => self.form.clone(),
            Sign::Minus => self.form.negated(),
        }
    }
}

/// Side of a wall: `Plus` is `A(S) > 1`, `Minus` is `A(S) < 1`.
///
/// `Plus < Minus`, matching the character order of `'+'` and `'-'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

pub fn sign_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.as_char()).collect()
}

/// Walls that actually cut the domain for `n` markings, sorted by
/// `(|S|, S)`.
///
/// Subsets with `|S| >= n - 1` never meet the domain: the complement would
/// carry weight at most 1 while the total exceeds 2. Every remaining
/// candidate is kept only if both open sides meet the domain.
pub fn generate_walls(n: usize) -> Result<Vec<Wall>, ChamberError> {
    check_n(n)?;
    let domain = domain_system(n);
    let mut walls = Vec::new();
    for size in 3..=n.saturating_sub(2) {
        for subset in MarkSet::subsets_of_size(n, size) {
            let wall = Wall::new(n, subset);
            let cuts = [Sign::Plus, Sign::Minus].iter().try_fold(true, |acc, &sign| {
                if !acc {
                    return Ok::<bool, ChamberError>(false);
                }
                let sys = domain.clone().with_strict(wall.side(sign));
                Ok(strict_feasible(&sys)?.is_feasible())
            })?;
            if cuts {
                walls.push(wall);
            }
        }
    }
    Ok(walls)
}

/// A nonempty open chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub id: usize,
    pub n: usize,
    /// One sign per effective wall, in canonical wall order.
    pub signs: Vec<Sign>,
    pub representative: Weight,
    /// `D(A) = { I : A(I^c) < 1 }`, i.e. complements of the walls on the
    /// `Minus` side, in canonical set order.
    pub d_set: Vec<MarkSet>,
}

impl Chamber {
    pub fn d_value(&self) -> usize {
        self.d_set.len()
    }

    pub fn sign_string(&self) -> String {
        sign_string(&self.signs)
    }

    /// Type (A)–(F); only defined for five markings.
    pub fn type_of(&self) -> Result<ChamberType, ChamberError> {
        if self.n != 5 {
            return Err(ChamberError::NotFive(self.n));
        }
        ChamberType::from_d_set(&self.d_set)
            .ok_or_else(|| ChamberError::Domain(format!("no type for D-set {:?}", self.d_set)))
    }
}

pub(crate) fn d_set_of(n: usize, walls: &[Wall], signs: &[Sign]) -> Vec<MarkSet> {
    let mut d: Vec<MarkSet> = walls
        .iter()
        .zip(signs)
        .filter(|(_, s)| **s == Sign::Minus)
        .map(|(w, _)| w.subset.complement(n))
        .collect();
    d.sort();
    d
}

/// Full open system of a chamber: domain constraints followed by each wall
/// side.
pub fn chamber_system(n: usize, walls: &[Wall], signs: &[Sign]) -> StrictSystem {
    let mut sys = domain_system(n);
    for (wall, &sign) in walls.iter().zip(signs) {
        sys.push_strict(wall.side(sign));
    }
    sys
}

/// Result of [`ChamberSet::classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Chamber(usize),
    /// Walls met with equality, in canonical order.
    OnWall(Vec<MarkSet>),
}

/// Every nonempty chamber for one `n`, sorted by sign vector.
#[derive(Clone, Debug)]
pub struct ChamberSet {
    pub n: usize,
    pub walls: Vec<Wall>,
    pub chambers: Vec<Chamber>,
}

impl ChamberSet {
    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Chamber> {
        self.chambers.get(id)
    }

    pub fn wall_subsets(&self) -> Vec<MarkSet> {
        self.walls.iter().map(|w| w.subset).collect()
    }

    /// Sign of every wall at `w`, or the walls `w` lies on.
    pub fn signs_of(&self, w: &Weight) -> Result<Vec<Sign>, Vec<MarkSet>> {
        let mut signs = Vec::with_capacity(self.walls.len());
        let mut on = Vec::new();
        for wall in &self.walls {
            let v = wall.value(w);
            if v.is_zero() {
                on.push(wall.subset);
            } else if v.is_positive() {
                signs.push(Sign::Plus);
            } else {
                signs.push(Sign::Minus);
            }
        }
        if on.is_empty() {
            Ok(signs)
        } else {
            Err(on)
        }
    }

    pub fn find_by_signs(&self, signs: &[Sign]) -> Option<&Chamber> {
        self.chambers
            .binary_search_by(|c| c.signs.as_slice().cmp(signs))
            .ok()
            .map(|i| &self.chambers[i])
    }

    pub fn find_by_d_set(&self, d_set: &[MarkSet]) -> Option<&Chamber> {
        let mut key = d_set.to_vec();
        key.sort();
        self.chambers.iter().find(|c| c.d_set == key)
    }

    pub fn classify(&self, w: &Weight) -> Result<Classification, ChamberError> {
        if w.n() != self.n {
            return Err(ArithError::DimensionMismatch {
                expected: self.n,
                found: w.n(),
            }
            .into());
        }
        match self.signs_of(w) {
            Err(on) => Ok(Classification::OnWall(on)),
            Ok(signs) => self
                .find_by_signs(&signs)
                .map(|c| Classification::Chamber(c.id))
                .ok_or_else(|| ChamberError::UnknownChamber(sign_string(&signs))),
        }
    }

    pub fn count_by_type(&self) -> Result<BTreeMap<ChamberType, usize>, ChamberError> {
        let mut counts = BTreeMap::new();
        for c in &self.chambers {
            *counts.entry(c.type_of()?).or_insert(0) += 1;
        }
        Ok(counts)
    }

    pub fn count_by_d_value(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for c in &self.chambers {
            *counts.entry(c.d_value()).or_insert(0) += 1;
        }
        counts
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} [{}] rep {} D = {:?}", self.id, self.sign_string(), self.representative, self.d_set)
    }
}

/// Serialisable view of a chamber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChamberRecord {
    pub signs: String,
    pub representative: Vec<Rational>,
    pub d_set: Vec<MarkSet>,
}

impl From<&Chamber> for ChamberRecord {
    fn from(c: &Chamber) -> Self {
        ChamberRecord {
            signs: c.sign_string(),
            representative: c.representative.entries().to_vec(),
            d_set: c.d_set.clone(),
        }
    }
}
