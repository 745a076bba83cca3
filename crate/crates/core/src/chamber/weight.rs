use std::fmt;

use serde::{Deserialize, Serialize};

use super::ChamberError;
use crate::arith::{LinearForm, Rational, StrictSystem};
use crate::marks::MarkSet;

/// A point of the weight domain: `0 < a_i <= 1` and `sum a_i > 2`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight {
    entries: Vec<Rational>,
}

impl Weight {
    pub fn new(entries: Vec<Rational>) -> Result<Self, ChamberError> {
        let n = entries.len();
        if !(super::MIN_N..=super::MAX_N).contains(&n) {
            return Err(ChamberError::OutOfRange { n });
        }
        for (i, a) in entries.iter().enumerate() {
            if !a.is_positive() {
                return Err(ChamberError::Domain(format!("a_{} = {a} violates 0 < a_i", i + 1)));
            }
            if a > &Rational::one() {
                return Err(ChamberError::Domain(format!("a_{} = {a} violates a_i <= 1", i + 1)));
            }
        }
        let total: Rational = entries.iter().sum();
        if total <= Rational::from_integer(2) {
            return Err(ChamberError::Domain(format!(
                "sum of weights = {total} violates sum > 2"
            )));
        }
        Ok(Weight { entries })
    }

    /// Parses a comma-separated list of rationals.
    pub fn parse(text: &str) -> Result<Self, ChamberError> {
        let entries = text
            .split(',')
            .map(Rational::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Weight::new(entries)
    }

    /// The symmetric weight `n·(value)`.
    pub fn symmetric(n: usize, value: Rational) -> Result<Self, ChamberError> {
        Weight::new(vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    /// `A(S) = sum of a_i over S`.
    pub fn mass(&self, subset: MarkSet) -> Rational {
        subset.indices().map(|i| &self.entries[i]).sum()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut entries = self.entries.clone();
        for (i, a) in self.entries.iter().enumerate() {
            entries[perm[i]] = a.clone();
        }
        Weight { entries }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Indicator form `sum_{j in S} a_j + constant`.
pub(crate) fn subset_form(n: usize, subset: MarkSet, constant: i64) -> LinearForm {
    let coefficients = (0..n)
        .map(|i| Rational::from_integer(subset.contains(i) as i64))
        .collect();
    LinearForm::new(coefficients, Rational::from_integer(constant))
}

/// Constraints of the open-closed weight domain, in a fixed order:
/// `a_i > 0`, then `sum - 2 > 0`, then `1 - a_i >= 0`.
pub fn domain_system(n: usize) -> StrictSystem {
    let mut sys = StrictSystem::new(n);
    for i in 0..n {
        sys.push_strict(subset_form(n, MarkSet::singleton(i), 0));
    }
    sys.push_strict(subset_form(n, MarkSet::full(n), -2));
    for i in 0..n {
        sys.push_weak(subset_form(n, MarkSet::singleton(i), -1).negated());
    }
    sys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn domain_violations_are_named() {
        let err = Weight::new(vec![q(1, 1), q(1, 1), q(0, 1), q(1, 1), q(1, 1)]).unwrap_err();
        assert!(err.to_string().contains("a_3"), "{err}");
        let err = Weight::new(vec![q(3, 2), q(1, 1), q(1, 1), q(1, 1), q(1, 1)]).unwrap_err();
        assert!(err.to_string().contains("a_i <= 1"), "{err}");
        let err = Weight::symmetric(5, q(2, 5)).unwrap_err();
        assert!(err.to_string().contains("sum > 2"), "{err}");
        assert!(Weight::symmetric(3, q(1, 1)).is_err());
    }

    #[test]
    fn mass_and_parse() {
        let w = Weight::parse("1,1,3/10,3/10,3/10").unwrap();
        assert_eq!(w.mass(MarkSet::of(&[3, 4, 5])), q(9, 10));
        assert!(Weight::parse("1,1,x,1,1").is_err());
    }
}
