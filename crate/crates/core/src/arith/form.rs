use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{ArithError, Rational};

/// Affine form `c·x + constant` over the weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl LinearForm {
    pub fn new(coefficients: Vec<Rational>, constant: Rational) -> Self {
        LinearForm {
            coefficients,
            constant,
        }
    }

    /// Builds a form with small integer data, mostly for tests and walls.
    pub fn from_ints(coefficients: &[i64], constant: i64) -> Self {
        LinearForm {
            coefficients: coefficients.iter().map(|&c| Rational::from_integer(c)).collect(),
            constant: Rational::from_integer(constant),
        }
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn negated(&self) -> Self {
        LinearForm {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            constant: -&self.constant,
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ArithError> {
        if point.len() != self.dim() {
            return Err(ArithError::DimensionMismatch {
                expected: self.dim(),
                found: point.len(),
            });
        }
        let mut value = self.constant.clone();
        for (c, x) in self.coefficients.iter().zip(point) {
            if !c.is_zero() {
                value += c * x;
            }
        }
        Ok(value)
    }
}

/// A conjunction of strict (`> 0`) and weak (`>= 0`) affine constraints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictSystem {
    pub dim: usize,
    pub strict: Vec<LinearForm>,
    pub weak: Vec<LinearForm>,
}

impl StrictSystem {
    pub fn new(dim: usize) -> Self {
        StrictSystem {
            dim,
            strict: Vec::new(),
            weak: Vec::new(),
        }
    }

    pub fn with_strict(mut self, form: LinearForm) -> Self {
        self.strict.push(form);
        self
    }

    pub fn with_weak(mut self, form: LinearForm) -> Self {
        self.weak.push(form);
        self
    }

    pub fn push_strict(&mut self, form: LinearForm) {
        self.strict.push(form);
    }

    pub fn push_weak(&mut self, form: LinearForm) {
        self.weak.push(form);
    }

    pub fn check_dims(&self) -> Result<(), ArithError> {
        if self.dim == 0 {
            return Err(ArithError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for form in self.strict.iter().chain(&self.weak) {
            if form.dim() != self.dim {
                return Err(ArithError::DimensionMismatch {
                    expected: self.dim,
                    found: form.dim(),
                });
            }
        }
        Ok(())
    }

    /// Exact membership: strict forms positive, weak forms nonnegative.
    pub fn satisfied_by(&self, point: &[Rational]) -> Result<bool, ArithError> {
        if point.len() != self.dim {
            return Err(ArithError::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        if let Some(scaled) = ScaledPoint::new(point) {
            let signs: Option<Vec<(i8, bool)>> = self
                .strict
                .iter()
                .map(|f| scaled.sign(f).map(|s| (s, true)))
                .chain(self.weak.iter().map(|f| scaled.sign(f).map(|s| (s, false))))
                .collect();
            if let Some(signs) = signs {
                return Ok(signs
                    .iter()
                    .all(|&(s, strict)| if strict { s > 0 } else { s >= 0 }));
            }
        }
        for form in &self.strict {
            if !form.eval(point)?.is_positive() {
                return Ok(false);
            }
        }
        for form in &self.weak {
            if form.eval(point)?.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A point written over a common machine-word denominator, for evaluating
/// integer forms without big-number arithmetic.
struct ScaledPoint {
    denom: i128,
    numers: Vec<i128>,
}

impl ScaledPoint {
    fn new(point: &[Rational]) -> Option<Self> {
        let mut denom: i128 = 1;
        for x in point {
            let d = x.denom().to_i128()?;
            denom = denom.checked_mul(d / denom.gcd(&d))?;
        }
        let numers = point
            .iter()
            .map(|x| {
                let scale = denom / x.denom().to_i128()?;
                x.numer().to_i128()?.checked_mul(scale)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(ScaledPoint { denom, numers })
    }

    /// Sign of the form at the point, or `None` when the form has
    /// non-integer data or the sum overflows.
    fn sign(&self, form: &LinearForm) -> Option<i8> {
        let int = |r: &Rational| if r.is_integer() { r.numer().to_i128() } else { None };
        let mut acc = int(&form.constant)?.checked_mul(self.denom)?;
        for (c, x) in form.coefficients.iter().zip(&self.numers) {
            if c.is_zero() {
                continue;
            }
            acc = acc.checked_add(int(c)?.checked_mul(*x)?)?;
        }
        Some(acc.signum() as i8)
    }
}
