//! Log canonical divisors on `M_{0,5}` per chamber, and the symmetric-weight
//! canonical class and pullback algebra for `n * (1/k)`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith::Rational;
use crate::chamber::{Chamber, ChamberError};
use crate::dp5::{identify_surface, order_along_center, ContractionPlan, Dp5Error, SurfaceIdentification};
use crate::intersection::{
    all_vital_curves, classes_equal, first_difference, pair, BoundaryIndex, DivisorClass,
    IntersectionError, VitalCurve,
};

#[derive(Debug, Error)]
pub enum LcError {
    #[error("operation requires n = 5, got n = {0}")]
    NotFive(usize),
    #[error("alpha keys {found} do not match the D-set {expected}")]
    AlphaKeys { expected: String, found: String },
    #[error("level constraints violated for n = {n}, k = {k}, l = {l}")]
    Levels { n: usize, k: usize, l: usize },
    #[error("divisor at level {found}, expected level {expected}")]
    WrongLevel { expected: usize, found: usize },
    #[error("internal check failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Chamber(#[from] ChamberError),
    #[error(transparent)]
    Dp5(#[from] Dp5Error),
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

fn contracted(chamber: &Chamber) -> Result<Vec<BoundaryIndex>, LcError> {
    if chamber.n != 5 {
        return Err(LcError::NotFive(chamber.n));
    }
    Ok(ContractionPlan::of_chamber(chamber)?.contracted().iter().copied().collect())
}

/// `K = -(1/2) E` on `M_{0,5}`.
pub fn canonical_divisor_m05() -> DivisorClass {
    DivisorClass::total_boundary(5).expect("n = 5 is in range").scale(&Rational::new(-1, 2))
}

/// `F = E - sum_{I in D} D_I`.
pub fn build_f(chamber: &Chamber) -> Result<DivisorClass, LcError> {
    let d = contracted(chamber)?;
    let sum_d = DivisorClass::sum_of(5, &d, &Rational::one())?;
    Ok(DivisorClass::total_boundary(5)?.sub(&sum_d)?)
}

/// `L(beta) = K + (3 beta - 1) sum_D D_I + beta F`, checked against
/// `3 (beta - 1/2) sum_D D_I + (beta - 1/2) F`.
pub fn build_l(chamber: &Chamber, beta: &Rational) -> Result<DivisorClass, LcError> {
    let d = contracted(chamber)?;
    let f = build_f(chamber)?;
    let sum_d = DivisorClass::sum_of(5, &d, &Rational::one())?;
    let l = canonical_divisor_m05()
        .add(&sum_d.scale(&(int(3) * beta - int(1))))?
        .add(&f.scale(beta))?;
    let shifted = beta - &half();
    let alt = sum_d.scale(&(int(3) * &shifted)).add(&f.scale(&shifted))?;
    if !classes_equal(&l, &alt)? {
        return Err(LcError::Verification(format!(
            "the two forms of L({beta}) differ on chamber {}",
            chamber.id
        )));
    }
    Ok(l)
}

/// Coefficients of one chamber's log canonical divisor: `alpha_I` on the
/// contracted pairs, `beta` elsewhere.
#[derive(Clone, Debug)]
pub struct LcInput<'a> {
    pub chamber: &'a Chamber,
    pub alphas: BTreeMap<BoundaryIndex, Rational>,
    pub beta: Rational,
}

impl<'a> LcInput<'a> {
    pub fn new(chamber: &'a Chamber, alphas: BTreeMap<BoundaryIndex, Rational>, beta: Rational) -> Result<Self, LcError> {
        let d = contracted(chamber)?;
        let keys: Vec<BoundaryIndex> = alphas.keys().copied().collect();
        if keys != d {
            return Err(LcError::AlphaKeys {
                expected: format!("{d:?}"),
                found: format!("{keys:?}"),
            });
        }
        Ok(LcInput { chamber, alphas, beta })
    }

    /// The same `alpha` on every contracted pair.
    pub fn uniform(chamber: &'a Chamber, alpha: &Rational, beta: Rational) -> Result<Self, LcError> {
        let alphas = contracted(chamber)?.into_iter().map(|i| (i, alpha.clone())).collect();
        Self::new(chamber, alphas, beta)
    }

    /// `alpha_I - 3 beta + 1` for each contracted `I`.
    pub fn residual_coefficients(&self) -> BTreeMap<BoundaryIndex, Rational> {
        let shift = int(3) * &self.beta - int(1);
        self.alphas.iter().map(|(i, a)| (*i, a - &shift)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eq1Report {
    pub holds: bool,
    /// First curve on which the two sides differ.
    pub failing_curve: Option<VitalCurve>,
    pub residual: DivisorClass,
    /// Every `alpha_I - 3 beta + 1 >= 0`.
    pub effective: bool,
}

/// Checks
/// `K + sum alpha_I D_I + beta F = rho^*(K_A + beta F_A) + sum (alpha_I - 3 beta + 1) D_I`
/// after substituting `rho^* K_A = K - sum_D D_I` and
/// `rho^* F_A = F + sum_D order(I) D_I`.
pub fn verify_eq1(input: &LcInput) -> Result<Eq1Report, LcError> {
    let chamber = input.chamber;
    let plan = ContractionPlan::of_chamber(chamber)?;
    let d: Vec<BoundaryIndex> = plan.contracted().iter().copied().collect();
    let k = canonical_divisor_m05();
    let f = build_f(chamber)?;
    let beta = &input.beta;

    let mut lhs = k.add(&f.scale(beta))?;
    for (i, a) in &input.alphas {
        lhs = lhs.add(&DivisorClass::boundary(*i).scale(a))?;
    }

    let pull_k = k.sub(&DivisorClass::sum_of(5, &d, &Rational::one())?)?;
    let mut pull_f = f.clone();
    for i in &d {
        let order = order_along_center(&plan, i)? as i64;
        pull_f = pull_f.add(&DivisorClass::boundary(*i).scale(&int(order)))?;
    }
    let mut residual = DivisorClass::zero(5);
    for (i, c) in input.residual_coefficients() {
        residual = residual.add(&DivisorClass::boundary(i).scale(&c))?;
    }
    let rhs = pull_k.add(&pull_f.scale(beta))?.add(&residual)?;

    let failing_curve = first_difference(&lhs, &rhs)?;
    let effective = input.residual_coefficients().values().all(|c| !c.is_negative());
    Ok(Eq1Report {
        holds: failing_curve.is_none(),
        failing_curve,
        residual,
        effective,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub curve: VitalCurve,
    pub value: Rational,
    /// The curve's doubleton block lies in `D`.
    pub contracted: bool,
    /// `value == 0` exactly on contracted curves and `> 0` elsewhere;
    /// only demanded when `beta > 1/2`.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelVerdict {
    pub in_range: bool,
    /// Some `alpha_I - 3 beta + 1` is exactly zero.
    pub boundary: bool,
    pub surface: SurfaceIdentification,
    pub certificates: Vec<Certificate>,
}

impl ModelVerdict {
    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.ok)
    }
}

pub fn identify_lc_model(input: &LcInput) -> Result<ModelVerdict, LcError> {
    let chamber = input.chamber;
    let residual = input.residual_coefficients();
    let positive_beta = input.beta > half();
    let in_range = positive_beta && residual.values().all(|c| !c.is_negative());
    let boundary = residual.values().any(Rational::is_zero);
    let l = build_l(chamber, &input.beta)?;
    let certificates = all_vital_curves(5)?
        .into_iter()
        .map(|curve| {
            let value = pair(&l, &curve)?;
            let doubleton = curve.doubleton().expect("n = 5 curves have one doubleton");
            let contracted = chamber.d_set.contains(&doubleton);
            let ok = !positive_beta || if contracted { value.is_zero() } else { value.is_positive() };
            Ok(Certificate {
                curve,
                value,
                contracted,
                ok,
            })
        })
        .collect::<Result<Vec<_>, LcError>>()?;
    Ok(ModelVerdict {
        in_range,
        boundary,
        surface: identify_surface(chamber)?,
        certificates,
    })
}

fn binom2(j: usize) -> Rational {
    int((j * (j - 1) / 2) as i64)
}

/// A combination of the level sums `D(j)` on `M_{0, n*(1/k)}`; the basis is
/// `D(2)` together with `D(j)` for `k < j <= floor(n/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricDivisor {
    pub n: usize,
    pub level: usize,
    pub coefficients: BTreeMap<usize, Rational>,
}

fn check_level(n: usize, level: usize) -> Result<(), LcError> {
    if n >= 5 && level >= 2 && level <= (n - 1) / 2 {
        Ok(())
    } else {
        Err(LcError::Levels { n, k: level, l: 0 })
    }
}

impl SymmetricDivisor {
    pub fn zero(n: usize, level: usize) -> Result<Self, LcError> {
        check_level(n, level)?;
        let coefficients = Self::basis(n, level).into_iter().map(|j| (j, Rational::zero())).collect();
        Ok(SymmetricDivisor { n, level, coefficients })
    }

    pub fn basis(n: usize, level: usize) -> Vec<usize> {
        std::iter::once(2).chain(level + 1..=n / 2).collect()
    }

    pub fn coefficient(&self, j: usize) -> Rational {
        self.coefficients.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_at(&mut self, j: usize, value: &Rational) {
        debug_assert!(self.coefficients.contains_key(&j), "level {j} outside the basis");
        *self.coefficients.get_mut(&j).expect("basis level") += value.clone();
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(Rational::is_zero)
    }

    /// Levels with a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients.iter().filter(|(_, c)| !c.is_zero()).map(|(j, _)| *j).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self, LcError> {
        if (self.n, self.level) != (other.n, other.level) {
            return Err(LcError::WrongLevel {
                expected: self.level,
                found: other.level,
            });
        }
        let mut out = self.clone();
        for (j, c) in &other.coefficients {
            out.add_at(*j, c);
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = self.clone();
        for c in out.coefficients.values_mut() {
            *c = &*c * factor;
        }
        out
    }
}

/// Canonical class of `M_{0, n*(1/k)}`.
pub fn canonical_divisor_sym(n: usize, k: usize) -> Result<SymmetricDivisor, LcError> {
    let mut d = SymmetricDivisor::zero(n, k)?;
    let t = Rational::new(2, n as i64 - 1);
    d.add_at(2, &-t.clone());
    for j in k + 1..=n / 2 {
        d.add_at(j, &(int(j as i64 - 2) - &t * &binom2(j)));
    }
    Ok(d)
}

/// Total boundary `D(2) + sum_{j > k} D(j)` of `M_{0, n*(1/k)}`.
pub fn boundary_sym(n: usize, k: usize) -> Result<SymmetricDivisor, LcError> {
    let mut d = SymmetricDivisor::zero(n, k)?;
    for j in SymmetricDivisor::basis(n, k) {
        d.add_at(j, &Rational::one());
    }
    Ok(d)
}

fn check_pullback(n: usize, k: usize, l: usize) -> Result<(), LcError> {
    let ok = l >= 1 && k >= l + 2 && n >= 5 && k <= (n - 1) / 2;
    if ok {
        Ok(())
    } else {
        Err(LcError::Levels { n, k, l })
    }
}

/// Pullback along the reduction `M_{0, n*(1/(k-l))} -> M_{0, n*(1/k)}`.
pub fn pullback_sym(n: usize, k: usize, l: usize, d: &SymmetricDivisor) -> Result<SymmetricDivisor, LcError> {
    check_pullback(n, k, l)?;
    if (d.n, d.level) != (n, k) {
        return Err(LcError::WrongLevel {
            expected: k,
            found: d.level,
        });
    }
    let mut out = SymmetricDivisor::zero(n, k - l)?;
    let c2 = d.coefficient(2);
    out.add_at(2, &c2);
    for j in k - l + 1..=k {
        out.add_at(j, &(&c2 * &binom2(j)));
    }
    for j in k + 1..=n / 2 {
        out.add_at(j, &d.coefficient(j));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCoefficient {
    pub level: usize,
    /// From expanding the canonical class, boundary and pullback.
    pub derived: Rational,
    /// The closed form `alpha + (2/(n-1)) C(j,2) + j - 2` as printed in the
    /// literature, reported for comparison only.
    pub displayed: Rational,
    pub nonnegative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub divisor: SymmetricDivisor,
    pub levels: Vec<LevelCoefficient>,
    /// Support within the contracted levels `k-l+1..=k`.
    pub exceptional: bool,
    pub effective: bool,
}

/// `K_B + alpha D_{k-l} - rho^*(K_A + alpha D_k)` on `B = n*(1/(k-l))`.
pub fn discrepancy_sym(n: usize, k: usize, l: usize, alpha: &Rational) -> Result<Discrepancy, LcError> {
    check_pullback(n, k, l)?;
    let low = k - l;
    let upstairs = canonical_divisor_sym(n, k)?.add(&boundary_sym(n, k)?.scale(alpha))?;
    let pulled = pullback_sym(n, k, l, &upstairs)?;
    let here = canonical_divisor_sym(n, low)?.add(&boundary_sym(n, low)?.scale(alpha))?;
    let divisor = here.add(&pulled.scale(&int(-1)))?;

    let exceptional = divisor.support().iter().all(|j| (low + 1..=k).contains(j));
    let t = Rational::new(2, n as i64 - 1);
    let levels: Vec<LevelCoefficient> = (low + 1..=k)
        .map(|j| {
            let derived = divisor.coefficient(j);
            LevelCoefficient {
                level: j,
                displayed: alpha + &(&t * &binom2(j)) + int(j as i64 - 2),
                nonnegative: !derived.is_negative(),
                derived,
            }
        })
        .collect();
    let effective = levels.iter().all(|c| c.nonnegative);
    Ok(Discrepancy {
        divisor,
        levels,
        exceptional,
        effective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_checks() {
        assert!(canonical_divisor_sym(7, 3).is_ok());
        assert!(canonical_divisor_sym(7, 4).is_err());
        assert!(pullback_sym(7, 3, 2, &SymmetricDivisor::zero(7, 3).unwrap()).is_err());
        assert!(discrepancy_sym(9, 5, 1, &Rational::one()).is_err());
    }

    #[test]
    fn basis_levels() {
        assert_eq!(SymmetricDivisor::basis(7, 3), vec![2]);
        assert_eq!(SymmetricDivisor::basis(7, 2), vec![2, 3]);
        assert_eq!(SymmetricDivisor::basis(9, 2), vec![2, 3, 4]);
    }
}
