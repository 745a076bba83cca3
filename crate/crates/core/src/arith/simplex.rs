//! Dense exact simplex for `maximize y[obj] subject to rows·y <= rhs`, with
//! `y` free.
//!
//! The primal has few variables (at most nine) and a few dozen rows, so the
//! solver runs the textbook two-phase method on the dual
//! `minimize rhs·u subject to rowsᵀ u = e_obj, u >= 0`, whose tableau has one
//! row per primal variable. The primal optimum is recovered as the simplex
//! multipliers of the final dual basis. Pivoting follows Bland's rule, so the
//! result depends only on the row order.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use super::Rational;

mod integer;

/// Field operations the tableau needs. Fallible so a machine-word backend can
/// report overflow and let the caller retry with big integers.
pub(crate) trait Scalar: Clone + Ord {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(value: &Rational) -> Option<Self>;
    fn to_rational(&self) -> Rational;
    fn add(&self, rhs: &Self) -> Option<Self>;
    fn sub(&self, rhs: &Self) -> Option<Self>;
    fn mul(&self, rhs: &Self) -> Option<Self>;
    fn div(&self, rhs: &Self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
}

impl Scalar for Ratio<i64> {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(value: &Rational) -> Option<Self> {
        Some(Ratio::new_raw(value.numer().to_i64()?, value.denom().to_i64()?))
    }
    fn to_rational(&self) -> Rational {
        Rational::from_big(BigRational::new(
            BigInt::from(*self.numer()),
            BigInt::from(*self.denom()),
        ))
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        self.checked_add(rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        self.checked_sub(rhs)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        self.checked_mul(rhs)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        self.checked_div(rhs)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(value: &Rational) -> Option<Self> {
        Some(value.as_big().clone())
    }
    fn to_rational(&self) -> Rational {
        Rational::from_big(self.clone())
    }
    fn add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Option<Self> {
        Some(self / rhs)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal(Vec<Rational>),
    /// No `y` satisfies the rows.
    Infeasible,
    /// The objective is unbounded above.
    Unbounded,
}

/// Marker for machine-word overflow inside the small backend.
#[derive(Debug)]
pub(crate) struct Overflow;

/// Solves the LP, first with `i64` ratios and, on overflow, with big
/// rationals. Both runs pivot identically, so the answer does not depend on
/// which backend finished.
pub(crate) fn maximize(rows: &[Vec<Rational>], rhs: &[Rational], obj: usize) -> LpOutcome {
    match integer::solve(rows, rhs, obj) {
        Ok(outcome) => outcome,
        Err(Overflow) => solve::<BigRational>(rows, rhs, obj)
            .unwrap_or_else(|_| unreachable!("big rationals cannot overflow")),
    }
}

struct Tableau<T> {
    /// `p` rows of `m + p` entries (structural columns then artificials).
    cells: Vec<Vec<T>>,
    values: Vec<T>,
    basis: Vec<usize>,
    reduced: Vec<T>,
    structural: usize,
}

fn conv<T: Scalar>(value: &Rational) -> Result<T, Overflow> {
    T::from_rational(value).ok_or(Overflow)
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) -> Result<(), Overflow> {
        let width = self.cells[row].len();
        let pivot = self.cells[row][col].clone();
        if !(pivot == T::one()) {
            for j in 0..width {
                if !self.cells[row][j].is_zero() {
                    self.cells[row][j] = self.cells[row][j].div(&pivot).ok_or(Overflow)?;
                }
            }
            self.values[row] = self.values[row].div(&pivot).ok_or(Overflow)?;
        }
        let pivot_row = self.cells[row].clone();
        let pivot_value = self.values[row].clone();
        for r in 0..self.cells.len() {
            if r == row {
                continue;
            }
            let factor = self.cells[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    let delta = factor.mul(&pivot_row[j]).ok_or(Overflow)?;
                    self.cells[r][j] = self.cells[r][j].sub(&delta).ok_or(Overflow)?;
                }
            }
            let delta = factor.mul(&pivot_value).ok_or(Overflow)?;
            self.values[r] = self.values[r].sub(&delta).ok_or(Overflow)?;
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    let delta = factor.mul(&pivot_row[j]).ok_or(Overflow)?;
                    self.reduced[j] = self.reduced[j].sub(&delta).ok_or(Overflow)?;
                }
            }
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Recomputes reduced costs `cost_j - c_B · column_j` from scratch.
    fn price(&mut self, costs: &[T]) -> Result<(), Overflow> {
        let width = costs.len();
        let mut reduced = costs.to_vec();
        for (r, row) in self.cells.iter().enumerate() {
            let cb = &costs[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    let delta = cb.mul(&row[j]).ok_or(Overflow)?;
                    reduced[j] = reduced[j].sub(&delta).ok_or(Overflow)?;
                }
            }
        }
        self.reduced = reduced;
        Ok(())
    }

    /// Bland's rule over structural columns. Returns false when unbounded.
    fn run(&mut self) -> Result<bool, Overflow> {
        loop {
            let Some(col) = (0..self.structural).find(|&j| self.reduced[j].is_negative()) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.cells.len() {
                let a = &self.cells[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.values[r].div(a).ok_or(Overflow)?;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio || (ratio == bratio && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some((row, _)) => self.pivot(row, col)?,
            }
        }
    }
}

pub(crate) fn solve<T: Scalar>(
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    obj: usize,
) -> Result<LpOutcome, Overflow> {
    let m = rows.len();
    let p = rows.first().map_or(obj + 1, Vec::len);
    debug_assert!(obj < p);
    debug_assert_eq!(rhs.len(), m);
    let width = m + p;

    let mut cells = vec![vec![T::zero(); width]; p];
    for (j, row) in rows.iter().enumerate() {
        debug_assert_eq!(row.len(), p);
        for (k, entry) in row.iter().enumerate() {
            if !entry.is_zero() {
                cells[k][j] = conv(entry)?;
            }
        }
    }
    for (k, row) in cells.iter_mut().enumerate() {
        row[m + k] = T::one();
    }
    let values = (0..p)
        .map(|k| if k == obj { T::one() } else { T::zero() })
        .collect();
    let mut tab = Tableau {
        cells,
        values,
        basis: (m..m + p).collect(),
        reduced: Vec::new(),
        structural: m,
    };

    // Phase 1: minimise the sum of artificials.
    let mut phase_one = vec![T::zero(); width];
    for cost in phase_one.iter_mut().skip(m) {
        *cost = T::one();
    }
    tab.price(&phase_one)?;
    if !tab.run()? {
        unreachable!("phase one objective is bounded below by zero");
    }
    for r in 0..p {
        if tab.basis[r] >= m && !tab.values[r].is_zero() {
            // Dual infeasible: the primal objective is unbounded.
            return Ok(LpOutcome::Unbounded);
        }
    }
    for r in 0..p {
        if tab.basis[r] >= m {
            if let Some(col) = (0..m).find(|&j| !tab.cells[r][j].is_zero()) {
                tab.pivot(r, col)?;
            }
        }
    }

    // Phase 2: minimise rhs·u.
    let mut costs = vec![T::zero(); width];
    for (j, h) in rhs.iter().enumerate() {
        costs[j] = conv(h)?;
    }
    tab.price(&costs)?;
    if !tab.run()? {
        return Ok(LpOutcome::Infeasible);
    }

    let mut y = Vec::with_capacity(p);
    for k in 0..p {
        let mut acc = T::zero();
        for r in 0..p {
            let cb = &costs[tab.basis[r]];
            let binv = &tab.cells[r][m + k];
            if !cb.is_zero() && !binv.is_zero() {
                acc = acc.add(&cb.mul(binv).ok_or(Overflow)?).ok_or(Overflow)?;
            }
        }
        y.push(acc.to_rational());
    }
    Ok(LpOutcome::Optimal(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn box_maximum() {
        // maximize y1 with y0 <= 2, y1 - y0 <= 1, y1 <= 5
        let rows = vec![vec![r(1), r(0)], vec![r(-1), r(1)], vec![r(0), r(1)]];
        let rhs = vec![r(2), r(1), r(5)];
        match maximize(&rows, &rhs, 1) {
            LpOutcome::Optimal(y) => assert_eq!(y[1], r(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // y0 <= -1 and -y0 <= -1 cannot both hold.
        let rows = vec![vec![r(1), r(0)], vec![r(-1), r(0)], vec![r(0), r(1)]];
        let rhs = vec![r(-1), r(-1), r(1)];
        assert_eq!(maximize(&rows, &rhs, 1), LpOutcome::Infeasible);
        let rows = vec![vec![r(1), r(-1)]];
        assert_eq!(maximize(&rows, &[r(0)], 1), LpOutcome::Unbounded);
    }

    #[test]
    fn backends_agree() {
        let rows = vec![
            vec![q(3, 7), q(-2, 5), r(1)],
            vec![q(-1, 3), q(4, 9), r(1)],
            vec![r(1), r(1), r(0)],
            vec![r(0), r(0), r(1)],
        ];
        let rhs = vec![q(1, 2), q(2, 3), r(4), r(10)];
        let small = solve::<Ratio<i64>>(&rows, &rhs, 2).unwrap();
        let big = solve::<BigRational>(&rows, &rhs, 2).unwrap();
        let int = integer::solve(&rows, &rhs, 2).unwrap();
        assert_eq!(small, big);
        assert_eq!(int, big);
    }

    proptest::proptest! {
        #[test]
        fn integer_pivoting_matches_rationals(
            data in proptest::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3, 1i64..=4), 1..7),
            bound in 1i64..5,
        ) {
            let mut rows: Vec<Vec<Rational>> = data
                .iter()
                .map(|&(a, b, c, d)| vec![q(a, d), q(b, d), r(c)])
                .collect();
            let mut rhs: Vec<Rational> = data.iter().map(|&(a, _, c, d)| q(a + c, d)).collect();
            rows.push(vec![r(0), r(0), r(1)]);
            rhs.push(r(bound));
            let big = solve::<BigRational>(&rows, &rhs, 2).unwrap();
            let int = integer::solve(&rows, &rhs, 2).unwrap();
            proptest::prop_assert_eq!(int, big);
        }
    }

    #[test]
    fn overflow_falls_back() {
        let huge = Rational::from_big(BigRational::new(
            BigInt::from(10).pow(30),
            BigInt::from(3),
        ));
        let rows = vec![vec![r(1)]];
        assert!(solve::<Ratio<i64>>(&rows, &[huge.clone()], 0).is_err());
        assert!(integer::solve(&rows, &[huge.clone()], 0).is_err());
        assert_eq!(maximize(&rows, &[huge.clone()], 0), LpOutcome::Optimal(vec![huge]));
    }
}
