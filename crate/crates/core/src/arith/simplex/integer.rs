//! Integer-preserving variant of the dual tableau.
//!
//! The tableau is kept as an integer matrix `A` together with a positive
//! integer `det` such that the true entries are `A / det`. A pivot on
//! `(r, c)` leaves row `r` untouched, replaces every other entry by
//! `(A_ij A_rc - A_ic A_rj) / det` (an exact division) and sets
//! `det = A_rc`. Row scaling of the primal rows makes the data integral;
//! positive scaling of dual columns does not change any Bland decision, so
//! this path pivots exactly like the rational one.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{LpOutcome, Overflow};
use crate::arith::Rational;

fn to_i64(value: i128) -> Result<i64, Overflow> {
    i64::try_from(value).map_err(|_| Overflow)
}

/// Scales `row` and `rhs` by the least common denominator.
fn integral_row(row: &[Rational], rhs: &Rational) -> Result<(Vec<i64>, i64), Overflow> {
    let mut lcm: i64 = 1;
    for x in row.iter().chain(std::iter::once(rhs)) {
        let d = x.denom().to_i64().ok_or(Overflow)?;
        lcm = lcm.checked_mul(d / lcm.gcd(&d)).ok_or(Overflow)?;
    }
    let scale = |x: &Rational| -> Result<i64, Overflow> {
        let num = x.numer().to_i64().ok_or(Overflow)?;
        let d = x.denom().to_i64().ok_or(Overflow)?;
        num.checked_mul(lcm / d).ok_or(Overflow)
    };
    let ints = row.iter().map(scale).collect::<Result<Vec<_>, _>>()?;
    Ok((ints, scale(rhs)?))
}

struct IntTableau {
    /// `p` constraint rows then the objective row; each row holds `m + p`
    /// column entries followed by the right-hand side.
    cells: Vec<Vec<i64>>,
    basis: Vec<usize>,
    det: i64,
    structural: usize,
}

impl IntTableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn rhs(&self, r: usize) -> i64 {
        *self.cells[r].last().expect("rhs column")
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), Overflow> {
        let pivot = self.cells[row][col] as i128;
        debug_assert!(pivot > 0);
        let det = self.det as i128;
        let pivot_row = self.cells[row].clone();
        for (r, cells) in self.cells.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = cells[col] as i128;
            for (entry, &pr) in cells.iter_mut().zip(&pivot_row) {
                let num = (*entry as i128) * pivot - factor * (pr as i128);
                let (q, rem) = num.div_rem(&det);
                if !rem.is_zero() {
                    return Err(Overflow);
                }
                *entry = to_i64(q)?;
            }
        }
        self.det = to_i64(pivot)?;
        self.basis[row] = col;
        Ok(())
    }

    /// Overwrites the objective row with `det * cost - sum_r cost_B(r) * row_r`.
    fn price(&mut self, costs: &[i64]) -> Result<(), Overflow> {
        let p = self.rows();
        let width = self.cells[0].len();
        let mut objective = vec![0i128; width];
        for (j, &c) in costs.iter().enumerate() {
            objective[j] = c as i128 * self.det as i128;
        }
        for r in 0..p {
            let cb = costs[self.basis[r]] as i128;
            if cb == 0 {
                continue;
            }
            for (o, &a) in objective.iter_mut().zip(&self.cells[r]) {
                *o -= cb * a as i128;
            }
        }
        self.cells[p] = objective.into_iter().map(to_i64).collect::<Result<_, _>>()?;
        Ok(())
    }

    fn run(&mut self) -> Result<bool, Overflow> {
        let p = self.rows();
        loop {
            let Some(col) = (0..self.structural).find(|&j| self.cells[p][j] < 0) else {
                return Ok(true);
            };
            let mut best: Option<usize> = None;
            for r in 0..p {
                let a = self.cells[r][col];
                if a <= 0 {
                    continue;
                }
                best = match best {
                    None => Some(r),
                    Some(b) => {
                        // Compare rhs_r / a_r with rhs_b / a_b.
                        let lhs = self.rhs(r) as i128 * self.cells[b][col] as i128;
                        let rhs = self.rhs(b) as i128 * a as i128;
                        if lhs < rhs || (lhs == rhs && self.basis[r] < self.basis[b]) {
                            Some(r)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some(row) => self.pivot(row, col)?,
            }
        }
    }
}

pub(crate) fn solve(rows: &[Vec<Rational>], rhs: &[Rational], obj: usize) -> Result<LpOutcome, Overflow> {
    let m = rows.len();
    let p = rows.first().map_or(obj + 1, Vec::len);
    let width = m + p + 1;
    let mut cells = vec![vec![0i64; width]; p + 1];
    let mut costs = vec![0i64; m + p];
    for (j, (row, h)) in rows.iter().zip(rhs).enumerate() {
        let (ints, h) = integral_row(row, h)?;
        for (k, v) in ints.into_iter().enumerate() {
            cells[k][j] = v;
        }
        costs[j] = h;
    }
    for k in 0..p {
        cells[k][m + k] = 1;
        cells[k][m + p] = (k == obj) as i64;
    }
    let mut tab = IntTableau {
        cells,
        basis: (m..m + p).collect(),
        det: 1,
        structural: m,
    };

    let mut phase_one = vec![0i64; m + p];
    for c in phase_one.iter_mut().skip(m) {
        *c = 1;
    }
    tab.price(&phase_one)?;
    if !tab.run()? {
        unreachable!("phase one objective is bounded below by zero");
    }
    for r in 0..p {
        if tab.basis[r] >= m && tab.rhs(r) != 0 {
            return Ok(LpOutcome::Unbounded);
        }
    }
    for r in 0..p {
        if tab.basis[r] >= m {
            if let Some(col) = (0..m).find(|&j| tab.cells[r][j] != 0) {
                if tab.cells[r][col] < 0 {
                    // The row has rhs 0, so flipping it keeps the pivot positive.
                    for v in tab.cells[r].iter_mut() {
                        *v = v.checked_neg().ok_or(Overflow)?;
                    }
                }
                tab.pivot(r, col)?;
            }
        }
    }

    tab.price(&costs)?;
    if !tab.run()? {
        return Ok(LpOutcome::Infeasible);
    }

    // Artificial k has cost 0, so its reduced cost is -y_k.
    let det = tab.det;
    let y = (0..p)
        .map(|k| Rational::new(-tab.cells[p][m + k], det))
        .collect();
    Ok(LpOutcome::Optimal(y))
}
