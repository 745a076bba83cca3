//! Exact rationals, affine forms and strict-inequality feasibility.

mod form;
mod rational;
pub(crate) mod simplex;

pub use form::{LinearForm, StrictSystem};
pub use rational::{q, Rational};

use simplex::LpOutcome;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot parse rational {token:?}: {reason}")]
    Parse { token: String, reason: String },
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("constraint system has no strictly feasible point")]
    Infeasible,
    #[error("internal verification failed: {0}")]
    Verification(String),
}

/// Outcome of [`strict_feasible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Infeasible,
    Feasible {
        witness: Vec<Rational>,
        /// Optimal common slack of the LP that produced the witness.
        slack: Rational,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible { witness, .. } => Some(witness),
            Feasibility::Infeasible => None,
        }
    }
}

/// Row `-c·x + t <= constant` (or without `t` when `slack` is false) for the
/// constraint `c·x + constant >= t`.
fn push_row(
    rows: &mut Vec<Vec<Rational>>,
    rhs: &mut Vec<Rational>,
    form: &LinearForm,
    slack: bool,
) {
    let mut row: Vec<Rational> = form.coefficients.iter().map(|c| -c).collect();
    row.push(if slack { Rational::one() } else { Rational::zero() });
    rows.push(row);
    rhs.push(form.constant.clone());
}

fn slack_lp(system: &StrictSystem, weak_slack: bool) -> LpOutcome {
    let n = system.dim;
    let mut rows = Vec::with_capacity(system.strict.len() + system.weak.len() + 1);
    let mut rhs = Vec::with_capacity(rows.capacity());
    for form in &system.strict {
        push_row(&mut rows, &mut rhs, form, true);
    }
    for form in &system.weak {
        push_row(&mut rows, &mut rhs, form, weak_slack);
    }
    let mut cap = vec![Rational::zero(); n + 1];
    cap[n] = Rational::one();
    rows.push(cap);
    rhs.push(Rational::one());
    simplex::maximize(&rows, &rhs, n)
}

/// Decides whether some point satisfies every strict constraint strictly and
/// every weak constraint weakly.
///
/// The witness maximises a common slack `t <= 1`. The first attempt imposes
/// the slack on weak constraints too, which centres the witness; only when
/// that optimum is not positive is the slack dropped from the weak rows.
/// Every witness is re-substituted exactly before it is returned.
pub fn strict_feasible(system: &StrictSystem) -> Result<Feasibility, ArithError> {
    system.check_dims()?;
    let n = system.dim;
    let attempts: &[bool] = if system.weak.is_empty() {
        &[true]
    } else {
        &[true, false]
    };
    for &weak_slack in attempts {
        match slack_lp(system, weak_slack) {
            LpOutcome::Optimal(mut y) => {
                let slack = y.pop().expect("slack coordinate");
                debug_assert_eq!(y.len(), n);
                if slack.is_positive() {
                    if !system.satisfied_by(&y)? {
                        return Err(ArithError::Verification(format!(
                            "witness {y:?} with slack {slack} violates the system"
                        )));
                    }
                    return Ok(Feasibility::Feasible { witness: y, slack });
                }
            }
            LpOutcome::Infeasible => return Ok(Feasibility::Infeasible),
            LpOutcome::Unbounded => {
                return Err(ArithError::Verification(
                    "slack objective unbounded despite cap".into(),
                ))
            }
        }
    }
    Ok(Feasibility::Infeasible)
}

/// The slack-maximising witness of a strictly feasible system.
pub fn interior_point(system: &StrictSystem) -> Result<Vec<Rational>, ArithError> {
    match strict_feasible(system)? {
        Feasibility::Feasible { witness, .. } => Ok(witness),
        Feasibility::Infeasible => Err(ArithError::Infeasible),
    }
}
