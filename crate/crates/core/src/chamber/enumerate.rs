use rayon::prelude::*;

use super::weight::domain_system;
use super::{check_n, d_set_of, generate_walls, Chamber, ChamberError, ChamberSet, Sign, Wall, Weight};
use crate::arith::{interior_point, strict_feasible, Feasibility, Rational, StrictSystem};
use crate::marks::MarkSet;

/// A region of the partially built arrangement with a point strictly inside.
struct Region {
    signs: Vec<Sign>,
    witness: Vec<Rational>,
}

/// Sign of wall `subset` implied by the signs already assigned, using only
/// positivity of the weights and `sum > 2`:
///
/// * `A(L) < 1` and `S ⊆ L` give `A(S) < 1`;
/// * `A(H) > 1` and `H ⊆ S` give `A(S) > 1`;
/// * `A(L) < 1` and `L^c ⊆ S` give `A(S) > 1`.
fn implied_sign(n: usize, walls: &[Wall], signs: &[Sign], subset: MarkSet) -> Option<Sign> {
    for (wall, &sign) in walls.iter().zip(signs) {
        let other = wall.subset;
        match sign {
            Sign::Minus if subset.is_subset(other) => return Some(Sign::Minus),
            Sign::Minus if other.complement(n).is_subset(subset) => return Some(Sign::Plus),
            Sign::Plus if other.is_subset(subset) => return Some(Sign::Plus),
            _ => {}
        }
    }
    None
}

/// Region constraints with every side that [`implied_sign`] can derive from
/// another assigned side removed. These implications survive a common
/// positive slack, so the reduced system has the same slack optimum as the
/// full one.
pub(crate) fn reduced_system(n: usize, walls: &[Wall], signs: &[Sign]) -> StrictSystem {
    let mut sys = domain_system(n);
    for (k, (wall, &sign)) in walls.iter().zip(signs).enumerate() {
        let s = wall.subset;
        let redundant = walls.iter().zip(signs).enumerate().any(|(j, (other, &other_sign))| {
            if j == k {
                return false;
            }
            let o = other.subset;
            match (sign, other_sign) {
                (Sign::Minus, Sign::Minus) => s.is_subset(o) && s != o,
                (Sign::Plus, Sign::Plus) => o.is_subset(s) && s != o,
                (Sign::Plus, Sign::Minus) => o.complement(n).is_subset(s),
                (Sign::Minus, Sign::Plus) => false,
            }
        });
        if !redundant {
            sys.push_strict(wall.side(sign));
        }
    }
    sys
}

fn split(n: usize, walls: &[Wall], region: Region, next: usize) -> Result<Vec<Region>, ChamberError> {
    let wall = &walls[next];
    let prior = &walls[..next];
    if let Some(sign) = implied_sign(n, prior, &region.signs, wall.subset) {
        let mut signs = region.signs;
        signs.push(sign);
        return Ok(vec![Region {
            signs,
            witness: region.witness,
        }]);
    }
    let base = reduced_system(n, prior, &region.signs);
    let probe = |sign: Sign| -> Result<Option<Region>, ChamberError> {
        let sys = base.clone().with_strict(wall.side(sign));
        Ok(match strict_feasible(&sys)? {
            Feasibility::Feasible { witness, .. } => {
                let mut signs = region.signs.clone();
                signs.push(sign);
                Some(Region { signs, witness })
            }
            Feasibility::Infeasible => None,
        })
    };
    let value = wall.form.eval(&region.witness)?;
    let (kept_side, probe_side) = if value.is_positive() {
        (Some(Sign::Plus), Sign::Minus)
    } else if value.is_negative() {
        (Some(Sign::Minus), Sign::Plus)
    } else {
        (None, Sign::Minus)
    };
    let mut out = Vec::with_capacity(2);
    match kept_side {
        Some(sign) => {
            let mut signs = region.signs.clone();
            signs.push(sign);
            out.push(Region {
                signs,
                witness: region.witness.clone(),
            });
            out.extend(probe(probe_side)?);
        }
        None => {
            out.extend(probe(Sign::Plus)?);
            out.extend(probe(Sign::Minus)?);
        }
    }
    Ok(out)
}

/// Every nonempty chamber for `n` markings, by incremental wall insertion.
///
/// Each step tries to split every current region by the next wall; a side is
/// kept only if it is strictly feasible. Chambers are returned sorted by sign
/// vector (`+` before `-`), ids are their ranks, and each carries the
/// slack-maximising point of its reduced constraint system.
pub fn enumerate_chambers(n: usize) -> Result<ChamberSet, ChamberError> {
    check_n(n)?;
    enumerate_arrangement(n, generate_walls(n)?)
}

/// Chambers cut out of the domain by an arbitrary list of subset walls,
/// taken in the given order.
pub fn enumerate_arrangement(n: usize, walls: Vec<Wall>) -> Result<ChamberSet, ChamberError> {
    check_n(n)?;
    let domain = domain_system(n);
    let mut regions = vec![Region {
        signs: Vec::new(),
        witness: interior_point(&domain)?,
    }];
    for next in 0..walls.len() {
        let pieces: Vec<Vec<Region>> = regions
            .into_par_iter()
            .map(|r| split(n, &walls, r, next))
            .collect::<Result<_, _>>()?;
        regions = pieces.into_iter().flatten().collect();
    }
    regions.sort_by(|a, b| a.signs.cmp(&b.signs));
    let chambers = regions
        .into_par_iter()
        .enumerate()
        .map(|(id, region)| {
            let sys = reduced_system(n, &walls, &region.signs);
            let point = interior_point(&sys)?;
            let full = super::chamber_system(n, &walls, &region.signs);
            if !full.satisfied_by(&point)? {
                return Err(ChamberError::Arith(crate::arith::ArithError::Verification(format!(
                    "representative of chamber {id} fails its full system"
                ))));
            }
            Ok(Chamber {
                id,
                n,
                d_set: d_set_of(n, &walls, &region.signs),
                signs: region.signs,
                representative: Weight::new(point)?,
            })
        })
        .collect::<Result<Vec<_>, ChamberError>>()?;
    Ok(ChamberSet { n, walls, chambers })
}
