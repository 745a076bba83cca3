use hassett_core::arith::{q, Rational};
use hassett_core::intersection::{
    all_vital_curves, classes_equal, intersect, intersect_with_anchor, is_f_nef, pair,
    pairing_vector, BoundaryIndex, DivisorClass, FNef, IntersectionError, VitalCurve,
};
use hassett_core::marks::MarkSet;
use proptest::prelude::*;

fn stirling2(n: usize, k: usize) -> u64 {
    match (n, k) {
        (0, 0) => 1,
        (_, 0) | (0, _) => 0,
        _ => k as u64 * stirling2(n - 1, k) + stirling2(n - 1, k - 1),
    }
}

/// Surjections onto four labels, divided by 4!.
fn partitions_by_brute_force(n: usize) -> u64 {
    let mut surjective = 0u64;
    for code in 0..4u64.pow(n as u32) {
        let mut seen = [false; 4];
        let mut c = code;
        for _ in 0..n {
            seen[(c % 4) as usize] = true;
            c /= 4;
        }
        if seen.iter().all(|&s| s) {
            surjective += 1;
        }
    }
    surjective / 24
}

fn idx(labels: &[usize]) -> BoundaryIndex {
    BoundaryIndex::of(5, labels).unwrap()
}

fn c12345() -> VitalCurve {
    VitalCurve::of(5, [&[1], &[2], &[3], &[4, 5]]).unwrap()
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in 0..cols {
                    let v = &f * &rows[r][j];
                    rows[i][j] -= &v;
                }
            }
        }
        r += 1;
    }
    r
}

#[test]
fn vital_curve_counts() {
    for n in 4..=8 {
        let curves = all_vital_curves(n).unwrap();
        assert_eq!(curves.len() as u64, stirling2(n, 4), "n = {n}");
        assert_eq!(curves.len() as u64, partitions_by_brute_force(n), "n = {n}");
        assert!(curves.windows(2).all(|w| w[0] < w[1]));
    }
    assert_eq!(all_vital_curves(4).unwrap().len(), 1);
    assert_eq!(all_vital_curves(5).unwrap().len(), 10);
    assert_eq!(all_vital_curves(6).unwrap().len(), 65);
    assert!(all_vital_curves(5).unwrap().iter().all(|c| c.doubleton().is_some()));
    assert_eq!(all_vital_curves(3), Err(IntersectionError::OutOfRange(3)));
}

#[test]
fn curves_are_in_block_order() {
    for c in all_vital_curves(6).unwrap() {
        let mins: Vec<usize> = c.blocks().iter().map(|b| b.labels()[0]).collect();
        assert!(mins.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn pairing_examples() {
    let c = c12345();
    assert_eq!(intersect(&idx(&[4, 5]), &c).unwrap(), q(-1, 1));
    assert_eq!(intersect(&idx(&[1, 2]), &c).unwrap(), q(1, 1));
    let neighbours: Rational = BoundaryIndex::all(5)
        .unwrap()
        .iter()
        .filter(|j| **j != idx(&[4, 5]))
        .map(|j| intersect(j, &c).unwrap())
        .sum();
    assert_eq!(neighbours, q(3, 1));
    let e = DivisorClass::total_boundary(5).unwrap();
    assert_eq!(pair(&e, &c).unwrap(), q(2, 1));
    assert_eq!(pair(&DivisorClass::zero(5), &c).unwrap(), q(0, 1));
}

#[test]
fn pairing_is_petersen_minus_identity() {
    let indices = BoundaryIndex::all(5).unwrap();
    let curves = all_vital_curves(5).unwrap();
    for j in &indices {
        for c in &curves {
            let d = c.doubleton().unwrap();
            let expected = if j.subset() == d {
                -1
            } else if j.subset().is_disjoint(d) {
                1
            } else {
                0
            };
            assert_eq!(intersect(j, c).unwrap(), q(expected, 1), "{j} . {c}");
        }
    }
}

#[test]
fn boundary_pairings_have_rank_five() {
    let rows: Vec<Vec<Rational>> = BoundaryIndex::all(5)
        .unwrap()
        .into_iter()
        .map(|j| pairing_vector(&DivisorClass::boundary(j)).unwrap())
        .collect();
    assert_eq!(rank(rows), 5);
}

#[test]
fn anchor_independence_up_to_n8() {
    for n in 5..=8 {
        let curves = all_vital_curves(n).unwrap();
        for j in BoundaryIndex::all(n).unwrap() {
            for c in &curves {
                let v: Vec<i64> = (0..4).map(|a| intersect_with_anchor(&j, c, a).unwrap()).collect();
                assert!(v.iter().all(|x| *x == v[0]), "{j} . {c}: {v:?}");
            }
        }
    }
}

#[test]
fn f_nef_examples() {
    let neg = DivisorClass::boundary(idx(&[1, 2])).scale(&q(-1, 1));
    match is_f_nef(&neg).unwrap() {
        FNef::Violated { curve, value } => {
            assert_eq!(curve, c12345());
            assert_eq!(value, q(-1, 1));
        }
        FNef::Nef => panic!("negative boundary divisor is not F-nef"),
    }
    assert!(is_f_nef(&DivisorClass::total_boundary(5).unwrap()).unwrap().is_nef());
    assert!(is_f_nef(&DivisorClass::zero(6)).unwrap().is_nef());
}

#[test]
fn class_equality() {
    let a = DivisorClass::boundary(idx(&[1, 2]));
    let b = DivisorClass::boundary(idx(&[1, 3]));
    assert!(classes_equal(&a, &a).unwrap());
    assert!(!classes_equal(&a, &b).unwrap());
    let doubleton_12 = VitalCurve::of(5, [&[1, 2], &[3], &[4], &[5]]).unwrap();
    assert_eq!(pair(&a, &doubleton_12).unwrap(), q(-1, 1));
    assert_eq!(pair(&b, &doubleton_12).unwrap(), q(0, 1));
    let six = DivisorClass::zero(6);
    assert_eq!(classes_equal(&six, &six), Err(IntersectionError::NotFive(6)));
    assert!(matches!(classes_equal(&a, &six), Err(IntersectionError::DimensionMismatch { .. })));
    assert!(pair(&six, &c12345()).is_err());
}

fn class_strategy(n: usize) -> impl Strategy<Value = DivisorClass> {
    class_in_range(n, -3, 3)
}

fn class_in_range(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = DivisorClass> {
    let count = BoundaryIndex::all(n).unwrap().len();
    prop::collection::vec(lo..=hi, count).prop_map(move |coeffs| {
        let mut d = DivisorClass::zero(n);
        for (j, c) in BoundaryIndex::all(n).unwrap().into_iter().zip(coeffs) {
            d = d.add(&DivisorClass::boundary(j).scale(&q(c, 1))).unwrap();
        }
        d
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_equivariant(
        d in class_strategy(6),
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
        which in 0usize..65,
    ) {
        let c = &all_vital_curves(6).unwrap()[which];
        prop_assert_eq!(pair(&d, c).unwrap(), pair(&d.permute(&perm), &c.permute(&perm)).unwrap());
    }

    #[test]
    fn f_nef_is_a_cone(x in class_in_range(5, 0, 3), y in class_in_range(5, 0, 3), a in 0i64..4, b in 0i64..4) {
        prop_assume!(is_f_nef(&x).unwrap().is_nef() && is_f_nef(&y).unwrap().is_nef());
        {
            let z = x.scale(&q(a, 1)).add(&y.scale(&q(b, 2))).unwrap();
            prop_assert!(is_f_nef(&z).unwrap().is_nef());
        }
    }

    #[test]
    fn pairing_is_linear(x in class_strategy(5), y in class_strategy(5), which in 0usize..10) {
        let c = &all_vital_curves(5).unwrap()[which];
        let sum = x.add(&y).unwrap();
        prop_assert_eq!(pair(&sum, c).unwrap(), pair(&x, c).unwrap() + pair(&y, c).unwrap());
    }
}

#[test]
fn canonical_index_tie_break() {
    let j = BoundaryIndex::new(6, MarkSet::of(&[2, 3, 4])).unwrap();
    assert_eq!(j.subset(), MarkSet::of(&[1, 5, 6]));
}
