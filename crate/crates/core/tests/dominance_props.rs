use frontier_surrogate::dominance::DEFAULT_ZERO_TOL;
use frontier_surrogate::{
    classify_against_frontier, dominates_strong, dominates_weak, non_dominated_filter,
    staircase_frontier, FrontierSide, PointSet, ScoreModel,
};
use proptest::prelude::*;

fn point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    // a coarse lattice makes ties and duplicates common
    prop::collection::vec((-4i32..4).prop_map(|v| v as f64 * 0.5), m)
}

fn point_set(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(m), 1..25)
}

proptest! {
    #[test]
    fn weak_is_reflexive_and_strong_irreflexive(a in point(3)) {
        prop_assert!(dominates_weak(&a, &a).unwrap());
        prop_assert!(!dominates_strong(&a, &a).unwrap());
    }

    #[test]
    fn strong_implies_weak(a in point(3), b in point(3)) {
        if dominates_strong(&a, &b).unwrap() {
            prop_assert!(dominates_weak(&a, &b).unwrap());
            prop_assert!(!dominates_weak(&b, &a).unwrap());
        }
    }

    #[test]
    fn dominance_is_transitive(a in point(2), b in point(2), c in point(2)) {
        if dominates_weak(&a, &b).unwrap() && dominates_weak(&b, &c).unwrap() {
            prop_assert!(dominates_weak(&a, &c).unwrap());
        }
        if dominates_strong(&a, &b).unwrap() && dominates_strong(&b, &c).unwrap() {
            prop_assert!(dominates_strong(&a, &c).unwrap());
        }
    }

    #[test]
    fn filter_matches_brute_force(rows in point_set(2)) {
        let s = PointSet::from_rows(rows.clone()).unwrap();
        let kept = non_dominated_filter(&s).rows();
        let expected: Vec<Vec<f64>> = rows
            .iter()
            .filter(|p| !rows.iter().any(|q| q != *p && dominates_weak(q, p).unwrap()))
            .cloned()
            .collect();
        prop_assert_eq!(&kept, &expected);
        for (i, a) in kept.iter().enumerate() {
            for b in &kept[i + 1..] {
                prop_assert!(a == b || !dominates_weak(a, b).unwrap());
            }
        }
        let again = non_dominated_filter(&PointSet::from_rows(kept.clone()).unwrap()).rows();
        prop_assert_eq!(again, kept);
    }

    #[test]
    fn removed_points_are_dominated_by_kept_ones(rows in point_set(3)) {
        let s = PointSet::from_rows(rows.clone()).unwrap();
        let kept = non_dominated_filter(&s).rows();
        for p in &rows {
            if !kept.contains(p) {
                prop_assert!(kept.iter().any(|q| dominates_weak(q, p).unwrap()));
            }
        }
    }

    #[test]
    fn staircase_sign_matches_brute_force(rows in point_set(2), probe in point(2)) {
        let s = PointSet::from_rows(rows.clone()).unwrap();
        let f = staircase_frontier(&s).unwrap();
        let probe: Vec<f64> = probe.iter().map(|v| v + 0.25).collect();
        let strictly = rows.iter().any(|p| p[0] < probe[0] && p[1] < probe[1]);
        let weakly = rows.iter().any(|p| p[0] <= probe[0] && p[1] <= probe[1]);
        let side = classify_against_frontier(&f, &probe, DEFAULT_ZERO_TOL).unwrap();
        let expected = if strictly {
            FrontierSide::Dominated
        } else if weakly {
            FrontierSide::Frontier
        } else {
            FrontierSide::Nondominated
        };
        prop_assert_eq!(side, expected);
    }

    #[test]
    fn staircase_vanishes_on_its_points(rows in point_set(3)) {
        let s = PointSet::from_rows(rows.clone()).unwrap();
        let f = staircase_frontier(&s).unwrap();
        for p in non_dominated_filter(&s).rows() {
            prop_assert_eq!(f.value(&p).unwrap(), 0.0);
        }
    }

    #[test]
    fn staircase_is_one_lipschitz_in_the_max_norm(rows in point_set(2), a in point(2), b in point(2)) {
        let f = staircase_frontier(&PointSet::from_rows(rows).unwrap()).unwrap();
        let dist = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
        prop_assert!((f.value(&a).unwrap() - f.value(&b).unwrap()).abs() <= dist + 1e-12);
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    assert!(dominates_weak(&[0.0, 1.0], &[0.0]).is_err());
    assert!(PointSet::from_rows(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
}

#[test]
fn non_finite_points_are_rejected() {
    assert!(PointSet::from_rows(vec![vec![f64::NAN, 1.0]]).is_err());
    assert!(PointSet::from_rows(vec![vec![f64::INFINITY, 1.0]]).is_err());
}
