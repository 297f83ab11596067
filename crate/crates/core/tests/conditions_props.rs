use frontier_surrogate::conditions::{
    check_coordinatewise_increasing, check_differentiable, check_score_function,
    check_sign_partition, generalized_gradient, AuditConfig, PartitionConfig, Verdict,
};
use frontier_surrogate::levelset::{extract_zero_set, AxisBox, DEFAULT_REFINE_TOL};
use frontier_surrogate::{FnScore, PointSet, ScoreModel};
use proptest::prelude::*;

/// `w1 tanh(k1 (y1 - ½)) + s w2 (y2 - ½)³ + s w2 (y2 - ½) - c`; increasing when
/// `s = 1`, decreasing in `y2` when `s = -1`.
fn family(w1: f64, k1: f64, w2: f64, c: f64, s: f64) -> FnScore {
    FnScore::new(2, move |y: &[f64]| {
        let t = y[1] - 0.5;
        w1 * (k1 * (y[0] - 0.5)).tanh() + s * w2 * (t * t * t + t) - c
    })
}

/// Points of the zero set on vertical lines through the unit square.
fn zero_samples(f: &FnScore) -> PointSet {
    let mut rows = Vec::new();
    for i in 0..8 {
        let y1 = 0.1 + 0.8 * i as f64 / 7.0;
        let h = |y2: f64| f.value(&[y1, y2]).unwrap();
        let (mut a, mut b) = (-1.0, 2.0);
        if h(a).signum() == h(b).signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if h(m).signum() == h(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        rows.push(vec![y1, 0.5 * (a + b)]);
    }
    PointSet::from_rows(rows).unwrap()
}

fn params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3f64..3.0, 0.5f64..3.0, 0.3f64..3.0, -0.3f64..0.3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generalized_gradient_finds_the_leading_term(
        k in 1usize..=5,
        lead in prop_oneof![0.2f64..3.0, -3.0f64..-0.2],
        tail in -1.0f64..1.0,
    ) {
        let h = move |x: f64| lead * x.powi(k as i32) + tail * x.powi(k as i32 + 1);
        let g = generalized_gradient(h, 6, 1e-6).unwrap();
        prop_assert_eq!(g.order, Some(k));
        prop_assert!((g.value.unwrap() - lead).abs() <= 1e-3, "{g:?}");
        prop_assert_eq!(g.even_order_flag, k % 2 == 0);
    }

    #[test]
    fn audits_agree_on_increasing_functions((w1, k1, w2, c) in params()) {
        let f = family(w1, k1, w2, c, 1.0);
        let samples = zero_samples(&f);
        prop_assume!(samples.len() >= 3);
        let cfg = AuditConfig::default();
        let by_value = check_score_function(&f, &samples, &cfg).unwrap();
        let by_derivative = check_differentiable(&f, &samples, &cfg).unwrap();
        prop_assert_eq!(by_value.verdict, Verdict::Valid);
        prop_assert_eq!(by_derivative.verdict, Verdict::Valid);
        prop_assert_eq!(by_value.connectivity_ok, Some(true));

        let region = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        prop_assert!(check_coordinatewise_increasing(&f, &region, 25).unwrap().increasing);
        let frontier = extract_zero_set(&f, &region, 64, 64, DEFAULT_REFINE_TOL).unwrap();
        let probes = PointSet::from_rows(region.grid2(30, 30).into_iter().map(|p| p.to_vec())).unwrap();
        let part = check_sign_partition(&f, &frontier, &probes, &PartitionConfig::default()).unwrap();
        prop_assert!(part.ok && part.mismatches == 0);
    }

    #[test]
    fn audits_agree_on_reversed_functions((w1, k1, w2, c) in params()) {
        let f = family(w1, k1, w2, c, -1.0);
        let samples = zero_samples(&f);
        prop_assume!(samples.len() >= 3);
        let cfg = AuditConfig::default();
        let by_value = check_score_function(&f, &samples, &cfg).unwrap();
        let by_derivative = check_differentiable(&f, &samples, &cfg).unwrap();
        prop_assert_eq!(by_value.verdict, Verdict::Violated);
        prop_assert_eq!(by_derivative.verdict, Verdict::Violated);
        prop_assert!(by_value.max_violation > 0.0);

        let region = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mono = check_coordinatewise_increasing(&f, &region, 25).unwrap();
        prop_assert!(!mono.increasing);
        let (lower, upper) = mono.witness.unwrap();
        prop_assert!(f.value(&lower).unwrap() >= f.value(&upper).unwrap());
        prop_assert!(lower.iter().zip(&upper).all(|(a, b)| a <= b));
    }
}

#[test]
fn flat_directions_are_escalated_not_failed() {
    // the gradient vanishes at the sample; every slice is cubic with positive lead
    let f = FnScore::new(2, |y: &[f64]| (y[0] - 0.5).powi(3) + (y[1] - 0.5).powi(3));
    let samples = PointSet::from_rows(vec![vec![0.5, 0.5]]).unwrap();
    let r = check_differentiable(&f, &samples, &AuditConfig::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Valid);
    assert!(r.samples.iter().all(|s| s.order == Some(3)));
}

#[test]
fn even_order_slices_fail() {
    let f = FnScore::new(2, |y: &[f64]| (y[0] + y[1] - 1.0).powi(2));
    let samples = PointSet::from_rows(vec![vec![0.5, 0.5]]).unwrap();
    let cfg = AuditConfig::default();
    let r = check_differentiable(&f, &samples, &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert!(r.samples.iter().all(|s| s.order == Some(2) && !s.pass));
    assert_eq!(
        check_score_function(&f, &samples, &cfg).unwrap().verdict,
        Verdict::Violated
    );
}
