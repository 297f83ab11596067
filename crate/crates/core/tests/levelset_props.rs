use frontier_surrogate::levelset::{
    connectivity, directed_hausdorff, dominance_violation_depth, extract_zero_set, hausdorff,
    AxisBox, Chains, ExtractionDiagnostics, FrontierEstimate, DEFAULT_REFINE_TOL,
};
use frontier_surrogate::{staircase_frontier, FnScore, PointSet, ScoreModel};
use proptest::prelude::*;

fn unit() -> AxisBox {
    AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
}

fn from_polylines(polylines: Vec<Vec<[f64; 2]>>) -> FrontierEstimate {
    let n = polylines.len();
    FrontierEstimate {
        polylines,
        closed: vec![false; n],
        bounding_box: unit(),
        grid_resolution: (0, 0),
        component_count: n,
        refine_tol: DEFAULT_REFINE_TOL,
        diagnostics: ExtractionDiagnostics::default(),
    }
}

fn vertex() -> impl Strategy<Value = [f64; 2]> {
    (0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b)| [a, b])
}

fn polylines() -> impl Strategy<Value = Vec<Vec<[f64; 2]>>> {
    prop::collection::vec(prop::collection::vec(vertex(), 1..12), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vertices_lie_on_the_zero_set(a1 in 0.2f64..3.0, a2 in 0.2f64..3.0, c in 0.2f64..0.8, n in 8usize..80) {
        let f = FnScore::new(2, move |y: &[f64]| a1 * y[0] + a2 * y[1] - c * (a1 + a2));
        let e = extract_zero_set(&f, &unit(), n, n, DEFAULT_REFINE_TOL).unwrap();
        prop_assert_eq!(e.component_count, 1);
        prop_assert!(connectivity(&e));
        for v in e.vertices() {
            prop_assert!(f.value(v).unwrap().abs() <= 2.0 * DEFAULT_REFINE_TOL * (a1 + a2));
        }
    }

    #[test]
    fn extraction_is_translation_invariant(t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let f = FnScore::new(2, |y: &[f64]| 0.3 - (y[0] - 0.5).powi(2) - 2.0 * (y[1] - 0.4).powi(2));
        let g = FnScore::new(2, move |y: &[f64]| {
            0.3 - (y[0] - t1 - 0.5).powi(2) - 2.0 * (y[1] - t2 - 0.4).powi(2)
        });
        let moved = AxisBox::new(vec![t1, t2], vec![1.0 + t1, 1.0 + t2]).unwrap();
        let a = extract_zero_set(&f, &unit(), 40, 40, DEFAULT_REFINE_TOL).unwrap();
        let b = extract_zero_set(&g, &moved, 40, 40, DEFAULT_REFINE_TOL).unwrap();
        prop_assert_eq!(a.component_count, b.component_count);
        prop_assert_eq!(a.vertex_count(), b.vertex_count());
        for (p, q) in a.vertices().zip(b.vertices()) {
            prop_assert!((p[0] + t1 - q[0]).abs() < 1e-6 && (p[1] + t2 - q[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn violation_depth_matches_staircase_oracle(lines in polylines()) {
        let e = from_polylines(lines);
        let (depth, witness) = dominance_violation_depth(&e);
        // the Chebyshev depth of a vertex inside the region strongly dominated by
        // the other vertices equals the staircase score there
        let verts: Vec<Vec<f64>> = e.vertices().map(|v| v.to_vec()).collect();
        let stairs = staircase_frontier(&PointSet::from_rows(verts.clone()).unwrap()).unwrap();
        let oracle = verts.iter().map(|v| stairs.value(v).unwrap().max(0.0)).fold(0.0, f64::max);
        prop_assert!((depth - oracle).abs() < 1e-12, "{depth} vs {oracle}");
        match witness {
            Some(w) => {
                prop_assert!(w.dominating[0] < w.dominated[0] && w.dominating[1] < w.dominated[1]);
                let slack = (w.dominated[0] - w.dominating[0]).min(w.dominated[1] - w.dominating[1]);
                prop_assert_eq!(slack, depth);
            }
            None => prop_assert_eq!(depth, 0.0),
        }
    }

    #[test]
    fn csv_roundtrip_preserves_vertices(lines in polylines()) {
        let e = from_polylines(lines);
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let back = FrontierEstimate::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.polylines, e.polylines);
    }

    #[test]
    fn hausdorff_is_symmetric_and_bounds_directed(a in polylines(), b in polylines()) {
        let (ca, cb) = (Chains::from(&from_polylines(a)), Chains::from(&from_polylines(b)));
        let ab = hausdorff(&ca, &cb, 0.01).unwrap();
        prop_assert_eq!(ab, hausdorff(&cb, &ca, 0.01).unwrap());
        prop_assert!(directed_hausdorff(&ca, &cb, 0.01).unwrap() <= ab);
        prop_assert!(hausdorff(&ca, &ca, 0.01).unwrap() < 1e-12);
    }
}

#[test]
fn refining_the_grid_does_not_worsen_a_circle() {
    let f = FnScore::new(2, |y: &[f64]| 1.0 - y[0] * y[0] - y[1] * y[1]);
    let b = AxisBox::new(vec![-1.5, -1.5], vec![1.5, 1.5]).unwrap();
    let ring: Vec<Vec<f64>> = (0..=4000)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 4000.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let ring = Chains(vec![ring]);
    let mut last = f64::INFINITY;
    for n in [16, 32, 64, 128] {
        let e = extract_zero_set(&f, &b, n, n, DEFAULT_REFINE_TOL).unwrap();
        assert_eq!(e.component_count, 1);
        assert_eq!(e.closed, vec![true]);
        let d = hausdorff(&Chains::from(&e), &ring, 1e-3).unwrap();
        assert!(d <= last, "grid {n}: {d} > {last}");
        last = d;
    }
}

#[test]
fn open_chains_end_on_the_box_boundary() {
    let f = FnScore::new(2, |y: &[f64]| y[1] - (3.0 * y[0]).sin() * 0.3 - 0.5);
    let e = extract_zero_set(&f, &unit(), 50, 50, DEFAULT_REFINE_TOL).unwrap();
    assert_eq!(e.component_count, 1);
    let line = &e.polylines[0];
    for end in [line[0], line[line.len() - 1]] {
        let on_edge = end
            .iter()
            .any(|c| c.abs() < 1e-12 || (c - 1.0).abs() < 1e-12);
        assert!(on_edge, "{end:?}");
    }
}

#[test]
fn hausdorff_rejects_empty_and_mismatched_sets() {
    let a = Chains(vec![vec![vec![0.0, 0.0]]]);
    assert!(hausdorff(&a, &Chains(vec![]), 0.1).is_err());
    assert!(hausdorff(&a, &Chains(vec![vec![vec![0.0, 0.0, 0.0]]]), 0.1).is_err());
}
