use frontier_surrogate::svm::{train_ocsvm, OneClassSvmModel};
use frontier_surrogate::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_kernel(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    (-gamma * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))).exp()
}

fn cloud(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let c = if i % 3 == 0 { 2.0 } else { 0.0 };
            vec![
                c + r.random_range(-1.0..1.0),
                r.random_range(-1.0..1.0) * 0.5,
            ]
        })
        .collect()
}

/// Coefficients over the full training set, zero for non-support vectors.
fn full_alphas(m: &OneClassSvmModel, data: &[Vec<f64>]) -> Vec<f64> {
    let mut used = vec![false; m.support_vectors.len()];
    data.iter()
        .map(
            |x| match (0..used.len()).find(|&k| !used[k] && m.support_vectors[k] == *x) {
                Some(k) => {
                    used[k] = true;
                    m.alphas[k]
                }
                None => 0.0,
            },
        )
        .collect()
}

fn dual(gamma: f64, data: &[Vec<f64>], a: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..data.len() {
        for j in 0..data.len() {
            acc += a[i] * a[j] * gaussian_kernel(gamma, &data[i], &data[j]);
        }
    }
    0.5 * acc
}

fn cases() -> Vec<(u64, usize, f64, f64)> {
    let mut v = Vec::new();
    for (k, nu) in [0.05, 0.2, 0.5].into_iter().enumerate() {
        for (l, gamma) in [0.5, 2.0, 8.0].into_iter().enumerate() {
            v.push((10 * k as u64 + l as u64, 30 + 10 * l, nu, gamma));
        }
    }
    v
}

#[test]
fn solution_beats_random_feasible_points() {
    for (seed, n, nu, gamma) in cases() {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let data = cloud(&mut r, n);
        let m = train_ocsvm(&PointSet::from_rows(data.clone()).unwrap(), nu, gamma).unwrap();
        let best = m.dual_objective();
        let upper = 1.0 / (nu * n as f64);
        for _ in 0..1000 {
            // random feasible coefficients by mass-preserving pairwise transfers from uniform
            let mut a = vec![1.0 / n as f64; n];
            for _ in 0..3 * n {
                let (i, j) = (r.random_range(0..n), r.random_range(0..n));
                let room = a[i].min(upper - a[j]);
                let t = r.random_range(0.0..=1.0) * room;
                a[i] -= t;
                a[j] += t;
            }
            assert!(dual(gamma, &data, &a) >= best - 1e-9);
        }
    }
}

#[test]
fn coefficients_are_feasible_and_kkt_holds() {
    for (seed, n, nu, gamma) in cases() {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let data = cloud(&mut r, n);
        let m = train_ocsvm(&PointSet::from_rows(data.clone()).unwrap(), nu, gamma).unwrap();
        let a = full_alphas(&m, &data);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(a.iter().all(|v| *v >= 0.0 && *v <= m.upper * (1.0 + 1e-12)));
        assert!((m.dual_objective() - dual(gamma, &data, &a)).abs() < 1e-12);
        for (i, x) in data.iter().enumerate() {
            let g: f64 = (0..n)
                .map(|j| a[j] * gaussian_kernel(gamma, x, &data[j]))
                .sum();
            let eps = m.upper * 1e-9;
            if a[i] > eps && a[i] < m.upper - eps {
                assert!((g - m.offset).abs() <= 1e-5, "free: {g} vs {}", m.offset);
            } else if a[i] <= eps {
                assert!(g >= m.offset - 1e-5);
            } else {
                assert!(g <= m.offset + 1e-5);
            }
        }
    }
}

#[test]
fn nu_bounds_outliers_and_support_vectors() {
    for (seed, n, nu, gamma) in cases() {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let data = cloud(&mut r, n);
        let m = train_ocsvm(&PointSet::from_rows(data.clone()).unwrap(), nu, gamma).unwrap();
        let at_bound = m
            .alphas
            .iter()
            .filter(|a| **a >= m.upper * (1.0 - 1e-9))
            .count();
        let outliers = data
            .iter()
            .filter(|x| m.decision(x).unwrap() < -1e-5)
            .count();
        let nf = n as f64;
        assert!(
            at_bound as f64 / nf <= nu + 1e-12,
            "bounded {at_bound} of {n}, nu {nu}"
        );
        assert!(
            outliers as f64 / nf <= nu + 1e-12,
            "outliers {outliers} of {n}, nu {nu}"
        );
        assert!(
            m.alphas.len() as f64 / nf >= nu - 1e-12,
            "{} SVs of {n}, nu {nu}",
            m.alphas.len()
        );
    }
}

#[test]
fn decision_matches_kernel_sum() {
    let mut r = ChaCha8Rng::seed_from_u64(99);
    let data = cloud(&mut r, 50);
    let m = train_ocsvm(&PointSet::from_rows(data).unwrap(), 0.1, 1.5).unwrap();
    for _ in 0..100 {
        let q = [r.random_range(-2.0..4.0), r.random_range(-2.0..2.0)];
        let brute: f64 = m
            .support_vectors
            .iter()
            .zip(&m.alphas)
            .map(|(s, a)| a * gaussian_kernel(1.5, s, &q))
            .sum::<f64>()
            - m.offset;
        assert!((m.decision(&q).unwrap() - brute).abs() < 1e-14);
    }
}
