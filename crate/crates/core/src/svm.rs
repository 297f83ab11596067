//! One-class SVM with an RBF kernel, trained by SMO on the dual
//! `min ½ αᵀQα` subject to `0 ≤ α_i ≤ 1/(νN)` and `Σ α_i = 1`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::PointSet;
use crate::error::{check_dim, Error, Result};
use crate::score::ScoreModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Stop when the maximal violating pair's gradient gap falls below this.
    /// The second working index is chosen by second-order gain.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iters: 100_000,
        }
    }
}

/// Trained one-class SVM. Only points with `α > 0` are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneClassSvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    /// Offset `ρ` of the decision function.
    pub offset: f64,
    pub gamma: f64,
    pub nu: f64,
    /// Upper bound `1/(νN)` on each coefficient.
    pub upper: f64,
    pub training_size: usize,
    pub iterations: usize,
    pub kkt_gap: f64,
}

pub fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// Trains with the default solver settings.
pub fn train_ocsvm(data: &PointSet, nu: f64, gamma: f64) -> Result<OneClassSvmModel> {
    train_ocsvm_with(data, nu, gamma, &SvmConfig::default())
}

pub fn train_ocsvm_with(
    data: &PointSet,
    nu: f64,
    gamma: f64,
    cfg: &SvmConfig,
) -> Result<OneClassSvmModel> {
    let n = data.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "one-class SVM needs at least 2 points, got {n}"
        )));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "nu must be in (0, 1], got {nu}"
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let x = data.rows();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
        for j in 0..i {
            let k = rbf(gamma, &x[i], &x[j]);
            q[i * n + j] = k;
            q[j * n + i] = k;
        }
    }
    let c = 1.0 / (nu * n as f64);
    // Fill coefficients at the bound in order until the unit mass is spent.
    let mut alpha = vec![0.0; n];
    let mut left = 1.0;
    for a in alpha.iter_mut() {
        let v = c.min(left);
        *a = v;
        left -= v;
        if left <= 0.0 {
            break;
        }
    }
    let mut grad = vec![0.0; n];
    for (j, &a) in alpha.iter().enumerate() {
        if a != 0.0 {
            for i in 0..n {
                grad[i] += a * q[i * n + j];
            }
        }
    }
    let bound_eps = c * 1e-12;
    let mut iterations = 0;
    let gap = loop {
        let mut up: Option<usize> = None;
        let mut low: Option<usize> = None;
        for t in 0..n {
            if alpha[t] < c - bound_eps && up.is_none_or(|i| grad[t] < grad[i]) {
                up = Some(t);
            }
            if alpha[t] > bound_eps && low.is_none_or(|j| grad[t] > grad[j]) {
                low = Some(t);
            }
        }
        let (Some(i), Some(j_max)) = (up, low) else {
            break 0.0;
        };
        let gap = grad[j_max] - grad[i];
        if gap < cfg.tol {
            break gap.max(0.0);
        }
        if iterations >= cfg.max_iters {
            return Err(Error::NotConverged { iterations, gap });
        }
        // Second index by largest guaranteed decrease of the objective.
        let mut j = j_max;
        let mut best_gain = 0.0;
        for t in 0..n {
            let diff = grad[t] - grad[i];
            if alpha[t] > bound_eps && diff > 0.0 {
                let curv = (q[i * n + i] + q[t * n + t] - 2.0 * q[i * n + t]).max(1e-12);
                let gain = diff * diff / curv;
                if gain > best_gain {
                    best_gain = gain;
                    j = t;
                }
            }
        }
        let gap = grad[j] - grad[i];
        iterations += 1;
        let curvature = (q[i * n + i] + q[j * n + j] - 2.0 * q[i * n + j]).max(1e-12);
        let t = (gap / curvature).min(c - alpha[i]).min(alpha[j]);
        alpha[i] += t;
        alpha[j] -= t;
        if c - alpha[i] < bound_eps {
            alpha[i] = c;
        }
        if alpha[j] < bound_eps {
            alpha[j] = 0.0;
        }
        for r in 0..n {
            grad[r] += t * (q[r * n + i] - q[r * n + j]);
        }
    };
    let free: Vec<f64> = (0..n)
        .filter(|&t| alpha[t] > bound_eps && alpha[t] < c - bound_eps)
        .map(|t| grad[t])
        .collect();
    let offset = if free.is_empty() {
        let lo = (0..n)
            .filter(|&t| alpha[t] >= c - bound_eps)
            .map(|t| grad[t])
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = (0..n)
            .filter(|&t| alpha[t] <= bound_eps)
            .map(|t| grad[t])
            .fold(f64::INFINITY, f64::min);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo,
            _ => hi,
        }
    } else {
        free.iter().sum::<f64>() / free.len() as f64
    };
    let keep: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(OneClassSvmModel {
        support_vectors: keep.iter().map(|&t| x[t].clone()).collect(),
        alphas: keep.iter().map(|&t| alpha[t]).collect(),
        offset,
        gamma,
        nu,
        upper: c,
        training_size: n,
        iterations,
        kkt_gap: gap,
    })
}

impl OneClassSvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    /// `Σ α_i K(s_i, y) − ρ`: positive inside the learned region.
    pub fn decision(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        Ok(self.kernel_sum(y) - self.offset)
    }

    fn kernel_sum(&self, y: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.alphas)
            .map(|(s, a)| a * rbf(self.gamma, s, y))
            .sum()
    }

    /// Dual objective `½ αᵀQα` at the stored solution.
    pub fn dual_objective(&self) -> f64 {
        let mut acc = 0.0;
        for (si, ai) in self.support_vectors.iter().zip(&self.alphas) {
            for (sj, aj) in self.support_vectors.iter().zip(&self.alphas) {
                acc += ai * aj * rbf(self.gamma, si, sj);
            }
        }
        0.5 * acc
    }

    /// Whether `α` lies on neither bound.
    pub fn is_free(&self, index: usize) -> bool {
        let a = self.alphas[index];
        let eps = self.upper * 1e-9;
        a > eps && a < self.upper - eps
    }
}

/// Score adapter: the decision value divided by `ρ`, so the learned region is
/// positive and the far field tends to `-1`. The orientation is positive inside
/// the training cloud, which matches the dominated side only where the data
/// covers it; no rescaling fixes that globally.
#[derive(Debug, Clone, Copy)]
pub struct SvmScore<'a>(pub &'a OneClassSvmModel);

impl ScoreModel for SvmScore<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        Ok(self.0.decision(y)? / self.0.offset)
    }

    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        let m = self.0.dim();
        check_dim(m, y.len())?;
        let mut g = vec![0.0; m];
        for (s, a) in self.0.support_vectors.iter().zip(&self.0.alphas) {
            let k = a * rbf(self.0.gamma, s, y);
            for d in 0..m {
                g[d] -= 2.0 * self.0.gamma * k * (y[d] - s[d]);
            }
        }
        Ok(Some(g.into_iter().map(|v| v / self.0.offset).collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaScore {
    pub gamma: f64,
    /// Mean of the held-out normalized decision values.
    pub score: f64,
}

/// Picks `γ` from `candidates` by `k`-fold cross-validation, scoring each fold
/// by the mean normalized decision on its held-out points (higher is better).
pub fn select_gamma_cv(
    data: &PointSet,
    nu: f64,
    candidates: &[f64],
    k: usize,
    seed: u64,
) -> Result<(f64, Vec<GammaScore>)> {
    if candidates.is_empty() {
        return Err(Error::Empty("gamma candidates"));
    }
    if k < 2 || k > data.len() {
        return Err(Error::InvalidParameter(format!(
            "fold count {k} must be in 2..={}",
            data.len()
        )));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let rows = data.rows();
    let mut scores = Vec::new();
    for &gamma in candidates {
        let mut total = 0.0;
        for fold in 0..k {
            let mut held = Vec::new();
            let mut train = Vec::new();
            for (pos, &i) in order.iter().enumerate() {
                if pos % k == fold {
                    held.push(i)
                } else {
                    train.push(i)
                }
            }
            let train_set = PointSet::from_rows(train.iter().map(|&i| rows[i].clone()))?;
            let model = train_ocsvm(&train_set, nu, gamma)?;
            let score = SvmScore(&model);
            let mut acc = 0.0;
            for &i in &held {
                acc += score.value(&rows[i])?;
            }
            total += acc / held.len() as f64;
        }
        scores.push(GammaScore {
            gamma,
            score: total / k as f64,
        });
    }
    let best = scores
        .iter()
        .fold(&scores[0], |b, s| if s.score > b.score { s } else { b })
        .gamma;
    Ok((best, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn blob(n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::from_rows((0..n).map(|_| {
            vec![
                rng.random::<f64>() * 2.0 - 1.0,
                rng.random::<f64>() * 2.0 - 1.0,
            ]
        }))
        .unwrap()
    }

    #[test]
    fn identical_points_split_evenly() {
        let d = PointSet::from_rows(vec![vec![0.3, 0.3], vec![0.3, 0.3]]).unwrap();
        let m = train_ocsvm(&d, 1.0, 1.0).unwrap();
        assert_eq!(m.alphas.len(), 2);
        for a in &m.alphas {
            assert_abs_diff_eq!(*a, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn feasibility_and_kkt() {
        let d = blob(80, 1);
        let m = train_ocsvm(&d, 0.2, 2.0).unwrap();
        let sum: f64 = m.alphas.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        assert!(m.alphas.iter().all(|a| *a > 0.0 && *a <= m.upper + 1e-15));
        let mut free = 0;
        for (i, s) in m.support_vectors.iter().enumerate() {
            if m.is_free(i) {
                free += 1;
                assert!(m.decision(s).unwrap().abs() < 1e-5);
            }
        }
        assert!(free > 0);
        for p in &d {
            let v = m.decision(p).unwrap();
            let a = m
                .support_vectors
                .iter()
                .position(|s| s.as_slice() == &p[..])
                .map_or(0.0, |i| m.alphas[i]);
            if a == 0.0 {
                assert!(v >= -1e-6);
            }
        }
    }

    #[test]
    fn far_field_is_negative_offset() {
        let m = train_ocsvm(&blob(30, 2), 0.5, 3.0).unwrap();
        assert_abs_diff_eq!(
            m.decision(&[100.0, 100.0]).unwrap(),
            -m.offset,
            epsilon = 1e-12
        );
        assert!(m.decision(&[1.0]).is_err());
    }

    #[test]
    fn score_gradient_matches_fd() {
        let m = train_ocsvm(&blob(40, 3), 0.3, 1.5).unwrap();
        let s = SvmScore(&m);
        let y = [0.2, -0.4];
        let g = s.gradient(&y).unwrap().unwrap();
        let h = 1e-6;
        for d in 0..2 {
            let mut a = y;
            let mut b = y;
            a[d] += h;
            b[d] -= h;
            let fd = (s.value(&a).unwrap() - s.value(&b).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(g[d], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let d = blob(5, 4);
        assert!(train_ocsvm(&d, 0.0, 1.0).is_err());
        assert!(train_ocsvm(&d, 1.5, 1.0).is_err());
        assert!(train_ocsvm(&d, 0.5, 0.0).is_err());
        assert!(train_ocsvm(&blob(1, 4), 0.5, 1.0).is_err());
        let cfg = SvmConfig {
            tol: 1e-12,
            max_iters: 1,
        };
        assert!(matches!(
            train_ocsvm_with(&blob(50, 5), 0.1, 5.0, &cfg),
            Err(Error::NotConverged { .. })
        ));
    }

    #[test]
    fn cross_validation_prefers_moderate_gamma() {
        let (best, scores) = select_gamma_cv(&blob(60, 6), 0.1, &[0.5, 200.0], 5, 0).unwrap();
        assert_eq!(scores.len(), 2);
        assert_eq!(best, 0.5);
    }
}
