//! Projected gradient ascent with Armijo backtracking, used for hyperparameter
//! fitting in log space.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub max_iters: usize,
    /// Stop once the projected gradient norm falls below this.
    pub grad_tol: f64,
    /// Sufficient-increase constant.
    pub armijo_c: f64,
    pub shrink: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// A line search gives up once the step drops below this.
    pub min_step: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-6,
            armijo_c: 1e-4,
            shrink: 0.5,
            initial_step: 0.1,
            max_step: 10.0,
            min_step: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub initial_value: f64,
    pub iterations: usize,
    /// Gradient tolerance reached.
    pub converged: bool,
    /// Stopped because no step satisfied the sufficient-increase test.
    pub line_search_failed: bool,
    pub grad_norm: f64,
}

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

fn projected_grad(x: &[f64], g: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(lower.iter().zip(upper))
        .map(|((xi, gi), (lo, hi))| {
            if (*xi <= *lo && *gi < 0.0) || (*xi >= *hi && *gi > 0.0) {
                0.0
            } else {
                *gi
            }
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Maximizes `objective`, which returns the value and its gradient, inside the
/// box `[lower, upper]` starting from `x0`.
///
/// Failed evaluations (errors or non-finite values) are treated as rejected
/// steps. The start point itself must evaluate.
pub fn gradient_ascent<F>(
    mut objective: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    cfg: &AscentConfig,
) -> Result<AscentResult>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let (mut fx, mut g) = objective(&x)?;
    let initial_value = fx;
    let mut step = cfg.initial_step;
    let mut iterations = 0;
    let mut converged = false;
    let mut line_search_failed = false;
    let mut pg = projected_grad(&x, &g, lower, upper);

    while iterations < cfg.max_iters {
        if norm(&pg) < cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut t = (2.0 * step).min(cfg.max_step);
        let mut accepted = None;
        while t >= cfg.min_step {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + t * gi).collect();
            project(&mut cand, lower, upper);
            let dir: f64 = cand
                .iter()
                .zip(&x)
                .zip(&g)
                .map(|((c, xi), gi)| (c - xi) * gi)
                .sum();
            if dir <= 0.0 {
                break;
            }
            if let Ok((fc, gc)) = objective(&cand) {
                if fc.is_finite()
                    && gc.iter().all(|v| v.is_finite())
                    && fc >= fx + cfg.armijo_c * dir
                {
                    accepted = Some((cand, fc, gc));
                    break;
                }
            }
            t *= cfg.shrink;
        }
        match accepted {
            Some((cand, fc, gc)) => {
                x = cand;
                fx = fc;
                g = gc;
                step = t;
                pg = projected_grad(&x, &g, lower, upper);
            }
            None => {
                line_search_failed = true;
                break;
            }
        }
    }
    if !converged && norm(&pg) < cfg.grad_tol {
        converged = true;
    }
    Ok(AscentResult {
        grad_norm: norm(&pg),
        x,
        value: fx,
        initial_value,
        iterations,
        converged,
        line_search_failed,
    })
}

/// Runs [`gradient_ascent`] from each start and keeps the best. Starts that fail
/// to evaluate are skipped; the first start's error is returned if all fail.
pub fn multi_start<F>(
    mut objective: F,
    starts: &[Vec<f64>],
    lower: &[f64],
    upper: &[f64],
    cfg: &AscentConfig,
) -> Result<(AscentResult, Vec<AscentResult>)>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let mut runs = Vec::with_capacity(starts.len());
    let mut first_err = None;
    for s in starts {
        match gradient_ascent(&mut objective, s, lower, upper, cfg) {
            Ok(r) => runs.push(r),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let best = runs
        .iter()
        .filter(|r| r.value.is_finite())
        .fold(None::<&AscentResult>, |acc, r| match acc {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .cloned();
    match best {
        Some(b) => Ok((b, runs)),
        None => Err(first_err.unwrap_or(crate::error::Error::Empty("no optimizer starts"))),
    }
}
