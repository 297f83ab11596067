//! Numerical audits of the conditions under which the zero set of a score
//! function is a valid frontier estimate.
//!
//! Every audit here is a sound refuter and an incomplete verifier: a `Valid`
//! verdict means no violation was found at the audited points, directions and
//! step sizes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::{strong, weak, PointSet};
use crate::error::{check_dim, Error, Result};
use crate::levelset::{
    connectivity, dominance_violation_depth, extract_zero_set, AxisBox, FrontierEstimate,
    DEFAULT_REFINE_TOL,
};
use crate::score::{finite_value, gradient_or_fd, ScoreModel};

/// Finite-difference step per derivative order 1..=6.
const FD_STEPS: [f64; 6] = [1e-3, 5e-3, 2e-2, 5e-2, 0.1, 0.2];
pub const MAX_DERIVATIVE_ORDER: usize = 6;

/// First non-vanishing derivative of a one-dimensional slice, scaled by `1/k!`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedGradientResult {
    /// `None` when no order up to the limit has a non-zero derivative.
    pub value: Option<f64>,
    /// `None` for constant and undefined slices.
    pub order: Option<usize>,
    pub even_order_flag: bool,
    pub constant: bool,
}

impl GeneralizedGradientResult {
    pub fn is_undefined(&self) -> bool {
        self.value.is_none()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Central difference estimate of the `k`-th derivative at 0 with spacing `s`.
fn central_difference(h: &dyn Fn(f64) -> f64, k: usize, s: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(k, j) * h((k as f64 / 2.0 - j as f64) * s);
    }
    acc / s.powi(k as i32)
}

/// Central difference estimate of the `k`-th derivative at 0 with two levels of
/// Richardson extrapolation, cancelling the `s²` and `s⁴` error terms.
fn derivative(h: &dyn Fn(f64) -> f64, k: usize) -> f64 {
    let s = FD_STEPS[k - 1];
    let d = [s, s / 2.0, s / 4.0].map(|step| central_difference(h, k, step));
    let r1 = (4.0 * d[1] - d[0]) / 3.0;
    let r2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Estimates the generalized gradient of `h` at 0 by escalating the derivative
/// order until one exceeds `zero_tol` in magnitude.
pub fn generalized_gradient(
    h: impl Fn(f64) -> f64,
    max_order: usize,
    zero_tol: f64,
) -> Result<GeneralizedGradientResult> {
    if max_order == 0 || max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::InvalidParameter(format!(
            "max_order must be in 1..=6, got {max_order}"
        )));
    }
    let h0 = h(0.0);
    let reach = FD_STEPS[max_order - 1] * max_order as f64 / 2.0;
    let probes: Vec<f64> = (1..=16)
        .flat_map(|i| [i as f64 * reach / 16.0, -(i as f64) * reach / 16.0])
        .collect();
    let mut constant = h0.is_finite();
    for &x in &probes {
        let v = h(x);
        if !v.is_finite() {
            return Err(Error::NotEvaluable(format!("slice is not finite at {x}")));
        }
        constant &= (v - h0).abs() <= zero_tol * x.abs().max(zero_tol);
    }
    if !h0.is_finite() {
        return Err(Error::NotEvaluable("slice is not finite at 0".into()));
    }
    if constant {
        return Ok(GeneralizedGradientResult {
            value: Some(0.0),
            order: None,
            even_order_flag: false,
            constant: true,
        });
    }
    for k in 1..=max_order {
        let d = derivative(&h, k);
        if !d.is_finite() {
            return Err(Error::NotEvaluable(format!(
                "derivative of order {k} is not finite"
            )));
        }
        if d.abs() > zero_tol {
            return Ok(GeneralizedGradientResult {
                value: Some(d / factorial(k)),
                order: Some(k),
                even_order_flag: k % 2 == 0,
                constant: false,
            });
        }
    }
    Ok(GeneralizedGradientResult {
        value: None,
        order: None,
        even_order_flag: false,
        constant: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub deltas: Vec<f64>,
    /// Explicit directions; when empty the default set is used: all-ones,
    /// the near-axis vectors and `random_directions` seeded random vectors.
    pub directions: Vec<Vec<f64>>,
    pub random_directions: usize,
    pub near_axis_floor: f64,
    pub seed: u64,
    pub frontier_tol: f64,
    pub deriv_zero_tol: f64,
    pub grad_zero_tol: f64,
    pub max_order: usize,
    /// Step for the finite-difference gradient fallback.
    pub fd_step: f64,
    /// Grid points per axis for the connectivity extraction (two objectives only).
    pub connectivity_grid: usize,
    /// Margin around the samples' bounding box for the connectivity extraction.
    pub connectivity_margin: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            deltas: vec![1e-3, 1e-2, 1e-1, 1.0],
            directions: Vec::new(),
            random_directions: 8,
            near_axis_floor: 1e-3,
            seed: 0,
            frontier_tol: 1e-3,
            deriv_zero_tol: 1e-6,
            grad_zero_tol: 1e-6,
            max_order: MAX_DERIVATIVE_ORDER,
            fd_step: 1e-6,
            connectivity_grid: 64,
            connectivity_margin: 0.2,
        }
    }
}

impl AuditConfig {
    fn validate(&self) -> Result<()> {
        if self.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidParameter(
                "deltas must be positive and finite".into(),
            ));
        }
        for u in &self.directions {
            if u.iter().any(|c| !(*c > 0.0 && *c <= 1.0)) {
                return Err(Error::InvalidParameter(format!(
                    "direction {u:?} is not in (0,1]^M"
                )));
            }
        }
        Ok(())
    }

    /// The per-sample direction sets, drawn in sample order from one seeded stream.
    fn direction_sets(&self, m: usize, samples: usize) -> Result<Vec<Vec<Vec<f64>>>> {
        if !self.directions.is_empty() {
            for u in &self.directions {
                check_dim(m, u.len())?;
            }
            return Ok(vec![self.directions.clone(); samples]);
        }
        let mut fixed = vec![vec![1.0; m]];
        for d in 0..m {
            let mut u = vec![self.near_axis_floor; m];
            u[d] = 1.0;
            fixed.push(u);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        Ok((0..samples)
            .map(|_| {
                let mut set = fixed.clone();
                for _ in 0..self.random_directions {
                    set.push((0..m).map(|_| 1.0 - rng.random::<f64>()).collect());
                }
                set
            })
            .collect())
    }
}

/// One audited (point, direction, step) triple. For sign checks `forward` and
/// `backward` are `f(y + δu)` and `f(y − δu)`; for derivative checks they are the
/// generalized gradients along `+u` and `−u` and `delta` is absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub delta: Option<f64>,
    pub forward: f64,
    pub backward: f64,
    pub order: Option<usize>,
    pub pass: bool,
}

impl SampleCheck {
    fn violation(&self) -> f64 {
        if self.pass {
            0.0
        } else {
            (-self.forward).max(self.backward).max(0.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedSample {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub samples: Vec<SampleCheck>,
    pub rejected: Vec<RejectedSample>,
    /// Largest wrong-signed magnitude over failing checks.
    pub max_violation: f64,
    /// `None` when connectivity cannot be assessed (more than two objectives).
    pub connectivity_ok: Option<bool>,
    /// Dominance violation depth of the level set used for the connectivity check.
    pub frontier_violation_depth: Option<f64>,
    pub verdict: Verdict,
}

impl ValidityReport {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| !s.pass).count()
    }

    /// CSV summary with columns `y1..yM,u1..uM,delta,forward,backward,order,pass`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let m = self.samples.first().map_or(0, |s| s.point.len());
        let mut wr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (1..=m).map(|i| format!("y{i}")).collect();
        header.extend((1..=m).map(|i| format!("u{i}")));
        header.extend(["delta", "forward", "backward", "order", "pass"].map(String::from));
        wr.write_record(&header)?;
        for s in &self.samples {
            let mut row: Vec<String> = s
                .point
                .iter()
                .chain(&s.direction)
                .map(f64::to_string)
                .collect();
            row.push(s.delta.map(|d| d.to_string()).unwrap_or_default());
            row.push(s.forward.to_string());
            row.push(s.backward.to_string());
            row.push(s.order.map(|o| o.to_string()).unwrap_or_default());
            row.push(s.pass.to_string());
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn accepted_samples<F: ScoreModel + ?Sized>(
    f: &F,
    samples: &PointSet,
    cfg: &AuditConfig,
) -> Result<(Vec<Vec<f64>>, Vec<RejectedSample>)> {
    let m = f.dim();
    let mut keep = Vec::new();
    let mut rejected = Vec::new();
    for p in samples {
        check_dim(m, p.len())?;
        let v = finite_value(f, p)?;
        if v.abs() > cfg.frontier_tol {
            rejected.push(RejectedSample {
                point: p.to_vec(),
                value: v,
            });
        } else {
            keep.push(p.to_vec());
        }
    }
    Ok((keep, rejected))
}

fn connectivity_of<F: ScoreModel + ?Sized>(
    f: &F,
    points: &[Vec<f64>],
    cfg: &AuditConfig,
) -> Result<(Option<bool>, Option<f64>)> {
    if f.dim() != 2 || points.is_empty() {
        return Ok((None, None));
    }
    let bx = AxisBox::around(points, cfg.connectivity_margin)?;
    let n = cfg.connectivity_grid.max(8);
    let e = extract_zero_set(f, &bx, n, n, DEFAULT_REFINE_TOL)?;
    Ok((
        Some(connectivity(&e)),
        Some(dominance_violation_depth(&e).0),
    ))
}

fn finish(
    samples: Vec<SampleCheck>,
    rejected: Vec<RejectedSample>,
    connectivity_ok: Option<bool>,
    depth: Option<f64>,
) -> ValidityReport {
    let max_violation = samples
        .iter()
        .map(SampleCheck::violation)
        .fold(0.0, f64::max);
    let all_pass = samples.iter().all(|s| s.pass);
    let verdict = if !all_pass || connectivity_ok == Some(false) {
        Verdict::Violated
    } else if samples.is_empty() || connectivity_ok.is_none() {
        Verdict::Inconclusive
    } else {
        Verdict::Valid
    };
    ValidityReport {
        samples,
        rejected,
        max_violation,
        connectivity_ok,
        frontier_violation_depth: depth,
        verdict,
    }
}

/// Checks `f(y + δu) > 0` and `f(y − δu) < 0` for every accepted frontier sample
/// `y`, audit direction `u` and step `δ`. Samples with `|f(y)| > frontier_tol`
/// are rejected and reported. For two objectives the zero set is extracted
/// around the samples to check that it is a single component.
pub fn check_score_function<F: ScoreModel + ?Sized>(
    f: &F,
    frontier_samples: &PointSet,
    cfg: &AuditConfig,
) -> Result<ValidityReport> {
    cfg.validate()?;
    let (points, rejected) = accepted_samples(f, frontier_samples, cfg)?;
    let dirs = cfg.direction_sets(f.dim(), points.len())?;
    let mut checks = Vec::new();
    for (y, set) in points.iter().zip(&dirs) {
        for u in set {
            for &delta in &cfg.deltas {
                let plus: Vec<f64> = y.iter().zip(u).map(|(a, b)| a + delta * b).collect();
                let minus: Vec<f64> = y.iter().zip(u).map(|(a, b)| a - delta * b).collect();
                let forward = finite_value(f, &plus)?;
                let backward = finite_value(f, &minus)?;
                checks.push(SampleCheck {
                    point: y.clone(),
                    direction: u.clone(),
                    delta: Some(delta),
                    forward,
                    backward,
                    order: None,
                    pass: forward > 0.0 && backward < 0.0,
                });
            }
        }
    }
    let (conn, depth) = connectivity_of(f, &points, cfg)?;
    Ok(finish(checks, rejected, conn, depth))
}

/// Derivative form of the audit: passes where `∇f(y)·u > grad_zero_tol`; where
/// the directional derivative vanishes the slice `x ↦ f(y + xu)` is escalated to
/// its generalized gradient, which must be positive along `+u`, negative along
/// `−u`, and of odd order.
pub fn check_differentiable<F: ScoreModel + ?Sized>(
    f: &F,
    frontier_samples: &PointSet,
    cfg: &AuditConfig,
) -> Result<ValidityReport> {
    cfg.validate()?;
    let (points, rejected) = accepted_samples(f, frontier_samples, cfg)?;
    let dirs = cfg.direction_sets(f.dim(), points.len())?;
    let mut checks = Vec::new();
    for (y, set) in points.iter().zip(&dirs) {
        let grad = gradient_or_fd(f, y, cfg.fd_step)?;
        for u in set {
            let dd: f64 = grad.iter().zip(u).map(|(g, c)| g * c).sum();
            let check = if dd.abs() > cfg.grad_zero_tol {
                SampleCheck {
                    point: y.clone(),
                    direction: u.clone(),
                    delta: None,
                    forward: dd,
                    backward: -dd,
                    order: Some(1),
                    pass: dd > 0.0,
                }
            } else {
                let slice = |sign: f64| {
                    move |x: f64| {
                        let q: Vec<f64> = y.iter().zip(u).map(|(a, b)| a + sign * x * b).collect();
                        f.value(&q).unwrap_or(f64::NAN)
                    }
                };
                let plus = generalized_gradient(slice(1.0), cfg.max_order, cfg.deriv_zero_tol)?;
                let minus = generalized_gradient(slice(-1.0), cfg.max_order, cfg.deriv_zero_tol)?;
                let forward = plus.value.unwrap_or(0.0);
                let backward = minus.value.unwrap_or(0.0);
                SampleCheck {
                    point: y.clone(),
                    direction: u.clone(),
                    delta: None,
                    forward,
                    backward,
                    order: plus.order,
                    pass: forward > 0.0 && backward < 0.0 && !plus.even_order_flag,
                }
            };
            checks.push(check);
        }
    }
    let (conn, depth) = connectivity_of(f, &points, cfg)?;
    Ok(finish(checks, rejected, conn, depth))
}

/// Result of the coordinatewise monotonicity scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub increasing: bool,
    /// Grid neighbours `(lower, upper)` along one axis with the largest drop
    /// `f(lower) - f(upper) >= 0`.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub worst_drop: f64,
}

/// Verifies that `f` strictly increases along every grid line of a
/// `grid_n`-per-axis grid over `region`, in every coordinate.
pub fn check_coordinatewise_increasing<F: ScoreModel + ?Sized>(
    f: &F,
    region: &AxisBox,
    grid_n: usize,
) -> Result<MonotonicityCheck> {
    let m = f.dim();
    check_dim(m, region.dim())?;
    if grid_n < 2 {
        return Err(Error::InvalidParameter("grid_n must be at least 2".into()));
    }
    let axes: Vec<Vec<f64>> = (0..m).map(|d| region.axis(d, grid_n)).collect();
    let total = grid_n.pow(m as u32);
    let point = |mut idx: usize| -> Vec<f64> {
        (0..m)
            .map(|d| {
                let i = idx % grid_n;
                idx /= grid_n;
                axes[d][i]
            })
            .collect()
    };
    let mut vals = Vec::with_capacity(total);
    for i in 0..total {
        vals.push(finite_value(f, &point(i))?);
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    let mut stride = 1;
    for _ in 0..m {
        for i in 0..total {
            if (i / stride) % grid_n + 1 == grid_n {
                continue;
            }
            let j = i + stride;
            let drop = vals[i] - vals[j];
            if drop >= 0.0 && worst.is_none_or(|w| drop > w.2) {
                worst = Some((i, j, drop));
            }
        }
        stride *= grid_n;
    }
    Ok(match worst {
        None => MonotonicityCheck {
            increasing: true,
            witness: None,
            worst_drop: 0.0,
        },
        Some((i, j, drop)) => MonotonicityCheck {
            increasing: false,
            witness: Some((point(i), point(j))),
            worst_drop: drop,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Probes closer than this to the frontier are excluded.
    pub band_tol: f64,
    /// Frontier densification step; zero picks a quarter of the band.
    pub densify_step: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            band_tol: 0.02,
            densify_step: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignPartitionReport {
    pub ok: bool,
    pub checked: usize,
    pub excluded_band: usize,
    /// Probes that neither dominate nor are dominated by any frontier sample.
    pub excluded_incomparable: usize,
    /// Probes whose sign disagrees with their side of the frontier.
    pub mismatches: usize,
    /// Probes that lie on both sides at once, which only happens when the
    /// frontier itself contains a dominating pair.
    pub conflicting: usize,
    pub first_mismatch: Option<Vec<f64>>,
    /// Whether probes `v₋ ≺ v₊` with `f(v₋) < 0 < f(v₊)` were found.
    pub has_sign_pair: bool,
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Classifies every probe by brute-force dominance against dense frontier
/// samples and checks that `f` is positive on the dominated side and negative
/// on the non-dominated side.
pub fn check_sign_partition<F: ScoreModel + ?Sized>(
    f: &F,
    frontier: &FrontierEstimate,
    probes: &PointSet,
    cfg: &PartitionConfig,
) -> Result<SignPartitionReport> {
    check_dim(2, f.dim())?;
    if frontier.is_empty() {
        return Err(Error::Empty("sign partition against an empty frontier"));
    }
    let step = if cfg.densify_step > 0.0 {
        cfg.densify_step
    } else {
        cfg.band_tol / 4.0
    };
    let dense = frontier.densified(step);
    let mut report = SignPartitionReport {
        ok: false,
        checked: 0,
        excluded_band: 0,
        excluded_incomparable: 0,
        mismatches: 0,
        conflicting: 0,
        first_mismatch: None,
        has_sign_pair: false,
    };
    let mut negatives: Vec<[f64; 2]> = Vec::new();
    let mut positives: Vec<[f64; 2]> = Vec::new();
    for probe in probes {
        check_dim(2, probe.len())?;
        let p = [probe[0], probe[1]];
        let near = frontier
            .polylines
            .iter()
            .flat_map(|l| {
                l.windows(2)
                    .map(|w| segment_distance(p, w[0], w[1]))
                    .chain(l.iter().map(|v| (p[0] - v[0]).hypot(p[1] - v[1])))
            })
            .fold(f64::INFINITY, f64::min);
        if near < cfg.band_tol {
            report.excluded_band += 1;
            continue;
        }
        let dominated = dense.iter().any(|s| weak(s, &p));
        let dominating = dense.iter().any(|s| weak(&p, s));
        let v = finite_value(f, &p)?;
        if v < 0.0 {
            negatives.push(p);
        } else if v > 0.0 {
            positives.push(p);
        }
        let ok = match (dominated, dominating) {
            (false, false) => {
                report.excluded_incomparable += 1;
                continue;
            }
            (true, true) => {
                report.conflicting += 1;
                false
            }
            (true, false) => v > 0.0,
            (false, true) => v < 0.0,
        };
        report.checked += 1;
        if !ok && !(dominated && dominating) {
            report.mismatches += 1;
        }
        if !ok && report.first_mismatch.is_none() {
            report.first_mismatch = Some(p.to_vec());
        }
    }
    report.has_sign_pair = positives
        .iter()
        .any(|q| negatives.iter().any(|n| strong(n, q)));
    report.ok = report.checked > 0
        && report.mismatches == 0
        && report.conflicting == 0
        && report.has_sign_pair;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dominance::staircase_frontier;
    use crate::score::FnScore;
    use approx::assert_abs_diff_eq;

    #[test]
    fn generalized_gradient_examples() {
        let r = generalized_gradient(|x| x.powi(3), 6, 1e-6).unwrap();
        assert_eq!(r.order, Some(3));
        assert_abs_diff_eq!(r.value.unwrap(), 1.0, epsilon = 1e-9);
        let r = generalized_gradient(|x| x * x, 6, 1e-6).unwrap();
        assert_eq!(r.order, Some(2));
        assert!(r.even_order_flag);
        let r = generalized_gradient(|_| 4.2, 6, 1e-6).unwrap();
        assert!(r.constant && r.order.is_none());
        assert_eq!(r.value, Some(0.0));
        let r = generalized_gradient(|x| x.powi(7), 6, 1e-6).unwrap();
        assert!(r.is_undefined());
        assert!(generalized_gradient(|x| 1.0 / x, 6, 1e-6).is_err());
        assert!(generalized_gradient(|x| x, 7, 1e-6).is_err());
    }

    fn line_samples() -> PointSet {
        PointSet::from_rows((0..=10).map(|i| {
            let t = i as f64 / 10.0;
            vec![t, 1.0 - t]
        }))
        .unwrap()
    }

    #[test]
    fn linear_function_is_valid() {
        let f = FnScore::new(2, |y: &[f64]| y[0] + y[1] - 1.0);
        let cfg = AuditConfig {
            directions: vec![vec![1.0, 1.0]],
            deltas: vec![1e-3, 1e-1, 1.0],
            ..Default::default()
        };
        let r = check_score_function(&f, &line_samples(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
        assert_eq!(r.max_violation, 0.0);
        let d = check_differentiable(&f, &line_samples(), &AuditConfig::default()).unwrap();
        assert_eq!(d.verdict, Verdict::Valid);
        assert!(d
            .samples
            .iter()
            .all(|s| (s.forward - s.direction.iter().sum::<f64>()).abs() < 1e-6));
    }

    #[test]
    fn circle_is_violated() {
        let f = FnScore::new(2, |y: &[f64]| y[0] * y[0] + y[1] * y[1] - 1.0);
        let pts = PointSet::from_rows((0..32).map(|i| {
            let t = i as f64 * std::f64::consts::TAU / 32.0;
            vec![t.cos(), t.sin()]
        }))
        .unwrap();
        let r = check_score_function(&f, &pts, &AuditConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        assert!(r.max_violation > 0.0);
        assert!(r
            .samples
            .iter()
            .any(|s| !s.pass && s.point[0] < 0.0 && s.point[1] < 0.0));
    }

    #[test]
    fn staircase_is_valid_at_small_step() {
        let s =
            staircase_frontier(&PointSet::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap())
                .unwrap();
        let cfg = AuditConfig {
            deltas: vec![1e-3],
            ..Default::default()
        };
        let r = check_score_function(&s, s.points(), &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Valid);
    }

    #[test]
    fn rejected_samples_are_reported() {
        let f = FnScore::new(2, |y: &[f64]| y[0] + y[1] - 1.0);
        let pts = PointSet::from_rows(vec![vec![0.5, 0.5], vec![1.0, 1.0]]).unwrap();
        let r = check_score_function(&f, &pts, &AuditConfig::default()).unwrap();
        assert_eq!(r.rejected.len(), 1);
        assert_eq!(r.rejected[0].point, vec![1.0, 1.0]);
    }

    #[test]
    fn three_objectives_are_inconclusive() {
        let f = FnScore::new(3, |y: &[f64]| y.iter().sum::<f64>() - 1.0);
        let pts = PointSet::from_rows(vec![vec![0.2, 0.3, 0.5]]).unwrap();
        let r = check_score_function(&f, &pts, &AuditConfig::default()).unwrap();
        assert_eq!(r.connectivity_ok, None);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn flat_slices_escalate() {
        // Zero gradient on the frontier; odd order along every direction.
        let cube = FnScore::new(2, |y: &[f64]| (y[0] + y[1] - 1.0).powi(3));
        let d = check_differentiable(&cube, &line_samples(), &AuditConfig::default()).unwrap();
        assert!(d.samples.iter().all(|s| s.pass && s.order == Some(3)));
        let square = FnScore::new(2, |y: &[f64]| (y[0] + y[1] - 1.0).powi(2));
        let d = check_differentiable(&square, &line_samples(), &AuditConfig::default()).unwrap();
        assert!(d.samples.iter().all(|s| !s.pass && s.order == Some(2)));
        assert_eq!(d.verdict, Verdict::Violated);
    }

    #[test]
    fn coordinatewise_examples() {
        let unit = AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let f = FnScore::new(2, |y: &[f64]| y[0] + y[1]);
        assert!(
            check_coordinatewise_increasing(&f, &unit, 20)
                .unwrap()
                .increasing
        );
        let g = FnScore::new(2, |y: &[f64]| (3.0 * y[0]).sin() + y[1]);
        let bx = AxisBox::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        let r = check_coordinatewise_increasing(&g, &bx, 40).unwrap();
        assert!(!r.increasing);
        let (lo, hi) = r.witness.unwrap();
        let mid = 0.5 * (lo[0] + hi[0]);
        assert!((3.0 * mid).cos() < 0.0);
        assert_eq!(lo[1], hi[1]);
    }

    #[test]
    fn sign_partition_linear_and_negated() {
        let f = FnScore::new(2, |y: &[f64]| y[0] + y[1] - 1.0);
        let bx = AxisBox::new(vec![-0.5, -0.5], vec![1.5, 1.5]).unwrap();
        let e = extract_zero_set(&f, &bx, 64, 64, 1e-8).unwrap();
        let probes = PointSet::from_rows(bx.grid2(10, 10).into_iter().map(|p| p.to_vec())).unwrap();
        let r = check_sign_partition(&f, &e, &probes, &PartitionConfig::default()).unwrap();
        assert!(r.ok, "{r:?}");
        let neg = crate::score::Negated(&f);
        let r = check_sign_partition(&neg, &e, &probes, &PartitionConfig::default()).unwrap();
        assert!(!r.ok);
        assert_eq!(r.mismatches, r.checked);
    }
}
