//! Gaussian process surrogate with probit soft constraints on partial
//! derivatives, approximated by expectation propagation.
//!
//! The latent vector stacks the function values at the training inputs and the
//! partial derivatives at the constraint locations. Value observations are
//! exact Gaussian sites `N(z_i | l_i, σ²)`; each monotonicity constraint
//! contributes a factor `Φ(l'_c / ν)` that EP replaces by a Gaussian site. The
//! score function is the posterior mean of the latent value.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_dim, Error, Result};
use crate::gp::{validate_rows, HyperOptConfig, HyperOptReport, LogLayout, JITTER_FLOOR};
use crate::kernel::{Obs, SeKernelParams};
use crate::linalg::{jittered_cholesky, min_eigenvalue, Factor};
use crate::optimize::multi_start;
use crate::probit::{ep_site_update, tilted_moments};
use crate::score::ScoreModel;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Default probit sharpness.
pub const DEFAULT_NU: f64 = 1e-6;

/// Soft constraint that `∂f/∂y_direction > 0` at `location`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityConstraint {
    pub location: Vec<f64>,
    pub direction: usize,
}

/// One constraint per coordinate at every point.
pub fn constraints_everywhere(points: &[Vec<f64>]) -> Vec<MonotonicityConstraint> {
    points
        .iter()
        .flat_map(|p| {
            (0..p.len()).map(move |d| MonotonicityConstraint {
                location: p.clone(),
                direction: d,
            })
        })
        .collect()
}

/// Inverse-gamma prior on the noise variance. `beta = +∞` switches it off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePrior {
    pub alpha: f64,
    #[serde(with = "crate::io::serde_f64_inf")]
    pub beta: f64,
}

impl NoisePrior {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inverse-gamma prior needs alpha > 0 and beta > 0, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn is_active(&self) -> bool {
        self.beta.is_finite()
    }

    /// `ln p(x; α, β) = α ln β − ln Γ(α) − (α+1) ln x − β/x`; zero when inactive.
    pub fn log_density(&self, x: f64) -> f64 {
        if !self.is_active() {
            return 0.0;
        }
        self.alpha * self.beta.ln()
            - ln_gamma(self.alpha)
            - (self.alpha + 1.0) * x.ln()
            - self.beta / x
    }

    /// Derivative of [`NoisePrior::log_density`] with respect to `ln x`.
    pub fn log_density_dlog(&self, x: f64) -> f64 {
        if !self.is_active() {
            return 0.0;
        }
        -(self.alpha + 1.0) + self.beta / x
    }

    pub fn mode(&self) -> f64 {
        self.beta / (self.alpha + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpConfig {
    /// Fraction of each proposed site change that is applied.
    pub damping: f64,
    /// Convergence threshold on the largest relative change of site parameters.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Visit sites in reverse insertion order.
    pub reverse_order: bool,
    /// Record the smallest eigenvalue of the joint posterior covariance after each sweep.
    pub track_min_eigenvalue: bool,
}

impl Default for EpConfig {
    fn default() -> Self {
        Self {
            damping: 0.8,
            tol: 1e-6,
            max_sweeps: 200,
            reverse_order: false,
            track_min_eigenvalue: false,
        }
    }
}

/// Site parameters for every constraint plus convergence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpState {
    pub site_mean: Vec<f64>,
    /// `+∞` (serialized as `null`) for a site that carries no information.
    #[serde(with = "crate::io::serde_vec_f64_inf")]
    pub site_var: Vec<f64>,
    pub site_logz: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Site updates skipped because the cavity variance was not positive.
    pub skipped_updates: usize,
    pub final_damping: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub min_eigenvalues: Vec<f64>,
}

impl EpState {
    fn vacuous(n: usize, damping: f64) -> Self {
        Self {
            site_mean: vec![0.0; n],
            site_var: vec![f64::INFINITY; n],
            site_logz: vec![0.0; n],
            converged: true,
            iterations: 0,
            skipped_updates: 0,
            final_damping: damping,
            min_eigenvalues: Vec::new(),
        }
    }

    fn precision(&self, c: usize) -> f64 {
        let v = self.site_var[c];
        if v.is_finite() {
            1.0 / v
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicConfig {
    /// Probit sharpness ν.
    pub nu: f64,
    pub ep: EpConfig,
    pub noise_prior: Option<NoisePrior>,
}

impl Default for MonotonicConfig {
    fn default() -> Self {
        Self {
            nu: DEFAULT_NU,
            ep: EpConfig::default(),
            noise_prior: None,
        }
    }
}

/// Serializable description of a fitted model. Loading recomputes the posterior
/// from the stored site parameters without rerunning EP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicSpec {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub constraints: Vec<MonotonicityConstraint>,
    pub params: SeKernelParams,
    pub noise_var: f64,
    pub nu: f64,
    pub noise_prior: Option<NoisePrior>,
    pub ep: EpState,
}

/// Gaussian approximation over the joint latent vector.
#[derive(Debug, Clone)]
struct Posterior {
    /// Indices (into the joint vector) of sites with positive precision.
    active: Vec<usize>,
    factor: Factor,
    /// `(K_aa + Λ_a)^{-1} μ̃_a`
    alpha: DVector<f64>,
    pseudo_targets: DVector<f64>,
}

/// A fitted monotonic GP. Immutable after fitting.
#[derive(Debug, Clone)]
pub struct MonotonicGpModel {
    spec: MonotonicSpec,
    /// Location and observation kind of every joint latent.
    latents: Vec<(Vec<f64>, Obs)>,
    prior_cov: DMatrix<f64>,
    posterior: Posterior,
}

fn validate(
    inputs: &[Vec<f64>],
    targets: &[f64],
    constraints: &[MonotonicityConstraint],
    params: &SeKernelParams,
    noise_var: f64,
    cfg: &MonotonicConfig,
) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::Empty(
            "monotonic GP needs at least one training point",
        ));
    }
    check_dim(inputs.len(), targets.len())?;
    params.validate()?;
    validate_rows(inputs, params.dim())?;
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("targets must be finite".into()));
    }
    for (i, c) in constraints.iter().enumerate() {
        validate_rows(std::slice::from_ref(&c.location), params.dim())?;
        if c.direction >= params.dim() {
            return Err(Error::InvalidParameter(format!(
                "constraint direction {} out of range",
                c.direction
            )));
        }
        if constraints[..i].iter().any(|o| o == c) {
            return Err(Error::InvalidParameter(format!(
                "duplicate constraint at {:?} direction {}",
                c.location, c.direction
            )));
        }
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be >= 0, got {noise_var}"
        )));
    }
    if !(cfg.nu > 0.0 && cfg.nu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "probit sharpness must be positive, got {}",
            cfg.nu
        )));
    }
    if !(cfg.ep.damping > 0.0 && cfg.ep.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1], got {}",
            cfg.ep.damping
        )));
    }
    if let Some(p) = &cfg.noise_prior {
        NoisePrior::new(p.alpha, p.beta)?;
    }
    Ok(())
}

fn latents(inputs: &[Vec<f64>], constraints: &[MonotonicityConstraint]) -> Vec<(Vec<f64>, Obs)> {
    inputs
        .iter()
        .map(|x| (x.clone(), Obs::Value))
        .chain(
            constraints
                .iter()
                .map(|c| (c.location.clone(), Obs::Deriv(c.direction))),
        )
        .collect()
}

fn joint_prior(params: &SeKernelParams, latents: &[(Vec<f64>, Obs)]) -> DMatrix<f64> {
    let n = latents.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = latents[i]
                .1
                .cov(&latents[j].1, params, &latents[i].0, &latents[j].0);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Exact posterior given site means and variances (`+∞` entries are dropped).
fn build_posterior(prior: &DMatrix<f64>, site_mean: &[f64], site_var: &[f64]) -> Result<Posterior> {
    let active: Vec<usize> = (0..site_var.len())
        .filter(|&i| site_var[i].is_finite())
        .collect();
    let na = active.len();
    let mut a = DMatrix::from_fn(na, na, |i, j| prior[(active[i], active[j])]);
    let mut smallest = f64::INFINITY;
    for (i, &g) in active.iter().enumerate() {
        a[(i, i)] += site_var[g];
        smallest = smallest.min(site_var[g]);
    }
    let factor = jittered_cholesky(&a, smallest >= JITTER_FLOOR)?;
    let pseudo_targets = DVector::from_iterator(na, active.iter().map(|&g| site_mean[g]));
    let alpha = factor.solve(&pseudo_targets);
    Ok(Posterior {
        active,
        factor,
        alpha,
        pseudo_targets,
    })
}

/// Full joint posterior covariance and mean.
fn joint_moments(prior: &DMatrix<f64>, post: &Posterior) -> (DMatrix<f64>, DVector<f64>) {
    let n = prior.nrows();
    let ka = DMatrix::from_fn(n, post.active.len(), |i, j| prior[(i, post.active[j])]);
    let cov = prior - &ka * post.factor.solve_mat(&ka.transpose());
    let mean = &ka * &post.alpha;
    (cov, mean)
}

struct SiteArrays {
    mean: Vec<f64>,
    var: Vec<f64>,
}

fn site_arrays(targets: &[f64], noise_var: f64, ep: &EpState) -> SiteArrays {
    let mut mean = targets.to_vec();
    let mut var = vec![noise_var; targets.len()];
    mean.extend(ep.site_mean.iter().copied());
    var.extend(ep.site_var.iter().copied());
    SiteArrays { mean, var }
}

/// Runs EP to convergence (or `max_sweeps`) over the derivative sites.
fn run_ep(
    prior: &DMatrix<f64>,
    targets: &[f64],
    noise_var: f64,
    n_sites: usize,
    nu: f64,
    cfg: &EpConfig,
) -> Result<EpState> {
    let n_val = targets.len();
    let mut state = EpState::vacuous(n_sites, cfg.damping);
    if n_sites == 0 {
        return Ok(state);
    }
    state.converged = false;
    let mut tau = vec![0.0; n_sites];
    let mut shift = vec![0.0; n_sites];
    let mut damping = cfg.damping;

    let sync = |state: &mut EpState, tau: &[f64], shift: &[f64]| {
        for c in 0..n_sites {
            if tau[c] > 0.0 {
                state.site_var[c] = 1.0 / tau[c];
                state.site_mean[c] = shift[c] / tau[c];
            } else {
                state.site_var[c] = f64::INFINITY;
                state.site_mean[c] = 0.0;
            }
        }
    };

    let sites = site_arrays(targets, noise_var, &state);
    let (mut cov, mut mean) =
        joint_moments(prior, &build_posterior(prior, &sites.mean, &sites.var)?);
    let order: Vec<usize> = if cfg.reverse_order {
        (0..n_sites).rev().collect()
    } else {
        (0..n_sites).collect()
    };

    for sweep in 1..=cfg.max_sweeps {
        let mut max_change: f64 = 0.0;
        for &c in &order {
            let j = n_val + c;
            let s2 = cov[(j, j)];
            let m = mean[j];
            let cav_prec = 1.0 / s2 - tau[c];
            if !(cav_prec > 0.0) || !cav_prec.is_finite() {
                state.skipped_updates += 1;
                damping *= 0.5;
                continue;
            }
            let cav_var = 1.0 / cav_prec;
            let cav_mean = cav_var * (m / s2 - shift[c]);
            let upd = ep_site_update(cav_mean, cav_var, nu)?;
            state.site_logz[c] = upd.log_z;
            let new_tau = tau[c] + damping * (upd.precision - tau[c]);
            let new_shift = shift[c] + damping * (upd.shift - shift[c]);
            let d_tau = new_tau - tau[c];
            let d_shift = new_shift - shift[c];
            max_change = max_change
                .max(d_tau.abs() / (1.0 + tau[c].abs()))
                .max(d_shift.abs() / (1.0 + shift[c].abs()));
            tau[c] = new_tau;
            shift[c] = new_shift;
            // Rank-one update of the joint posterior.
            let col = cov.column(j).clone_owned();
            let denom = 1.0 + d_tau * s2;
            mean += &col * ((d_shift - d_tau * m) / denom);
            cov -= (&col * col.transpose()) * (d_tau / denom);
        }
        sync(&mut state, &tau, &shift);
        let sites = site_arrays(targets, noise_var, &state);
        let post = build_posterior(prior, &sites.mean, &sites.var)?;
        (cov, mean) = joint_moments(prior, &post);
        if cfg.track_min_eigenvalue {
            state.min_eigenvalues.push(min_eigenvalue(&cov));
        }
        state.iterations = sweep;
        if max_change < cfg.tol {
            state.converged = true;
            break;
        }
    }
    state.final_damping = damping;
    Ok(state)
}

/// Fits the constrained GP for fixed hyperparameters.
pub fn fit_monotonic(
    inputs: &[Vec<f64>],
    targets: &[f64],
    constraints: &[MonotonicityConstraint],
    params: SeKernelParams,
    noise_var: f64,
    cfg: &MonotonicConfig,
) -> Result<MonotonicGpModel> {
    validate(inputs, targets, constraints, &params, noise_var, cfg)?;
    let lat = latents(inputs, constraints);
    let prior = joint_prior(&params, &lat);
    let ep = run_ep(
        &prior,
        targets,
        noise_var,
        constraints.len(),
        cfg.nu,
        &cfg.ep,
    )?;
    let spec = MonotonicSpec {
        inputs: inputs.to_vec(),
        targets: targets.to_vec(),
        constraints: constraints.to_vec(),
        params,
        noise_var,
        nu: cfg.nu,
        noise_prior: cfg.noise_prior,
        ep,
    };
    MonotonicGpModel::assemble(spec, lat, prior)
}

/// Fits the constrained GP with an optional inverse-gamma noise prior. With
/// `optimize`, hyperparameters (including σ²) maximize the EP evidence plus the
/// log prior by multi-start gradient ascent, starting from `params`/`noise_var`.
pub fn fit_with_noise_prior(
    inputs: &[Vec<f64>],
    targets: &[f64],
    constraints: &[MonotonicityConstraint],
    params: SeKernelParams,
    noise_var: f64,
    cfg: &MonotonicConfig,
    optimize: Option<&HyperOptConfig>,
) -> Result<(MonotonicGpModel, Option<HyperOptReport>)> {
    let Some(opt) = optimize else {
        return fit_monotonic(inputs, targets, constraints, params, noise_var, cfg)
            .map(|m| (m, None));
    };
    validate(inputs, targets, constraints, &params, noise_var, cfg)?;
    let layout = LogLayout {
        dim: params.dim(),
        tie_rho: opt.tie_rho,
    };
    let (lo, hi) = layout.bounds(&opt.bounds);
    let objective = |x: &[f64]| {
        let (p, s2) = layout.unpack(x);
        let m = fit_monotonic(inputs, targets, constraints, p, s2, cfg)?;
        Ok((m.objective(), layout.reduce(&m.objective_gradient())))
    };
    let starts = layout.starts(&params, noise_var, opt);
    let (best, runs) = multi_start(objective, &starts, &lo, &hi, &opt.ascent)?;
    let (p, s2) = layout.unpack(&best.x);
    let model = fit_monotonic(inputs, targets, constraints, p, s2, cfg)?;
    let warning = !runs.iter().any(|r| r.converged);
    Ok((
        model,
        Some(HyperOptReport {
            best,
            starts: runs,
            warning,
        }),
    ))
}

impl MonotonicGpModel {
    fn assemble(
        spec: MonotonicSpec,
        latents: Vec<(Vec<f64>, Obs)>,
        prior_cov: DMatrix<f64>,
    ) -> Result<Self> {
        let sites = site_arrays(&spec.targets, spec.noise_var, &spec.ep);
        let posterior = build_posterior(&prior_cov, &sites.mean, &sites.var)?;
        Ok(Self {
            spec,
            latents,
            prior_cov,
            posterior,
        })
    }

    /// Rebuilds a model from its serialized form.
    pub fn from_spec(spec: MonotonicSpec) -> Result<Self> {
        let cfg = MonotonicConfig {
            nu: spec.nu,
            ep: EpConfig::default(),
            noise_prior: spec.noise_prior,
        };
        validate(
            &spec.inputs,
            &spec.targets,
            &spec.constraints,
            &spec.params,
            spec.noise_var,
            &cfg,
        )?;
        let n = spec.constraints.len();
        if spec.ep.site_mean.len() != n
            || spec.ep.site_var.len() != n
            || spec.ep.site_logz.len() != n
        {
            return Err(Error::InvalidParameter(
                "EP site arrays do not match the constraint count".into(),
            ));
        }
        if spec.ep.site_var.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter(
                "site variances must be positive or infinite".into(),
            ));
        }
        let lat = latents(&spec.inputs, &spec.constraints);
        let prior = joint_prior(&spec.params, &lat);
        Self::assemble(spec, lat, prior)
    }

    pub fn spec(&self) -> &MonotonicSpec {
        &self.spec
    }

    pub fn ep_state(&self) -> &EpState {
        &self.spec.ep
    }

    pub fn params(&self) -> &SeKernelParams {
        &self.spec.params
    }

    pub fn noise_var(&self) -> f64 {
        self.spec.noise_var
    }

    pub fn constraints(&self) -> &[MonotonicityConstraint] {
        &self.spec.constraints
    }

    fn weighted_sum(&self, y: &[f64], obs: Obs) -> f64 {
        self.posterior
            .active
            .iter()
            .zip(self.posterior.alpha.iter())
            .map(|(&g, a)| {
                let (x, kind) = &self.latents[g];
                a * obs.cov(kind, &self.spec.params, y, x)
            })
            .sum()
    }

    /// Posterior mean of the latent value at `y`; the surrogate score.
    pub fn score(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.spec.params.dim(), y.len())?;
        Ok(self.weighted_sum(y, Obs::Value))
    }

    /// Posterior mean of the latent gradient at `y`.
    pub fn score_gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.spec.params.dim(), y.len())?;
        Ok((0..y.len())
            .map(|d| self.weighted_sum(y, Obs::Deriv(d)))
            .collect())
    }

    /// Posterior means and variances (clamped at zero) of the latent values at `queries`.
    pub fn predict(&self, queries: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut means = Vec::with_capacity(queries.len());
        let mut vars = Vec::with_capacity(queries.len());
        for q in queries {
            means.push(self.score(q)?);
            let k = DVector::from_iterator(
                self.posterior.active.len(),
                self.posterior.active.iter().map(|&g| {
                    let (x, kind) = &self.latents[g];
                    Obs::Value.cov(kind, &self.spec.params, q, x)
                }),
            );
            let prior = self.spec.params.eta * self.spec.params.eta;
            vars.push((prior - k.dot(&self.posterior.factor.solve(&k))).max(0.0));
        }
        Ok((means, vars))
    }

    /// Joint posterior mean and covariance over (values, constrained derivatives).
    pub fn joint_posterior(&self) -> (DVector<f64>, DMatrix<f64>) {
        let (cov, mean) = joint_moments(&self.prior_cov, &self.posterior);
        (mean, cov)
    }

    /// EP approximation of `ln p(Z, M | X, θ)`.
    pub fn log_evidence(&self) -> f64 {
        let post = &self.posterior;
        let na = post.active.len() as f64;
        let mut lz = -0.5 * post.pseudo_targets.dot(&post.alpha)
            - 0.5 * post.factor.log_det()
            - 0.5 * na * LN_2PI;
        let n_val = self.spec.targets.len();
        let ep = &self.spec.ep;
        if ep.site_var.is_empty() {
            return lz;
        }
        let (cov, mean) = joint_moments(&self.prior_cov, post);
        for c in 0..ep.site_var.len() {
            let j = n_val + c;
            let tau = ep.precision(c);
            let cav_prec = 1.0 / cov[(j, j)] - tau;
            if !(cav_prec > 0.0) {
                continue;
            }
            let cav_var = 1.0 / cav_prec;
            let cav_mean = cav_var * (mean[j] / cov[(j, j)] - tau * ep.site_mean[c]);
            let t = tilted_moments(cav_mean, cav_var, self.spec.nu);
            lz += t.log_z;
            if tau > 0.0 {
                let v = cav_var + ep.site_var[c];
                let d = cav_mean - ep.site_mean[c];
                lz += 0.5 * (LN_2PI + v.ln()) + d * d / (2.0 * v);
            }
        }
        lz
    }

    /// Log density of the noise prior at the fitted σ² (0 when absent or inactive).
    pub fn log_noise_prior(&self) -> f64 {
        self.spec
            .noise_prior
            .map_or(0.0, |p| p.log_density(self.spec.noise_var))
    }

    /// Hyperparameter objective: EP evidence plus noise log prior.
    pub fn objective(&self) -> f64 {
        self.log_evidence() + self.log_noise_prior()
    }

    /// Gradient of [`MonotonicGpModel::objective`] with respect to
    /// `(log eta, log rho_1..M, log sigma^2)`, holding site parameters at their
    /// EP fixed point.
    pub fn objective_gradient(&self) -> Vec<f64> {
        let post = &self.posterior;
        let m = self.spec.params.dim();
        let na = post.active.len();
        let ainv = post.factor.inverse();
        let w = &post.alpha * post.alpha.transpose() - &ainv;
        let mut g = vec![0.0; m + 2];
        for i in 0..na {
            let (xi, oi) = &self.latents[post.active[i]];
            for j in 0..na {
                let (xj, oj) = &self.latents[post.active[j]];
                let dk = oi.cov_log_grad(oj, &self.spec.params, xi, xj);
                for (gk, d) in g.iter_mut().zip(&dk) {
                    *gk += 0.5 * w[(i, j)] * d;
                }
            }
        }
        let n_val = self.spec.targets.len();
        let trace_val: f64 = (0..na)
            .filter(|&i| post.active[i] < n_val)
            .map(|i| w[(i, i)])
            .sum();
        g[m + 1] = 0.5 * self.spec.noise_var * trace_val;
        if let Some(p) = &self.spec.noise_prior {
            g[m + 1] += p.log_density_dlog(self.spec.noise_var);
        }
        g
    }
}

impl ScoreModel for MonotonicGpModel {
    fn dim(&self) -> usize {
        self.spec.params.dim()
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        self.score(y)
    }

    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        self.score_gradient(y).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::fit_gp;
    use approx::assert_abs_diff_eq;

    fn p1d(eta: f64, rho: f64) -> SeKernelParams {
        SeKernelParams::isotropic(eta, rho, 1).unwrap()
    }

    #[test]
    fn no_constraints_reduces_to_plain_gp() {
        let x = vec![vec![0.0, 0.1], vec![0.4, 0.9], vec![1.0, 0.3]];
        let z = [0.2, -0.5, 1.0];
        let params = SeKernelParams::new(1.1, vec![0.5, 0.8]).unwrap();
        let gp = fit_gp(&x, &z, params.clone(), 1e-3).unwrap();
        let mono = fit_monotonic(&x, &z, &[], params, 1e-3, &MonotonicConfig::default()).unwrap();
        for q in [[0.2, 0.2], [0.9, -0.3], [3.0, 3.0]] {
            assert_abs_diff_eq!(
                gp.mean(&q).unwrap(),
                mono.score(&q).unwrap(),
                epsilon = 1e-10
            );
        }
        assert_abs_diff_eq!(
            gp.log_marginal_likelihood(),
            mono.log_evidence(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn duplicate_constraints_rejected() {
        let c = MonotonicityConstraint {
            location: vec![0.0],
            direction: 0,
        };
        let r = fit_monotonic(
            &[vec![0.0]],
            &[0.0],
            &[c.clone(), c],
            p1d(1.0, 1.0),
            0.01,
            &MonotonicConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn bad_direction_rejected() {
        let c = MonotonicityConstraint {
            location: vec![0.0],
            direction: 1,
        };
        assert!(fit_monotonic(
            &[vec![0.0]],
            &[0.0],
            &[c],
            p1d(1.0, 1.0),
            0.01,
            &MonotonicConfig::default()
        )
        .is_err());
    }

    #[test]
    fn constraint_raises_derivative_on_decreasing_data() {
        let x = vec![vec![0.0], vec![0.5], vec![1.0]];
        let z = [0.5, 0.0, -0.5];
        let params = p1d(1.0, 0.5);
        let at = MonotonicityConstraint {
            location: vec![0.5],
            direction: 0,
        };
        let free = fit_monotonic(
            &x,
            &z,
            &[],
            params.clone(),
            0.05,
            &MonotonicConfig::default(),
        )
        .unwrap();
        let cons = fit_monotonic(&x, &z, &[at], params, 0.05, &MonotonicConfig::default()).unwrap();
        let d_free = free.score_gradient(&[0.5]).unwrap()[0];
        let d_cons = cons.score_gradient(&[0.5]).unwrap()[0];
        assert!(d_cons > d_free, "{d_cons} <= {d_free}");
        assert!(cons.ep_state().converged);
    }

    #[test]
    fn noise_prior_mode_and_inactive() {
        let p = NoisePrior::new(3.0, 0.1).unwrap();
        let mode = p.mode();
        let h = 1e-7;
        let fd = (p.log_density(mode + h) - p.log_density(mode - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-4);
        let off = NoisePrior::new(3.0, f64::INFINITY).unwrap();
        assert_eq!(off.log_density(0.3), 0.0);
        assert_eq!(off.log_density_dlog(0.3), 0.0);
        assert!(NoisePrior::new(0.0, 1.0).is_err());
        assert!(NoisePrior::new(3.0, 0.0).is_err());
    }

    #[test]
    fn spec_roundtrip_reproduces_scores() {
        let x = vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]];
        let z = [0.0, 0.0, -1.0];
        let cons = constraints_everywhere(&x);
        let m = fit_monotonic(
            &x,
            &z,
            &cons,
            SeKernelParams::isotropic(1.0, 0.6, 2).unwrap(),
            0.01,
            &MonotonicConfig::default(),
        )
        .unwrap();
        let json = serde_json::to_string(m.spec()).unwrap();
        let back = MonotonicGpModel::from_spec(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(
            back.score(&[0.3, 0.4]).unwrap(),
            m.score(&[0.3, 0.4]).unwrap()
        );
    }
}
