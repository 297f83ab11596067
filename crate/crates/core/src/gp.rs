//! Zero-mean Gaussian process regression with a squared-exponential kernel:
//! exact posterior, log marginal likelihood, its analytic gradient, and
//! multi-start gradient-ascent hyperparameter fitting.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::kernel::{Obs, SeKernelParams};
use crate::linalg::{jittered_cholesky, Factor, JITTER_SCHEDULE};
use crate::optimize::{multi_start, AscentConfig, AscentResult};
use crate::score::ScoreModel;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Below this noise variance the plain factorization is skipped and jitter is
/// applied straight away.
pub const JITTER_FLOOR: f64 = JITTER_SCHEDULE[0];

/// Everything needed to rebuild a [`GpModel`]; this is the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSpec {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub params: SeKernelParams,
    pub noise_var: f64,
}

/// A fitted GP. Immutable after construction.
#[derive(Debug, Clone)]
pub struct GpModel {
    spec: GpSpec,
    factor: Factor,
    alpha: DVector<f64>,
}

pub(crate) fn validate_rows(inputs: &[Vec<f64>], dim: usize) -> Result<()> {
    for x in inputs {
        check_dim(dim, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite input {x:?}")));
        }
    }
    Ok(())
}

/// `K(X, X)` for value observations.
pub fn gram(params: &SeKernelParams, inputs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = inputs.len();
    DMatrix::from_fn(n, n, |i, j| {
        Obs::Value.cov(&Obs::Value, params, &inputs[i], &inputs[j])
    })
}

/// Fits the exact GP posterior for the given hyperparameters.
pub fn fit_gp(
    inputs: &[Vec<f64>],
    targets: &[f64],
    params: SeKernelParams,
    noise_var: f64,
) -> Result<GpModel> {
    GpModel::from_spec(GpSpec {
        inputs: inputs.to_vec(),
        targets: targets.to_vec(),
        params,
        noise_var,
    })
}

impl GpModel {
    pub fn from_spec(spec: GpSpec) -> Result<Self> {
        if spec.inputs.is_empty() {
            return Err(Error::Empty("GP needs at least one training point"));
        }
        check_dim(spec.inputs.len(), spec.targets.len())?;
        spec.params.validate()?;
        validate_rows(&spec.inputs, spec.params.dim())?;
        if !(spec.noise_var >= 0.0 && spec.noise_var.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be >= 0, got {}",
                spec.noise_var
            )));
        }
        let mut k = gram(&spec.params, &spec.inputs);
        for i in 0..k.nrows() {
            k[(i, i)] += spec.noise_var;
        }
        let factor = jittered_cholesky(&k, spec.noise_var >= JITTER_FLOOR)?;
        let alpha = factor.solve(&DVector::from_column_slice(&spec.targets));
        Ok(Self {
            spec,
            factor,
            alpha,
        })
    }

    pub fn spec(&self) -> &GpSpec {
        &self.spec
    }

    pub fn params(&self) -> &SeKernelParams {
        &self.spec.params
    }

    pub fn noise_var(&self) -> f64 {
        self.spec.noise_var
    }

    /// Diagonal jitter the factorization needed on top of the noise variance.
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    pub fn len(&self) -> usize {
        self.spec.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.inputs.is_empty()
    }

    fn cross(&self, q: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.spec
                .inputs
                .iter()
                .map(|x| Obs::Value.cov(&Obs::Value, &self.spec.params, x, q)),
        )
    }

    /// Posterior means and marginal variances (negative round-off clamped to 0).
    pub fn predict(&self, queries: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
        validate_rows(queries, self.spec.params.dim())?;
        let eta2 = self.spec.params.eta.powi(2);
        let mut means = Vec::with_capacity(queries.len());
        let mut vars = Vec::with_capacity(queries.len());
        for q in queries {
            let ks = self.cross(q);
            means.push(ks.dot(&self.alpha));
            let v = self
                .factor
                .chol
                .l_dirty()
                .solve_lower_triangular(&ks)
                .expect("triangular factor");
            vars.push((eta2 - v.dot(&v)).max(0.0));
        }
        Ok((means, vars))
    }

    /// Posterior mean vector and full covariance over `queries`.
    pub fn predict_cov(&self, queries: &[Vec<f64>]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        validate_rows(queries, self.spec.params.dim())?;
        let n = self.len();
        let kxs = DMatrix::from_fn(n, queries.len(), |i, j| {
            Obs::Value.cov(
                &Obs::Value,
                &self.spec.params,
                &self.spec.inputs[i],
                &queries[j],
            )
        });
        let kss = gram(&self.spec.params, queries);
        let mean = kxs.transpose() * &self.alpha;
        let cov = kss - kxs.transpose() * self.factor.solve_mat(&kxs);
        Ok((mean.iter().copied().collect(), cov))
    }

    pub fn mean(&self, q: &[f64]) -> Result<f64> {
        check_dim(self.spec.params.dim(), q.len())?;
        Ok(self.cross(q).dot(&self.alpha))
    }

    /// Gradient of the posterior mean.
    pub fn mean_gradient(&self, q: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.spec.params.dim(), q.len())?;
        Ok((0..q.len())
            .map(|d| {
                self.spec
                    .inputs
                    .iter()
                    .zip(self.alpha.iter())
                    .map(|(x, a)| a * Obs::Value.cov(&Obs::Deriv(d), &self.spec.params, x, q))
                    .sum()
            })
            .collect())
    }

    /// `log p(Z | X, θ)`.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.len() as f64;
        let z = DVector::from_column_slice(&self.spec.targets);
        -0.5 * z.dot(&self.alpha) - 0.5 * self.factor.log_det() - 0.5 * n * LN_2PI
    }

    /// Gradient of the log marginal likelihood with respect to
    /// `(log eta, log rho_1, ..., log rho_M, log sigma^2)`.
    pub fn lml_gradient(&self) -> Vec<f64> {
        let n = self.len();
        let m = self.spec.params.dim();
        let kinv = self.factor.inverse();
        // W = alpha alpha^T - K^{-1}
        let w = &self.alpha * self.alpha.transpose() - &kinv;
        let mut g = vec![0.0; m + 2];
        for i in 0..n {
            for j in 0..n {
                let dk = Obs::Value.cov_log_grad(
                    &Obs::Value,
                    &self.spec.params,
                    &self.spec.inputs[i],
                    &self.spec.inputs[j],
                );
                for (gk, d) in g.iter_mut().zip(&dk) {
                    *gk += 0.5 * w[(i, j)] * d;
                }
            }
        }
        g[m + 1] = 0.5 * self.spec.noise_var * w.trace();
        g
    }
}

impl ScoreModel for GpModel {
    fn dim(&self) -> usize {
        self.spec.params.dim()
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        self.mean(y)
    }

    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        self.mean_gradient(y).map(Some)
    }
}

/// Box bounds (natural units) for hyperparameter search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperBounds {
    pub eta: (f64, f64),
    pub rho: (f64, f64),
    pub noise_var: (f64, f64),
}

impl Default for HyperBounds {
    fn default() -> Self {
        Self {
            eta: (1e-3, 1e2),
            rho: (1e-3, 1e2),
            noise_var: (1e-8, 1e1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperOptConfig {
    pub ascent: AscentConfig,
    /// Random restarts in addition to the supplied initial point.
    pub restarts: usize,
    pub seed: u64,
    /// Share one length-scale across all coordinates.
    pub tie_rho: bool,
    pub bounds: HyperBounds,
    /// Log-uniform range for restart values of eta and rho.
    pub init_range: (f64, f64),
    /// Log-uniform range for restart values of the noise variance.
    pub noise_init_range: (f64, f64),
}

impl Default for HyperOptConfig {
    fn default() -> Self {
        Self {
            ascent: AscentConfig::default(),
            restarts: 5,
            seed: 0,
            tie_rho: false,
            bounds: HyperBounds::default(),
            init_range: (1e-2, 1e1),
            noise_init_range: (1e-4, 1e-1),
        }
    }
}

/// Outcome of a hyperparameter search, kept for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperOptReport {
    pub best: AscentResult,
    pub starts: Vec<AscentResult>,
    /// No start reached the gradient tolerance.
    pub warning: bool,
}

/// Packs hyperparameters into the optimizer's log-space vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogLayout {
    pub dim: usize,
    pub tie_rho: bool,
}

impl LogLayout {
    pub fn len(&self) -> usize {
        if self.tie_rho {
            3
        } else {
            self.dim + 2
        }
    }

    pub fn pack(&self, p: &SeKernelParams, noise_var: f64) -> Vec<f64> {
        let mut x = vec![p.eta.ln()];
        if self.tie_rho {
            let mean_log = p.rho.iter().map(|r| r.ln()).sum::<f64>() / p.rho.len() as f64;
            x.push(mean_log);
        } else {
            x.extend(p.rho.iter().map(|r| r.ln()));
        }
        x.push(noise_var.ln());
        x
    }

    pub fn unpack(&self, x: &[f64]) -> (SeKernelParams, f64) {
        let rho = if self.tie_rho {
            vec![x[1].exp(); self.dim]
        } else {
            x[1..=self.dim].iter().map(|v| v.exp()).collect()
        };
        (
            SeKernelParams {
                eta: x[0].exp(),
                rho,
            },
            x[x.len() - 1].exp(),
        )
    }

    /// Reduces a full `(eta, rho_1..rho_M, sigma^2)` gradient to this layout.
    pub fn reduce(&self, full: &[f64]) -> Vec<f64> {
        if self.tie_rho {
            vec![full[0], full[1..=self.dim].iter().sum(), full[self.dim + 1]]
        } else {
            full.to_vec()
        }
    }

    pub fn bounds(&self, b: &HyperBounds) -> (Vec<f64>, Vec<f64>) {
        let nr = self.len() - 2;
        let mut lo = vec![b.eta.0.ln()];
        let mut hi = vec![b.eta.1.ln()];
        lo.extend(std::iter::repeat_n(b.rho.0.ln(), nr));
        hi.extend(std::iter::repeat_n(b.rho.1.ln(), nr));
        lo.push(b.noise_var.0.ln());
        hi.push(b.noise_var.1.ln());
        (lo, hi)
    }

    /// The initial point followed by `cfg.restarts` seeded random starts.
    pub fn starts(
        &self,
        init: &SeKernelParams,
        noise_var: f64,
        cfg: &HyperOptConfig,
    ) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (a, b) = (cfg.init_range.0.ln(), cfg.init_range.1.ln());
        let (na, nb) = (cfg.noise_init_range.0.ln(), cfg.noise_init_range.1.ln());
        let mut out = vec![self.pack(init, noise_var)];
        for _ in 0..cfg.restarts {
            let mut x: Vec<f64> = (0..self.len() - 1)
                .map(|_| rng.random_range(a..=b))
                .collect();
            x.push(rng.random_range(na..=nb));
            out.push(x);
        }
        out
    }
}

/// Maximizes the log marginal likelihood over `(log eta, log rho, log sigma^2)`
/// by multi-start gradient ascent and returns the best model.
pub fn optimize_hyperparams(
    inputs: &[Vec<f64>],
    targets: &[f64],
    init: &SeKernelParams,
    init_noise_var: f64,
    cfg: &HyperOptConfig,
) -> Result<(GpModel, HyperOptReport)> {
    if inputs.len() < 2 {
        return Err(Error::InvalidParameter(
            "hyperparameter fitting needs at least 2 points".into(),
        ));
    }
    init.validate()?;
    let layout = LogLayout {
        dim: init.dim(),
        tie_rho: cfg.tie_rho,
    };
    let (lo, hi) = layout.bounds(&cfg.bounds);
    let objective = |x: &[f64]| {
        let (p, s2) = layout.unpack(x);
        let m = fit_gp(inputs, targets, p, s2)?;
        Ok((
            m.log_marginal_likelihood(),
            layout.reduce(&m.lml_gradient()),
        ))
    };
    let starts = layout.starts(init, init_noise_var, cfg);
    let (best, runs) = multi_start(objective, &starts, &lo, &hi, &cfg.ascent)?;
    let (p, s2) = layout.unpack(&best.x);
    let model = fit_gp(inputs, targets, p, s2)?;
    let warning = !runs.iter().any(|r| r.converged);
    Ok((
        model,
        HyperOptReport {
            best,
            starts: runs,
            warning,
        },
    ))
}
