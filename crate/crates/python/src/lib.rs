//! Python bindings: dominance utilities, model fitting, level-set extraction,
//! audits and the experiment runner.

use frontier_surrogate::conditions::{self, AuditConfig};
use frontier_surrogate::harness::{self, ExperimentConfig, Fitted, SavedModel};
use frontier_surrogate::io::to_json_fixed;
use frontier_surrogate::levelset::{self, AxisBox, DEFAULT_REFINE_TOL};
use frontier_surrogate::monotonic::{
    constraints_everywhere, MonotonicConfig, MonotonicityConstraint, NoisePrior,
};
use frontier_surrogate::{
    dominance, gp, monotonic, svm, Error, PointSet, ScoreModel, SeKernelParams,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point_set(rows: Vec<Vec<f64>>) -> PyResult<PointSet> {
    PointSet::from_rows(rows).map_err(py_err)
}

fn bbox(lo: Vec<f64>, hi: Vec<f64>) -> PyResult<AxisBox> {
    AxisBox::new(lo, hi).map_err(py_err)
}

fn kernel(eta: f64, rho: Vec<f64>) -> PyResult<SeKernelParams> {
    SeKernelParams::new(eta, rho).map_err(py_err)
}

#[pyfunction]
fn dominates_weak(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    dominance::dominates_weak(&a, &b).map_err(py_err)
}

#[pyfunction]
fn dominates_strong(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    dominance::dominates_strong(&a, &b).map_err(py_err)
}

/// Points of `points` not strongly dominated by any other, in input order.
#[pyfunction]
fn non_dominated_filter(points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(dominance::non_dominated_filter(&point_set(points)?).rows())
}

/// Generalized gradient of a Python callable at 0 as a dict with `value`,
/// `order`, `even_order` and `constant`.
#[pyfunction]
#[pyo3(signature = (h, max_order = 6, zero_tol = 1e-6))]
fn generalized_gradient<'py>(
    py: Python<'py>,
    h: Bound<'py, PyAny>,
    max_order: usize,
    zero_tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let f = |x: f64| {
        h.call1((x,))
            .and_then(|v| v.extract::<f64>())
            .unwrap_or(f64::NAN)
    };
    let r = conditions::generalized_gradient(f, max_order, zero_tol).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("order", r.order)?;
    d.set_item("even_order", r.even_order_flag)?;
    d.set_item("constant", r.constant)?;
    Ok(d)
}

/// Any fitted score model.
#[pyclass(name = "Model", module = "pyfrontier")]
struct PyModel {
    inner: Fitted,
}

#[pymethods]
impl PyModel {
    /// Model kind: `monotonic_gp`, `plain_gp`, `ocsvm` or `staircase`.
    #[getter]
    fn kind(&self) -> String {
        serde_json::to_value(self.inner.kind())
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Score at one point.
    fn value(&self, y: Vec<f64>) -> PyResult<f64> {
        self.inner.value(&y).map_err(py_err)
    }

    /// Scores at many points.
    fn values(&self, ys: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        ys.iter()
            .map(|y| self.inner.value(y).map_err(py_err))
            .collect()
    }

    /// Analytic gradient, or `None` when the model has none.
    fn gradient(&self, y: Vec<f64>) -> PyResult<Option<Vec<f64>>> {
        self.inner.gradient(&y).map_err(py_err)
    }

    /// Posterior means and variances (GP models only).
    fn predict(&self, queries: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        match &self.inner {
            Fitted::PlainGp(m) => m.predict(&queries).map_err(py_err),
            Fitted::MonotonicGp(m) => m.predict(&queries).map_err(py_err),
            _ => Err(PyValueError::new_err(
                "predict is only available for GP models",
            )),
        }
    }

    /// Zero level set over `[lo, hi]` as a list of polylines.
    #[pyo3(signature = (lo, hi, nx = 256, ny = 256))]
    fn extract_zero_set(
        &self,
        lo: Vec<f64>,
        hi: Vec<f64>,
        nx: usize,
        ny: usize,
    ) -> PyResult<Vec<Vec<[f64; 2]>>> {
        let e = levelset::extract_zero_set(&self.inner, &bbox(lo, hi)?, nx, ny, DEFAULT_REFINE_TOL)
            .map_err(py_err)?;
        Ok(e.polylines)
    }

    /// Runs all audits over `[lo, hi]` and returns the report as JSON.
    #[pyo3(signature = (lo, hi, nx = 256, ny = 256, seed = 0))]
    fn audit(
        &self,
        lo: Vec<f64>,
        hi: Vec<f64>,
        nx: usize,
        ny: usize,
        seed: u64,
    ) -> PyResult<String> {
        let b = bbox(lo, hi)?;
        let e = levelset::extract_zero_set(&self.inner, &b, nx, ny, DEFAULT_REFINE_TOL)
            .map_err(py_err)?;
        let v = harness::audit_frontier(&self.inner, self.inner.is_differentiable(), &e, &b, seed)
            .map_err(py_err)?;
        to_json_fixed(&v).map_err(py_err)
    }

    /// Sign audit of `f(y ± δu)` at the given frontier samples; returns the verdict.
    fn check_score_function(&self, samples: Vec<Vec<f64>>) -> PyResult<String> {
        let r = conditions::check_score_function(
            &self.inner,
            &point_set(samples)?,
            &AuditConfig::default(),
        )
        .map_err(py_err)?;
        Ok(serde_json::to_value(r.verdict)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default())
    }

    fn to_json(&self) -> PyResult<String> {
        to_json_fixed(&self.inner.save()).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let saved: SavedModel = serde_json::from_str(s).map_err(|e| py_err(e.into()))?;
        Ok(Self {
            inner: saved.load().map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Model(kind={:?}, dim={})", self.kind(), self.dim())
    }
}

/// Exact GP regression with fixed hyperparameters.
#[pyfunction]
fn fit_gp(
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    eta: f64,
    rho: Vec<f64>,
    noise_var: f64,
) -> PyResult<PyModel> {
    let m = gp::fit_gp(&inputs, &targets, kernel(eta, rho)?, noise_var).map_err(py_err)?;
    Ok(PyModel {
        inner: Fitted::PlainGp(m),
    })
}

/// GP with probit monotonicity constraints approximated by EP. Without explicit
/// `constraints` (pairs of location and direction) every input gets one
/// constraint per coordinate. With `optimize`, hyperparameters maximize the
/// evidence plus the inverse-gamma log prior `(alpha, beta)`.
#[pyfunction]
#[pyo3(signature = (inputs, targets, eta = 1.0, rho = None, noise_var = 0.01, constraints = None, nu = monotonic::DEFAULT_NU, alpha = 3.0, beta = None, optimize = false, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn fit_monotonic_gp(
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    eta: f64,
    rho: Option<Vec<f64>>,
    noise_var: f64,
    constraints: Option<Vec<(Vec<f64>, usize)>>,
    nu: f64,
    alpha: f64,
    beta: Option<f64>,
    optimize: bool,
    seed: u64,
) -> PyResult<PyModel> {
    let dim = inputs.first().map_or(0, Vec::len);
    let params = kernel(eta, rho.unwrap_or_else(|| vec![0.5; dim]))?;
    let cons = match constraints {
        Some(c) => c
            .into_iter()
            .map(|(location, direction)| MonotonicityConstraint {
                location,
                direction,
            })
            .collect(),
        None => constraints_everywhere(&inputs),
    };
    let prior = NoisePrior::new(alpha, beta.unwrap_or(f64::INFINITY)).map_err(py_err)?;
    let cfg = MonotonicConfig {
        nu,
        noise_prior: Some(prior),
        ..Default::default()
    };
    let opt = gp::HyperOptConfig {
        seed,
        tie_rho: true,
        ..Default::default()
    };
    let (m, _) = monotonic::fit_with_noise_prior(
        &inputs,
        &targets,
        &cons,
        params,
        noise_var,
        &cfg,
        optimize.then_some(&opt),
    )
    .map_err(py_err)?;
    Ok(PyModel {
        inner: Fitted::MonotonicGp(m),
    })
}

/// One-class SVM with an RBF kernel; its score is the decision value over `ρ`.
#[pyfunction]
fn train_ocsvm(data: Vec<Vec<f64>>, nu: f64, gamma: f64) -> PyResult<PyModel> {
    let m = svm::train_ocsvm(&point_set(data)?, nu, gamma).map_err(py_err)?;
    Ok(PyModel {
        inner: Fitted::Ocsvm(m),
    })
}

/// Signed Chebyshev distance to the region dominated by `points`.
#[pyfunction]
fn staircase(points: Vec<Vec<f64>>) -> PyResult<PyModel> {
    let s = dominance::staircase_frontier(&point_set(points)?).map_err(py_err)?;
    Ok(PyModel {
        inner: Fitted::Staircase(s),
    })
}

/// Symmetric Hausdorff distance between two point sets (polylines as point chains).
#[pyfunction]
#[pyo3(signature = (a, b, step = 1e-3))]
fn hausdorff(a: Vec<Vec<Vec<f64>>>, b: Vec<Vec<Vec<f64>>>, step: f64) -> PyResult<f64> {
    levelset::hausdorff(&levelset::Chains(a), &levelset::Chains(b), step).map_err(py_err)
}

/// Names of the built-in problems.
#[pyfunction]
fn builtin_problems() -> Vec<String> {
    harness::builtin_problems()
        .into_iter()
        .map(|p| p.name)
        .collect()
}

/// Runs one experiment from a JSON config and returns `metrics.json` contents.
#[pyfunction]
fn run_experiment(config_json: &str) -> PyResult<String> {
    let cfg: ExperimentConfig = serde_json::from_str(config_json).map_err(|e| py_err(e.into()))?;
    let art = harness::run_experiment(&cfg).map_err(py_err)?;
    harness::metrics_json(&art.metrics).map_err(py_err)
}

#[pymodule]
fn pyfrontier(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(dominates_weak, m)?)?;
    m.add_function(wrap_pyfunction!(dominates_strong, m)?)?;
    m.add_function(wrap_pyfunction!(non_dominated_filter, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_gradient, m)?)?;
    m.add_function(wrap_pyfunction!(fit_gp, m)?)?;
    m.add_function(wrap_pyfunction!(fit_monotonic_gp, m)?)?;
    m.add_function(wrap_pyfunction!(train_ocsvm, m)?)?;
    m.add_function(wrap_pyfunction!(staircase, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_problems, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
