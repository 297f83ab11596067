//! Dense symmetric factorization helpers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Diagonal jitter tried, in order, when a plain factorization fails.
pub const JITTER_SCHEDULE: [f64; 3] = [1e-9, 1e-6, 1e-3];

/// Cholesky factor together with the jitter that was added to the diagonal.
#[derive(Debug, Clone)]
pub struct Factor {
    pub chol: Cholesky<f64, Dyn>,
    pub jitter: f64,
}

impl Factor {
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self
            .chol
            .l_dirty()
            .diagonal()
            .iter()
            .map(|d| d.ln())
            .sum::<f64>()
    }
}

/// Factorizes the symmetric matrix `a`, escalating diagonal jitter through
/// [`JITTER_SCHEDULE`]. With `try_plain` the unjittered matrix is tried first.
pub fn jittered_cholesky(a: &DMatrix<f64>, try_plain: bool) -> Result<Factor> {
    let plain = if try_plain { Some(0.0) } else { None };
    let mut last = 0.0;
    for jitter in plain.into_iter().chain(JITTER_SCHEDULE) {
        last = jitter;
        let mut m = a.clone();
        if jitter > 0.0 {
            for i in 0..m.nrows() {
                m[(i, i)] += jitter;
            }
        }
        if let Some(chol) = Cholesky::new(m) {
            if chol
                .l_dirty()
                .diagonal()
                .iter()
                .all(|d| d.is_finite() && *d > 0.0)
            {
                return Ok(Factor { chol, jitter });
            }
        }
    }
    Err(Error::NotPositiveDefinite {
        jitter: last,
        min_eigenvalue: min_eigenvalue(a),
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
