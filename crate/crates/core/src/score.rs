//! The common contract shared by every surrogate: a real-valued score over the
//! objective space whose zero set is the estimated frontier, positive on the
//! dominated side and negative on the non-dominated side.

use crate::error::{check_dim, Error, Result};

pub trait ScoreModel: Send + Sync {
    /// Objective-space dimension.
    fn dim(&self) -> usize;

    fn value(&self, y: &[f64]) -> Result<f64>;

    /// Analytic gradient when the model has one.
    fn gradient(&self, _y: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(None)
    }
}

impl<T: ScoreModel + ?Sized> ScoreModel for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, y: &[f64]) -> Result<f64> {
        (**self).value(y)
    }
    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        (**self).gradient(y)
    }
}

impl<T: ScoreModel + ?Sized> ScoreModel for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, y: &[f64]) -> Result<f64> {
        (**self).value(y)
    }
    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        (**self).gradient(y)
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A score function given as a closure, optionally with its gradient.
pub struct FnScore {
    dim: usize,
    value: ValueFn,
    gradient: Option<GradFn>,
}

impl FnScore {
    pub fn new(dim: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }
}

impl ScoreModel for FnScore {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim, y.len())?;
        Ok((self.value)(y))
    }

    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        check_dim(self.dim, y.len())?;
        Ok(self.gradient.as_ref().map(|g| g(y)))
    }
}

/// Flips the sign of a score model.
pub struct Negated<S>(pub S);

impl<S: ScoreModel> ScoreModel for Negated<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, y: &[f64]) -> Result<f64> {
        self.0.value(y).map(|v| -v)
    }
    fn gradient(&self, y: &[f64]) -> Result<Option<Vec<f64>>> {
        Ok(self
            .0
            .gradient(y)?
            .map(|g| g.into_iter().map(|v| -v).collect()))
    }
}

/// Evaluates `f` and rejects non-finite values.
pub fn finite_value<S: ScoreModel + ?Sized>(f: &S, y: &[f64]) -> Result<f64> {
    let v = f.value(y)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            value: v,
            point: y.to_vec(),
        })
    }
}

/// Analytic gradient if available, otherwise central differences with `step`.
pub fn gradient_or_fd<S: ScoreModel + ?Sized>(f: &S, y: &[f64], step: f64) -> Result<Vec<f64>> {
    if let Some(g) = f.gradient(y)? {
        return Ok(g);
    }
    let mut x = y.to_vec();
    let mut g = Vec::with_capacity(y.len());
    for d in 0..y.len() {
        x[d] = y[d] + step;
        let hi = finite_value(f, &x)?;
        x[d] = y[d] - step;
        let lo = finite_value(f, &x)?;
        x[d] = y[d];
        g.push((hi - lo) / (2.0 * step));
    }
    Ok(g)
}
