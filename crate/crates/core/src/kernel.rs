//! Squared-exponential kernel with the cross-covariances needed when a GP is
//! observed through its partial derivatives as well as its values.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Amplitude `eta` and per-coordinate length-scales `rho` of
/// `k(x, x') = eta^2 exp(-1/2 sum_i (x_i - x'_i)^2 / rho_i^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeKernelParams {
    pub eta: f64,
    pub rho: Vec<f64>,
}

impl SeKernelParams {
    pub fn new(eta: f64, rho: Vec<f64>) -> Result<Self> {
        let p = Self { eta, rho };
        p.validate()?;
        Ok(p)
    }

    /// Same length-scale in every one of `dim` coordinates.
    pub fn isotropic(eta: f64, rho: f64, dim: usize) -> Result<Self> {
        Self::new(eta, vec![rho; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.rho.is_empty() {
            return Err(Error::InvalidParameter("rho must not be empty".into()));
        }
        if let Some(r) = self.rho.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "length-scales must be positive, got {r}"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    fn base(&self, x: &[f64], x2: &[f64]) -> f64 {
        let s: f64 = x
            .iter()
            .zip(x2)
            .zip(&self.rho)
            .map(|((a, b), r)| {
                let t = (a - b) / r;
                t * t
            })
            .sum();
        self.eta * self.eta * (-0.5 * s).exp()
    }
}

fn check3(p: &SeKernelParams, x: &[f64], x2: &[f64]) -> Result<()> {
    check_dim(p.dim(), x.len())?;
    check_dim(p.dim(), x2.len())
}

fn check_index(p: &SeKernelParams, d: usize) -> Result<()> {
    if d < p.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: d + 1,
        })
    }
}

/// Kernel value.
pub fn k_value(p: &SeKernelParams, x: &[f64], x2: &[f64]) -> Result<f64> {
    check3(p, x, x2)?;
    Ok(p.base(x, x2))
}

/// `∂k(x, x2)/∂x2_d`, the covariance between `f(x)` and `∂f/∂x_d` at `x2`.
pub fn k_grad_cross(p: &SeKernelParams, x: &[f64], x2: &[f64], d: usize) -> Result<f64> {
    check3(p, x, x2)?;
    check_index(p, d)?;
    Ok(Obs::Value.cov(&Obs::Deriv(d), p, x, x2))
}

/// `∂²k/∂x_{d1}∂x2_{d2}`, the covariance between two partial derivatives.
pub fn k_grad_grad(p: &SeKernelParams, x: &[f64], x2: &[f64], d1: usize, d2: usize) -> Result<f64> {
    check3(p, x, x2)?;
    check_index(p, d1)?;
    check_index(p, d2)?;
    Ok(Obs::Deriv(d1).cov(&Obs::Deriv(d2), p, x, x2))
}

/// What is observed about the latent function at a location: its value or one
/// partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obs {
    Value,
    Deriv(usize),
}

impl Obs {
    /// Covariance between observation `self` at `x` and `other` at `x2`.
    /// Dimensions are assumed checked.
    pub fn cov(&self, other: &Obs, p: &SeKernelParams, x: &[f64], x2: &[f64]) -> f64 {
        let k = p.base(x, x2);
        let r = |d: usize| x[d] - x2[d];
        let inv2 = |d: usize| 1.0 / (p.rho[d] * p.rho[d]);
        match (*self, *other) {
            (Obs::Value, Obs::Value) => k,
            (Obs::Value, Obs::Deriv(d)) => k * r(d) * inv2(d),
            (Obs::Deriv(d), Obs::Value) => -k * r(d) * inv2(d),
            (Obs::Deriv(a), Obs::Deriv(b)) => {
                let delta = if a == b { inv2(a) } else { 0.0 };
                k * (delta - r(a) * r(b) * inv2(a) * inv2(b))
            }
        }
    }

    /// Gradient of [`Obs::cov`] with respect to `(log eta, log rho_1, ..., log rho_M)`.
    pub fn cov_log_grad(&self, other: &Obs, p: &SeKernelParams, x: &[f64], x2: &[f64]) -> Vec<f64> {
        let m = p.dim();
        let c = self.cov(other, p, x, x2);
        let k = p.base(x, x2);
        let r = |d: usize| x[d] - x2[d];
        let inv2 = |d: usize| 1.0 / (p.rho[d] * p.rho[d]);
        let mut g = Vec::with_capacity(m + 1);
        g.push(2.0 * c);
        for j in 0..m {
            let q = r(j) * r(j) * inv2(j);
            let extra = match (*self, *other) {
                (Obs::Value, Obs::Value) => 0.0,
                (Obs::Value, Obs::Deriv(d)) | (Obs::Deriv(d), Obs::Value) => {
                    if d == j {
                        -2.0 * c
                    } else {
                        0.0
                    }
                }
                (Obs::Deriv(a), Obs::Deriv(b)) => {
                    let mut e = 0.0;
                    if a == b && a == j {
                        e -= 2.0 * k * inv2(a);
                    }
                    let cross = r(a) * r(b) * inv2(a) * inv2(b);
                    if a == j {
                        e += 2.0 * k * cross;
                    }
                    if b == j {
                        e += 2.0 * k * cross;
                    }
                    e
                }
            };
            g.push(q * c + extra);
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn value_examples() {
        let p = SeKernelParams::isotropic(1.0, 0.7, 2).unwrap();
        assert_eq!(k_value(&p, &[0.3, -1.0], &[0.3, -1.0]).unwrap(), 1.0);
        let p1 = SeKernelParams::isotropic(1.0, 0.5, 1).unwrap();
        assert_abs_diff_eq!(
            k_value(&p1, &[0.0], &[0.5]).unwrap(),
            0.606_530_659_712_633_4,
            epsilon = 1e-15
        );
        let p2 = SeKernelParams::isotropic(2.0, 0.5, 2).unwrap();
        assert_eq!(k_value(&p2, &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn zero_offset_derivatives() {
        let p = SeKernelParams::isotropic(1.0, 0.5, 2).unwrap();
        let x = [0.2, 0.4];
        assert_eq!(k_grad_cross(&p, &x, &x, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(k_grad_grad(&p, &x, &x, 1, 1).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(k_grad_grad(&p, &x, &x, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn cross_sign() {
        let p = SeKernelParams::isotropic(1.0, 1.0, 2).unwrap();
        assert!(k_grad_cross(&p, &[1.0, 0.0], &[0.0, 0.0], 0).unwrap() > 0.0);
        assert!(k_grad_cross(&p, &[0.0, 0.0], &[1.0, 0.0], 0).unwrap() < 0.0);
    }

    #[test]
    fn rejects_bad_params_and_dims() {
        assert!(SeKernelParams::new(0.0, vec![1.0]).is_err());
        assert!(SeKernelParams::new(1.0, vec![1.0, -1.0]).is_err());
        assert!(SeKernelParams::new(1.0, vec![]).is_err());
        let p = SeKernelParams::isotropic(1.0, 1.0, 2).unwrap();
        assert!(k_value(&p, &[0.0], &[0.0, 1.0]).is_err());
        assert!(k_grad_cross(&p, &[0.0, 0.0], &[0.0, 1.0], 2).is_err());
        assert!(k_grad_grad(&p, &[0.0, 0.0], &[0.0, 1.0], 0, 5).is_err());
    }

    #[test]
    fn log_grad_matches_finite_differences() {
        let p = SeKernelParams::new(1.3, vec![0.6, 0.9]).unwrap();
        let x = [0.2, -0.4];
        let x2 = [0.5, 0.3];
        let obs = [Obs::Value, Obs::Deriv(0), Obs::Deriv(1)];
        let h = 1e-6;
        for a in &obs {
            for b in &obs {
                let g = a.cov_log_grad(b, &p, &x, &x2);
                for i in 0..3 {
                    let shift = |s: f64| {
                        let mut q = p.clone();
                        if i == 0 {
                            q.eta *= s.exp();
                        } else {
                            q.rho[i - 1] *= s.exp();
                        }
                        a.cov(b, &q, &x, &x2)
                    };
                    let fd = (shift(h) - shift(-h)) / (2.0 * h);
                    assert_abs_diff_eq!(g[i], fd, epsilon = 1e-7);
                }
            }
        }
    }
}
