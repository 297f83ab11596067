//! Standard normal CDF in forms that stay accurate deep in the lower tail, and
//! the probit expectation-propagation site update.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// `Φ(v)`, the standard normal CDF.
pub fn probit(v: f64) -> f64 {
    0.5 * erfc(-v / std::f64::consts::SQRT_2)
}

/// Upper-tail Mills ratio `Q(x)/φ(x)` for `x >= 5` by continued fraction.
fn upper_mills(x: f64) -> f64 {
    let mut acc = x;
    for k in (1..=80).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

/// `ln Φ(v)`, finite for any finite `v`.
pub fn log_probit(v: f64) -> f64 {
    if v < -5.0 {
        -0.5 * v * v - LN_SQRT_2PI + upper_mills(-v).ln()
    } else {
        probit(v).ln()
    }
}

/// `φ(v)/Φ(v)`.
pub fn inverse_mills(v: f64) -> f64 {
    if v < -5.0 {
        1.0 / upper_mills(-v)
    } else {
        normal_pdf(v) / probit(v)
    }
}

/// Moments of the tilted distribution `Φ(x/ν) N(x | mean, var) / Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub log_z: f64,
    pub mean: f64,
    pub var: f64,
}

pub fn tilted_moments(cavity_mean: f64, cavity_var: f64, nu: f64) -> TiltedMoments {
    let s2 = nu * nu + cavity_var;
    let s = s2.sqrt();
    let z = cavity_mean / s;
    let r = inverse_mills(z);
    let mean = cavity_mean + cavity_var * r / s;
    let shrink = (cavity_var / s2) * r * (z + r);
    let var = (cavity_var * (1.0 - shrink)).max(cavity_var * f64::EPSILON);
    TiltedMoments {
        log_z: log_probit(z),
        mean,
        var,
    }
}

/// Result of matching one probit site to its tilted distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteUpdate {
    pub site_mean: f64,
    /// `+∞` when the site carries no information.
    pub site_var: f64,
    pub log_z: f64,
    /// Site precision `1/site_var`.
    pub precision: f64,
    /// Site precision times site mean.
    pub shift: f64,
    pub tilted: TiltedMoments,
}

/// Moment-matches `Φ(x/ν) N(x | cavity_mean, cavity_var)` and converts the
/// matched Gaussian into site parameters. Undamped.
pub fn ep_site_update(cavity_mean: f64, cavity_var: f64, nu: f64) -> Result<SiteUpdate> {
    if !(cavity_var > 0.0) || !cavity_var.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "cavity variance must be positive, got {cavity_var}"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "probit sharpness must be positive, got {nu}"
        )));
    }
    let t = tilted_moments(cavity_mean, cavity_var, nu);
    let precision = (1.0 / t.var - 1.0 / cavity_var).max(0.0);
    let shift = t.mean / t.var - cavity_mean / cavity_var;
    let (site_mean, site_var, shift) = if precision > 0.0 {
        (shift / precision, 1.0 / precision, shift)
    } else {
        (0.0, f64::INFINITY, 0.0)
    };
    Ok(SiteUpdate {
        site_mean,
        site_var,
        log_z: t.log_z,
        precision,
        shift,
        tilted: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn probit_values() {
        assert_eq!(probit(0.0), 0.5);
        assert_abs_diff_eq!(probit(1.959_964), 0.975, epsilon = 1e-6);
        let t = probit(-8.0);
        assert!(t > 0.0 && t < 1e-14);
        for v in [-3.0, -0.2, 0.7, 2.5] {
            assert_abs_diff_eq!(probit(-v), 1.0 - probit(v), epsilon = 1e-15);
        }
    }

    #[test]
    fn log_probit_is_continuous_across_branch() {
        let a = log_probit(-5.0 + 1e-9);
        let b = log_probit(-5.0 - 1e-9);
        assert!((a - b).abs() < 1e-7);
        assert!((log_probit(-4.0) - probit(-4.0).ln()).abs() < 1e-12);
        assert!(log_probit(-40.0).is_finite());
        assert!((inverse_mills(-5.0 - 1e-12) - inverse_mills(-5.0 + 1e-12)).abs() < 1e-8);
    }

    #[test]
    fn satisfied_constraint_gives_vacuous_site() {
        let u = ep_site_update(8.0, 1.0, 1e-6).unwrap();
        assert!(u.site_var > 1e6);
    }

    #[test]
    fn rejects_bad_cavity() {
        assert!(ep_site_update(0.0, 0.0, 1e-6).is_err());
        assert!(ep_site_update(0.0, -1.0, 1e-6).is_err());
    }

    #[test]
    fn violated_constraint_pulls_mean_up() {
        let u = ep_site_update(-1.0, 0.5, 1e-6).unwrap();
        assert!(u.tilted.mean > 0.0);
        assert!(u.tilted.var < 0.5);
        assert!(u.site_var.is_finite() && u.site_var > 0.0);
    }
}
