//! Score-function surrogates for Pareto frontiers.
//!
//! A score function `f` maps the objective space to a real value that is zero
//! on an estimated frontier, positive on the dominated side and negative on the
//! non-dominated side. This crate fits such functions from frontier samples
//! (monotonic Gaussian processes, plain GPs, one-class SVMs, staircases), audits
//! any score function against the conditions that make its zero set a valid
//! frontier, and extracts and measures that zero set in two dimensions.

pub mod conditions;
pub mod dominance;
pub mod error;
pub mod gp;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod levelset;
pub mod linalg;
pub mod monotonic;
pub mod optimize;
pub mod probit;
pub mod score;
pub mod svm;

pub use dominance::{
    classify_against_frontier, dominates_strong, dominates_weak, non_dominated_filter,
    staircase_frontier, FrontierSide, ObjectivePoint, PointSet, StaircaseFrontier,
};
pub use error::{Error, Result};
pub use gp::{fit_gp, optimize_hyperparams, GpModel};
pub use kernel::{k_grad_cross, k_grad_grad, k_value, SeKernelParams};
pub use monotonic::{
    fit_monotonic, fit_with_noise_prior, MonotonicGpModel, MonotonicityConstraint, NoisePrior,
};
pub use probit::{ep_site_update, probit};
pub use score::{FnScore, ScoreModel};
