//! Reproducible experiments: built-in problems, fitting, extraction, audits and
//! artifact output.

mod experiment;
mod problems;

pub use experiment::*;
pub use problems::*;
