//! Numeric engines producing (co-)inductive value vectors: value iteration,
//! interval iteration with safe rounding and smoothing, exact policy
//! iteration, and certificate generation on top of them.

pub mod config;
pub mod generate;
pub mod pi;
pub mod prepare;
pub mod round;
pub mod vi;

use thiserror::Error;

pub use config::{Method, Rounding, SolverConfig};
pub use generate::{generate_certificates, BoundReq, GenerateError};
pub use prepare::{prepare, Kind, Prepared};
pub use vi::{interval_iteration, smooth_step, value_iteration, BoundPair, Side};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("iteration did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("floating-point breakage: {side:?} vector not (co-)inductive at state {state}")]
    FloatBreakage { side: vi::Side, state: usize },
    #[error("policy iteration exceeded its improvement guard")]
    ImprovementGuard,
    #[error("internal solver error: {0}")]
    Internal(&'static str),
}
