//! Crate-wide error type.

use crate::odeint::Trajectory;

/// Errors produced by model evaluation, solvers, and the CLI layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside the domain of an operation (negative densities,
    /// out-of-range parameters, wrong cost mode, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A closed-form expression is singular for the given parameters.
    #[error("singular formula: {0}")]
    Singular(String),

    /// A requested equilibrium does not exist for the given ingredients.
    #[error("no such equilibrium: {0}")]
    Nonexistence(String),

    /// A bracketed root search failed to find a finite root.
    #[error("divergent root search: {0}")]
    Divergence(String),

    /// An iterative solver did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Adaptive step size underflow while integrating.
    #[error("stiffness: step size underflow at t = {t}")]
    Stiffness {
        t: f64,
        /// Accepted portion of the trajectory before the failure.
        partial: Box<Trajectory>,
    },

    /// A numeric intermediate left the representable range.
    #[error("range error: {0}")]
    Range(String),

    /// Two criteria that must agree disagreed; indicates a bug, not bad input.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    /// Scenario configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// A resource guard tripped (e.g. sweep grid too large).
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
