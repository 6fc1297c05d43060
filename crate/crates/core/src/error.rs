use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    Dimension { dim: usize, reason: &'static str },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: {what} (estimate {value:e}, error {error:e})")]
    Quadrature {
        what: &'static str,
        value: f64,
        error: f64,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("ill-conditioned fit (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("root bracket failure: {0}")]
    Bracket(&'static str),

    #[error("solver did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    #[error("no nontrivial solution found from this start")]
    TrivialSolution,

    #[error("nodal structure lost: expected {expected} sign changes, found {found}")]
    NodalStructure { expected: usize, found: usize },

    #[error("mesh/field mismatch: mesh has {mesh} nodes, field has {field}")]
    Mismatch { mesh: usize, field: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(dim: usize, min: usize, reason: &'static str) -> Result<()> {
    if dim < min {
        Err(Error::Dimension { dim, reason })
    } else {
        Ok(())
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
