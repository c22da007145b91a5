use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma argument sits on (or within the pole threshold of) a non-positive integer.
    #[error("gamma pole at {0}")]
    Pole(Complex64),

    /// An argument is outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The parameter triple violates one of its defining inequalities.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Iterative evaluation did not reach the requested accuracy.
    #[error("no convergence in {what} after {iterations} steps")]
    NoConvergence { what: &'static str, iterations: usize },

    /// c - a - b is (numerically) an integer, so the connection formula degenerates.
    #[error("logarithmic case: c - a - b = {0} is an integer")]
    LogarithmicCase(f64),

    /// Evaluation requested at the singular point x = 1 (or x = 0 where relevant).
    #[error("singular point x = {0}")]
    SingularPoint(f64),

    /// A Mellin or Barnes contour lies outside the convergence strip.
    #[error("strip violation: {0}")]
    StripViolation(String),

    /// NaN or infinite input.
    #[error("non-finite input")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
