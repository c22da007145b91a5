//! Piecewise-hypergeometric orthogonal systems on the half-line.
//!
//! The crate evaluates the θ-shifted family Φ_p, the continuous-spectrum functions
//! Ψ_s, their pairings and spectral transform, and numerically checks the
//! accompanying Mellin–Barnes and beta-integral identities.

pub mod error;
pub mod hyp2f1;
pub mod identities;
pub mod mellin;
pub mod ortho;
pub mod quadrature;
pub mod spectral;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
