//! Spatial Schmidt structure of SPDC biphoton states in the double-Gaussian
//! approximation.
//!
//! The crate computes, from pump and crystal parameters (or directly from the
//! dimensionless product `bσ`), the analytic Schmidt decomposition of the
//! biphoton transverse-momentum amplitude in both the cartesian
//! (Hermite-Gauss) and polar (Laguerre-Gauss) bases, the associated
//! entanglement measures (Schmidt number, Rényi and von Neumann entropies),
//! and the fraction of shared information retained under non-ideal detection.
//!
//! Everything analytic is cross-checked by an independent numerical oracle
//! ([`oracle`]) that discretizes the kernels with Gaussian quadrature and
//! diagonalizes them.

pub mod entropy;
pub mod modes;
pub mod oracle;
pub mod spdc;
pub mod specfun;
pub mod spectrum;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument was inside the domain but outside the supported range.
    #[error("range error: {0}")]
    Range(String),
    /// A computation could not reach the requested precision.
    #[error("precision error: {0}")]
    Precision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
