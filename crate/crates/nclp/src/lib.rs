//! # nclp
//!
//! A finite-dimensional laboratory for weighted noncommutative `L_p` spaces.
//!
//! Everything lives on dense `n x n` complex matrices with the ordinary trace.
//! The crate provides:
//!
//! - **Schatten norms** and Hermitian spectral calculus ([`mat`], [`schatten`],
//!   [`density`]): the substrate every other module computes on.
//! - **Weighted norms** `||dx + xd||_p`, the map `Sigma_d = L_d + R_d` and its
//!   inverse, the geometric-mean contraction with its cosh-kernel integral
//!   representation, and triangular projections ([`weighted`]).
//! - **Schur multipliers** for the kernel families built from positive
//!   sequences, with completely bounded norms certified from above (Fourier
//!   `L1` bounds, PSD-completion feasibility) and below (entry and empirical
//!   witnesses), plus blockwise transference ([`schur`], [`fourier`]).
//! - **Complex interpolation** on the strip: analytic families parametrized by
//!   the conformal disk variable, a convex boundary-max solver, duality lower
//!   bounds, and the weighted-sandwich verification ([`interp`]).
//!
//! Statistical sweeps fan out through [`exec::map_trials`], which runs on
//! rayon when the `parallel` feature (default) is enabled and degrades to a
//! sequential loop otherwise; results are reduced in index order either way,
//! so reports are bit-identical across both modes.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod density;
pub mod exec;
pub mod fourier;
pub mod interp;
pub mod mat;
pub mod quad;
pub mod sampling;
pub mod schatten;
pub mod schur;
pub mod tol;
pub mod weighted;

pub use density::{Density, SpectralFn};
pub use mat::CMat;
pub use schatten::PNorm;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entries must be finite, found non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:.3e} exceeds {allowed:.3e}")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("spectrum must be positive: min eigenvalue = {0:.6e}")]
    NonPositiveSpectrum(f64),

    #[error("eigenvalues must be supplied in ascending order")]
    NotAscending,

    #[error("function descriptor is not nondecreasing on the spectrum (index {0})")]
    NotMonotone(usize),

    #[error("function descriptor is not positive on the spectrum (index {0})")]
    NotPositiveOnSpectrum(usize),

    #[error("p must lie in [1, inf], got {0}")]
    InvalidExponent(f64),

    #[error("theta = {0} outside the required range {1}")]
    ThetaOutOfRange(f64, &'static str),

    #[error("sequence must be positive (index {0})")]
    NonPositiveSequence(usize),

    #[error("sequence must be nondecreasing (index {0})")]
    NotNondecreasingSequence(usize),

    #[error("triangular part is zero; comparison ratio is undefined")]
    DegenerateRatio,

    #[error("no decay certificate for this kernel function; tail bound unavailable")]
    NoDecayCertificate,

    #[error("kernel function is not integrable on the line")]
    NotIntegrable,

    #[error("kernel dimension {0} exceeds the SDP cost guard {1}")]
    SdpTooLarge(usize, usize),

    #[error("interpolated exponent p = {0} must satisfy 1 < p < inf")]
    InterpExponentOutOfRange(f64),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
