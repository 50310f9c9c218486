//! Centralized tolerance constants.
//!
//! Every threshold used by the library is defined here, so the working
//! precision of the whole artifact can be audited in one place. All
//! computation is IEEE 754 double precision.

/// Relative Hermiticity defect accepted by the spectral decomposition.
pub const HERMITICITY_REL: f64 = 1e-10;

/// Per-entry reconstruction residual contract of `eigh`, relative to the
/// operator norm of the input.
pub const EIGH_RESIDUAL_REL: f64 = 1e-10;

/// Relative agreement required between the quadrature and closed-form routes
/// of the geometric-mean map at the default quadrature setting.
pub const QUADRATURE_REL: f64 = 1e-6;

/// Condition number above which a density is flagged as outside the
/// quadrature accuracy contract.
pub const QUADRATURE_COND_GUARD: f64 = 1e3;

/// Condition number above which a density is flagged as numerically hostile.
pub const DENSITY_COND_GUARD: f64 = 1e6;

/// Frobenius residual below which the alternating-projection feasibility
/// search declares the PSD completion feasible.
pub const SDP_FEAS_RESIDUAL: f64 = 1e-8;

/// Iteration cap for one alternating-projection feasibility run.
pub const SDP_MAX_ITER: usize = 50_000;

/// Default absolute width of the cb-norm bisection bracket.
pub const SDP_BISECTION_TOL: f64 = 1e-4;

/// Slack added to every certified upper bound before asserting a claimed
/// inequality from the literature.
pub const CERT_SLACK: f64 = 1e-6;

/// Reconstruction error allowed for a Gram factorization extracted from a
/// feasible PSD completion.
pub const FACTORIZATION_TOL: f64 = 1e-6;

/// Generic "exact up to rounding" comparison tolerance.
pub const TINY: f64 = 1e-9;

/// Absolute per-panel target of the adaptive quadrature used for Fourier L1
/// norms.
pub const ADAPTIVE_PANEL_TARGET: f64 = 1e-9;

/// Inflation constant of the grid bound for degree-K trigonometric
/// polynomials: `sup <= (1 + GRID_INFLATION_C * K / m) * max over m uniform
/// samples`, valid for `m >= 2 + GRID_INFLATION_C * K`.
pub const GRID_INFLATION_C: f64 = 2.0 * std::f64::consts::PI;

/// Default budget for the interpolation sandwich at exponent `p`:
/// `8 * max(p, 2) * max(p, p')`. The literature constant is not effective,
/// so the budget is configuration, not ground truth.
pub fn sandwich_budget(p: f64, p_conj: f64) -> f64 {
    8.0 * p.max(2.0) * p.max(p_conj)
}
