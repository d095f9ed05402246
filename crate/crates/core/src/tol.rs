//! Numerical tolerances shared across the crate.
//!
//! Set algebra on events is exact (bitmasks); everything below applies to
//! floating-point probabilities and phases only.

/// Algebraic identities that hold exactly in the model (Bayes, total probability).
pub const IDENTITY: f64 = 1e-12;

/// Predicates on transition matrices (double stochasticity, symmetry).
pub const PREDICATE: f64 = 1e-10;

/// Born-rule and normalization residuals.
pub const BORN: f64 = 1e-10;

/// Distance of |λ| from 1 below which a coefficient is a boundary value.
pub const BOUNDARY: f64 = 1e-12;

/// Derived phase identities; failure signals an upstream bug.
pub const PHASE_CHECK: f64 = 1e-8;

/// Accepted deviation of the declared weights' sum from 1 at load time.
pub const LOAD_SUM: f64 = 1e-9;

/// Largest rapidity accepted by the hyperbolic exponential.
pub const MAX_RAPIDITY: f64 = 700.0;

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
