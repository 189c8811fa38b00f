//! Shared numerical tolerances.
//!
//! Every magic threshold in the crate lives here so the test suite and the
//! library agree on what "equal" means.

/// Tolerance bundle used across modules.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Generic operator-identity checks (e.g. projector algebra).
    pub identity: f64,
    /// Checks where exact cancellation is expected (anticommutators of
    /// exactly representable matrices).
    pub exact: f64,
    /// Relative singular-value threshold separating rank from null space.
    pub rank: f64,
    /// Relative Hermiticity defect allowed on lattice operators.
    pub hermitian: f64,
    /// Unitarity defect above which a matrix exponential is rejected.
    pub exp_residual: f64,
    /// Relative spectral-gap floor for positive/negative splitting.
    pub zero_eigenvalue: f64,
    /// Norm below which a projected spinor seed counts as vanished.
    pub zero_projection: f64,
}

impl Tolerances {
    pub const fn standard() -> Self {
        Tolerances {
            identity: 1e-12,
            exact: 1e-14,
            rank: 1e-10,
            hermitian: 1e-10,
            exp_residual: 1e-9,
            zero_eigenvalue: 1e-8,
            zero_projection: 1e-8,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::standard()
    }
}
