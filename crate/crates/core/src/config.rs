//! Numerical tolerances shared by every module.
//!
//! All thresholds live here so tests and algorithms agree on what "equal"
//! means. The defaults are the ones the test-suite is pinned against.

/// Tolerance record. Use [`TOLERANCES`] unless an experiment needs its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `‖U†U − I‖` entrywise bound accepted for a unitary.
    pub unitary: f64,
    /// Accepted drift of `Σ|amp|²` away from 1.
    pub norm: f64,
    /// Norm below which `measure` treats a state as corrupted.
    pub degenerate_norm: f64,
    /// Distance to the nearest integer below which `m̃` counts as integral.
    pub integrality: f64,
    /// Probabilities within this distance of 0 or 1 are clamped to the endpoint.
    pub endpoint_clamp: f64,
    /// Bisection width at which the phase solver stops.
    pub phase_solver: f64,
    /// Largest residual bad amplitude accepted from the phase solver.
    pub phase_residual: f64,
    /// Arc distances below this use the `Δ → 0` limit of the overlap formula.
    pub singular_arc: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    unitary: 1e-9,
    norm: 1e-10,
    degenerate_norm: 1e-6,
    integrality: 1e-9,
    endpoint_clamp: 1e-12,
    phase_solver: 1e-12,
    phase_residual: 1e-8,
    singular_arc: 1e-12,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

/// Largest statevector dimension the exact engine accepts (2¹⁴).
pub const MAX_STATE_DIM: usize = 1 << 14;

/// Largest dimension for which a dense matrix is materialised (2¹²).
///
/// Operators are applied structurally whenever possible, so this only limits
/// explicit `Unitary` construction.
pub const MAX_MATRIX_DIM: usize = 1 << 12;
