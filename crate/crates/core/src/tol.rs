//! Validation tolerances used across the crate.
//!
//! Everything here operates on 2x2 double-precision problems where rounding
//! stays well below 1e-12, so the thresholds leave about two orders of
//! magnitude of headroom.

/// Asymmetry above this rejects a covariance or noise matrix outright.
/// Smaller asymmetries are symmetrized away on construction.
pub const SYMMETRY_REJECT: f64 = 1e-9;

/// Physical states must satisfy `det(V) >= 1 - DET_SLACK`.
pub const DET_SLACK: f64 = 1e-9;

/// A channel is CP-feasible iff the smallest eigenvalue of the CP test
/// matrix clears this floor.
pub const CP_EIGEN_FLOOR: f64 = -1e-10;

/// `|eta' - 1|` inside this band classifies a recovery map as additive noise.
pub const ETA_PRIME_TIE: f64 = 1e-12;

/// Covariance matrices must be proportional within this relative residual
/// for a scalar generalized transmissivity to exist.
pub const PROPORTIONALITY_TOL: f64 = 1e-9;

/// `det(V_N(sigma))` must exceed 1 by this much; otherwise the recovery-map
/// construction hits the pure-output case and is rejected.
pub const PURE_OUTPUT_SLACK: f64 = 1e-9;

/// Fock-space verdicts only count when the recorded trace deficit is below
/// this gate.
pub const DEFICIT_GATE: f64 = 1e-6;
