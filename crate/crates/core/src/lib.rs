//! Single-mode Gaussian channel algebra for analysing the recovery of
//! optical losses: lossy channels and their recovery maps, closed-form
//! Uhlmann fidelity, a constrained family of recovery channels with its
//! complete-positivity bounds, and a truncated Fock-space oracle that
//! validates every closed form independently.

pub mod checks;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod fock;
pub mod gaussian;
pub mod petz;
pub mod recovery;
pub mod tol;

pub use error::{Error, Result};
pub use fidelity::{fidelity, fidelity_f, FidelityBreakdown};
pub use fock::{fock_apply_scalar_channel, fock_fidelity, fock_from_gaussian, FockDensity};
pub use gaussian::{omega, CpReport, GaussianChannel, GaussianState, Mat2, Vec2};
pub use petz::{
    beam_splitter_condition, generalized_transmissivity, lossy_channel, petz_ancilla, petz_map,
    LossySpec, PetzResult, Realization,
};
pub use recovery::{
    eta_max, eta_max_by_bisection, family_member, g_of_sigma, member_fidelity, optimal_recovery,
    protocol_r0, protocol_r1, relative_diffs, result2_band, OptimalRecovery, RecoveryMember,
    RelativeDiffs, Result2Band,
};
