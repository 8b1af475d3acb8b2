use thiserror::Error;

/// Errors produced by state validation, channel construction, and the
/// Fock-space oracle.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("mean photon number must be nonnegative, got {0}")]
    NegativePhotonNumber(f64),

    #[error("matrix is not symmetric: asymmetry {0:.3e} exceeds tolerance")]
    AsymmetricMatrix(f64),

    #[error("unphysical covariance matrix: det(V) = {det} violates the uncertainty bound")]
    UnphysicalState { det: f64 },

    #[error("transmissivity must lie strictly inside (0, 1), got {0}")]
    TransmissivityOutOfRange(f64),

    #[error("reference state maps to a pure channel output (det = {det}); recovery map undefined")]
    PureOutput { det: f64 },

    #[error("covariance matrices are not proportional (residual {0:.3e}); no scalar transmissivity")]
    NotScalar(f64),

    #[error("no beam-splitter realization: generalized transmissivity {eta_prime} is not below 1")]
    NoBeamSplitterRealization { eta_prime: f64 },

    #[error("Fock cutoff {cutoff} too small: trace deficit {deficit:.3e} exceeds the {gate:.0e} gate")]
    CutoffTooSmall {
        cutoff: usize,
        deficit: f64,
        gate: f64,
    },

    #[error("Fock cutoffs differ: {0} vs {1}")]
    CutoffMismatch(usize, usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
