//! Closed-form Uhlmann fidelity between single-mode Gaussian states.
//!
//! `F = exp(-delta^T (V1 + V2)^{-1} delta) / Gamma` with
//! `Gamma = sqrt(Delta + Lambda) - sqrt(Lambda)`,
//! `Delta = det(V1 + V2)/4`, `Lambda = (det V1 - 1)(det V2 - 1)/4`, and
//! `delta` the mean-vector difference. The displacement exponent is pinned by
//! the pure-state limits `|<alpha|beta>|^2 = exp(-|alpha - beta|^2)` and
//! `<0|rho_th(beta)|0> = exp(-|beta|^2/(n+1))/(n+1)`, both reproduced exactly
//! in unit tests and wholesale against the Fock oracle.

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Fidelity value together with the intermediates of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityBreakdown {
    pub value: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Gaussian displacement exponent, `<= 0`.
    pub exponent: f64,
}

/// Uhlmann fidelity between two validated single-mode Gaussian states.
/// Symmetric in its arguments.
pub fn fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<FidelityBreakdown> {
    let sum = s1.cov() + s2.cov();
    let det_sum = sum.determinant();
    if det_sum <= 0.0 {
        // Impossible for valid states (det >= 1 each).
        return Err(Error::Internal(format!(
            "singular covariance sum (det = {det_sum}) in fidelity"
        )));
    }
    let delta = 0.25 * det_sum;
    // Clamp: both are analytically >= 0 for valid states, rounding can dip.
    let lambda = (0.25 * (s1.det_cov() - 1.0) * (s2.det_cov() - 1.0)).max(0.0);
    let gamma = (delta + lambda).max(0.0).sqrt() - lambda.sqrt();

    let diff = s2.mean() - s1.mean();
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::Internal("covariance sum not invertible".into()))?;
    let exponent = -(diff.dot(&(inv * diff)));

    Ok(FidelityBreakdown {
        value: exponent.exp() / gamma,
        gamma,
        delta,
        lambda,
        exponent,
    })
}

/// The function `f(z) = (a z + 1 - sqrt((a^2 - 1)(z^2 - 1))) / 2`: the value
/// of `Gamma` between two zero-mean states of symplectic eigenvalues `a` and
/// `z`, so `1/f` is their fidelity. Defined for `z >= 1`, `a >= 1`, with
/// minimum `f(a) = 1`.
pub fn fidelity_f(z: f64, a: f64) -> Result<f64> {
    if !(z >= 1.0) || !(a >= 1.0) {
        return Err(Error::Domain(format!(
            "fidelity_f requires z >= 1 and a >= 1, got z = {z}, a = {a}"
        )));
    }
    Ok(0.5 * (a * z + 1.0 - ((a * a - 1.0) * (z * z - 1.0)).max(0.0).sqrt()))
}
