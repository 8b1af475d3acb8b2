//! The lossy channel, its recovery map with respect to a Gaussian reference
//! state, and the classification of that map as beam splitter, additive
//! noise, or phase-insensitive amplifier.
//!
//! For one mode the Cayley-Hamilton identity `(V Omega)^2 = -det(V) I`
//! collapses the general phase-space construction of the recovery map to
//!
//! ```text
//! X_P = sqrt(eta (1 - 1/det V_sigma) / (1 - 1/det V_N(sigma))) V_sigma V_N(sigma)^{-1}
//! Y_P = V_sigma - X_P V_N(sigma) X_P^T
//! d_P = mean_sigma - X_P mean_N(sigma)
//! ```
//!
//! whose fixed point `P(N(sigma)) = sigma` holds by construction. When
//! `V_sigma` is proportional to the environment covariance, `X_P` is scalar
//! and the map carries a generalized transmissivity
//! `eta' = eta (det V_sigma - 1) / (det V_N(sigma) - 1)`.

use crate::error::{Error, Result};
use crate::gaussian::{GaussianChannel, GaussianState, Mat2};
use crate::tol;

/// A lossy channel: beam splitter of transmissivity `eta` coupling the
/// signal to an environment state that is discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct LossySpec {
    eta: f64,
    environment: GaussianState,
}

impl LossySpec {
    /// `eta` must lie strictly inside (0, 1); the erasure and identity
    /// limits are handled analytically elsewhere.
    pub fn new(eta: f64, environment: GaussianState) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::TransmissivityOutOfRange(eta));
        }
        Ok(Self { eta, environment })
    }

    /// Lossy channel with a thermal environment of occupation `n_xi`.
    pub fn thermal(eta: f64, n_xi: f64) -> Result<Self> {
        Self::new(eta, GaussianState::thermal(n_xi)?)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn environment(&self) -> &GaussianState {
        &self.environment
    }

    /// The channel itself: `X = sqrt(eta) I`, `Y = (1 - eta) V_xi`,
    /// `d = sqrt(1 - eta) mean_xi`.
    pub fn channel(&self) -> GaussianChannel {
        GaussianChannel::new(
            Mat2::identity() * self.eta.sqrt(),
            self.environment.cov() * (1.0 - self.eta),
            self.environment.mean() * (1.0 - self.eta).sqrt(),
        )
        .expect("environment covariance is symmetric")
    }
}

/// Physical realization class of a scalar recovery map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    BeamSplitter,
    AdditiveNoise,
    Amplifier,
}

impl std::fmt::Display for Realization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Realization::BeamSplitter => "beam_splitter",
            Realization::AdditiveNoise => "additive_noise",
            Realization::Amplifier => "amplifier",
        };
        f.write_str(s)
    }
}

/// The recovery map of a lossy channel for a reference state.
///
/// `eta_prime`, `realization`, and `ancilla` are populated only when the
/// reference covariance is proportional to the environment covariance, which
/// is the regime where the map reduces to a scalar transformation; otherwise
/// only the raw channel is reported.
#[derive(Debug, Clone, PartialEq)]
pub struct PetzResult {
    pub channel: GaussianChannel,
    pub eta_prime: Option<f64>,
    pub realization: Option<Realization>,
    /// Equivalent beam-splitter ancilla, present iff the realization is a
    /// beam splitter.
    pub ancilla: Option<GaussianState>,
}

pub fn lossy_channel(spec: &LossySpec) -> GaussianChannel {
    spec.channel()
}

/// Relative deviation of `a` from the best multiple of `b`.
fn proportionality_residual(a: &Mat2, b: &Mat2) -> f64 {
    let scale = (a.trace()) / (b.trace());
    let diff = a - b * scale;
    diff.abs().max() / a.abs().max().max(1.0)
}

fn classify(eta_prime: f64) -> Realization {
    if (eta_prime - 1.0).abs() <= tol::ETA_PRIME_TIE {
        Realization::AdditiveNoise
    } else if eta_prime < 1.0 {
        Realization::BeamSplitter
    } else {
        Realization::Amplifier
    }
}

/// Forward output `N(sigma)` with the pure-output guard applied.
fn forward_output(spec: &LossySpec, sigma: &GaussianState) -> Result<GaussianState> {
    let out = spec.channel().apply(sigma)?;
    let det = out.det_cov();
    if det <= 1.0 + tol::PURE_OUTPUT_SLACK {
        return Err(Error::PureOutput { det });
    }
    Ok(out)
}

/// Builds the recovery map of `spec` with respect to `sigma`.
pub fn petz_map(spec: &LossySpec, sigma: &GaussianState) -> Result<PetzResult> {
    let n_sigma = forward_output(spec, sigma)?;
    let det_sigma = sigma.det_cov().max(1.0);
    let det_n = n_sigma.det_cov();

    let scale = (spec.eta() * (1.0 - 1.0 / det_sigma) / (1.0 - 1.0 / det_n)).sqrt();
    let inv_n = n_sigma
        .cov()
        .try_inverse()
        .ok_or_else(|| Error::Internal("channel output covariance not invertible".into()))?;
    let x_p = sigma.cov() * inv_n * scale;
    let y_p = sigma.cov() - x_p * n_sigma.cov() * x_p.transpose();
    let d_p = sigma.mean() - x_p * n_sigma.mean();
    let channel = GaussianChannel::new(x_p, y_p, d_p)?;
    if !channel.is_cp() {
        return Err(Error::Internal(format!(
            "recovery map failed the CP test (min eigenvalue {})",
            channel.cp_report().min_eigenvalue
        )));
    }

    let residual = proportionality_residual(&sigma.cov(), &spec.environment().cov());
    if residual > tol::PROPORTIONALITY_TOL {
        return Ok(PetzResult {
            channel,
            eta_prime: None,
            realization: None,
            ancilla: None,
        });
    }

    let eta_prime = spec.eta() * (det_sigma - 1.0) / (det_n - 1.0);
    let realization = classify(eta_prime);
    let ancilla = if realization == Realization::BeamSplitter {
        Some(ancilla_from_channel(&channel, eta_prime, &n_sigma, sigma)?)
    } else {
        None
    };
    Ok(PetzResult {
        channel,
        eta_prime: Some(eta_prime),
        realization: Some(realization),
        ancilla,
    })
}

fn ancilla_from_channel(
    channel: &GaussianChannel,
    eta_prime: f64,
    n_sigma: &GaussianState,
    sigma: &GaussianState,
) -> Result<GaussianState> {
    let cov = channel.y_mat() / (1.0 - eta_prime);
    let mean = (sigma.mean() - n_sigma.mean() * eta_prime.sqrt()) / (1.0 - eta_prime).sqrt();
    GaussianState::from_parts(mean, cov)
}

/// Generalized transmissivity `eta' = eta (det V_sigma - 1)/(det V_N(sigma) - 1)`,
/// defined when `V_sigma` is proportional to the environment covariance.
pub fn generalized_transmissivity(spec: &LossySpec, sigma: &GaussianState) -> Result<f64> {
    let residual = proportionality_residual(&sigma.cov(), &spec.environment().cov());
    if residual > tol::PROPORTIONALITY_TOL {
        return Err(Error::NotScalar(residual));
    }
    let n_sigma = forward_output(spec, sigma)?;
    Ok(spec.eta() * (sigma.det_cov().max(1.0) - 1.0) / (n_sigma.det_cov() - 1.0))
}

/// True iff the recovery map is realizable as a beam splitter, i.e.
/// `eta' < 1`. Evaluated through the determinant bounds
/// `max(1, b - sqrt((b^2-1)/eta)) <= x < b + sqrt((b^2-1)/eta)` with
/// `x = sqrt(det V_sigma)`, `b = sqrt(det V_xi)`; the upper boundary itself
/// classifies as additive noise.
pub fn beam_splitter_condition(spec: &LossySpec, sigma: &GaussianState) -> Result<bool> {
    let residual = proportionality_residual(&sigma.cov(), &spec.environment().cov());
    if residual > tol::PROPORTIONALITY_TOL {
        return Err(Error::NotScalar(residual));
    }
    // Keep the pure-output guard consistent with generalized_transmissivity.
    forward_output(spec, sigma)?;
    let x = sigma.det_cov().max(1.0).sqrt();
    let b = spec.environment().det_cov().max(1.0).sqrt();
    let half_width = ((b * b - 1.0).max(0.0) / spec.eta()).sqrt();
    let lower = 1.0f64.max(b - half_width);
    let upper = b + half_width;
    Ok(lower <= x && x < upper)
}

/// The ancilla `xi'` of the beam-splitter realization:
/// `V_xi' = Y_P / (1 - eta')` and
/// `mean_xi' = (mean_sigma - sqrt(eta') mean_N(sigma)) / sqrt(1 - eta')`.
pub fn petz_ancilla(spec: &LossySpec, sigma: &GaussianState) -> Result<GaussianState> {
    let result = petz_map(spec, sigma)?;
    match result.eta_prime {
        Some(eta_prime) if eta_prime < 1.0 - tol::ETA_PRIME_TIE => Ok(result
            .ancilla
            .expect("beam-splitter realization carries an ancilla")),
        Some(eta_prime) => Err(Error::NoBeamSplitterRealization { eta_prime }),
        None => Err(Error::NotScalar(proportionality_residual(
            &sigma.cov(),
            &spec.environment().cov(),
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Vec2;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lossy_channel_examples() {
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let ch = spec.channel();
        assert_abs_diff_eq!(ch.x_mat()[(0, 0)], 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(ch.y_mat()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_eq!(ch.disp(), Vec2::zeros());
        assert!(ch.is_cp());

        let hot = LossySpec::thermal(0.5, 10.0).unwrap().channel();
        assert_abs_diff_eq!(hot.y_mat()[(0, 0)], 10.5, epsilon = 1e-12);

        // eta -> 1 approaches the identity channel.
        let near_id = LossySpec::thermal(1.0 - 1e-9, 3.0).unwrap().channel();
        assert_abs_diff_eq!(near_id.x_mat()[(0, 0)], 1.0, epsilon = 1e-9);
        assert!(near_id.y_mat()[(0, 0)].abs() < 1e-7);

        assert!(LossySpec::thermal(0.0, 0.0).is_err());
        assert!(LossySpec::thermal(1.0, 0.0).is_err());
    }

    #[test]
    fn petz_map_beam_splitter_case() {
        // eta = 0.5, n_xi = 10, n_sigma = 4: eta' = 5/28, Y_P = (177/28) I.
        let spec = LossySpec::thermal(0.5, 10.0).unwrap();
        let sigma = GaussianState::thermal(4.0).unwrap();
        let res = petz_map(&spec, &sigma).unwrap();
        assert_abs_diff_eq!(res.eta_prime.unwrap(), 5.0 / 28.0, epsilon = 1e-14);
        assert_eq!(res.realization, Some(Realization::BeamSplitter));
        assert_abs_diff_eq!(
            res.channel.y_mat()[(0, 0)],
            177.0 / 28.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(res.channel.y_mat()[(1, 1)], 177.0 / 28.0, epsilon = 1e-12);
    }

    #[test]
    fn petz_map_amplifier_case() {
        // eta = 0.5, n_xi = 0, n_sigma = 4: eta' = 5/3.
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let sigma = GaussianState::thermal(4.0).unwrap();
        let res = petz_map(&spec, &sigma).unwrap();
        assert_abs_diff_eq!(res.eta_prime.unwrap(), 5.0 / 3.0, epsilon = 1e-14);
        assert_eq!(res.realization, Some(Realization::Amplifier));
        assert!(res.ancilla.is_none());
    }

    #[test]
    fn petz_map_of_own_environment_is_the_channel() {
        // sigma = xi (same thermal state): the recovery map equals the
        // forward channel and the ancilla is the environment itself.
        let spec = LossySpec::thermal(0.3, 2.0).unwrap();
        let sigma = GaussianState::thermal(2.0).unwrap();
        let res = petz_map(&spec, &sigma).unwrap();
        assert_abs_diff_eq!(res.eta_prime.unwrap(), 0.3, epsilon = 1e-14);
        let forward = spec.channel();
        assert_abs_diff_eq!(
            (res.channel.x_mat() - forward.x_mat()).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            (res.channel.y_mat() - forward.y_mat()).norm(),
            0.0,
            epsilon = 1e-12
        );
        let anc = res.ancilla.unwrap();
        assert_abs_diff_eq!((anc.cov() - sigma.cov()).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn petz_fixed_point_composition() {
        let spec = LossySpec::thermal(0.5, 10.0).unwrap();
        let sigma = GaussianState::thermal(4.0).unwrap();
        let res = petz_map(&spec, &sigma).unwrap();
        let roundtrip = res.channel.compose(&spec.channel());
        let back = roundtrip.apply(&sigma).unwrap();
        assert_abs_diff_eq!((back.cov() - sigma.cov()).norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((back.mean() - sigma.mean()).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_prior_is_pure_output() {
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let sigma = GaussianState::vacuum();
        assert!(matches!(
            petz_map(&spec, &sigma),
            Err(Error::PureOutput { .. })
        ));
    }

    #[test]
    fn generalized_transmissivity_examples() {
        let sigma4 = GaussianState::thermal(4.0).unwrap();
        let got = generalized_transmissivity(&LossySpec::thermal(0.5, 0.0).unwrap(), &sigma4)
            .unwrap();
        assert_abs_diff_eq!(got, 5.0 / 3.0, epsilon = 1e-14);

        // Vacuum reference: eta' = 0 regardless of eta.
        let got = generalized_transmissivity(
            &LossySpec::thermal(0.7, 3.0).unwrap(),
            &GaussianState::vacuum(),
        )
        .unwrap();
        assert_abs_diff_eq!(got, 0.0, epsilon = 1e-15);

        // eta = 0.5, n_sigma = 6, n_xi = 2: 84/80 = 1.05.
        let got = generalized_transmissivity(
            &LossySpec::thermal(0.5, 2.0).unwrap(),
            &GaussianState::thermal(6.0).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(got, 1.05, epsilon = 1e-14);

        // Non-proportional covariances have no scalar transmissivity.
        let squeezed =
            GaussianState::from_parts(Vec2::zeros(), Mat2::new(2.5, 0.0, 0.0, 10.0)).unwrap();
        assert!(matches!(
            generalized_transmissivity(&LossySpec::thermal(0.5, 1.0).unwrap(), &squeezed),
            Err(Error::NotScalar(_))
        ));
    }

    #[test]
    fn beam_splitter_condition_examples() {
        let sigma4 = GaussianState::thermal(4.0).unwrap();
        assert!(
            beam_splitter_condition(&LossySpec::thermal(0.5, 10.0).unwrap(), &sigma4).unwrap()
        );
        assert!(
            !beam_splitter_condition(&LossySpec::thermal(0.5, 0.0).unwrap(), &sigma4).unwrap()
        );
        // sigma = xi is a beam splitter for every eta.
        for eta in [0.1, 0.5, 0.9] {
            let spec = LossySpec::thermal(eta, 3.0).unwrap();
            assert!(
                beam_splitter_condition(&spec, &GaussianState::thermal(3.0).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn petz_ancilla_examples() {
        // eta = 0.5, n_xi = 10, n_sigma = 4: V_xi' = (177/23) I.
        let spec = LossySpec::thermal(0.5, 10.0).unwrap();
        let sigma = GaussianState::thermal(4.0).unwrap();
        let anc = petz_ancilla(&spec, &sigma).unwrap();
        assert_abs_diff_eq!(anc.cov()[(0, 0)], 177.0 / 23.0, epsilon = 1e-12);
        assert_abs_diff_eq!(anc.thermal_occupation(), 77.0 / 23.0, epsilon = 1e-12);
        assert_abs_diff_eq!(anc.mean().norm(), 0.0, epsilon = 1e-15);

        // Rebuilding a lossy channel from (eta', xi') reproduces the map.
        let eta_prime = generalized_transmissivity(&spec, &sigma).unwrap();
        let rebuilt = LossySpec::new(eta_prime, anc).unwrap().channel();
        let petz = petz_map(&spec, &sigma).unwrap().channel;
        assert_abs_diff_eq!((rebuilt.x_mat() - petz.x_mat()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((rebuilt.y_mat() - petz.y_mat()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((rebuilt.disp() - petz.disp()).norm(), 0.0, epsilon = 1e-12);

        // Amplifier regime has no beam-splitter ancilla.
        let amp_spec = LossySpec::thermal(0.5, 0.0).unwrap();
        assert!(matches!(
            petz_ancilla(&amp_spec, &sigma),
            Err(Error::NoBeamSplitterRealization { .. })
        ));
    }

    #[test]
    fn non_proportional_reference_returns_raw_channel() {
        let spec = LossySpec::thermal(0.5, 2.0).unwrap();
        let squeezed =
            GaussianState::from_parts(Vec2::zeros(), Mat2::new(2.5, 0.0, 0.0, 10.0)).unwrap();
        let res = petz_map(&spec, &squeezed).unwrap();
        assert!(res.eta_prime.is_none());
        assert!(res.realization.is_none());
        assert!(res.ancilla.is_none());
        // The fixed point still holds for the raw channel.
        let n_sigma = spec.channel().apply(&squeezed).unwrap();
        let back = res.channel.apply(&n_sigma).unwrap();
        assert_abs_diff_eq!((back.cov() - squeezed.cov()).norm(), 0.0, epsilon = 1e-10);
    }
}
