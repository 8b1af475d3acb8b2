//! Exact single-mode Gaussian state and channel algebra.
//!
//! A state is the pair `(mean, cov)` of quadrature expectation values and the
//! (symmetrized, second-moment) covariance matrix, normalized so that the
//! vacuum has `cov = I` and `hbar = 1`. A channel is the affine map
//! `mean -> X mean + d`, `cov -> X cov X^T + Y`, completely positive iff
//! `Y + i*Omega - i*X Omega X^T >= 0`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::tol;

pub type Mat2 = Matrix2<f64>;
pub type Vec2 = Vector2<f64>;

/// Single-mode symplectic form.
pub fn omega() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

fn symmetrize(m: &Mat2) -> Mat2 {
    (m + m.transpose()) * 0.5
}

fn asymmetry(m: &Mat2) -> f64 {
    (m[(0, 1)] - m[(1, 0)]).abs()
}

/// A single-mode Gaussian state: quadrature mean vector and covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vec2,
    cov: Mat2,
}

impl GaussianState {
    /// Validates and constructs a state from raw parts. The covariance is
    /// symmetrized on construction; asymmetry beyond the rejection tolerance
    /// and covariances violating the uncertainty bound `det(V) >= 1` are
    /// errors.
    pub fn from_parts(mean: Vec2, cov: Mat2) -> Result<Self> {
        let asym = asymmetry(&cov);
        if asym > tol::SYMMETRY_REJECT {
            return Err(Error::AsymmetricMatrix(asym));
        }
        let cov = symmetrize(&cov);
        let det = cov.determinant();
        if det < 1.0 - tol::DET_SLACK || cov[(0, 0)] <= 0.0 {
            return Err(Error::UnphysicalState { det });
        }
        Ok(Self { mean, cov })
    }

    /// Thermal state with mean photon number `n_bar`: zero mean and
    /// covariance `(2 n_bar + 1) I`.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        if n_bar < 0.0 || !n_bar.is_finite() {
            return Err(Error::NegativePhotonNumber(n_bar));
        }
        Ok(Self {
            mean: Vec2::zeros(),
            cov: Mat2::identity() * (2.0 * n_bar + 1.0),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vec2::zeros(),
            cov: Mat2::identity(),
        }
    }

    /// Coherent state of amplitude `alpha`: vacuum covariance and mean
    /// `sqrt(2) (Re alpha, Im alpha)`.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        let s = std::f64::consts::SQRT_2;
        Self {
            mean: Vec2::new(s * alpha_re, s * alpha_im),
            cov: Mat2::identity(),
        }
    }

    pub fn mean(&self) -> Vec2 {
        self.mean
    }

    pub fn cov(&self) -> Mat2 {
        self.cov
    }

    pub fn det_cov(&self) -> f64 {
        self.cov.determinant()
    }

    /// Mean photon number `<n> = (V11 + V22)/4 + |mean|^2/2 - 1/2`.
    pub fn mean_photon(&self) -> f64 {
        (self.cov[(0, 0)] + self.cov[(1, 1)]) / 4.0 + self.mean.norm_squared() / 2.0 - 0.5
    }

    /// True when the state is thermal within `tol_abs`: zero mean and
    /// covariance proportional to the identity.
    pub fn is_thermal(&self, tol_abs: f64) -> bool {
        self.mean.norm() <= tol_abs
            && self.cov[(0, 1)].abs() <= tol_abs
            && (self.cov[(0, 0)] - self.cov[(1, 1)]).abs() <= tol_abs
    }

    /// Thermal occupation `(sqrt(det V) - 1) / 2`, meaningful for thermal-like
    /// states.
    pub fn thermal_occupation(&self) -> f64 {
        (self.det_cov().max(1.0).sqrt() - 1.0) / 2.0
    }
}

/// Outcome of the complete-positivity test `Y + i Omega - i X Omega X^T >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpReport {
    pub feasible: bool,
    pub min_eigenvalue: f64,
}

/// A single-mode Gaussian channel `(X, Y, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    x_mat: Mat2,
    y_mat: Mat2,
    disp: Vec2,
}

impl GaussianChannel {
    /// Validates the noise matrix for symmetry and stores it symmetrized.
    /// Complete positivity is a separate check (`cp_report`): channels that
    /// fail it are still representable, e.g. infeasible recovery-family
    /// members.
    pub fn new(x_mat: Mat2, y_mat: Mat2, disp: Vec2) -> Result<Self> {
        let asym = asymmetry(&y_mat);
        if asym > tol::SYMMETRY_REJECT {
            return Err(Error::AsymmetricMatrix(asym));
        }
        Ok(Self {
            x_mat,
            y_mat: symmetrize(&y_mat),
            disp,
        })
    }

    pub fn identity() -> Self {
        Self {
            x_mat: Mat2::identity(),
            y_mat: Mat2::zeros(),
            disp: Vec2::zeros(),
        }
    }

    /// Erasure channel that outputs `target` for every input:
    /// `X = 0`, `Y = V_target`, `d = mean_target`.
    pub fn erasure(target: &GaussianState) -> Self {
        Self {
            x_mat: Mat2::zeros(),
            y_mat: target.cov(),
            disp: target.mean(),
        }
    }

    pub fn x_mat(&self) -> Mat2 {
        self.x_mat
    }

    pub fn y_mat(&self) -> Mat2 {
        self.y_mat
    }

    pub fn disp(&self) -> Vec2 {
        self.disp
    }

    /// Applies the channel and re-validates the output. A validation failure
    /// signals that a non-CP channel was applied.
    pub fn apply(&self, s: &GaussianState) -> Result<GaussianState> {
        let mean = self.x_mat * s.mean() + self.disp;
        let cov = self.x_mat * s.cov() * self.x_mat.transpose() + self.y_mat;
        GaussianState::from_parts(mean, symmetrize(&cov)).map_err(|e| {
            Error::Internal(format!("channel output failed state validation: {e}"))
        })
    }

    /// Composition `self ∘ inner` (apply `inner` first):
    /// `X = X2 X1`, `Y = X2 Y1 X2^T + Y2`, `d = X2 d1 + d2`.
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            x_mat: self.x_mat * inner.x_mat,
            y_mat: symmetrize(&(self.x_mat * inner.y_mat * self.x_mat.transpose() + self.y_mat)),
            disp: self.x_mat * inner.disp + self.disp,
        }
    }

    /// Complete-positivity test. For one mode `X Omega X^T = det(X) Omega`,
    /// so the test matrix is the Hermitian `Y + i(1 - det X) Omega` and its
    /// smallest eigenvalue has a closed form.
    pub fn cp_report(&self) -> CpReport {
        let c = 1.0 - self.x_mat.determinant();
        let a = self.y_mat[(0, 0)];
        let d = self.y_mat[(1, 1)];
        let b2 = self.y_mat[(0, 1)].powi(2) + c * c;
        let min_eigenvalue = 0.5 * (a + d) - (0.25 * (a - d).powi(2) + b2).sqrt();
        CpReport {
            feasible: min_eigenvalue >= tol::CP_EIGEN_FLOOR,
            min_eigenvalue,
        }
    }

    pub fn is_cp(&self) -> bool {
        self.cp_report().feasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn thermal_states() {
        let vac = GaussianState::thermal(0.0).unwrap();
        assert_eq!(vac.cov(), Mat2::identity());
        assert_eq!(vac.mean(), Vec2::zeros());

        let th2 = GaussianState::thermal(2.0).unwrap();
        assert_eq!(th2.cov(), Mat2::identity() * 5.0);

        let th10 = GaussianState::thermal(10.0).unwrap();
        assert_eq!(th10.cov(), Mat2::identity() * 21.0);

        assert!(GaussianState::thermal(-0.1).is_err());
    }

    #[test]
    fn coherent_states() {
        let vac = GaussianState::coherent(0.0, 0.0);
        assert_eq!(vac, GaussianState::vacuum());

        // alpha = (1 + i) / (2 sqrt(2))
        let a = 0.5 / std::f64::consts::SQRT_2;
        let c = GaussianState::coherent(a, a);
        assert_abs_diff_eq!(c.mean()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.mean()[1], 0.5, epsilon = 1e-15);
        assert_eq!(c.cov(), Mat2::identity());

        let one = GaussianState::coherent(1.0, 0.0);
        assert_abs_diff_eq!(one.mean()[0], std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(one.mean()[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn from_parts_validation() {
        let sq = GaussianState::from_parts(Vec2::zeros(), Mat2::new(2.5, 0.0, 0.0, 10.0)).unwrap();
        assert_abs_diff_eq!(sq.det_cov(), 25.0, epsilon = 1e-12);

        let err = GaussianState::from_parts(Vec2::zeros(), Mat2::identity() * 0.5);
        assert!(matches!(err, Err(Error::UnphysicalState { .. })));

        let ok = GaussianState::from_parts(Vec2::new(3.0, -1.0), Mat2::identity());
        assert!(ok.is_ok());

        let asym = GaussianState::from_parts(Vec2::zeros(), Mat2::new(2.0, 0.5, 0.1, 2.0));
        assert!(matches!(asym, Err(Error::AsymmetricMatrix(_))));
    }

    #[test]
    fn apply_identity_and_erasure() {
        let s = GaussianState::from_parts(Vec2::new(1.0, 2.0), Mat2::new(2.5, 0.3, 0.3, 10.0))
            .unwrap();
        let out = GaussianChannel::identity().apply(&s).unwrap();
        assert_eq!(out, s);

        let sigma = GaussianState::thermal(3.0).unwrap();
        let erased = GaussianChannel::erasure(&sigma).apply(&s).unwrap();
        assert_eq!(erased, sigma);
    }

    #[test]
    fn apply_loss_to_thermal() {
        // Transmissivity 0.5, vacuum environment, thermal n = 2 input:
        // 5 I -> 3 I, i.e. thermal n = 1.
        let half = 0.5f64;
        let ch = GaussianChannel::new(
            Mat2::identity() * half.sqrt(),
            Mat2::identity() * 0.5,
            Vec2::zeros(),
        )
        .unwrap();
        let out = ch.apply(&GaussianState::thermal(2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(out.cov()[(0, 0)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.cov()[(1, 1)], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.thermal_occupation(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = GaussianChannel::new(
            Mat2::new(0.7, 0.1, -0.2, 0.9),
            Mat2::identity() * 2.0,
            Vec2::new(0.3, -0.4),
        )
        .unwrap();
        let b = GaussianChannel::new(
            Mat2::new(1.2, 0.0, 0.5, 0.8),
            Mat2::identity() * 1.5,
            Vec2::new(-1.0, 0.2),
        )
        .unwrap();
        let s = GaussianState::from_parts(Vec2::new(0.5, 1.5), Mat2::new(3.0, 0.4, 0.4, 2.0))
            .unwrap();

        let seq = b.apply(&a.apply(&s).unwrap()).unwrap();
        let comp = b.compose(&a).apply(&s).unwrap();
        assert_abs_diff_eq!((seq.cov() - comp.cov()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((seq.mean() - comp.mean()).norm(), 0.0, epsilon = 1e-12);

        let id = GaussianChannel::identity();
        assert_eq!(id.compose(&a), a);
    }

    #[test]
    fn loss_semigroup_with_vacuum_ancilla() {
        let lossy = |eta: f64| {
            GaussianChannel::new(
                Mat2::identity() * eta.sqrt(),
                Mat2::identity() * (1.0 - eta),
                Vec2::zeros(),
            )
            .unwrap()
        };
        let composed = lossy(0.8).compose(&lossy(0.5));
        let direct = lossy(0.4);
        assert_abs_diff_eq!((composed.x_mat() - direct.x_mat()).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((composed.y_mat() - direct.y_mat()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cp_examples() {
        // Lossy channel with vacuum ancilla: feasible.
        let half = 0.5f64;
        let lossy = GaussianChannel::new(
            Mat2::identity() * half.sqrt(),
            Mat2::identity() * 0.5,
            Vec2::zeros(),
        )
        .unwrap();
        assert!(lossy.is_cp());

        // Noiseless amplifier: infeasible with min eigenvalue -1.
        let amp_bad = GaussianChannel::new(
            Mat2::identity() * 2.0f64.sqrt(),
            Mat2::zeros(),
            Vec2::zeros(),
        )
        .unwrap();
        let report = amp_bad.cp_report();
        assert!(!report.feasible);
        assert_abs_diff_eq!(report.min_eigenvalue, -1.0, epsilon = 1e-14);

        // Quantum-limited amplifier: feasible with min eigenvalue 0.
        let amp = GaussianChannel::new(
            Mat2::identity() * 2.0f64.sqrt(),
            Mat2::identity(),
            Vec2::zeros(),
        )
        .unwrap();
        let report = amp.cp_report();
        assert!(report.feasible);
        assert_abs_diff_eq!(report.min_eigenvalue, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn applying_non_cp_channel_is_detected() {
        // Attenuation without the compensating noise is not CP; on the
        // vacuum it produces det < 1 and the output validation trips.
        let bad = GaussianChannel::new(
            Mat2::identity() * 0.5f64.sqrt(),
            Mat2::zeros(),
            Vec2::zeros(),
        )
        .unwrap();
        assert!(!bad.is_cp());
        let out = bad.apply(&GaussianState::vacuum());
        assert!(matches!(out, Err(Error::Internal(_))));
    }
}
