//! Brute-force validation substrate: truncated Fock-space density matrices,
//! Kraus-operator channels, and matrix-function Uhlmann fidelity.
//!
//! Nothing here trusts the Gaussian closed forms. States are built from
//! thermal occupancies and exponentiated mode operators, channels from
//! two-mode dilations with the ancilla traced out, and fidelity from
//! Hermitian eigendecompositions. Truncation is certified by the recorded
//! trace deficit: verdicts only count when it clears the gate.

mod dilation;
mod operators;

pub use operators::C64;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, Mat2, Vec2};
use crate::tol;

use operators::{
    annihilation, displacement, euler_decompose, hermitian_eigen, psd_sqrt, rotation, squeeze,
    thermal_occupancies,
};

/// A density matrix on the photon-number basis `{|0>, ..., |cutoff>}`.
#[derive(Debug, Clone)]
pub struct FockDensity {
    matrix: DMatrix<C64>,
    cutoff: usize,
    trace_deficit: f64,
}

impl FockDensity {
    /// Hermitizes, renormalizes, and validates a raw matrix whose trace may
    /// fall short of one by `deficit`. Fails when the deficit exceeds the
    /// verdict gate.
    fn from_raw(raw: DMatrix<C64>, cutoff: usize, trace_deficit: f64) -> Result<Self> {
        let dim = cutoff + 1;
        if raw.nrows() != dim || raw.ncols() != dim {
            return Err(Error::Internal("Fock matrix dimension mismatch".into()));
        }
        if trace_deficit > tol::DEFICIT_GATE {
            return Err(Error::CutoffTooSmall {
                cutoff,
                deficit: trace_deficit,
                gate: tol::DEFICIT_GATE,
            });
        }
        let herm_defect = (&raw - raw.adjoint()).map(|z| z.norm()).max();
        if herm_defect > 1e-10 {
            return Err(Error::Internal(format!(
                "Fock matrix not Hermitian (defect {herm_defect:.3e})"
            )));
        }
        let mut matrix = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let trace = matrix.trace().re;
        if trace <= 0.0 {
            return Err(Error::Internal("Fock matrix has nonpositive trace".into()));
        }
        matrix /= C64::new(trace, 0.0);
        let (vals, vecs) = hermitian_eigen(&matrix);
        if vals.min() < -1e-10 {
            return Err(Error::Internal(format!(
                "Fock matrix not positive semidefinite (min eigenvalue {:.3e})",
                vals.min()
            )));
        }
        // Rebuild from the floored spectrum: eigenvalues below 1e-18 carry no
        // weight but their subnormal-range matrix entries can overflow
        // downstream eigensolvers.
        let mut scaled = vecs.clone();
        for (j, v) in vals.iter().enumerate() {
            let w = if *v < 1e-18 { 0.0 } else { *v };
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= C64::new(w, 0.0);
            }
        }
        let mut matrix = &scaled * vecs.adjoint();
        let trace = matrix.trace().re;
        matrix /= C64::new(trace, 0.0);
        Ok(Self {
            matrix,
            cutoff,
            trace_deficit,
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// Weight missing from the trace before renormalization.
    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    /// Photon-number populations.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    pub fn mean_photon(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Quadrature mean vector and covariance matrix in the vacuum-equals-
    /// identity convention, computed from operator expectations.
    pub fn quadrature_moments(&self) -> (Vec2, Mat2) {
        let dim = self.dim();
        let a = annihilation(dim).map(|x| C64::new(x, 0.0));
        let sqrt2inv = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let q = (&a + a.adjoint()) * sqrt2inv;
        let p = (&a - a.adjoint()) * sqrt2inv * C64::new(0.0, -1.0);

        let expect = |op: &DMatrix<C64>| (op * &self.matrix).trace().re;
        let mq = expect(&q);
        let mp = expect(&p);
        let qq = expect(&(&q * &q));
        let pp = expect(&(&p * &p));
        let qp_sym = expect(&(&q * &p + &p * &q));

        let cov = Mat2::new(
            2.0 * (qq - mq * mq),
            qp_sym - 2.0 * mq * mp,
            qp_sym - 2.0 * mq * mp,
            2.0 * (pp - mp * mp),
        );
        (Vec2::new(mq, mp), cov)
    }
}

/// Working-space padding for the state constructor: unitaries are built on
/// the enlarged space so that their top-of-basis artifacts land above the
/// kept block, and the projection back to the cutoff records the lost trace.
fn working_pad(dim: usize) -> usize {
    (dim / 2).max(16)
}

/// Builds the Fock representation of a Gaussian state at the given cutoff:
/// thermal occupancies at the symplectic eigenvalue, then squeeze, rotation,
/// and displacement from the Euler form of the covariance.
pub fn fock_from_gaussian(state: &GaussianState, cutoff: usize) -> Result<FockDensity> {
    if cutoff < 8 {
        return Err(Error::Domain(format!(
            "Fock cutoff must be at least 8, got {cutoff}"
        )));
    }
    let dim = cutoff + 1;
    let work = dim + working_pad(dim);

    let (nu, r, theta) = euler_decompose(&state.cov());
    let (occ, _) = thermal_occupancies(nu, work);
    let mut rho = DMatrix::<C64>::zeros(work, work);
    for (n, p) in occ.iter().enumerate() {
        rho[(n, n)] = C64::new(*p, 0.0);
    }

    if r.abs() > 1e-14 {
        // diag(e^r, e^{-r}) turns nu I into diag(nu e^{2r}, nu e^{-2r}).
        let s = squeeze(-r, work);
        rho = &s * rho * s.adjoint();
    }
    if theta.abs() > 1e-14 {
        // The state-rotation matrix of exp(-i phi n) is R(-phi).
        let u = rotation(-theta, work);
        rho = &u * rho * u.adjoint();
    }
    let mean = state.mean();
    if mean.norm() > 1e-14 {
        let beta = C64::new(mean[0], mean[1]) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let d = displacement(beta, work);
        rho = &d * rho * d.adjoint();
    }

    let block = rho.view((0, 0), (dim, dim)).into_owned();
    let deficit = 1.0 - block.trace().re;
    FockDensity::from_raw(block, cutoff, deficit.max(0.0))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho2) rho1 sqrt(rho2)))^2` via Hermitian
/// eigendecompositions.
pub fn fock_fidelity(r1: &FockDensity, r2: &FockDensity) -> Result<f64> {
    if r1.cutoff != r2.cutoff {
        return Err(Error::CutoffMismatch(r1.cutoff, r2.cutoff));
    }
    let s2 = psd_sqrt(&r2.matrix);
    let inner = &s2 * &r1.matrix * &s2;
    let inner = (&inner + inner.adjoint()) * C64::new(0.5, 0.0);
    let (vals, _) = hermitian_eigen(&inner);
    let root_sum: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
    let f = root_sum * root_sum;
    if !((-1e-8..=1.0 + 1e-8).contains(&f)) {
        return Err(Error::Internal(format!(
            "Fock fidelity {f} outside [0, 1]"
        )));
    }
    Ok(f.clamp(0.0, 1.0 + 1e-8))
}

/// Applies the phase-insensitive channel `(X = sqrt(tau) I, Y = y I)` by
/// Kraus sets from explicit dilations.
///
/// An attenuating channel (`tau < 1`) is a beam splitter with the thermal
/// environment that accounts for the full noise `y`. An amplifying channel
/// decomposes as a quantum-limited amplifier after a vacuum-environment
/// loss, solving `tau = g eta_l`, `y = g (1 - eta_l) + g - 1`.
pub fn fock_apply_scalar_channel(tau: f64, y: f64, rho: &FockDensity) -> Result<FockDensity> {
    if tau < 0.0 || !tau.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!(
            "channel parameters out of range: tau = {tau}, y = {y}"
        )));
    }
    if y < (1.0 - tau).abs() - 1e-10 {
        return Err(Error::Domain(format!(
            "channel (tau = {tau}, y = {y}) is not completely positive"
        )));
    }
    let dim = rho.dim();

    if (tau - 1.0).abs() <= 1e-12 && y.abs() <= 1e-12 {
        return Ok(rho.clone());
    }

    let raw = if tau < 1.0 {
        let n_env = ((y / (1.0 - tau) - 1.0) / 2.0).max(0.0);
        dilation::apply_thermal_loss(&rho.matrix, tau, n_env)
    } else {
        let g = 0.5 * (y + tau + 1.0);
        let eta_l = tau / g;
        let attenuated = if eta_l < 1.0 - 1e-12 {
            dilation::apply_thermal_loss(&rho.matrix, eta_l, 0.0)
        } else {
            rho.matrix.clone()
        };
        let pad = (dim / 2).max(48);
        dilation::apply_quantum_limited_amp(&attenuated, g, pad)
    };

    let block = raw.view((0, 0), (dim, dim)).into_owned();
    let deficit = rho.trace_deficit + (1.0 - block.trace().re).max(0.0);
    FockDensity::from_raw(block, rho.cutoff, deficit)
}
