//! Benchmark recovery protocols, the constrained family of scalar recovery
//! channels, its complete-positivity bounds, the optimal-recovery search,
//! and relative-difference metrics.
//!
//! For a thermal reference `sigma` and thermal environment, every channel
//! `(X = sqrt(eta_R) I, Y_R = V_sigma - eta_R V_N(sigma), d = 0)` maps
//! `N(sigma)` back to `sigma` exactly; complete positivity restricts
//! `eta_R` to `[0, eta_max]`.

use crate::error::{Error, Result};
use crate::fidelity::{fidelity, fidelity_f};
use crate::gaussian::{GaussianChannel, GaussianState, Mat2, Vec2};
use crate::petz::{generalized_transmissivity, LossySpec};

const THERMAL_TOL: f64 = 1e-12;

/// One member of the recovery family, possibly CP-infeasible. Infeasible
/// members exist only to chart the feasibility boundary; they are never
/// applied to states.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryMember {
    pub eta_r: f64,
    pub channel: GaussianChannel,
    pub feasible: bool,
}

/// The interval of `g(sigma)` values on which the recovery map beats doing
/// nothing, for thermal inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Result2Band {
    pub z0: f64,
    pub z1: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Result2Band {
    pub fn contains(&self, g: f64) -> bool {
        self.lower <= g && g <= self.upper
    }
}

/// Relative gaps between the recovery map and the best family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeDiffs {
    pub eta_rel: f64,
    pub f_rel: f64,
    pub eta_max: f64,
    pub f_max: f64,
}

/// Outcome of the optimal-recovery search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalRecovery {
    pub eta_r: f64,
    pub fidelity: f64,
}

/// Do-nothing benchmark: the identity channel.
pub fn protocol_r0() -> GaussianChannel {
    GaussianChannel::identity()
}

/// Replace-with-belief benchmark: the erasure channel that re-prepares
/// `sigma`.
pub fn protocol_r1(sigma: &GaussianState) -> GaussianChannel {
    GaussianChannel::erasure(sigma)
}

fn require_thermal(state: &GaussianState, what: &str) -> Result<f64> {
    if !state.is_thermal(THERMAL_TOL) {
        return Err(Error::Domain(format!(
            "{what} must be thermal (zero mean, covariance proportional to the identity)"
        )));
    }
    Ok(state.cov()[(0, 0)])
}

fn thermal_scalars(spec: &LossySpec, sigma: &GaussianState) -> Result<(f64, f64)> {
    let v_sigma = require_thermal(sigma, "reference state")?;
    let v_xi = require_thermal(spec.environment(), "environment")?;
    Ok((v_sigma, v_xi))
}

/// Family member at transmissivity `eta_r`: `Y_R = V_sigma - eta_R V_N(sigma)`.
pub fn family_member(
    eta_r: f64,
    spec: &LossySpec,
    sigma: &GaussianState,
) -> Result<RecoveryMember> {
    if eta_r < 0.0 || !eta_r.is_finite() {
        return Err(Error::Domain(format!(
            "family transmissivity must be nonnegative, got {eta_r}"
        )));
    }
    thermal_scalars(spec, sigma)?;
    let n_sigma = spec.channel().apply(sigma)?;
    let y_r = sigma.cov() - n_sigma.cov() * eta_r;
    let channel = GaussianChannel::new(Mat2::identity() * eta_r.sqrt(), y_r, Vec2::zeros())?;
    let feasible = channel.is_cp();
    Ok(RecoveryMember {
        eta_r,
        channel,
        feasible,
    })
}

/// Largest feasible family transmissivity. The two CP branches give
/// `b1 = min(1, n_sigma / (eta n_sigma + (1-eta) n_xi))` and
/// `b2 = max(1, (n_sigma + 1) / (eta n_sigma + (1-eta) n_xi + 1))`;
/// `b2` wins whenever its member is feasible.
pub fn eta_max(spec: &LossySpec, sigma: &GaussianState) -> Result<f64> {
    let (v_sigma, v_xi) = thermal_scalars(spec, sigma)?;
    let n_sigma = (v_sigma - 1.0) / 2.0;
    let n_xi = (v_xi - 1.0) / 2.0;
    let mixed = spec.eta() * n_sigma + (1.0 - spec.eta()) * n_xi;
    if mixed <= 0.0 {
        return Err(Error::PureOutput { det: 1.0 });
    }
    let b1 = 1.0f64.min(n_sigma / mixed);
    let b2 = 1.0f64.max((n_sigma + 1.0) / (mixed + 1.0));
    if family_member(b2, spec, sigma)?.feasible {
        Ok(b2)
    } else {
        Ok(b1)
    }
}

/// Independent route to `eta_max`: bisection on the feasibility boundary.
pub fn eta_max_by_bisection(spec: &LossySpec, sigma: &GaussianState) -> Result<f64> {
    thermal_scalars(spec, sigma)?;
    let feasible = |eta_r: f64| -> Result<bool> { Ok(family_member(eta_r, spec, sigma)?.feasible) };
    if !feasible(0.0)? {
        return Err(Error::Internal("erasure member must be feasible".into()));
    }
    let mut lo = 0.0;
    let mut hi = 4.0;
    while feasible(hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Internal("feasibility bound not bracketed".into()));
        }
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The band of Result 2: `z0 = eta a + (1 - eta) b`,
/// `z1 = 2 (2 f(z0) - 1) a - z0` with `a = sqrt(det V_rho)`,
/// `b = sqrt(det V_xi)`.
pub fn result2_band(spec: &LossySpec, rho: &GaussianState) -> Result<Result2Band> {
    let a = require_thermal(rho, "input state")?;
    let b = require_thermal(spec.environment(), "environment")?;
    let z0 = spec.eta() * a + (1.0 - spec.eta()) * b;
    let f0 = fidelity_f(z0, a)?;
    let z1 = 2.0 * (2.0 * f0 - 1.0) * a - z0;
    Ok(Result2Band {
        z0,
        z1,
        lower: 1.0f64.max(z0.min(z1)),
        upper: z0.max(z1),
    })
}

/// `g(sigma) = eta eta'(sigma) a + (1 - eta eta'(sigma)) x`, the symplectic
/// eigenvalue of the recovered state for a thermal input of eigenvalue `a`.
pub fn g_of_sigma(spec: &LossySpec, rho: &GaussianState, sigma: &GaussianState) -> Result<f64> {
    let a = require_thermal(rho, "input state")?;
    let x = require_thermal(sigma, "reference state")?;
    require_thermal(spec.environment(), "environment")?;
    let ee = spec.eta() * generalized_transmissivity(spec, sigma)?;
    Ok(ee * a + (1.0 - ee) * x)
}

/// Fidelity between `rho` and `member(N(rho))`. The member must be feasible.
pub fn member_fidelity(
    rho: &GaussianState,
    spec: &LossySpec,
    member: &RecoveryMember,
) -> Result<f64> {
    if !member.feasible {
        return Err(Error::Domain(
            "infeasible recovery members cannot be applied to states".into(),
        ));
    }
    let noisy = spec.channel().apply(rho)?;
    let recovered = member.channel.apply(&noisy)?;
    Ok(fidelity(rho, &recovered)?.value)
}

/// Maximizes the recovered fidelity over the feasible family by a uniform
/// grid scan (default step `1e-4 * eta_max`) followed by golden-section
/// refinement to `1e-8` in `eta_r`.
pub fn optimal_recovery(
    rho: &GaussianState,
    spec: &LossySpec,
    sigma: &GaussianState,
    resolution: Option<f64>,
) -> Result<OptimalRecovery> {
    let top = eta_max(spec, sigma)?;
    let objective = |eta_r: f64| -> Result<f64> {
        member_fidelity(rho, spec, &family_member(eta_r, spec, sigma)?)
    };
    if top <= 0.0 {
        return Ok(OptimalRecovery {
            eta_r: 0.0,
            fidelity: objective(0.0)?,
        });
    }
    let step = match resolution {
        Some(r) if r > 0.0 => r,
        _ => 1e-4 * top,
    };
    let n = ((top / step).ceil() as usize).max(2);

    let mut best_x = 0.0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = top * i as f64 / n as f64;
        let f = objective(x)?;
        if f > best_f {
            best_f = f;
            best_x = x;
        }
    }

    // Golden-section refinement on the bracketing interval; endpoints stay
    // candidates so boundary optima are returned exactly.
    let mut lo = (best_x - top / n as f64).max(0.0);
    let mut hi = (best_x + top / n as f64).min(top);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while hi - lo > 1e-8 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1)?;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best_f {
            best_f = f;
            best_x = x;
        }
    }
    Ok(OptimalRecovery {
        eta_r: best_x,
        fidelity: best_f,
    })
}

/// Relative transmissivity and fidelity gaps between the recovery map of
/// `spec, sigma` and the best family member.
pub fn relative_diffs(
    rho: &GaussianState,
    spec: &LossySpec,
    sigma: &GaussianState,
) -> Result<RelativeDiffs> {
    let eta_p = generalized_transmissivity(spec, sigma)?;
    let top = eta_max(spec, sigma)?;
    let opt = optimal_recovery(rho, spec, sigma, None)?;
    let petz_f = member_fidelity(rho, spec, &family_member(eta_p, spec, sigma)?)?;
    // A vacuum reference collapses the family to the erasure member and both
    // transmissivities to zero; the gap is zero in that limit.
    let eta_rel = if top > 0.0 { (top - eta_p) / top } else { 0.0 };
    Ok(RelativeDiffs {
        eta_rel,
        f_rel: (opt.fidelity - petz_f) / opt.fidelity,
        eta_max: top,
        f_max: opt.fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::petz::petz_map;
    use approx::assert_abs_diff_eq;

    fn fig3c_spec() -> (LossySpec, GaussianState) {
        (
            LossySpec::thermal(0.5, 10.0).unwrap(),
            GaussianState::thermal(4.0).unwrap(),
        )
    }

    #[test]
    fn r0_is_identity() {
        let s = GaussianState::thermal(2.0).unwrap();
        assert_eq!(protocol_r0().apply(&s).unwrap(), s);

        // Fidelity after r0 equals fidelity with the noisy state.
        let spec = LossySpec::thermal(0.5, 1.0).unwrap();
        let noisy = spec.channel().apply(&s).unwrap();
        let direct = fidelity(&s, &noisy).unwrap().value;
        let via_r0 = fidelity(&s, &protocol_r0().apply(&noisy).unwrap())
            .unwrap()
            .value;
        assert_abs_diff_eq!(direct, via_r0, epsilon = 1e-15);
    }

    #[test]
    fn r1_reprepares_the_reference() {
        let sigma = GaussianState::thermal(2.0).unwrap();
        let r1 = protocol_r1(&sigma);
        for s in [
            GaussianState::vacuum(),
            GaussianState::coherent(1.0, -0.5),
            GaussianState::thermal(7.0).unwrap(),
        ] {
            assert_eq!(r1.apply(&s).unwrap(), sigma);
        }
        let same = fidelity(&GaussianState::thermal(2.0).unwrap(), &sigma)
            .unwrap()
            .value;
        assert_abs_diff_eq!(same, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn family_member_examples() {
        let (spec, sigma) = fig3c_spec();

        // eta_r = 0 is the erasure member, always feasible.
        let erase = family_member(0.0, &spec, &sigma).unwrap();
        assert!(erase.feasible);
        assert_abs_diff_eq!(
            (erase.channel.y_mat() - sigma.cov()).norm(),
            0.0,
            epsilon = 1e-14
        );

        // eta_r = 4/7 sits exactly on the feasibility boundary: Y = (3/7) I.
        let boundary = family_member(4.0 / 7.0, &spec, &sigma).unwrap();
        assert!(boundary.feasible);
        assert_abs_diff_eq!(
            boundary.channel.y_mat()[(0, 0)],
            3.0 / 7.0,
            epsilon = 1e-13
        );
        assert!(boundary.channel.cp_report().min_eigenvalue.abs() < 1e-12);

        // eta_r = 1 would need Y = -6 I: infeasible.
        let bad = family_member(1.0, &spec, &sigma).unwrap();
        assert!(!bad.feasible);
        assert_abs_diff_eq!(bad.channel.y_mat()[(0, 0)], -6.0, epsilon = 1e-13);
    }

    #[test]
    fn feasible_members_recover_sigma() {
        let (spec, sigma) = fig3c_spec();
        let noisy = spec.channel().apply(&sigma).unwrap();
        for eta_r in [0.0, 0.1, 0.3, 0.5, 4.0 / 7.0] {
            let member = family_member(eta_r, &spec, &sigma).unwrap();
            assert!(member.feasible);
            let back = member.channel.apply(&noisy).unwrap();
            assert_abs_diff_eq!((back.cov() - sigma.cov()).norm(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(back.mean().norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eta_max_examples() {
        let vac_env = LossySpec::thermal(0.5, 0.0).unwrap();
        let sigma4 = GaussianState::thermal(4.0).unwrap();
        let top = eta_max(&vac_env, &sigma4).unwrap();
        assert_abs_diff_eq!(top, 5.0 / 3.0, epsilon = 1e-14);
        // The recovery map saturates the bound for a vacuum environment.
        assert_abs_diff_eq!(
            top,
            generalized_transmissivity(&vac_env, &sigma4).unwrap(),
            epsilon = 1e-14
        );

        let (spec, sigma) = fig3c_spec();
        assert_abs_diff_eq!(eta_max(&spec, &sigma).unwrap(), 4.0 / 7.0, epsilon = 1e-14);

        // eta -> 1: the feasible family collapses toward the identity.
        let near_id = LossySpec::thermal(1.0 - 1e-9, 3.0).unwrap();
        let top = eta_max(&near_id, &GaussianState::thermal(5.0).unwrap()).unwrap();
        assert_abs_diff_eq!(top, 1.0, epsilon = 1e-8);

        assert!(matches!(
            eta_max(&vac_env, &GaussianState::vacuum()),
            Err(Error::PureOutput { .. })
        ));
    }

    #[test]
    fn eta_max_agrees_with_bisection() {
        for (eta, n_xi, n_sigma) in [
            (0.5, 0.0, 4.0),
            (0.5, 10.0, 4.0),
            (0.5, 2.0, 6.0),
            (0.3, 3.0, 3.0),
            (0.9, 1.0, 0.5),
        ] {
            let spec = LossySpec::thermal(eta, n_xi).unwrap();
            let sigma = GaussianState::thermal(n_sigma).unwrap();
            let closed = eta_max(&spec, &sigma).unwrap();
            let bisected = eta_max_by_bisection(&spec, &sigma).unwrap();
            assert_abs_diff_eq!(closed, bisected, epsilon = 1e-9);
        }
    }

    #[test]
    fn result2_band_spot_values() {
        // eta = 0.5, n_rho = 2, n_xi = 0: z0 = 3, z1 = 147 - 80 sqrt(3).
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let rho = GaussianState::thermal(2.0).unwrap();
        let band = result2_band(&spec, &rho).unwrap();
        assert_abs_diff_eq!(band.z0, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(band.z1, 147.0 - 80.0 * 3.0f64.sqrt(), epsilon = 1e-11);
        assert_abs_diff_eq!(band.lower, 3.0, epsilon = 1e-14);
        assert!(band.z0 >= 1.0 && band.lower <= band.upper);

        // sigma = rho lands inside the band (g = 5) and the recovery map
        // beats doing nothing there.
        let sigma = GaussianState::thermal(2.0).unwrap();
        let g = g_of_sigma(&spec, &rho, &sigma).unwrap();
        assert_abs_diff_eq!(g, 5.0, epsilon = 1e-13);
        assert!(band.contains(g));
        let petz = petz_map(&spec, &sigma).unwrap();
        let noisy = spec.channel().apply(&rho).unwrap();
        let f_petz = fidelity(&rho, &petz.channel.apply(&noisy).unwrap())
            .unwrap()
            .value;
        let f_r0 = fidelity(&rho, &noisy).unwrap().value;
        assert!(f_petz >= f_r0 - 1e-12);
    }

    #[test]
    fn g_of_sigma_examples() {
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let rho = GaussianState::thermal(2.0).unwrap();
        // sigma = rho collapses the convex combination to a.
        let g = g_of_sigma(&spec, &rho, &rho).unwrap();
        assert_abs_diff_eq!(g, 5.0, epsilon = 1e-13);

        // Vacuum reference: eta' = 0, so g = 1.
        let spec_hot = LossySpec::thermal(0.4, 3.0).unwrap();
        let g = g_of_sigma(&spec_hot, &rho, &GaussianState::vacuum()).unwrap();
        assert_abs_diff_eq!(g, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn optimal_recovery_examples() {
        // rho = sigma: every feasible member recovers sigma exactly.
        let spec = LossySpec::thermal(0.5, 2.0).unwrap();
        let sigma = GaussianState::thermal(3.0).unwrap();
        let opt = optimal_recovery(&sigma, &spec, &sigma, Some(1e-2)).unwrap();
        assert_abs_diff_eq!(opt.fidelity, 1.0, epsilon = 1e-12);

        // Vacuum environment: the recovery map is the optimum (right edge).
        let vac_env = LossySpec::thermal(0.5, 0.0).unwrap();
        let sigma4 = GaussianState::thermal(4.0).unwrap();
        let rho = GaussianState::thermal(2.0).unwrap();
        let opt = optimal_recovery(&rho, &vac_env, &sigma4, None).unwrap();
        assert_abs_diff_eq!(opt.eta_r, 5.0 / 3.0, epsilon = 1e-9);

        // Hot environment: a beam-splitter member beats the recovery map.
        let (spec, sigma) = fig3c_spec();
        let eta_p = generalized_transmissivity(&spec, &sigma).unwrap();
        let opt = optimal_recovery(&rho, &spec, &sigma, None).unwrap();
        assert!(opt.eta_r > eta_p + 0.1);
        let f_petz = member_fidelity(&rho, &spec, &family_member(eta_p, &spec, &sigma).unwrap())
            .unwrap();
        assert!(opt.fidelity > f_petz);
    }

    #[test]
    fn relative_diffs_vacuum_environment() {
        let spec = LossySpec::thermal(0.5, 0.0).unwrap();
        let sigma = GaussianState::thermal(4.0).unwrap();
        let rho = GaussianState::thermal(2.0).unwrap();
        let diffs = relative_diffs(&rho, &spec, &sigma).unwrap();
        assert_abs_diff_eq!(diffs.eta_rel, 0.0, epsilon = 1e-12);
        assert!(diffs.f_rel.abs() < 1e-9);
        assert!(diffs.eta_rel.is_finite() && diffs.f_rel.is_finite());
    }

    #[test]
    fn infeasible_members_cannot_be_applied() {
        let (spec, sigma) = fig3c_spec();
        let bad = family_member(1.0, &spec, &sigma).unwrap();
        let rho = GaussianState::thermal(2.0).unwrap();
        assert!(member_fidelity(&rho, &spec, &bad).is_err());
    }
}
