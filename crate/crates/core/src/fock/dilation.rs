//! Two-mode dilations applied through generalized Kraus sets.
//!
//! A beam splitter conserves total photon number, so its unitary splits
//! into exact sectors of dimension `N + 1`; a two-mode squeezer conserves
//! the photon-number difference and splits likewise. Tracing out the
//! environment then turns each sector entry into the weight of a shift
//! Kraus operator on the system. Both sector generators are real
//! skew-symmetric tridiagonal matrices; conjugating by `diag(i^s)` turns
//! them into real symmetric tridiagonal eigenproblems.

use nalgebra::DMatrix;

use super::operators::{thermal_occupancies, C64};

/// Dropped environment-tail weight per thermal dilation. Each dropped
/// branch `m` skews the output second moments by roughly `m` times its
/// weight, so the tail sits two orders below the moment tolerance rather
/// than just below the trace gate.
const ENV_TAIL: f64 = 1e-8;

/// `exp(theta G)` for the real skew-symmetric tridiagonal generator with
/// `G[s+1][s] = couplings[s]`, returned as a real matrix.
fn exp_skew_tridiagonal(theta: f64, couplings: &[f64]) -> DMatrix<f64> {
    let dim = couplings.len() + 1;
    if dim == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    // T = D (iG) D^dag with D = diag(i^s) is real symmetric tridiagonal.
    let mut t = DMatrix::<f64>::zeros(dim, dim);
    for (s, c) in couplings.iter().enumerate() {
        t[(s, s + 1)] = -c;
        t[(s + 1, s)] = -c;
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(t);
    let vals = eig.eigenvalues;
    let vecs = eig.eigenvectors;
    // U[j][k] = i^{k-j} sum_l V[j][l] V[k][l] exp(-i theta lambda_l); the
    // result is real, with the power of i selecting cos or sin.
    let cos_l: Vec<f64> = vals.iter().map(|l| (theta * l).cos()).collect();
    let sin_l: Vec<f64> = vals.iter().map(|l| (theta * l).sin()).collect();
    DMatrix::from_fn(dim, dim, |j, k| {
        let mut c = 0.0;
        let mut s = 0.0;
        for l in 0..dim {
            let w = vecs[(j, l)] * vecs[(k, l)];
            c += w * cos_l[l];
            s += w * sin_l[l];
        }
        match (4 + k as i64 - j as i64).rem_euclid(4) {
            0 => c,
            1 => s,
            2 => -c,
            _ => -s,
        }
    })
}

/// Sector unitary of `exp(theta (a^dag b - a b^dag))` at total photon number
/// `n_total`, in the basis `|s, n_total - s>` indexed by the system photon
/// number `s`.
pub fn bs_sector_unitary(theta: f64, n_total: usize) -> DMatrix<f64> {
    let couplings: Vec<f64> = (0..n_total)
        .map(|s| (((s + 1) * (n_total - s)) as f64).sqrt())
        .collect();
    exp_skew_tridiagonal(theta, &couplings)
}

/// First column of the sector unitary of `exp(zeta (a^dag b^dag - a b))` at
/// photon-number difference `d`, in the basis `|d + t, t>`: the amplitudes
/// for adding `t` photon pairs to `|d, 0>`.
pub fn tms_sector_amplitudes(zeta: f64, d: usize, t_dim: usize) -> Vec<f64> {
    let couplings: Vec<f64> = (0..t_dim.saturating_sub(1))
        .map(|t| (((d + t + 1) * (t + 1)) as f64).sqrt())
        .collect();
    let u = exp_skew_tridiagonal(zeta, &couplings);
    (0..t_dim).map(|t| u[(t, 0)]).collect()
}

/// Applies a beam splitter of transmissivity `eta` with a thermal
/// environment of occupation `n_env` to `rho` (given at its natural
/// dimension) and traces the environment out. Returns the raw, unnormalized
/// output at dimension `dim_in + env_levels`; the lost trace is the
/// environment tail.
pub fn apply_thermal_loss(rho: &DMatrix<C64>, eta: f64, n_env: f64) -> DMatrix<C64> {
    let dim_in = rho.nrows();
    let theta = eta.sqrt().min(1.0).acos();

    let (env_p, env_levels) = if n_env <= 1e-14 {
        (vec![1.0], 0usize)
    } else {
        let q: f64 = n_env / (n_env + 1.0);
        let levels = (ENV_TAIL.ln() / q.ln()).ceil() as usize;
        let (p, _) = thermal_occupancies(2.0 * n_env + 1.0, levels + 1);
        (p, levels)
    };
    let dim_out = dim_in + env_levels;

    let max_sector = dim_in - 1 + env_levels;
    let sectors: Vec<DMatrix<f64>> = (0..=max_sector)
        .map(|n| bs_sector_unitary(theta, n))
        .collect();

    let mut out = DMatrix::<C64>::zeros(dim_out, dim_out);
    let mut weights = vec![0.0f64; dim_in];
    for (m, pm) in env_p.iter().enumerate() {
        let sqrt_pm = pm.sqrt();
        for k in 0..=(m + dim_in - 1) {
            let shift = m as i64 - k as i64;
            let n_lo = (-shift).max(0) as usize;
            let n_hi = ((dim_out as i64 - 1 - shift) as usize).min(dim_in - 1);
            if n_lo > n_hi {
                continue;
            }
            for n in n_lo..=n_hi {
                let j = (n as i64 + shift) as usize;
                weights[n] = sqrt_pm * sectors[n + m][(j, n)];
            }
            for n in n_lo..=n_hi {
                let wn = weights[n];
                if wn == 0.0 {
                    continue;
                }
                let j = (n as i64 + shift) as usize;
                for n2 in n_lo..=n_hi {
                    let j2 = (n2 as i64 + shift) as usize;
                    out[(j, j2)] += rho[(n, n2)] * (wn * weights[n2]);
                }
            }
        }
    }
    out
}

/// Applies a quantum-limited phase-insensitive amplifier of gain `g`
/// (two-mode squeezer with a vacuum idler, idler traced out). Returns the
/// raw output padded by `pad` levels.
pub fn apply_quantum_limited_amp(rho: &DMatrix<C64>, g: f64, pad: usize) -> DMatrix<C64> {
    let dim_in = rho.nrows();
    let dim_out = dim_in + pad;
    let zeta = g.sqrt().acosh();

    let amps: Vec<Vec<f64>> = (0..dim_in)
        .map(|d| tms_sector_amplitudes(zeta, d, dim_out - d))
        .collect();

    let mut out = DMatrix::<C64>::zeros(dim_out, dim_out);
    for k in 0..dim_out {
        for n in 0..dim_in {
            if n + k >= dim_out || k >= amps[n].len() {
                continue;
            }
            let wn = amps[n][k];
            if wn == 0.0 {
                continue;
            }
            for n2 in 0..dim_in {
                if n2 + k >= dim_out || k >= amps[n2].len() {
                    continue;
                }
                out[(n + k, n2 + k)] += rho[(n, n2)] * (wn * amps[n2][k]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bs_sector_low_orders() {
        // N = 1: a plain rotation.
        let theta = 0.7f64;
        let u = bs_sector_unitary(theta, 1);
        assert_abs_diff_eq!(u[(0, 0)], theta.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(u[(1, 0)], theta.sin(), epsilon = 1e-12);

        // N = 2 balanced splitter: |1,1> -> no coincidence amplitude.
        let u = bs_sector_unitary(std::f64::consts::FRAC_PI_4, 2);
        assert_abs_diff_eq!(u[(1, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sectors_are_orthogonal() {
        for n in [1usize, 5, 20] {
            let u = bs_sector_unitary(0.9, n);
            let gram = &u * u.transpose();
            let mut worst = 0.0f64;
            for i in 0..=n {
                for j in 0..=n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((gram[(i, j)] - expect).abs());
                }
            }
            assert!(worst < 1e-11, "sector {n} unitarity defect {worst}");
        }
    }

    #[test]
    fn tms_amplitudes_match_closed_form_on_vacuum() {
        // On |0,0> the two-mode squeezer gives tanh^t / cosh amplitudes.
        let zeta = 0.6f64;
        let amps = tms_sector_amplitudes(zeta, 0, 40);
        for t in 0..10 {
            let reference = zeta.tanh().powi(t as i32) / zeta.cosh();
            assert_abs_diff_eq!(amps[t], reference, epsilon = 1e-10);
        }
    }
}
