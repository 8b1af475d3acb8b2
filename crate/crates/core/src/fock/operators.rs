//! Truncated mode operators and the unitaries built from them.
//!
//! Every unitary here is the exponential of a truncated generator, computed
//! through a Hermitian eigendecomposition, so it is exactly unitary on the
//! working space; truncation artifacts live at the top of the basis and are
//! bounded downstream by trace-deficit accounting.

use nalgebra::{Complex, DMatrix, DVector};

use crate::gaussian::Mat2;

pub type C64 = Complex<f64>;

pub fn hermitian_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let eig = nalgebra::linalg::SymmetricEigen::new(m.clone());
    (eig.eigenvalues, eig.eigenvectors)
}

/// Square root of a Hermitian PSD matrix; small negative eigenvalues from
/// rounding are floored at zero.
pub fn psd_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(m);
    let dim = m.nrows();
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        for i in 0..dim {
            scaled[(i, j)] *= C64::new(s, 0.0);
        }
    }
    &scaled * vecs.adjoint()
}

/// Annihilation operator: `a[n-1][n] = sqrt(n)`.
pub fn annihilation(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    })
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// `exp(G)` for a skew-Hermitian generator `G`, via `G = iH` with `H`
/// Hermitian.
fn exp_skew_hermitian(g: &DMatrix<C64>) -> DMatrix<C64> {
    let h = g.map(|z| z * C64::new(0.0, -1.0));
    let (vals, vecs) = hermitian_eigen(&h);
    let dim = g.nrows();
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let phase = C64::new(0.0, *v).exp();
        for i in 0..dim {
            scaled[(i, j)] *= phase;
        }
    }
    &scaled * vecs.adjoint()
}

/// Displacement `D(beta) = exp(beta a^dag - conj(beta) a)`.
pub fn displacement(beta: C64, dim: usize) -> DMatrix<C64> {
    let a = complexify(&annihilation(dim));
    let g = a.adjoint() * beta - &a * beta.conj();
    exp_skew_hermitian(&g)
}

/// Squeezer `S(r) = exp(r/2 (a^2 - a^dag^2))`. In the Heisenberg picture
/// this sends `q -> exp(-r) q`, `p -> exp(r) p`, so a state covariance
/// transforms as `V -> diag(e^{-r}, e^{r}) V diag(e^{-r}, e^{r})`.
pub fn squeeze(r: f64, dim: usize) -> DMatrix<C64> {
    let a = complexify(&annihilation(dim));
    let a2 = &a * &a;
    let g = (&a2 - a2.adjoint()) * C64::new(0.5 * r, 0.0);
    exp_skew_hermitian(&g)
}

/// Phase rotation `exp(-i phi n)`: sends the state mean `(q, p)` through the
/// rotation `[[cos phi, sin phi], [-sin phi, cos phi]]`.
pub fn rotation(phi: f64, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(0.0, -phi * i as f64).exp()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Diagonal thermal occupancies for symplectic eigenvalue `nu = 2 n_bar + 1`,
/// together with the truncated tail weight.
pub fn thermal_occupancies(nu: f64, dim: usize) -> (Vec<f64>, f64) {
    let q = (nu - 1.0) / (nu + 1.0);
    if q <= 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return (p, 0.0);
    }
    let mut p = Vec::with_capacity(dim);
    let mut w = 1.0 - q;
    for _ in 0..dim {
        p.push(w);
        w *= q;
    }
    (p, q.powi(dim as i32))
}

/// Single-mode Euler/Williamson form `V = Q(theta) diag(nu e^{2r}, nu e^{-2r})
/// Q(theta)^T` with `nu = sqrt(det V)`, `r >= 0`, and `Q` a rotation.
pub fn euler_decompose(v: &Mat2) -> (f64, f64, f64) {
    let nu = v.determinant().max(1.0).sqrt();
    let s = v / nu;
    let half_diff = 0.5 * (s[(0, 0)] - s[(1, 1)]);
    let half_sum = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let off = s[(0, 1)];
    let radius = (half_diff * half_diff + off * off).sqrt();
    let lambda_plus = half_sum + radius;
    let r = 0.5 * lambda_plus.max(1.0).ln();
    let theta = if radius < 1e-14 {
        0.0
    } else {
        0.5 * (2.0 * off).atan2(2.0 * half_diff)
    };
    (nu, r, theta)
}
