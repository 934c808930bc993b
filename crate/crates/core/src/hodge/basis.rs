//! Per-wavenumber bases of the discretely divergence-free, tangent subspace.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::domain::gll::{legendre_all, Lobatto};
use crate::domain::grid::Wavenumber;
use crate::{Error, Result, C64};

/// Raw (non-orthogonal) spanning set for one block.
///
/// For `k != 0` the toroidal columns are nodal deltas along `k_perp` and the
/// poloidal columns carry a zero-mean Legendre profile along `k_hat` with the
/// vertical component fixed by the divergence constraint. For `k = 0` the
/// space is every horizontal profile with `u_z = 0`.
pub fn raw_basis(w: &Wavenumber, lob: &Lobatto) -> DMatrix<C64> {
    let n = lob.len();
    let zero = C64::new(0.0, 0.0);
    if w.is_mean() {
        let mut z = DMatrix::from_element(3 * n, 2 * n, zero);
        for j in 0..n {
            let s = 1.0 / lob.weights[j].sqrt();
            z[(j, j)] = C64::new(s, 0.0);
            z[(n + j, n + j)] = C64::new(s, 0.0);
        }
        return z;
    }
    let kappa = w.kappa_sq().sqrt();
    let (hx, hy) = (w.kappa_x / kappa, w.kappa_y / kappa);
    let mut z = DMatrix::from_element(3 * n, 2 * n - 2, zero);
    for j in 0..n {
        let s = 1.0 / lob.weights[j].sqrt();
        z[(j, j)] = C64::new(-hy * s, 0.0);
        z[(n + j, j)] = C64::new(hx * s, 0.0);
    }
    for m in 1..=n - 2 {
        let col = n + m - 1;
        for (j, &zj) in lob.nodes.iter().enumerate() {
            let p = legendre_all(m + 1, 2.0 * zj - 1.0);
            let integral = (p[m + 1] - p[m - 1]) / (2.0 * (2 * m + 1) as f64);
            z[(j, col)] = C64::new(hx * p[m], 0.0);
            z[(n + j, col)] = C64::new(hy * p[m], 0.0);
            z[(2 * n + j, col)] = C64::new(0.0, -kappa * integral);
        }
    }
    z
}

/// Orthonormalize the columns of `z` in the weighted inner product `area * z^* W z`.
pub fn orthonormalize(z: &DMatrix<C64>, lob: &Lobatto, area: f64) -> Result<DMatrix<C64>> {
    let n = lob.len();
    let wz = DMatrix::from_fn(z.nrows(), z.ncols(), |i, j| z[(i, j)] * lob.weights[i % n] * area);
    let gram = z.adjoint() * wz;
    let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let chol = Cholesky::new(gram).ok_or_else(|| Error::Numerical("divergence-free basis is rank deficient".into()))?;
    // Q = Z L^{-*}  <=>  L Q^* = Z^*  <=>  Q^* = L^{-1} Z^*
    let lt = chol.l();
    let qa = lt
        .solve_lower_triangular(&z.adjoint())
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    Ok(qa.adjoint())
}

/// Coordinates `area * Q^* W u` of a block profile.
pub fn coords(q: &DMatrix<C64>, lob: &Lobatto, area: f64, u: &DVector<C64>) -> DVector<C64> {
    let n = lob.len();
    let wu = DVector::from_fn(u.len(), |i, _| u[i] * lob.weights[i % n] * area);
    q.ad_mul(&wu)
}
