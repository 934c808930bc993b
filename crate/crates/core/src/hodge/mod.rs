//! Five-space orthogonal decomposition `FH + HH + CG + HG + GG` and the
//! Leray projector onto `H = FH + HH`.
//!
//! Everything is block-diagonal in the horizontal wavenumber. `H` is the
//! span of an orthonormal basis of nodal fields that are divergence-free at
//! every Lobatto node and tangent to both walls. `GG` is spanned by gradients
//! of scalars vanishing on the walls, `HG` by gradients of discrete harmonic
//! scalars constant on each wall, and `HH` is the curl-free part of `H`. The
//! curly-gradient piece `CG` is what is left, so the five pieces reconstruct
//! the input exactly and are orthogonal by construction.

pub mod basis;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::domain::ops::{block_grad, block_inner, curl_matrix, inner_product, norm};
use crate::domain::{ChannelConfig, Field, Grid, GridRef};
use crate::{tolerances, Error, Result, C64};

/// The five orthogonal pieces of a field.
#[derive(Debug, Clone)]
pub struct HodgeComponents {
    pub fh: Field,
    pub hh: Field,
    pub cg: Field,
    pub hg: Field,
    pub gg: Field,
    /// `|u - sum of pieces| / |u|`.
    pub residual: f64,
}

impl HodgeComponents {
    pub fn parts(&self) -> [&Field; 5] {
        [&self.fh, &self.hh, &self.cg, &self.hg, &self.gg]
    }

    pub fn sum(&self) -> Field {
        let mut s = self.fh.clone();
        for p in &self.parts()[1..] {
            s.axpy(1.0, p);
        }
        s
    }
}

/// Orthonormal bases of the finite-dimensional harmonic spaces.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub hh_basis: Vec<Field>,
    pub hg_basis: Vec<Field>,
}

/// Precomputed projectors for one grid.
#[derive(Debug)]
pub struct Hodge {
    pub grid: GridRef,
    /// Orthonormal divergence-free basis per block.
    q: Vec<DMatrix<C64>>,
    /// Factorized Dirichlet Laplacian on interior nodes per block.
    poisson: Vec<Cholesky<f64, Dyn>>,
    /// Orthonormal coordinates (in `q`) of the harmonic knots per block.
    hh: Vec<DMatrix<C64>>,
    /// Normalized harmonic gradient profiles per block.
    hg: Vec<Vec<DVector<C64>>>,
}

fn stiffness(w: &crate::domain::Wavenumber, grid: &Grid) -> DMatrix<f64> {
    let lob = &grid.lobatto;
    let d = &lob.deriv;
    let wd = DMatrix::from_fn(lob.len(), lob.len(), |i, j| lob.weights[i] * d[(i, j)]);
    let mut a = d.transpose() * wd;
    for i in 0..lob.len() {
        a[(i, i)] += w.kappa_sq() * lob.weights[i];
    }
    a
}

fn solve_real(chol: &Cholesky<f64, Dyn>, rhs: &DVector<C64>) -> DVector<C64> {
    let re = chol.solve(&rhs.map(|c| c.re));
    let im = chol.solve(&rhs.map(|c| c.im));
    DVector::from_fn(rhs.len(), |i, _| C64::new(re[i], im[i]))
}

/// Indices of numerically zero singular values.
fn null_indices(sv: &DVector<f64>) -> Vec<usize> {
    let smax = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
    (0..sv.len()).filter(|&i| sv[i] < 1e-9 * smax).collect()
}

/// Orthonormal null space of `m` (columns); real arithmetic when `real` is set.
fn null_space(m: &DMatrix<C64>, real: bool) -> DMatrix<C64> {
    if real {
        let mr = m.map(|c| c.re);
        let svd = mr.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let idx = null_indices(&svd.singular_values);
        DMatrix::from_fn(m.ncols(), idx.len(), |i, j| C64::new(vt[(idx[j], i)], 0.0))
    } else {
        let svd = m.clone().svd(false, true);
        let vt = svd.v_t.expect("requested");
        let idx = null_indices(&svd.singular_values);
        DMatrix::from_fn(m.ncols(), idx.len(), |i, j| vt[(idx[j], i)].conj())
    }
}

impl Hodge {
    pub fn new(grid: GridRef) -> Result<Self> {
        let g = &*grid;
        let lob = &g.lobatto;
        let n = lob.len();
        let area = g.area();
        type BlockParts = (DMatrix<C64>, Cholesky<f64, Dyn>, DMatrix<C64>, Vec<DVector<C64>>);
        let parts: Vec<Result<BlockParts>> = g
            .blocks
            .par_iter()
            .map(|w| {
                let q = basis::orthonormalize(&basis::raw_basis(w, lob), lob, area)?;
                let a = stiffness(w, g);
                let interior = a.view((1, 1), (n - 2, n - 2)).into_owned();
                let chol = Cholesky::new(interior)
                    .ok_or_else(|| Error::Numerical(format!("Dirichlet Laplacian singular at k=({}, {})", w.kx, w.ky)))?;
                let hh = null_space(&(curl_matrix(w, lob) * &q), w.is_mean());
                // harmonic lifts of unit data on each wall
                let mut lifts = Vec::new();
                for wall in [0, n - 1] {
                    let mut phi = DVector::<f64>::zeros(n);
                    phi[wall] = 1.0;
                    let rhs = -(a.view((1, wall), (n - 2, 1)).into_owned());
                    let inner = chol.solve(&rhs);
                    phi.rows_mut(1, n - 2).copy_from(&inner);
                    lifts.push(phi);
                }
                // only a constant scalar per wall is admissible, i.e. k = 0
                let mut hg = Vec::new();
                if w.is_mean() {
                    let grads: Vec<DVector<C64>> = lifts
                        .iter()
                        .map(|p| block_grad(w, lob, p.map(|x| C64::new(x, 0.0)).as_slice()))
                        .collect();
                    let m = DMatrix::from_fn(3 * n, 2, |i, j| grads[j][i] * lob.weights[i % n].sqrt());
                    let svd = m.map(|c| c.re).svd(false, true);
                    let vt = svd.v_t.expect("requested");
                    let smax = svd.singular_values.max();
                    for k in 0..2 {
                        if svd.singular_values[k] > 1e-9 * smax {
                            let v = &grads[0] * C64::new(vt[(k, 0)], 0.0) + &grads[1] * C64::new(vt[(k, 1)], 0.0);
                            let nrm = (area * block_inner(lob, v.as_slice(), v.as_slice()).re).sqrt();
                            hg.push(v / C64::new(nrm, 0.0));
                        }
                    }
                }
                Ok((q, chol, hh, hg))
            })
            .collect();
        let mut out = Self { grid: grid.clone(), q: vec![], poisson: vec![], hh: vec![], hg: vec![] };
        for p in parts {
            let (q, c, h, g) = p?;
            out.q.push(q);
            out.poisson.push(c);
            out.hh.push(h);
            out.hg.push(g);
        }
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Orthonormal divergence-free basis of block `b`.
    pub fn divfree_basis(&self, b: usize) -> &DMatrix<C64> {
        &self.q[b]
    }

    pub fn dim_hh(&self) -> usize {
        self.hh.iter().map(|h| h.ncols()).sum()
    }

    pub fn dim_hg(&self) -> usize {
        self.hg.iter().map(|h| h.len()).sum()
    }

    fn map_blocks(&self, u: &Field, op: impl Fn(usize, DVector<C64>) -> DVector<C64> + Sync) -> Result<Field> {
        u.check_grid(&self.grid)?;
        let g = &*self.grid;
        let out: Vec<DVector<C64>> = (0..g.blocks.len()).into_par_iter().map(|b| op(b, u.block(g, b))).collect();
        Ok(Field::from_blocks(g, &out))
    }

    fn coords(&self, b: usize, u: &DVector<C64>) -> DVector<C64> {
        basis::coords(&self.q[b], &self.grid.lobatto, self.grid.area(), u)
    }

    /// Block-level Leray projection.
    pub fn project_block(&self, b: usize, u: &DVector<C64>) -> DVector<C64> {
        &self.q[b] * self.coords(b, u)
    }

    /// Orthogonal projection onto `H = FH + HH`.
    pub fn leray_project(&self, u: &Field) -> Result<Field> {
        self.map_blocks(u, |b, v| self.project_block(b, &v))
    }

    pub fn project_hh(&self, u: &Field) -> Result<Field> {
        self.map_blocks(u, |b, v| {
            let h = &self.hh[b];
            if h.ncols() == 0 {
                return DVector::zeros(v.len());
            }
            &self.q[b] * (h * h.ad_mul(&self.coords(b, &v)))
        })
    }

    pub fn project_hg(&self, u: &Field) -> Result<Field> {
        let area = self.grid.area();
        let lob = &self.grid.lobatto;
        self.map_blocks(u, |b, v| {
            let mut out = DVector::zeros(v.len());
            for e in &self.hg[b] {
                let c = block_inner(lob, e.as_slice(), v.as_slice()) * area;
                out += e * c;
            }
            out
        })
    }

    /// Scalar `phi_g` (zero on the walls) with `grad phi_g` the `GG` projection.
    pub fn grounded_potential_block(&self, b: usize, u: &DVector<C64>) -> DVector<C64> {
        let g = &*self.grid;
        let w = &g.blocks[b];
        let lob = &g.lobatto;
        let n = lob.len();
        let (ikx, iky) = (C64::new(0.0, w.kappa_x), C64::new(0.0, w.kappa_y));
        let dt = lob.deriv.transpose();
        // grad^* W u
        let mut rhs = DVector::<C64>::zeros(n);
        for i in 0..n {
            let mut acc = -(ikx * u[i] + iky * u[n + i]) * lob.weights[i];
            for j in 0..n {
                acc += u[2 * n + j] * (dt[(i, j)] * lob.weights[j]);
            }
            rhs[i] = acc;
        }
        let inner = solve_real(&self.poisson[b], &rhs.rows(1, n - 2).into_owned());
        let mut phi = DVector::zeros(n);
        phi.rows_mut(1, n - 2).copy_from(&inner);
        phi
    }

    /// Orthogonal projection onto grounded gradients `GG`.
    pub fn project_gg(&self, u: &Field) -> Result<Field> {
        let g = &*self.grid;
        self.map_blocks(u, |b, v| {
            let phi = self.grounded_potential_block(b, &v);
            block_grad(&g.blocks[b], &g.lobatto, phi.as_slice())
        })
    }

    /// Weak divergence `sup (u, grad psi) / |grad psi|` over wall-vanishing `psi`.
    pub fn weak_divergence(&self, u: &Field) -> Result<f64> {
        norm(&self.grid, &self.project_gg(u)?)
    }

    /// Projection of a weakly divergence-free field onto `H`.
    pub fn project_to_h(&self, u: &Field) -> Result<Field> {
        let div = self.weak_divergence(u)?;
        let scale = norm(&self.grid, u)?;
        if div > tolerances::DIVERGENCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!("input is not divergence-free: weak divergence {div:.3e}")));
        }
        self.leray_project(u)
    }

    pub fn decompose(&self, u: &Field) -> Result<HodgeComponents> {
        let h = self.leray_project(u)?;
        let hh = self.project_hh(u)?;
        let fh = &h - &hh;
        let hg = self.project_hg(u)?;
        let gg = self.project_gg(u)?;
        let mut cg = u - &h;
        cg.axpy(-1.0, &hg);
        cg.axpy(-1.0, &gg);
        let mut comps = HodgeComponents { fh, hh, cg, hg, gg, residual: 0.0 };
        let unorm = norm(&self.grid, u)?;
        let rec = norm(&self.grid, &(u - &comps.sum()))?;
        comps.residual = if unorm > 0.0 { rec / unorm } else { rec };
        Ok(comps)
    }

    /// Largest pairwise `|(p_i, p_j)| / |u|^2` over the five pieces.
    pub fn orthogonality_defect(&self, c: &HodgeComponents, u: &Field) -> Result<f64> {
        let scale = inner_product(&self.grid, u, u)?.max(f64::MIN_POSITIVE);
        let p = c.parts();
        let mut worst: f64 = 0.0;
        for i in 0..5 {
            for j in i + 1..5 {
                worst = worst.max(inner_product(&self.grid, p[i], p[j])?.abs() / scale);
            }
        }
        Ok(worst)
    }

    pub fn harmonic_bases(&self) -> HarmonicBasis {
        let g = &*self.grid;
        let mut hh_basis = Vec::new();
        let mut hg_basis = Vec::new();
        for (b, h) in self.hh.iter().enumerate() {
            for c in 0..h.ncols() {
                let mut f = Field::zeros(g);
                f.set_block(g, b, &(&self.q[b] * h.column(c)));
                hh_basis.push(f);
            }
            for e in &self.hg[b] {
                let mut f = Field::zeros(g);
                f.set_block(g, b, e);
                hg_basis.push(f);
            }
        }
        HarmonicBasis { hh_basis, hg_basis }
    }
}

/// Harmonic bases for a channel configuration.
pub fn harmonic_bases(cfg: &ChannelConfig) -> Result<HarmonicBasis> {
    Ok(Hodge::new(Grid::new(cfg.clone())?)?.harmonic_bases())
}

/// Largest `|u_z|` on either wall.
pub fn normal_trace(grid: &Grid, u: &Field) -> Result<f64> {
    u.check_grid(grid)?;
    let n = grid.nz();
    let mut worst: f64 = 0.0;
    for b in 0..grid.blocks.len() {
        let v = u.block(grid, b);
        worst = worst.max(v[2 * n].norm()).max(v[3 * n - 1].norm());
    }
    Ok(worst)
}
