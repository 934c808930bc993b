//! Assembly of the slip Stokes bilinear forms per wavenumber block.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::gll::Lobatto;
use crate::domain::grid::Wavenumber;
use crate::domain::ops::{curl_matrix, strain_matrix};
use crate::domain::{Field, Grid};
use crate::hodge::Hodge;
use crate::{Error, Result, C64};

/// Which slip form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FormKind {
    /// `int beta u.phi + int curl u . curl phi`
    Vsb { beta: f64 },
    /// `int gamma u.phi + 2 int S(u) : S(phi)`
    Nsb { gamma: f64 },
}

impl FormKind {
    pub fn coefficient(&self) -> f64 {
        match *self {
            FormKind::Vsb { beta } => beta,
            FormKind::Nsb { gamma } => gamma,
        }
    }

    pub fn tag(&self) -> u8 {
        match self {
            FormKind::Vsb { .. } => 0,
            FormKind::Nsb { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.coefficient();
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::Config(format!("slip coefficient must be a nonnegative number, got {c}")));
        }
        Ok(())
    }
}

/// Diagonal wall-trace matrix (ones at both wall nodes of every component).
pub fn wall_matrix(lob: &Lobatto, ncomp: usize) -> DMatrix<C64> {
    let n = lob.len();
    let mut m = DMatrix::zeros(ncomp * n, ncomp * n);
    for c in 0..ncomp {
        m[(c * n, c * n)] = C64::new(1.0, 0.0);
        m[(c * n + n - 1, c * n + n - 1)] = C64::new(1.0, 0.0);
    }
    m
}

fn weighted_gram(op: &DMatrix<C64>, lob: &Lobatto, scale: f64) -> DMatrix<C64> {
    let n = lob.len();
    let wop = DMatrix::from_fn(op.nrows(), op.ncols(), |i, j| op[(i, j)] * (lob.weights[i % n] * scale));
    op.ad_mul(&wop)
}

/// `(A + A^*) / 2`, which is Hermitian bit for bit.
pub fn symmetrize(a: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn asymmetry(a: &DMatrix<C64>) -> f64 {
    let scale = a.norm().max(f64::MIN_POSITIVE);
    (a - a.adjoint()).norm() / scale
}

/// Unreduced `3n x 3n` form matrix of one block (without the mass term).
pub fn block_form(w: &Wavenumber, lob: &Lobatto, area: f64, kind: FormKind) -> DMatrix<C64> {
    let (vol, coef) = match kind {
        FormKind::Vsb { beta } => (weighted_gram(&curl_matrix(w, lob), lob, area), beta),
        FormKind::Nsb { gamma } => (weighted_gram(&strain_matrix(w, lob), lob, 2.0 * area), gamma),
    };
    vol + wall_matrix(lob, 3) * C64::new(coef * area, 0.0)
}

/// Square-root factor `R` with `block_form = R^* R`: weighted volume rows over wall-trace rows.
pub fn block_root(w: &Wavenumber, lob: &Lobatto, area: f64, kind: FormKind) -> DMatrix<C64> {
    let n = lob.len();
    let (op, scale, coef) = match kind {
        FormKind::Vsb { beta } => (curl_matrix(w, lob), area, beta),
        FormKind::Nsb { gamma } => (strain_matrix(w, lob), 2.0 * area, gamma),
    };
    let rows = op.nrows();
    let mut r = DMatrix::zeros(rows + 6, 3 * n);
    for i in 0..rows {
        let s = (scale * lob.weights[i % n]).sqrt();
        for j in 0..3 * n {
            r[(i, j)] = op[(i, j)] * s;
        }
    }
    let t = C64::new((coef * area).sqrt(), 0.0);
    for c in 0..3 {
        r[(rows + 2 * c, c * n)] = t;
        r[(rows + 2 * c + 1, c * n + n - 1)] = t;
    }
    r
}

/// Assembled form: Hermitian block matrices over the full nodal space.
#[derive(Debug, Clone)]
pub struct AssembledForm {
    pub kind: FormKind,
    pub blocks: Vec<DMatrix<C64>>,
    /// Largest relative asymmetry seen before the symmetrization pass.
    pub raw_asymmetry: f64,
}

pub fn assemble_form(grid: &Grid, kind: FormKind) -> Result<AssembledForm> {
    kind.validate()?;
    let area = grid.area();
    let raw: Vec<DMatrix<C64>> = grid
        .blocks
        .par_iter()
        .map(|w| block_form(w, &grid.lobatto, area, kind))
        .collect();
    let raw_asymmetry = raw.iter().map(asymmetry).fold(0.0, f64::max);
    Ok(AssembledForm { kind, blocks: raw.iter().map(symmetrize).collect(), raw_asymmetry })
}

impl AssembledForm {
    /// Evaluate the form on two fields.
    pub fn eval(&self, grid: &Grid, f: &Field, g: &Field) -> Result<f64> {
        f.check_grid(grid)?;
        g.check_grid(grid)?;
        let parts: Vec<f64> = (0..grid.blocks.len())
            .into_par_iter()
            .map(|b| {
                let fb = f.block(grid, b);
                let gb = g.block(grid, b);
                fb.dotc(&(&self.blocks[b] * gb)).re
            })
            .collect();
        Ok(crate::domain::ops::ordered_sum(parts))
    }

    /// Form restricted to the divergence-free basis: `Q^* A Q` per block.
    pub fn reduce(&self, hodge: &Hodge) -> Vec<DMatrix<C64>> {
        (0..self.blocks.len())
            .into_par_iter()
            .map(|b| {
                let q = hodge.divfree_basis(b);
                symmetrize(&q.ad_mul(&(&self.blocks[b] * q)))
            })
            .collect()
    }

    /// Largest eigenvalue sign defect `min(0, min eig) / max eig` over blocks.
    pub fn min_relative_eigenvalue(&self) -> f64 {
        self.blocks
            .par_iter()
            .map(|a| {
                let ev: DVector<f64> = a.clone().symmetric_eigenvalues();
                let top = ev.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
                ev.iter().cloned().fold(f64::INFINITY, f64::min) / top
            })
            .reduce(|| f64::INFINITY, f64::min)
    }
}
