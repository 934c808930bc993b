//! Galerkin context: filter, projected nonlinearities and modal algebra.
//!
//! Coefficients are stored per wavenumber block in the eigenbasis; modes
//! outside the truncation are kept at zero.

use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use super::model::ModelKind;
use crate::domain::ops::{apply_deriv, block_velocity_gradient, curl};
use crate::domain::{Field, Grid, PhysicalField, PhysicalScalar, Transformer};
use crate::stokes::StokesEigenbasis;
use crate::{Error, Result, C64};

/// Per-block modal coefficients.
pub type Coeffs = Vec<DVector<C64>>;

/// `Re sum conj(a) b` in a fixed order.
pub fn coeff_dot(a: &Coeffs, b: &Coeffs) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x.dotc(y).re;
    }
    acc
}

/// `sum w_j |c_j|^2` with a per-mode weight.
pub fn weighted_sq(c: &Coeffs, weight: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for (x, w) in c.iter().zip(weight) {
        for (v, wj) in x.iter().zip(w) {
            acc += wj * v.norm_sqr();
        }
    }
    acc
}

/// Shared, read-only data for one run.
#[derive(Debug)]
pub struct Galerkin {
    pub basis: Arc<StokesEigenbasis>,
    pub model: ModelKind,
    pub nu: f64,
    pub transformer: Transformer,
    /// Retained modes per block.
    pub mask: Vec<Vec<bool>>,
    /// `lambda_j = mu_j - 1` per block.
    pub lambda: Vec<Vec<f64>>,
    /// Number of retained modes.
    pub retained: usize,
    pub nonlinear: bool,
}

impl Galerkin {
    pub fn new(basis: Arc<StokesEigenbasis>, model: ModelKind, modes: Option<usize>, nonlinear: bool) -> Result<Self> {
        model.validate()?;
        let total = basis.len();
        let requested = modes.unwrap_or(total);
        if requested > total {
            return Err(Error::Config(format!("{requested} modes requested but only {total} are available")));
        }
        let retained = basis.closed_count(requested);
        let mask = basis.truncation_mask(retained);
        let lambda = basis.blocks.iter().map(|b| b.mu.iter().map(|m| m - 1.0).collect()).collect();
        let transformer = Transformer::new(&basis.grid);
        let nu = basis.grid.config.nu;
        Ok(Self { basis, model, nu, transformer, mask, lambda, retained, nonlinear })
    }

    pub fn grid(&self) -> &Grid {
        &self.basis.grid
    }

    pub fn alpha(&self) -> f64 {
        self.model.alpha()
    }

    pub fn zeros(&self) -> Coeffs {
        self.basis.blocks.iter().map(|b| DVector::zeros(b.mu.len())).collect()
    }

    /// Zero every coefficient outside the truncation.
    pub fn truncate(&self, c: &mut Coeffs) {
        for (x, m) in c.iter_mut().zip(&self.mask) {
            for (v, keep) in x.iter_mut().zip(m) {
                if !keep {
                    *v = C64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Project a field onto the retained modes.
    pub fn project(&self, f: &Field) -> Result<Coeffs> {
        let mut c = self.basis.expand(f)?.coeffs;
        self.truncate(&mut c);
        self.symmetrize(&mut c);
        Ok(c)
    }

    pub fn synthesize(&self, c: &Coeffs) -> Field {
        self.basis.synthesize(c)
    }

    /// Average each coefficient with the conjugate of its partner so the field is exactly real.
    pub fn symmetrize(&self, c: &mut Coeffs) {
        let g = self.grid();
        for b in 0..c.len() {
            let p = g.partner(b);
            if p == b {
                c[b].iter_mut().for_each(|v| v.im = 0.0);
            } else if g.blocks[b].is_canonical() {
                let avg: DVector<C64> = (&c[b] + c[p].map(|v| v.conj())) * C64::new(0.5, 0.0);
                c[p] = avg.map(|v| v.conj());
                c[b] = avg;
            }
        }
    }

    /// Filter `u = (I + alpha A')^{-1} v` mode by mode.
    pub fn filter(&self, v: &Coeffs) -> Coeffs {
        let a = self.alpha();
        if a == 0.0 {
            return v.clone();
        }
        v.iter()
            .zip(&self.lambda)
            .map(|(x, l)| DVector::from_fn(x.len(), |j, _| x[j] / (1.0 + a * l[j])))
            .collect()
    }

    /// `(e_j, N)` for every retained mode, Hermitian-averaged.
    fn project_forcing(&self, n: &Field) -> Coeffs {
        let g = self.grid();
        let lob = &g.lobatto;
        let nz = lob.len();
        let area = g.area();
        let mut out: Coeffs = (0..g.blocks.len())
            .into_par_iter()
            .map(|b| {
                let e = &self.basis.blocks[b].vectors;
                let nb = n.block(g, b);
                let wn = DVector::from_fn(nb.len(), |i, _| nb[i] * lob.weights[i % nz] * area);
                let mut c = e.ad_mul(&wn);
                for (v, keep) in c.iter_mut().zip(&self.mask[b]) {
                    if !keep {
                        *v = C64::new(0.0, 0.0);
                    }
                }
                c
            })
            .collect();
        self.symmetrize(&mut out);
        out
    }

    /// Physical-space nonlinear vector field for the model, before projection.
    pub fn nonlinear_field(&self, vf: &Field, uf: &Field) -> Result<Field> {
        let g = self.grid();
        let t = &self.transformer;
        let u = t.to_physical(uf)?;
        match self.model {
            ModelKind::Ns | ModelKind::LnsAlpha(_) => {
                let w = t.to_physical(&curl(g, vf)?)?;
                let mut n = PhysicalField::zeros(g);
                let len = n.comps[0].values.len();
                for i in 0..len {
                    let (a, b) = (
                        [w.comps[0].values[i], w.comps[1].values[i], w.comps[2].values[i]],
                        [u.comps[0].values[i], u.comps[1].values[i], u.comps[2].values[i]],
                    );
                    n.comps[0].values[i] = a[1] * b[2] - a[2] * b[1];
                    n.comps[1].values[i] = a[2] * b[0] - a[0] * b[2];
                    n.comps[2].values[i] = a[0] * b[1] - a[1] * b[0];
                }
                t.to_spectral(&n, g)
            }
            ModelKind::LerayAlpha(_) => self.skew_advection(vf, &u),
        }
    }

    /// `(u . grad v + div(u v^T)) / 2`: the skew-symmetric convective form.
    fn skew_advection(&self, vf: &Field, u: &PhysicalField) -> Result<Field> {
        let g = self.grid();
        let t = &self.transformer;
        let lob = &g.lobatto;
        let nz = lob.len();
        let mask = g.config.dealias.then_some(g);
        let v = t.to_physical(vf)?;
        // velocity gradient components d_b v_a as spectral scalars
        let mut grad: Vec<crate::domain::ScalarField> = (0..9).map(|_| crate::domain::ScalarField::zeros(g)).collect();
        for (b, w) in g.blocks.iter().enumerate() {
            let gr = block_velocity_gradient(w, lob, &vf.block(g, b));
            for a in 0..3 {
                for c in 0..3 {
                    grad[3 * a + c].column_mut(w.ix, w.iy).copy_from_slice(&gr[a][c]);
                }
            }
        }
        let gradp: Vec<PhysicalScalar> = grad.iter().map(|s| t.scalar_to_physical(s)).collect::<Result<_>>()?;
        let len = v.comps[0].values.len();
        let mut out = PhysicalField::zeros(g);
        for a in 0..3 {
            // advective part
            let mut adv = PhysicalScalar::zeros(g);
            for i in 0..len {
                adv.values[i] = (0..3).map(|c| u.comps[c].values[i] * gradp[3 * a + c].values[i]).sum();
            }
            // divergence of the flux u_c v_a
            let mut div = crate::domain::ScalarField::zeros(g);
            for c in 0..3 {
                let mut flux = PhysicalScalar::zeros(g);
                for i in 0..len {
                    flux.values[i] = u.comps[c].values[i] * v.comps[a].values[i];
                }
                let fs = t.scalar_to_spectral(&flux, mask)?;
                for w in &g.blocks {
                    let col = fs.column(w.ix, w.iy);
                    let d: Vec<C64> = match c {
                        0 => col.iter().map(|x| x * C64::new(0.0, w.kappa_x)).collect(),
                        1 => col.iter().map(|x| x * C64::new(0.0, w.kappa_y)).collect(),
                        _ => apply_deriv(lob, col),
                    };
                    let dst = div.column_mut(w.ix, w.iy);
                    for z in 0..nz {
                        dst[z] += d[z];
                    }
                }
            }
            let divp = t.scalar_to_physical(&div)?;
            for i in 0..len {
                out.comps[a].values[i] = 0.5 * (adv.values[i] + divp.values[i]);
            }
        }
        t.to_spectral(&out, g)
    }

    /// Projected nonlinearity coefficients `g_j = (B, e_j)` at state `v` (filtered internally).
    pub fn nonlinearity(&self, v: &Coeffs) -> Result<Coeffs> {
        if !self.nonlinear {
            return Ok(self.zeros());
        }
        let u = self.filter(v);
        let n = self.nonlinear_field(&self.synthesize(v), &self.synthesize(&u))?;
        Ok(self.project_forcing(&n))
    }

    /// Field-level projected nonlinearity `P_m B(v, u)` for given fields in `H`.
    pub fn nonlinearity_fields(&self, v: &Field, u: &Field) -> Result<Field> {
        let n = self.nonlinear_field(v, u)?;
        Ok(self.synthesize(&self.project_forcing(&n)))
    }
}
