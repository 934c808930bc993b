//! Eigenbasis of the Stokes operator `A = I + (form)` on the divergence-free space.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::form::{assemble_form, block_root, FormKind};
use crate::domain::{Field, GridRef};
use crate::hodge::Hodge;
use crate::{tolerances, Error, Result, C64};

/// Eigenpairs of one wavenumber block, `mu` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBlock {
    pub mu: Vec<f64>,
    /// Nodal profiles `[e_x; e_y; e_z]` as columns.
    pub vectors: DMatrix<C64>,
}

/// Position of one global mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeId {
    pub block: usize,
    pub local: usize,
}

/// Mass-orthonormal eigenbasis of `A`, blocked by wavenumber, globally sorted.
#[derive(Debug, Clone)]
pub struct StokesEigenbasis {
    pub grid: GridRef,
    pub kind: FormKind,
    pub blocks: Vec<EigenBlock>,
    /// Global order by `(mu, pair wavenumber, local index, conjugate side)`.
    pub order: Vec<ModeId>,
}

/// Expansion of a field in the eigenbasis.
#[derive(Debug, Clone)]
pub struct Expansion {
    /// Coefficients `(e_j, u)` per block.
    pub coeffs: Vec<DVector<C64>>,
    /// `|u - sum c_j e_j| / |u|`.
    pub span_residual: f64,
}

/// Eigenpairs from the singular value decomposition of the form's square root
/// restricted to the divergence-free basis; `mu = 1 + sigma^2 >= 1` exactly.
fn block_eigen(q: &DMatrix<C64>, root: &DMatrix<C64>, real: bool) -> Result<EigenBlock> {
    let m = q.ncols();
    let rq = root * q;
    let (sv, v) = if real {
        let svd = rq.map(|c| c.re).svd(false, true);
        let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        (svd.singular_values, vt.transpose().map(|x| C64::new(x, 0.0)))
    } else {
        let svd = rq.svd(false, true);
        let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        (svd.singular_values, vt.adjoint())
    };
    if sv.len() != m || sv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver produced non-finite values".into()));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap_or(Ordering::Equal));
    let y = DMatrix::from_fn(m, m, |r, c| v[(r, idx[c])]);
    let mu = idx.iter().map(|&i| 1.0 + sv[i] * sv[i]).collect();
    Ok(EigenBlock { mu, vectors: q * y })
}

impl StokesEigenbasis {
    /// Solve every block eigenproblem (canonical half only; the rest by conjugation).
    pub fn compute(hodge: &Hodge, kind: FormKind) -> Result<Self> {
        let grid = hodge.grid.clone();
        let g = &*grid;
        kind.validate()?;
        let canon: Vec<usize> = (0..g.blocks.len()).filter(|&b| g.blocks[b].is_canonical()).collect();
        let solved: Vec<(usize, Result<EigenBlock>)> = canon
            .par_iter()
            .map(|&b| {
                let r = block_eigen(
                    hodge.divfree_basis(b),
                    &block_root(&g.blocks[b], &g.lobatto, g.area(), kind),
                    g.blocks[b].is_mean(),
                ).map_err(|e| {
                    Error::Numerical(format!("block k=({}, {}): {e}", g.blocks[b].kx, g.blocks[b].ky))
                });
                (b, r)
            })
            .collect();
        let mut blocks: Vec<Option<EigenBlock>> = vec![None; g.blocks.len()];
        for (b, r) in solved {
            let eb = r?;
            let p = g.partner(b);
            if p != b {
                blocks[p] = Some(EigenBlock { mu: eb.mu.clone(), vectors: eb.vectors.map(|c| c.conj()) });
            }
            blocks[b] = Some(eb);
        }
        let blocks: Vec<EigenBlock> = blocks.into_iter().map(|b| b.expect("every block solved")).collect();
        Ok(Self::from_blocks(grid, kind, blocks))
    }

    /// Build the global ordering for given block eigenpairs.
    pub fn from_blocks(grid: GridRef, kind: FormKind, blocks: Vec<EigenBlock>) -> Self {
        let mut order: Vec<ModeId> = Vec::new();
        for (b, eb) in blocks.iter().enumerate() {
            for l in 0..eb.mu.len() {
                order.push(ModeId { block: b, local: l });
            }
        }
        let key = |m: &ModeId| {
            let w = &grid.blocks[m.block];
            let side = !w.is_canonical();
            let (kx, ky) = if side { (-w.kx, -w.ky) } else { (w.kx, w.ky) };
            (kx, ky, m.local, side)
        };
        order.sort_by(|a, b| {
            let (ma, mb) = (blocks[a.block].mu[a.local], blocks[b.block].mu[b.local]);
            ma.partial_cmp(&mb).unwrap_or(Ordering::Equal).then_with(|| key(a).cmp(&key(b)))
        });
        Self { grid, kind, blocks, order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn mu(&self, j: usize) -> f64 {
        let m = self.order[j];
        self.blocks[m.block].mu[m.local]
    }

    /// Global mode `j` as a (generally complex) field.
    pub fn mode(&self, j: usize) -> Field {
        let m = self.order[j];
        let mut f = Field::zeros(&self.grid);
        f.set_block(&self.grid, m.block, &self.blocks[m.block].vectors.column(m.local).into_owned());
        f
    }

    /// Smallest count `>= m` whose leading modes are closed under `k -> -k`.
    pub fn closed_count(&self, m: usize) -> usize {
        let g = &*self.grid;
        let mut count = m.min(self.len());
        while count > 0 && count < self.len() {
            let last = self.order[count - 1];
            let w = &g.blocks[last.block];
            // a canonical mode is immediately followed by its conjugate partner
            if w.is_canonical() && !w.is_mean() {
                count += 1;
            } else {
                break;
            }
        }
        count
    }

    /// Membership mask of the leading `m` modes per block.
    pub fn truncation_mask(&self, m: usize) -> Vec<Vec<bool>> {
        let mut mask: Vec<Vec<bool>> = self.blocks.iter().map(|b| vec![false; b.mu.len()]).collect();
        for id in &self.order[..m.min(self.len())] {
            mask[id.block][id.local] = true;
        }
        mask
    }

    /// Coefficients `(e_j, u)` together with the out-of-span residual.
    pub fn expand(&self, u: &Field) -> Result<Expansion> {
        let g = &*self.grid;
        u.check_grid(g)?;
        let lob = &g.lobatto;
        let n = lob.len();
        let area = g.area();
        let per: Vec<(DVector<C64>, f64, f64)> = (0..g.blocks.len())
            .into_par_iter()
            .map(|b| {
                let ub = u.block(g, b);
                let wu = DVector::from_fn(ub.len(), |i, _| ub[i] * lob.weights[i % n] * area);
                let e = &self.blocks[b].vectors;
                let c = e.ad_mul(&wu);
                let r = &ub - e * &c;
                let rn: f64 = (0..r.len()).map(|i| lob.weights[i % n] * r[i].norm_sqr()).sum();
                let un: f64 = (0..ub.len()).map(|i| lob.weights[i % n] * ub[i].norm_sqr()).sum();
                (c, rn * area, un * area)
            })
            .collect();
        let (mut rn, mut un) = (0.0, 0.0);
        let mut coeffs = Vec::with_capacity(per.len());
        for (c, r, n2) in per {
            rn += r;
            un += n2;
            coeffs.push(c);
        }
        let span_residual = if un > 0.0 { (rn / un).sqrt() } else { 0.0 };
        Ok(Expansion { coeffs, span_residual })
    }

    /// Field `sum_j c_j e_j` from per-block coefficients.
    pub fn synthesize(&self, coeffs: &[DVector<C64>]) -> Field {
        let g = &*self.grid;
        let blocks: Vec<DVector<C64>> =
            (0..g.blocks.len()).into_par_iter().map(|b| &self.blocks[b].vectors * &coeffs[b]).collect();
        Field::from_blocks(g, &blocks)
    }

    fn checked_expand(&self, u: &Field) -> Result<Expansion> {
        let e = self.expand(u)?;
        if e.span_residual > tolerances::SPAN_RESIDUAL {
            log::warn!("field has a component outside the computed span (relative residual {:.3e})", e.span_residual);
        }
        Ok(e)
    }

    /// `A^s u = sum mu_j^s (e_j, u) e_j`.
    pub fn apply_fractional(&self, s: f64, u: &Field) -> Result<(Field, f64)> {
        let mut e = self.checked_expand(u)?;
        for (c, eb) in e.coeffs.iter_mut().zip(&self.blocks) {
            for (ci, mu) in c.iter_mut().zip(&eb.mu) {
                *ci *= mu.powf(s);
            }
        }
        Ok((self.synthesize(&e.coeffs), e.span_residual))
    }

    /// `|A^s u|` from the expansion.
    pub fn norm_s(&self, s: f64, u: &Field) -> Result<f64> {
        let e = self.checked_expand(u)?;
        Ok(coeff_norm_s(&self.blocks, &e.coeffs, s))
    }

    /// Block-level check `max_j |(I + K) y_j - mu_j y_j| / mu_j` against a reduced form.
    pub fn residuals(&self, hodge: &Hodge) -> Result<f64> {
        let g = &*self.grid;
        let form = assemble_form(g, self.kind)?;
        let area = g.area();
        let lob = &g.lobatto;
        let n = lob.len();
        let worst = (0..g.blocks.len())
            .into_par_iter()
            .map(|b| {
                let q = hodge.divfree_basis(b);
                let e = &self.blocks[b].vectors;
                // test against every basis function of the discrete space
                let ae = &form.blocks[b] * e;
                let we = DMatrix::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)] * lob.weights[i % n] * area);
                let mut worst: f64 = 0.0;
                for j in 0..e.ncols() {
                    let mu = self.blocks[b].mu[j];
                    let r = q.ad_mul(&(ae.column(j) + we.column(j) * C64::new(1.0 - mu, 0.0)));
                    worst = worst.max(r.norm() / mu);
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }

    /// `max |(e_i, e_j) - delta_ij|` over each block.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = &*self.grid;
        let lob = &g.lobatto;
        let n = lob.len();
        let area = g.area();
        self.blocks
            .par_iter()
            .map(|eb| {
                let e = &eb.vectors;
                let we = DMatrix::from_fn(e.nrows(), e.ncols(), |i, j| e[(i, j)] * lob.weights[i % n] * area);
                let gram = e.ad_mul(&we);
                let mut d: f64 = 0.0;
                for i in 0..gram.nrows() {
                    for j in 0..gram.ncols() {
                        let target = if i == j { 1.0 } else { 0.0 };
                        d = d.max((gram[(i, j)] - C64::new(target, 0.0)).norm());
                    }
                }
                d
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Wavenumber and `mu` of the leading `count` modes.
    pub fn listing(&self, count: usize) -> Vec<(usize, i64, i64, f64)> {
        self.order
            .iter()
            .take(count)
            .enumerate()
            .map(|(j, m)| {
                let w = &self.grid.blocks[m.block];
                (j + 1, w.kx, w.ky, self.blocks[m.block].mu[m.local])
            })
            .collect()
    }
}

/// `sqrt(sum mu^{2s} |c|^2)`.
pub fn coeff_norm_s(blocks: &[EigenBlock], coeffs: &[DVector<C64>], s: f64) -> f64 {
    let mut acc = 0.0;
    for (c, eb) in coeffs.iter().zip(blocks) {
        for (ci, mu) in c.iter().zip(&eb.mu) {
            acc += mu.powf(2.0 * s) * ci.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Eigenbasis truncated to the leading `count` modes (rounded up to close conjugate pairs).
pub fn solve_eigenproblem(hodge: &Hodge, kind: FormKind, count: usize) -> Result<StokesEigenbasis> {
    let full = StokesEigenbasis::compute(hodge, kind)?;
    if count > full.len() {
        return Err(Error::Precondition(format!(
            "requested {count} modes but the discrete space has dimension {}",
            full.len()
        )));
    }
    let keep = full.closed_count(count);
    let mask = full.truncation_mask(keep);
    let blocks: Vec<EigenBlock> = full
        .blocks
        .iter()
        .zip(&mask)
        .map(|(eb, m)| {
            let cols: Vec<usize> = (0..eb.mu.len()).filter(|&l| m[l]).collect();
            EigenBlock {
                mu: cols.iter().map(|&l| eb.mu[l]).collect(),
                vectors: eb.vectors.select_columns(cols.iter()),
            }
        })
        .collect();
    Ok(StokesEigenbasis::from_blocks(full.grid.clone(), kind, blocks))
}

/// Convenience: grid, projectors and eigenbasis in one call.
pub fn eigenbasis_for(grid: &GridRef, kind: FormKind) -> Result<(Hodge, StokesEigenbasis)> {
    let hodge = Hodge::new(grid.clone())?;
    let basis = StokesEigenbasis::compute(&hodge, kind)?;
    Ok((hodge, basis))
}
