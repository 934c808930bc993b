//! Non-homogeneous boundary solves for the Stokes system.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use super::form::{assemble_form, wall_matrix, FormKind};
use crate::domain::ops::block_curl;
use crate::domain::{Field, Grid};
use crate::hodge::{basis, Hodge};
use crate::{tolerances, Error, Result, C64};

/// Tangential wall data `b`, one `[b_x, b_y]` pair per wall and block.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    /// `[bottom, top]` per block.
    pub walls: Vec<[[C64; 2]; 2]>,
}

impl BoundaryData {
    pub fn zero(grid: &Grid) -> Self {
        Self { walls: vec![[[C64::new(0.0, 0.0); 2]; 2]; grid.blocks.len()] }
    }

    /// `n x curl u - beta u` on both walls, the data a field produces under the Robin condition.
    pub fn from_field(grid: &Grid, u: &Field, beta: f64) -> Result<Self> {
        u.check_grid(grid)?;
        let n = grid.nz();
        let walls = (0..grid.blocks.len())
            .map(|b| {
                let ub = u.block(grid, b);
                let om = block_curl(&grid.blocks[b], &grid.lobatto, &ub);
                let bottom = [om[n] - ub[0] * beta, -om[0] - ub[n] * beta];
                let top = [-om[2 * n - 1] - ub[n - 1] * beta, om[n - 1] - ub[2 * n - 1] * beta];
                [bottom, top]
            })
            .collect();
        Ok(Self { walls })
    }

    /// Stacked nodal vector carrying the data at the wall nodes.
    fn block_vector(&self, b: usize, n: usize) -> DVector<C64> {
        let mut r = DVector::zeros(3 * n);
        let [bot, top] = self.walls[b];
        for c in 0..2 {
            r[c * n] = bot[c];
            r[c * n + n - 1] = top[c];
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.walls.iter().all(|w| w.iter().flatten().all(|c| c.norm() == 0.0))
    }
}

/// Outcome of a Robin solve.
#[derive(Debug, Clone)]
pub struct RobinSolution {
    pub u: Field,
    /// Shift used for the fixed-point map.
    pub lambda: f64,
    /// `(lambda, measured contraction factor)` for every shift tried.
    pub history: Vec<(f64, f64)>,
    pub iterations: usize,
    /// Relative weak residual over the discrete test space.
    pub residual: f64,
}

/// Reduced operators for boundary solves on one grid.
#[derive(Debug)]
pub struct StokesSolver<'a> {
    pub hodge: &'a Hodge,
    pub beta: f64,
    /// `Q^* A_0 Q` (curl-curl only).
    k0: Vec<DMatrix<C64>>,
    /// `Q^* (area * wall trace) Q`.
    wall: Vec<DMatrix<C64>>,
}

fn cholesky(a: DMatrix<C64>) -> Result<Cholesky<C64, Dyn>> {
    Cholesky::new(a).ok_or_else(|| Error::Numerical("block system is not positive definite".into()))
}

fn apply_blocks(ops: &[DMatrix<C64>], y: &[DVector<C64>]) -> Vec<DVector<C64>> {
    ops.par_iter().zip(y.par_iter()).map(|(a, v)| a * v).collect()
}

fn sq_norm(y: &[DVector<C64>]) -> f64 {
    y.iter().map(|v| v.norm_squared()).sum()
}

impl<'a> StokesSolver<'a> {
    pub fn new(hodge: &'a Hodge, beta: f64) -> Result<Self> {
        FormKind::Vsb { beta }.validate()?;
        let g = hodge.grid();
        let form = assemble_form(g, FormKind::Vsb { beta: 0.0 })?;
        let k0 = form.reduce(hodge);
        let wm = wall_matrix(&g.lobatto, 3) * C64::new(g.area(), 0.0);
        let wall = (0..g.blocks.len())
            .into_par_iter()
            .map(|b| {
                let q = hodge.divfree_basis(b);
                q.ad_mul(&(&wm * q))
            })
            .collect();
        Ok(Self { hodge, beta, k0, wall })
    }

    fn grid(&self) -> &Grid {
        self.hodge.grid()
    }

    /// Load `(f, phi) - int b . phi` in basis coordinates.
    fn load(&self, f: &Field, bd: &BoundaryData) -> Result<Vec<DVector<C64>>> {
        let g = self.grid();
        f.check_grid(g)?;
        if bd.walls.len() != g.blocks.len() {
            return Err(Error::Config("boundary data does not match the grid".into()));
        }
        let n = g.nz();
        let area = g.area();
        Ok((0..g.blocks.len())
            .into_par_iter()
            .map(|b| {
                let q = self.hodge.divfree_basis(b);
                let fb = basis::coords(q, &g.lobatto, area, &f.block(g, b));
                fb - q.ad_mul(&bd.block_vector(b, n)) * C64::new(area, 0.0)
            })
            .collect())
    }

    fn system(&self, b: usize, shift: f64, beta: f64) -> DMatrix<C64> {
        let mut a = &self.k0[b] + &self.wall[b] * C64::new(beta, 0.0);
        for i in 0..a.nrows() {
            a[(i, i)] += shift;
        }
        a
    }

    fn synthesize(&self, y: &[DVector<C64>]) -> Field {
        let g = self.grid();
        let blocks: Vec<DVector<C64>> = y.iter().enumerate().map(|(b, v)| self.hodge.divfree_basis(b) * v).collect();
        Field::from_blocks(g, &blocks)
    }

    fn solve_shifted(&self, shift: f64, beta: f64, rhs: &[DVector<C64>]) -> Result<Vec<DVector<C64>>> {
        (0..rhs.len())
            .into_par_iter()
            .map(|b| Ok(cholesky(self.system(b, shift, beta))?.solve(&rhs[b])))
            .collect()
    }

    fn weak_residual(&self, shift: f64, beta: f64, y: &[DVector<C64>], rhs: &[DVector<C64>]) -> f64 {
        let mut num = 0.0;
        for (b, (v, r)) in y.iter().zip(rhs).enumerate() {
            num += (self.system(b, shift, beta) * v - r).norm_squared();
        }
        let den = sq_norm(rhs);
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            num.sqrt()
        }
    }

    /// `lambda u - Delta u + grad p = f`, `n x curl u = b` on the walls.
    pub fn solve_stokes(&self, lambda: f64, f: &Field, bd: &BoundaryData) -> Result<(Field, f64)> {
        if !(lambda > 0.0) {
            return Err(Error::Precondition(format!("shift must be positive, got {lambda}")));
        }
        let rhs = self.load(f, bd)?;
        let y = self.solve_shifted(lambda, 0.0, &rhs)?;
        let res = self.weak_residual(lambda, 0.0, &y, &rhs);
        Ok((self.synthesize(&y), res))
    }

    /// Direct solve of `(u, phi) + a_beta(u, phi) + int b . phi = (f, phi)`.
    pub fn solve_direct(&self, f: &Field, bd: &BoundaryData) -> Result<(Field, f64)> {
        let rhs = self.load(f, bd)?;
        let y = self.solve_shifted(1.0, self.beta, &rhs)?;
        let res = self.weak_residual(1.0, self.beta, &y, &rhs);
        Ok((self.synthesize(&y), res))
    }

    /// `(|y| * (|y|^2 + a_0(y, y))^{1/2})^{1/2}`, an interpolation proxy for the `H^{1/2}` norm.
    pub fn half_norm_proxy(&self, y: &[DVector<C64>]) -> f64 {
        let l2 = sq_norm(y);
        let a0: f64 = y.iter().zip(&self.k0).map(|(v, k)| v.dotc(&(k * v)).re).sum();
        (l2.sqrt() * (l2 + a0).max(0.0).sqrt()).sqrt()
    }

    /// Contraction factor of the map `v -> T v` at shift `lambda`, by power iteration.
    pub fn contraction_factor(&self, lambda: f64, iterations: usize) -> Result<f64> {
        let g = self.grid();
        let chol: Vec<Cholesky<C64, Dyn>> =
            (0..g.blocks.len()).into_par_iter().map(|b| cholesky(self.system(b, lambda, 0.0))).collect::<Result<_>>()?;
        let mut d: Vec<DVector<C64>> = self.k0.iter().map(|k| DVector::from_element(k.nrows(), C64::new(1.0, 0.0))).collect();
        let mut factor = 0.0;
        for _ in 0..iterations {
            let before = self.half_norm_proxy(&d);
            if before == 0.0 {
                return Ok(0.0);
            }
            let wd = apply_blocks(&self.wall, &d);
            d = chol.par_iter().zip(wd.par_iter()).map(|(c, v)| c.solve(v) * C64::new(-self.beta, 0.0)).collect();
            factor = self.half_norm_proxy(&d) / before;
        }
        Ok(factor)
    }

    /// Robin problem `(u, phi) + a_beta(u, phi) + int b . phi = (f, phi)` by the shifted fixed-point construction.
    pub fn solve_stokes_robin(&self, f: &Field, bd: &BoundaryData) -> Result<RobinSolution> {
        let g = self.grid();
        let rhs = self.load(f, bd)?;
        let n = g.nz();
        let area = g.area();
        // boundary load alone drives the fixed point
        let bload: Vec<DVector<C64>> = (0..g.blocks.len())
            .map(|b| self.hodge.divfree_basis(b).ad_mul(&bd.block_vector(b, n)) * C64::new(-area, 0.0))
            .collect();
        let mut history = Vec::new();
        let mut lambda: f64 = 1.0;
        let probe = 6;
        for _ in 0..16 {
            let chol: Vec<Cholesky<C64, Dyn>> = (0..g.blocks.len())
                .into_par_iter()
                .map(|b| cholesky(self.system(b, lambda, 0.0)))
                .collect::<Result<_>>()?;
            let map = |v: &[DVector<C64>]| -> Vec<DVector<C64>> {
                let wv = apply_blocks(&self.wall, v);
                (0..v.len())
                    .into_par_iter()
                    .map(|b| chol[b].solve(&(&bload[b] - &wv[b] * C64::new(self.beta, 0.0))))
                    .collect()
            };
            let mut psi: Vec<DVector<C64>> = bload.iter().map(|v| DVector::zeros(v.len())).collect();
            let mut prev_step = f64::NAN;
            let mut factor = 0.0;
            let mut first = 0.0;
            let mut converged = false;
            let mut iterations = 0;
            for it in 0..5000 {
                let next = map(&psi);
                let diff: Vec<DVector<C64>> = next.iter().zip(&psi).map(|(a, b)| a - b).collect();
                let step = self.half_norm_proxy(&diff);
                psi = next;
                iterations = it + 1;
                if it == 0 {
                    first = step;
                } else if prev_step > 0.0 {
                    factor = step / prev_step;
                }
                if it + 1 == probe && factor > tolerances::CONTRACTION {
                    break;
                }
                if step <= 1e-15 * first.max(f64::MIN_POSITIVE) || step == 0.0 {
                    converged = true;
                    break;
                }
                prev_step = step;
            }
            history.push((lambda, factor));
            if !converged {
                lambda *= 4.0;
                continue;
            }
            // v carries the volume load; the shift defect of psi moves to the right side
            let corr: Vec<DVector<C64>> = (0..rhs.len())
                .map(|b| &rhs[b] - &bload[b] - &psi[b] * C64::new(1.0 - lambda, 0.0))
                .collect();
            let v = self.solve_shifted(1.0, self.beta, &corr)?;
            let y: Vec<DVector<C64>> = v.iter().zip(&psi).map(|(a, b)| a + b).collect();
            let residual = self.weak_residual(1.0, self.beta, &y, &rhs);
            return Ok(RobinSolution { u: self.synthesize(&y), lambda, history, iterations, residual });
        }
        Err(Error::Numerical(format!("fixed-point map failed to contract; shift history {history:?}")))
    }
}
