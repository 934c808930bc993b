use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;

use super::grid::Grid;
use crate::{Error, Result, C64};

/// Scalar field stored as horizontal Fourier coefficients at every
/// wall-normal Lobatto node. Layout is `(ix, iy, z)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub coeffs: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        Self::with_shape(grid.nx(), grid.ny(), grid.nz())
    }

    pub fn with_shape(nx: usize, ny: usize, nz: usize) -> Self {
        Self {
            nx,
            ny,
            nz,
            coeffs: vec![C64::new(0.0, 0.0); nx * ny * nz],
        }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, z: usize) -> usize {
        (ix * self.ny + iy) * self.nz + z
    }

    /// Wall-normal profile of one wavenumber.
    pub fn column(&self, ix: usize, iy: usize) -> &[C64] {
        let s = self.idx(ix, iy, 0);
        &self.coeffs[s..s + self.nz]
    }

    pub fn column_mut(&mut self, ix: usize, iy: usize) -> &mut [C64] {
        let s = self.idx(ix, iy, 0);
        &mut self.coeffs[s..s + self.nz]
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if (self.nx, self.ny, self.nz) != (grid.nx(), grid.ny(), grid.nz()) {
            return Err(Error::Config(format!(
                "field shape {}x{}x{} does not match grid {}x{}x{}",
                self.nx,
                self.ny,
                self.nz,
                grid.nx(),
                grid.ny(),
                grid.nz()
            )));
        }
        Ok(())
    }

    /// Largest deviation from `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                let (jx, jy) = ((self.nx - ix) % self.nx, (self.ny - iy) % self.ny);
                for z in 0..self.nz {
                    let a = self.coeffs[self.idx(ix, iy, z)];
                    let b = self.coeffs[self.idx(jx, jy, z)];
                    worst = worst.max((a - b.conj()).norm());
                }
            }
        }
        worst
    }
}

/// Physical-space scalar samples on the `nx x ny x nz` tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalScalar {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub values: Vec<f64>,
}

impl PhysicalScalar {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            nz: grid.nz(),
            values: vec![0.0; grid.nx() * grid.ny() * grid.nz()],
        }
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, z: usize) -> usize {
        (ix * self.ny + iy) * self.nz + z
    }

    /// Sample `f(x, y, z)` at the grid points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        let (dx, dy) = (grid.config.lx / grid.nx() as f64, grid.config.ly / grid.ny() as f64);
        for ix in 0..grid.nx() {
            for iy in 0..grid.ny() {
                for (k, &z) in grid.lobatto.nodes.iter().enumerate() {
                    let i = out.idx(ix, iy, k);
                    out.values[i] = f(ix as f64 * dx, iy as f64 * dy, z);
                }
            }
        }
        out
    }
}

/// Vector field in spectral representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub comps: [ScalarField; 3],
}

/// Vector field sampled in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub comps: [PhysicalScalar; 3],
}

impl PhysicalField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            comps: [PhysicalScalar::zeros(grid), PhysicalScalar::zeros(grid), PhysicalScalar::zeros(grid)],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        Self {
            comps: [
                PhysicalScalar::from_fn(grid, |x, y, z| f(x, y, z)[0]),
                PhysicalScalar::from_fn(grid, |x, y, z| f(x, y, z)[1]),
                PhysicalScalar::from_fn(grid, |x, y, z| f(x, y, z)[2]),
            ],
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|a| a.values.iter().map(|p| p.abs()))
            .fold(0.0, f64::max)
    }
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            comps: [ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)],
        }
    }

    pub fn from_components(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        if (x.nx, x.ny, x.nz) != (y.nx, y.ny, y.nz) || (x.nx, x.ny, x.nz) != (z.nx, z.ny, z.nz) {
            return Err(Error::Config("component shapes differ".into()));
        }
        Ok(Self { comps: [x, y, z] })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        let c = &self.comps[0];
        (c.nx, c.ny, c.nz)
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        self.comps.iter().try_for_each(|c| c.check_grid(grid))
    }

    /// Stacked `[u_x; u_y; u_z]` profile of block `b` (length `3 nz`).
    pub fn block(&self, grid: &Grid, b: usize) -> DVector<C64> {
        let w = &grid.blocks[b];
        let nz = grid.nz();
        let mut out = DVector::zeros(3 * nz);
        for c in 0..3 {
            let col = self.comps[c].column(w.ix, w.iy);
            out.rows_mut(c * nz, nz).copy_from_slice(col);
        }
        out
    }

    pub fn set_block(&mut self, grid: &Grid, b: usize, v: &DVector<C64>) {
        let w = &grid.blocks[b];
        let nz = grid.nz();
        for c in 0..3 {
            self.comps[c]
                .column_mut(w.ix, w.iy)
                .copy_from_slice(v.rows(c * nz, nz).as_slice());
        }
    }

    /// Assemble a field from per-block profiles (indexed like `grid.blocks`).
    pub fn from_blocks(grid: &Grid, blocks: &[DVector<C64>]) -> Self {
        let mut f = Self::zeros(grid);
        for (b, v) in blocks.iter().enumerate() {
            f.set_block(grid, b, v);
        }
        f
    }

    pub fn blocks(&self, grid: &Grid) -> Vec<DVector<C64>> {
        (0..grid.blocks.len()).map(|b| self.block(grid, b)).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.comps.iter_mut() {
            c.coeffs.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    pub fn axpy(&mut self, a: f64, x: &Field) {
        for (c, xc) in self.comps.iter_mut().zip(&x.comps) {
            c.coeffs.iter_mut().zip(&xc.coeffs).for_each(|(v, w)| *v += w * a);
        }
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.comps.iter().map(|c| c.hermitian_defect()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.coeffs.iter().map(|v| v.norm()))
            .fold(0.0, f64::max)
    }

    /// Zero every coefficient outside the retained wavenumber set.
    pub fn mask_inactive(&mut self, grid: &Grid) {
        for ix in 0..grid.nx() {
            for iy in 0..grid.ny() {
                if grid.block_at(ix, iy).is_none() {
                    for c in self.comps.iter_mut() {
                        c.column_mut(ix, iy).iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, s: f64) -> Field {
        self.scale(s)
    }
}
