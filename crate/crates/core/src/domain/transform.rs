//! Horizontal Fourier transforms between spectral and physical fields.
//!
//! Convention: `f(x, y) = sum_k f_k exp(i k.x)` and
//! `f_k = (1 / (nx ny)) sum_x f(x) exp(-i k.x)`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::field::{Field, PhysicalField, PhysicalScalar, ScalarField};
use super::grid::Grid;
use crate::{Error, Result, C64};

/// Transform direction for [`Transformer::transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToPhysical,
    ToSpectral,
}

/// Either representation of a vector field.
#[derive(Debug, Clone)]
pub enum AnyField {
    Spectral(Field),
    Physical(PhysicalField),
}

/// Planned 2-D FFTs for one grid.
pub struct Transformer {
    nx: usize,
    ny: usize,
    nz: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transformer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Transformer({}x{}x{})", self.nx, self.ny, self.nz)
    }
}

impl Transformer {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx: grid.nx(),
            ny: grid.ny(),
            nz: grid.nz(),
            fwd_x: planner.plan_fft(grid.nx(), FftDirection::Forward),
            fwd_y: planner.plan_fft(grid.ny(), FftDirection::Forward),
            inv_x: planner.plan_fft(grid.nx(), FftDirection::Inverse),
            inv_y: planner.plan_fft(grid.ny(), FftDirection::Inverse),
        }
    }

    fn check(&self, nx: usize, ny: usize, nz: usize) -> Result<()> {
        if (nx, ny, nz) != (self.nx, self.ny, self.nz) {
            return Err(Error::Config(format!(
                "field {}x{}x{} does not match transform {}x{}x{}",
                nx, ny, nz, self.nx, self.ny, self.nz
            )));
        }
        Ok(())
    }

    /// In-place 2-D FFT of one `nx x ny` plane stored row-major.
    fn plane(&self, buf: &mut [C64], forward: bool) {
        let (fx, fy) = if forward {
            (&self.fwd_x, &self.fwd_y)
        } else {
            (&self.inv_x, &self.inv_y)
        };
        for row in buf.chunks_exact_mut(self.ny) {
            fy.process(row);
        }
        let mut col = vec![C64::new(0.0, 0.0); self.nx];
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                col[ix] = buf[ix * self.ny + iy];
            }
            fx.process(&mut col);
            for ix in 0..self.nx {
                buf[ix * self.ny + iy] = col[ix];
            }
        }
    }

    pub fn scalar_to_physical(&self, s: &ScalarField) -> Result<PhysicalScalar> {
        self.check(s.nx, s.ny, s.nz)?;
        let planes: Vec<Vec<C64>> = (0..self.nz)
            .into_par_iter()
            .map(|z| {
                let mut buf: Vec<C64> = (0..self.nx * self.ny)
                    .map(|p| s.coeffs[p * self.nz + z])
                    .collect();
                self.plane(&mut buf, false);
                buf
            })
            .collect();
        let mut out = PhysicalScalar {
            nx: self.nx,
            ny: self.ny,
            nz: self.nz,
            values: vec![0.0; self.nx * self.ny * self.nz],
        };
        for (z, plane) in planes.iter().enumerate() {
            for (p, v) in plane.iter().enumerate() {
                out.values[p * self.nz + z] = v.re;
            }
        }
        Ok(out)
    }

    /// Forward transform; inactive wavenumbers are zeroed when `mask` is given.
    pub fn scalar_to_spectral(&self, s: &PhysicalScalar, mask: Option<&Grid>) -> Result<ScalarField> {
        self.check(s.nx, s.ny, s.nz)?;
        let norm = 1.0 / (self.nx * self.ny) as f64;
        let planes: Vec<Vec<C64>> = (0..self.nz)
            .into_par_iter()
            .map(|z| {
                let mut buf: Vec<C64> = (0..self.nx * self.ny)
                    .map(|p| C64::new(s.values[p * self.nz + z], 0.0))
                    .collect();
                self.plane(&mut buf, true);
                buf.iter_mut().for_each(|v| *v *= norm);
                buf
            })
            .collect();
        let mut out = ScalarField::with_shape(self.nx, self.ny, self.nz);
        for (z, plane) in planes.iter().enumerate() {
            for (p, v) in plane.iter().enumerate() {
                out.coeffs[p * self.nz + z] = *v;
            }
        }
        if let Some(grid) = mask {
            for ix in 0..self.nx {
                for iy in 0..self.ny {
                    if grid.block_at(ix, iy).is_none() {
                        out.column_mut(ix, iy).iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_physical(&self, f: &Field) -> Result<PhysicalField> {
        Ok(PhysicalField {
            comps: [
                self.scalar_to_physical(&f.comps[0])?,
                self.scalar_to_physical(&f.comps[1])?,
                self.scalar_to_physical(&f.comps[2])?,
            ],
        })
    }

    /// Forward transform applying the 2/3 mask when the grid has dealiasing on.
    pub fn to_spectral(&self, f: &PhysicalField, grid: &Grid) -> Result<Field> {
        let mask = grid.config.dealias.then_some(grid);
        Ok(Field {
            comps: [
                self.scalar_to_spectral(&f.comps[0], mask)?,
                self.scalar_to_spectral(&f.comps[1], mask)?,
                self.scalar_to_spectral(&f.comps[2], mask)?,
            ],
        })
    }

    pub fn transform(&self, f: &AnyField, dir: Direction, grid: &Grid) -> Result<AnyField> {
        match (f, dir) {
            (AnyField::Spectral(s), Direction::ToPhysical) => Ok(AnyField::Physical(self.to_physical(s)?)),
            (AnyField::Physical(p), Direction::ToSpectral) => Ok(AnyField::Spectral(self.to_spectral(p, grid)?)),
            (other, _) => Ok(other.clone()),
        }
    }
}
