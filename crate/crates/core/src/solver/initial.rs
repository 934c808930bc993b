//! Named initial profiles, projected into the Galerkin space.

use std::f64::consts::PI;

use super::galerkin::{Coeffs, Galerkin};
use super::model::InitialCondition;
use crate::domain::io::read_field;
use crate::domain::{PhysicalField, Transformer};
use crate::fixtures::smooth_random_field;
use crate::hodge::Hodge;
use crate::{Error, Result, C64};

/// Taylor-Green cells in `(x, y)` with a `cos(pi z)` profile across the channel.
pub fn taylor_green(grid: &crate::domain::Grid, amplitude: f64) -> PhysicalField {
    let (lx, ly) = (grid.config.lx, grid.config.ly);
    let (kx, ky) = (2.0 * PI / lx, 2.0 * PI / ly);
    PhysicalField::from_fn(grid, |x, y, z| {
        let m = (PI * z).cos();
        [
            amplitude * (kx * x).cos() * (ky * y).sin() * m,
            -amplitude * (kx / ky) * (kx * x).sin() * (ky * y).cos() * m,
            0.0,
        ]
    })
}

/// Apply `A^{-1}` and restore the original `L^2` norm.
///
/// A projected analytic profile generally violates the slip condition, which
/// leaves slowly decaying coefficients on the stiff modes and an initial
/// layer of width `1 / (nu lambda_max)`. One smoothing step makes the data
/// compatible with the boundary conditions.
pub fn smooth_compatible(gal: &Galerkin, c: &mut Coeffs) {
    let before: f64 = c.iter().map(|x| x.norm_squared()).sum();
    for (x, l) in c.iter_mut().zip(&gal.lambda) {
        for (v, lam) in x.iter_mut().zip(l) {
            *v /= 1.0 + lam;
        }
    }
    let after: f64 = c.iter().map(|x| x.norm_squared()).sum();
    if after > 0.0 {
        let s = C64::new((before / after).sqrt(), 0.0);
        c.iter_mut().for_each(|x| *x *= s);
    }
}

/// `v_m(0) = P_m(P v_0)`; the Taylor-Green profile is additionally smoothed.
pub fn initial_coeffs(ic: &InitialCondition, gal: &Galerkin, hodge: &Hodge) -> Result<Coeffs> {
    let grid = gal.grid();
    match ic {
        InitialCondition::Zero => Ok(gal.zeros()),
        InitialCondition::TaylorGreen { amplitude, perturbation, seed } => {
            let t = Transformer::new(grid);
            let mut f = t.to_spectral(&taylor_green(grid, *amplitude), grid)?;
            if *perturbation != 0.0 {
                f.axpy(*perturbation, &smooth_random_field(grid, *seed));
            }
            let mut c = gal.project(&hodge.leray_project(&f)?)?;
            smooth_compatible(gal, &mut c);
            Ok(c)
        }
        InitialCondition::Mode { index, amplitude } => {
            let basis = &gal.basis;
            if *index >= basis.len() {
                return Err(Error::Config(format!("mode index {index} exceeds the basis size {}", basis.len())));
            }
            let id = basis.order[*index];
            let mut c = gal.zeros();
            c[id.block][id.local] = C64::new(*amplitude, 0.0);
            let p = grid.partner(id.block);
            if p != id.block {
                c[p][id.local] = C64::new(*amplitude, 0.0);
            }
            gal.truncate(&mut c);
            Ok(c)
        }
        InitialCondition::File(path) => {
            let (cfg, f) = read_field(path)?;
            if (cfg.nx, cfg.ny, cfg.nz) != (grid.nx(), grid.ny(), grid.nz()) {
                return Err(Error::Config(format!("initial field {} has a different grid", path.display())));
            }
            gal.project(&hodge.leray_project(&f)?)
        }
    }
}
