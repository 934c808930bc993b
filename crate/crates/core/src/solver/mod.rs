//! Galerkin integration of the NS, LNS-alpha and Leray-alpha systems on the
//! Stokes eigenbasis, with the energy ledger.

pub mod galerkin;
pub mod initial;
pub mod integrate;
pub mod ledger;
pub mod model;

pub use galerkin::{Coeffs, Galerkin};
pub use integrate::{run, setup, RunOutcome, SimState, Simulation};
pub use ledger::{energy_report, EnergyLedger, EnergyReport, EnergyRow};
pub use model::{InitialCondition, ModelKind, SimConfig};

use crate::domain::Field;
use crate::stokes::StokesEigenbasis;
use crate::{Error, Result};

/// `T_alpha v`: every eigen-coefficient divided by `1 + alpha lambda_j`.
pub fn apply_filter(basis: &StokesEigenbasis, alpha: f64, v: &Field) -> Result<Field> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("alpha must be nonnegative, got {alpha}")));
    }
    let mut e = basis.expand(v)?;
    if e.span_residual > crate::tolerances::SPAN_RESIDUAL {
        log::warn!("filter input leaves the computed span (relative residual {:.3e})", e.span_residual);
    }
    for (c, b) in e.coeffs.iter_mut().zip(&basis.blocks) {
        for (cj, mu) in c.iter_mut().zip(&b.mu) {
            *cj /= 1.0 + alpha * (mu - 1.0);
        }
    }
    Ok(basis.synthesize(&e.coeffs))
}

/// `P Delta u = -sum lambda_j (e_j, u) e_j`.
pub fn stokes_laplacian(basis: &StokesEigenbasis, u: &Field) -> Result<Field> {
    let mut e = basis.expand(u)?;
    for (c, b) in e.coeffs.iter_mut().zip(&basis.blocks) {
        for (cj, mu) in c.iter_mut().zip(&b.mu) {
            *cj *= -(mu - 1.0);
        }
    }
    Ok(basis.synthesize(&e.coeffs))
}
