//! Slip Stokes operators: form assembly, eigenbasis, fractional powers,
//! boundary solves and the on-disk eigenbasis cache.

pub mod cache;
pub mod eigen;
pub mod form;
pub mod solve;

pub use eigen::{coeff_norm_s, eigenbasis_for, solve_eigenproblem, EigenBlock, Expansion, ModeId, StokesEigenbasis};
pub use form::{assemble_form, AssembledForm, FormKind};
pub use solve::{BoundaryData, RobinSolution, StokesSolver};

/// CSV listing `index,kx,ky,eigenvalue` of the leading modes.
pub fn spectrum_csv(basis: &StokesEigenbasis, count: usize) -> String {
    let mut out = String::from("index,kx,ky,eigenvalue\n");
    for (j, kx, ky, mu) in basis.listing(count) {
        out.push_str(&format!("{j},{kx},{ky},{mu:?}\n"));
    }
    out
}
