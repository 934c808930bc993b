//! Spectral Galerkin solvers for the Lagrangian averaged Navier-Stokes-alpha
//! model, the Leray-alpha model and the limiting Navier-Stokes system in a
//! periodic channel with vorticity-slip walls.
//!
//! The crate is layered bottom-up:
//!
//! * [`domain`] holds the channel discretization (Fourier in the periodic
//!   directions, Legendre-Gauss-Lobatto nodal Galerkin across the channel),
//!   the differential operators, the discrete inner products and the
//!   surface-patch geometry check.
//! * [`hodge`] splits fields into the five orthogonal pieces
//!   `FH + HH + CG + HG + GG` and provides the Leray projector.
//! * [`stokes`] assembles the slip Stokes forms, computes their eigenbasis,
//!   fractional powers and solves the non-homogeneous boundary problems.
//! * [`solver`] advances the Galerkin system for the three models and keeps
//!   the energy ledger.
//! * [`experiments`] runs vanishing-alpha sweeps and fits convergence rates.

pub mod domain;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod hodge;
pub mod solver;
pub mod stokes;
pub mod tolerances;

pub use error::{Error, Result};

/// Complex scalar used for all spectral coefficients.
pub type C64 = nalgebra::Complex<f64>;
