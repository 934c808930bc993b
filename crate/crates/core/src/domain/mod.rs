//! Channel discretization, fields, transforms and differential operators.

pub mod config;
pub mod field;
pub mod gll;
pub mod grid;
pub mod io;
pub mod ops;
pub mod patch;
pub mod transform;

pub use config::ChannelConfig;
pub use field::{Field, PhysicalField, PhysicalScalar, ScalarField};
pub use gll::Lobatto;
pub use grid::{Grid, GridRef, Wavenumber};
pub use transform::{AnyField, Direction, Transformer};
