//! Tolerances shared by the library checks and the test suites.
//!
//! All values are relative unless noted otherwise.

/// Round trip of the horizontal transform.
pub const FFT_ROUND_TRIP: f64 = 1e-12;

/// Weak divergence accepted for a field flagged as lying in H.
pub const DIVERGENCE: f64 = 1e-10;

/// Pairwise orthogonality of Hodge components, relative to the squared input norm.
pub const ORTHOGONALITY: f64 = 1e-10;

/// Reconstruction residual of the five-way decomposition.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Normal-trace tolerance at the walls.
pub const NORMAL_TRACE: f64 = 1e-10;

/// Symmetry of assembled forms.
pub const FORM_SYMMETRY: f64 = 1e-13;

/// Agreement of the vorticity-slip and Navier-slip forms on flat walls.
pub const FLAT_WALL_FORMS: f64 = 1e-12;

/// Mass orthonormality of computed eigenvectors.
pub const EIGEN_ORTHONORMALITY: f64 = 1e-10;

/// Eigen-residual relative to the eigenvalue.
pub const EIGEN_RESIDUAL: f64 = 1e-8;

/// Lower bound slack on the smallest Stokes eigenvalue `1 + lambda_1 >= 1`.
pub const EIGEN_LOWER_BOUND: f64 = 1e-12;

/// Residual outside the computed eigenbasis span before a truncation warning.
pub const SPAN_RESIDUAL: f64 = 1e-8;

/// Weak-form residual of the non-homogeneous Stokes solve.
pub const STOKES_RESIDUAL: f64 = 1e-10;

/// Weak-form residual of the Robin-type fixed-point solve.
pub const ROBIN_RESIDUAL: f64 = 1e-9;

/// Required contraction factor of the boundary fixed-point map.
pub const CONTRACTION: f64 = 0.9;

/// Filter residual `v - u + alpha P Lap u`.
pub const FILTER_RESIDUAL: f64 = 1e-10;

/// Skew orthogonality of the transport nonlinearity.
pub const SKEW: f64 = 1e-11;

/// Coefficient magnitude treated as blow-up.
pub const BLOW_UP: f64 = 1e12;

/// Geometric discrepancy residual on flat patches.
pub const GD_FLAT: f64 = 1e-12;

/// Geometric discrepancy residual on curved patches.
pub const GD_CURVED: f64 = 1e-8;

/// Tangency of analytic fields supplied to the patch check.
pub const GD_TANGENCY: f64 = 1e-12;
