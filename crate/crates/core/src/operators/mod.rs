//! Operator descriptors with structural adjoints and inverses, and their
//! application to sampled fields.

mod diffeo;
mod fourier;
mod fractional;
mod linear;
mod matrix;
mod multipliers;

pub use diffeo::{apply_diffeo, interpolate, DiffeoSpec};
pub use fourier::{reciprocal_grid, transform, Convention};
pub use fractional::{apply_fractional, basis_size, truncation_residual, FRACTIONAL_BASIS};
pub use linear::{LinearOperator, OperatorKind};
pub use matrix::ComplexMatrix;
pub use multipliers::{Partition, PhaseSpec, Regions};
