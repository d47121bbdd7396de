//! Grid-sampled uncertainty-principle toolkit: fields and norms, an operator
//! zoo with adjoints and inverses, Hadamard-class testing, inequality
//! evaluators, counterexample families and sweep/search drivers.

pub mod classify;
pub mod error;
pub mod explorer;
pub mod families;
pub mod field;
pub mod inequalities;
pub mod operators;

pub use error::{Error, Result, Violation};
