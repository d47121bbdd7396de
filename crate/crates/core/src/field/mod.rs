//! Grid-sampled fields, rectangle-rule norms, moments, entropy and dilation.

mod exponent;
mod grid;
mod quadrature;
mod sampled;
mod tensor;

pub use exponent::{babenko_beckner, Exponent};
pub use grid::GridSpec;
pub use quadrature::{dilate, entropy, lp_norm, variance, weighted_norm, NormResult, Quadrature};
pub use sampled::SampledField;
pub use tensor::TensorPower;
