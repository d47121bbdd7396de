//! Hermite functions, the two-Gaussian family g_c, the annulus function
//! f_α, Gaussian dilations and the standard test family.

mod closed;
mod hermite;
mod standard;

pub use closed::{
    falpha_radii, gaussian_field, gc_axis, gc_lq_bracket, make_falpha, make_falpha_field, make_gc,
    make_gc_field, ClosedForm, Family, FamilyHandle,
};
pub use hermite::{
    hermite_axis, hermite_norm_asymptotics, hermite_table, hermite_value, hermite_values,
    make_hermite, HermiteAsymptotics, MAX_HERMITE_INDEX,
};
pub use standard::{random_fields, standard_family, STANDARD_RANDOM, STANDARD_SEED};
