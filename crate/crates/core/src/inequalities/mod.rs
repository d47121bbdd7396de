//! Evaluators for the uncertainty functionals and inequalities.

mod evaluate;
mod spec;

pub use evaluate::{
    check_embedding, check_fractional_laplacian, check_generalized_up, check_hausdorff_young, check_heisenberg_nd,
    check_weighted_up, entropic_bound, entropic_gap, evaluate, evaluate_batch, functional_F, functional_G,
    generalized_up_bound, hausdorff_young_bound, heisenberg_bound, norm_up, primary_up, sobolev_rhs_general,
    sobolev_rhs_simple, VerificationReport, DEFAULT_TOLERANCE, REPORT_SCHEMA_VERSION,
};
pub use spec::{heisenberg_window, FunctionalSpec, Variant, ALPHA_GUARD, BALANCE_TOL};
