//! Parameter sweeps, vanishing-ratio sequences, simplex search, image
//! probes and the Hermite dispersion-growth probe.

mod fit;
mod grids;
mod search;
mod sequence;
mod sweep;

pub use fit::{fit_loglog, linspace_grid, log_grid, monotonicity, LogLogFit, Monotonicity, SweepResult, MIN_FIT_POINTS};
pub use grids::{auto_grid, falpha_grid, gc_axis_points, gc_grid, hermite_grid, FALPHA_POINTS, MAX_AXIS_POINTS, MAX_TOTAL_POINTS};
pub use search::{default_bounds, minimize, SearchConfig, SearchResult, TracePoint, DILATION, MIN_BUDGET};
pub use sequence::{
    critical_beta, predicted_slope, run_sequence, sequence_violations, Proposition, SequenceParams, MIN_C,
};
pub use sweep::{largest_exponent, probe, shapiro_growth, sweep, sweep_point, ProbeResult, SweepConfig};
