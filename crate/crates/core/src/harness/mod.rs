//! Deterministic experiment runner and studies built on it.

mod grid;
mod metrics;
mod run;
mod scaling;
mod spec;

pub use grid::{grid_search_baseline, grid_search_spec, GridRow, GridSearch, LR_GRID};
pub use metrics::{convergence_metrics, ConvergenceMetrics, CONVERGENCE_TOL};
pub use run::{run_all, run_experiment, with_jobs, RunResult, DIVERGENCE_LOSS};
pub use scaling::{
    error_scaling_study, log_log_slope, precision_scaling_study, ErrorScaling, PrecisionRow, PrecisionScaling,
    ScalingRow,
};
pub use spec::{
    mix_seed, EtaSource, ExperimentSpec, GenSpec, OptimizerSpec, PostSpec, ProblemSpec, BEALE_START,
    ROSENBROCK_START,
};
