//! Experiment drivers: failure-probability curves and exponential tail fits,
//! the expected-iterations bound, the linear-policy return surface and the
//! end-to-end collect, imitate, evaluate pipeline.

mod complexity;
mod pipeline;
pub mod report;
mod surface;
pub mod svg;
mod tail;

pub use complexity::{
    closed_form_bound, complexity_check, hitting_times, series_terms_for, truncated_series, ComplexityReport,
    HittingTime,
};
pub use pipeline::{end_to_end, PipelineConfig, PipelineOutput, PipelineReport};
pub use surface::{linspace, return_surface, LinearPolicy, ReturnSurface, SurfaceCell};
pub use tail::{
    failure_curve, fit_tail, load_tail_fit, save_tail_fit, measure_failures, non_increasing_up_to_ci, simulate_known_tail, wilson_interval,
    FailurePoint, TailFit, MIN_SEEDS_PER_POINT, Z95,
};
