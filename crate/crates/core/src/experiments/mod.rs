//! Seeded parameter sweeps and the files they produce.
//!
//! A sweep writes, under its output directory,
//!
//! * `results.csv`: one [`ResultRow`] per (axis value, seed, scheme), sorted
//!   in that order;
//! * `traces/<axis value>_<scheme>_<seed>.csv`: best penalized objective per
//!   iteration;
//! * `manifest.json`: the fully resolved spec and the crate version; feeding
//!   it back to [`run_experiment`] reproduces `results.csv` byte for byte;
//! * `timings.csv`: wall-clock time per cell, kept apart because it is the
//!   only output that changes between identical runs.

mod plot;
mod run;
mod spec;
mod summary;

pub use plot::{emit_plot_data, Figure};
pub use run::{read_results, run_experiment, write_results, ExperimentOutcome, Manifest, ResultRow};
pub use spec::{
    Axis, ExperimentSpec, ScenarioSource, Scheme, SolverSettings, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV,
};
pub use summary::{improvement_pct, summarize, write_summary, Improvement, Summary, SummaryRow};
