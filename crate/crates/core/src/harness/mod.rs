//! Scenario files, the seeded experiment runner and result output.

mod emit;
mod experiment;
pub mod library;
mod scenario;

pub use emit::{
    out_dir, render_svg, write_summary_csv, write_traces, write_trials_csv, SummaryRow,
};
pub use experiment::{
    run_experiment, run_trial, summarize, BatchSummary, ExperimentError, ExperimentSpec,
    TrialRecord,
};
pub use scenario::{
    ArmSpec, ObjectSpec, ObstacleSpec, Scenario, ScenarioError, Setup, ShapeSpec,
};
