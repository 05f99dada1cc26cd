//! Experiment configuration, matrix execution, result store and reports.

pub mod config;
pub mod kriging;
pub mod report;
pub mod run;
pub mod store;

pub use config::{ApproachKind, ExperimentConfig, Method, ResolvedConfiguration};
pub use kriging::run_kriging_offline;
pub use report::{report, ReportKind, ReportOptions};
pub use run::{run_experiment, RunOptions, RunOutcome, Verb};
pub use store::{ManifestEntry, ResultStore, RunMode, RunStatus};
