//! Experiment specs, sweep execution and result files for `qnoc-core`.

pub mod config;
pub mod error;
pub mod experiment;
pub mod plotdata;
pub mod spec;

pub use config::KeyValues;
pub use error::{CliError, Result};
pub use experiment::{execute, run_experiment, summarize, Outcome, Row, Summary};
pub use plotdata::emit_plot_data;
pub use spec::{ExperimentSpec, Format, Shape, StrategySet, Workload};
