//! File formats, map persistence and the experiment runner behind the
//! `ckmbeam` command.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod maps;
pub mod report;
pub mod scenefile;

pub use config::ExperimentConfig;
pub use error::{ConfigError, FormatError};
pub use experiment::{run_experiment, ExperimentError, ExperimentInputs, ExperimentOutput};
