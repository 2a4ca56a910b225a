//! Command-line front end: scenario configuration, CSV ingestion, the
//! diagnostics pipeline and deterministic report output.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use scenario::{run_scenario, Classification, RunReport};
