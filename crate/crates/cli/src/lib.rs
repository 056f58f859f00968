//! Batch front end of the viewcount threshold game: parse a JSON run
//! config, run one computation, emit CSV or JSON.
//!
//! Units everywhere: time in days, rates in views/day, viewcounts and
//! thresholds in views.

pub mod commands;
pub mod config;
mod error;

pub use config::{Overrides, RunConfig, Sweep};
pub use error::{CliError, Result};
