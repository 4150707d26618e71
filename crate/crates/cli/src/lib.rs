//! Experiment front end for `mbfevo`: declarative experiment matrices, batch
//! execution with CSV/JSON output, penalty-distribution sampling, reference
//! tables and single-function analysis.

pub mod analyze;
pub mod config;
mod error;
pub mod experiment;
pub mod penalty;
pub mod reference;

pub use error::{CliError, Result};
