//! File formats, the simulation harness and the worked example for the
//! rank-metric (P)UM codes of `rankconv-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod simulate;
pub mod table3;

pub use error::{CliError, Result};
