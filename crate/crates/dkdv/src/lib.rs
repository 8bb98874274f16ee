//! Command-line driver for `dkdv-core`: configuration, dispatch, and
//! versioned JSON reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod staircase_file;

pub use commands::{run, Output, RunError};
pub use config::{Command, RunConfig};
pub use report::ReportEnvelope;
