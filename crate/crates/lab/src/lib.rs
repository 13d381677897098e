//! Experiment harness around `boxnet-core`: a rayon-backed executor, the
//! text file formats (networks, snapshots, training sets, configs), CSV
//! output, and the command implementations behind the `boxnet` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod report;

pub use error::{LabError, Result};
pub use parallel::Rayon;
