//! File formats, report assembly, and command implementations behind the
//! `tempaudit` binary.

pub mod commands;
pub mod error;
pub mod files;
pub mod report;

pub use error::{CliError, Result};
