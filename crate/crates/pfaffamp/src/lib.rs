//! Std companion of `pfaffamp-core`: JSON state and basis files, CSV
//! reports, thread-count independent batch evaluation, the validation
//! suite and the `pfaffamp` command-line tool.

pub mod batch;
pub mod cli;
pub mod error;
pub mod formats;
pub mod report;
pub mod validate;

pub use error::{CliError, Result};
