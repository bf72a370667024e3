//! File IO and command-line front end for `rxyjpeg-core`.

pub mod batch;
pub mod cli;
pub mod error;
pub mod io;

pub use crate::cli::{run, Cli};
pub use crate::error::{exit, CliError};
