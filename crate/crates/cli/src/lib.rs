//! Library side of the `superspin` command: configuration, commands and
//! output formatting. The binary only parses flags and maps exit codes.

pub mod commands;
pub mod config;
pub mod format;

pub use commands::{run, Command, Failure, Format, Output};
pub use config::{parse, RunConfig};
