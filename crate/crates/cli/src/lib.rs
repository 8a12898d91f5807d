//! Input files and JSON reports for the `apseq` command-line tool.

pub mod commands;
pub mod input;

pub use commands::{run, CliError, Command};
pub use input::{parse_input, serialize, AnalysisInput, ParseError};
