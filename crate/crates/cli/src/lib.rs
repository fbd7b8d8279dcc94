//! Command-line front end: argument definitions, commands and the JSON report schema.

pub mod args;
pub mod commands;
pub mod report;

pub use args::Cli;
pub use commands::{run, Failure, Output};
pub use report::Report;
