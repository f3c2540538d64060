//! Library half of the `qbroadcast` command-line tool: state files,
//! generators, reports and the command implementations.

pub mod commands;
pub mod demo;
pub mod generate;
pub mod report;
pub mod statefile;

pub use commands::{CliError, LoadedState, MeasureQuantity, Settings};
pub use demo::{demo, DemoSizes, SUITES};
pub use report::Report;
pub use statefile::{InvalidState, StateFile};
