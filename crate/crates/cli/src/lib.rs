pub mod app;
pub mod input;
pub mod report;

pub use app::{run, Cli, CliError};
