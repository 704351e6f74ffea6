//! Command-line front end: configuration loading, orchestration of the
//! simulator, and CSV/JSON output with run manifests.

pub mod args;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod table;

pub use args::{run, Cli};
pub use config::RunConfig;
