//! Scenario runner for the `rch-core` kernel: TOML scenarios, the
//! `simulate`, `hj-check`, `equivalence-demo` and `bracket-verify`
//! commands, and their report files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use commands::{Options, Outcome};
pub use config::ScenarioConfig;
pub use error::CliError;
