//! Command-line front end: configuration, subcommands and the self-test suite.

pub mod checks;
pub mod commands;
pub mod config;
