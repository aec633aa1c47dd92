//! File formats, JSON reports and the `fpindex` command line on top of
//! `fpindex-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod input;
pub mod json;
pub mod parallel;

pub use error::CliError;
