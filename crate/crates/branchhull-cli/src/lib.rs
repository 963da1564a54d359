//! Library surface of the CLI crate: file formats and subcommand runners,
//! kept callable so integration tests can drive them directly.

pub mod commands;
pub mod formats;
