//! Command-line driver and file formats for `psc-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod svg;

pub use cli::run;
