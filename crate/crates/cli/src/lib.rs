//! Command-line front end for `boxtail-core`: CSV ingestion, the analysis
//! report, curve exports and SVG figures.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod svg;

pub use cli::{run, Cli};
pub use error::{CliError, Result};
