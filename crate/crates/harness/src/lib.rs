//! Experiment registry, run configuration, CSV/SVG output and the shared
//! plumbing behind the `pgames` command-line tool.

pub mod config;
pub mod csv;
mod error;
pub mod experiments;
pub mod generate;
pub mod run;
pub mod svg;

pub use error::{HarnessError, Result};
