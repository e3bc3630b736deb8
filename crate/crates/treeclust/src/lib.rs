//! File formats, experiment runner and command-line front end for
//! attributed-tree clustering. The numerics live in `treeclust-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod forest_io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
