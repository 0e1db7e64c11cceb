//! JSON file formats and the `opman` command-line tool for
//! [`opman_core`] manifolds, gauges, sections and gauge fields.

pub mod cli;
mod error;
pub mod format;
pub mod io;

pub use error::{Error, Result};
