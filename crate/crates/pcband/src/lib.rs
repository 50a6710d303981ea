//! Command-line band-structure engine for one-dimensional photonic crystals.
//!
//! The numerics live in [`pcband_core`]; this crate adds profile intake from
//! JSON, a thread pool for frequency sweeps, output formats and the oracle
//! verification report.

pub mod cli;
mod error;
pub mod output;
pub mod parallel;
pub mod schema;
pub mod verify;

pub use error::{CliError, ExitCode};
