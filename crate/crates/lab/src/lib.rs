//! Driver for `sil-core`: experiment configs, run manifests, CSV output,
//! gnuplot scripts, convergence studies and invariant suites.
//!
//! The `sil` binary exposes each piece as a subcommand; everything it does
//! is also callable from here.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod commands;
pub mod config;
pub mod error;
pub mod invariants;
pub mod manifest;
pub mod pipeline;
pub mod plots;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult, Outcome};
