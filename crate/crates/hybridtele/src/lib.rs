//! Command-line layer over `hybridtele-core`: single-point queries, sweeps,
//! figure datasets, threshold searches and the validation report.

pub mod error;
pub mod eval;
pub mod figure;
pub mod report;
pub mod sweep;
pub mod threshold;

pub use error::CliError;
