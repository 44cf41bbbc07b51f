//! Experiment drivers behind the `quadmod` binary: table and grid sweeps
//! over the closed-form and finite element moduli, CSV reports and SVG
//! heatmaps.

pub mod commands;
pub mod error;
pub mod report;
pub mod shapes;
pub mod svg;

pub use error::{CliError, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK};
pub use report::GridReport;
