//! Command-line front end: list families, evaluate polynomials, tabulate
//! coefficients and run verification suites.

pub mod cli;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod report;

pub use cli::{run, Cli};
pub use error::CliError;
