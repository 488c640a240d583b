//! Command-line front end for `krein`: evaluation sweeps, traces, plot data and acceptance checks.
//!
//! Exit codes: 0 success, 1 usage, 2 domain error, 3 numerical non-convergence or failed checks.

pub mod app;
pub mod config;
pub mod error;
pub mod figure;
pub mod grid;
pub mod output;
pub mod verify;

pub use app::run;
pub use error::AppError;
