//! Exact and empirical tools for the Thue–Morse sequence along cubes: digit-sum
//! kernels, exponential and correlation sums, discrepancy, Dirichlet-type searches,
//! the parameter schedule with its error budget, and a command-line front end.

pub mod cli;
pub mod correlations;
pub mod digits;
pub mod dirichlet;
pub mod discrepancy;
pub mod error;
pub mod numeric;
pub mod pipeline;
pub mod trig;

pub use error::{Error, Result};
