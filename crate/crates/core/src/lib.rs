//! Sampling and diagnosing the weak Pareto solution mappings of vector
//! optimization problems through weighted-sum and weighted-max scalarizations.

pub mod cli;
pub mod diagnose;
pub mod error;
pub mod expr;
pub mod json;
pub mod mapping;
pub mod oracle;
pub mod problem;
pub mod scalarize;
pub mod solver;
pub mod svg;

pub use error::{Error, Result};
pub use expr::Expr;
