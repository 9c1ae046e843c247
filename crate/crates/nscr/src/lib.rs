//! Non-negative sparse and collaborative representation coding and
//! classification.
//!
//! The library codes a query against a class-partitioned dictionary of
//! unit-norm training atoms by ADMM on an ℓ2+ℓ1-regularized non-negative
//! least-squares problem, then predicts the class whose atoms reconstruct
//! the query with minimal residual. Baseline coders (ridge, plain
//! non-negative, ℓ1), PCA and split utilities, cross-validation, and slow
//! reference solvers for validation are included.

pub mod classifier;
pub mod data;
pub mod error;
pub mod model_selection;
pub mod oracle;
pub mod parallel;
pub mod solver;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
