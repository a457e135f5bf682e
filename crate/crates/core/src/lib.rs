//! Clustering-based multilevel preconditioning for ridge normal equations
//! `(X^T X + beta I) w = X^T b`.
//!
//! Features (columns of `X`) are clustered, each cluster becomes one coarse
//! feature, and the coarse problem corrects the fine-level Krylov iterate.

pub mod analysis;
pub mod clustering;
pub mod coarsening;
pub mod error;
pub mod harness;
pub mod io;
pub mod krylov;
pub mod limits;
pub mod sparse;

pub use error::{Error, Result};
pub use sparse::{FeatureMatrix, LinearOperator, RidgeOperator};
