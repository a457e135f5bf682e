//! Sparse storage, matrix-vector kernels and the implicit ridge operator.

mod csr;
mod ridge;
pub mod vector;

pub use csr::FeatureMatrix;
pub use ridge::{LinearOperator, RidgeOperator};
