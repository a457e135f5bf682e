//! Prolongation operators and coarse feature matrices.
//!
//! A cluster assignment becomes a sparse `F x F_C` prolongation `P`; the
//! coarse level keeps `X_c = X P`, so the Galerkin operator
//! `P^T (X^T X + beta I) P = X_c^T X_c + beta P^T P` never needs `X^T X`.

mod eigen;
mod least_squares;
mod level;
mod prolongation;

pub use eigen::{top_eigenpairs, EigenBasis};
pub use least_squares::{build_ls_interpolation, ls_rows, LsRow, LsVariant};
pub use level::{coarsen, multiply_prolongation, CoarseLevel};
pub use prolongation::{build_adjusted_average, build_plain_average, InterpolationKind, Prolongation};
