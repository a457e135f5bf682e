//! Matrix Market I/O, right-hand-side generation and the dataset catalogue.

mod datasets;
mod matrix_market;
mod rhs;

pub use datasets::{data_dir, DatasetInfo, DATASETS};
pub use matrix_market::{parse_matrix_market, read_matrix_market, write_matrix_market, MmField, MmSymmetry};
pub use rhs::{generate_rhs, splitmix64_at, standard_normal, RhsDistribution, RhsSpec, RHS_GENERATOR};
