//! Dense diagnostics for small problems and timing comparisons.

mod compare;
mod ideal;
mod spectral;

pub use compare::{compare_methods, CompareOptions, ComparisonRow, MethodSpec, DEFAULT_REPEATS};
pub use ideal::{make_ideal_dataset, random_ideal_dataset, IdealDataset};
pub use spectral::{effective_spectral_radius, iteration_matrix, SpectralReport};
