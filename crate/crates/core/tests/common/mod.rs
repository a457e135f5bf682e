#![allow(dead_code)]

use std::path::PathBuf;

use featmg::FeatureMatrix;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Directory holding benchmark matrices: `FEATMG_DATA_DIR` or the workspace `data/`.
pub fn data_dir() -> PathBuf {
    std::env::var_os("FEATMG_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

/// Loads `<data_dir>/<file>`, or explains why it is unavailable.
pub fn load_dataset(file: &str) -> Result<FeatureMatrix, String> {
    let path = data_dir().join(file);
    if !path.is_file() {
        return Err(format!(
            "dataset not available: {} is missing (see `featmg datasets`)",
            path.display()
        ));
    }
    featmg::io::read_matrix_market(&path).map_err(|e| e.to_string())
}

/// Random sparse matrix with roughly `density` of its entries uniform in `[-1, 1)`.
pub fn random_sparse(n: usize, f: usize, density: f64, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..f {
            if rng.gen::<f64>() < density {
                t.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    FeatureMatrix::from_triplets(n, f, &t).unwrap()
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Dense `X^T X + beta I`.
pub fn dense_ridge(x: &FeatureMatrix, beta: f64) -> DMatrix<f64> {
    let d = x.to_dense();
    let mut a = d.transpose() * &d;
    for i in 0..a.nrows() {
        a[(i, i)] += beta;
    }
    a
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn sym_eigenvalues_desc(a: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    a.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .expect("nonsingular")
        .iter()
        .copied()
        .collect()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// True when two label vectors describe the same partition, up to relabeling.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&x, &y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}
