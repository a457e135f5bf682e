use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clustering::{ClusterAssignment, Prototypes};
use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

/// Feature matrix whose columns are exact copies of a few base columns.
#[derive(Clone, Debug)]
pub struct IdealDataset {
    pub base: FeatureMatrix,
    pub multiplicities: Vec<usize>,
    pub matrix: FeatureMatrix,
    /// Cluster `c` holds every copy of base column `c`; its prototype is the first copy.
    pub assignment: ClusterAssignment,
}

/// Duplicates base column `c` `multiplicities[c]` times.
///
/// With a seed the columns are shuffled; without one the copies of each base
/// column are contiguous and in base order.
pub fn make_ideal_dataset(base: &FeatureMatrix, multiplicities: &[usize], seed: Option<u64>) -> Result<IdealDataset> {
    let fc = base.n_features();
    if multiplicities.len() != fc {
        return Err(Error::DimensionMismatch {
            context: "ideal dataset multiplicities",
            expected: fc,
            actual: multiplicities.len(),
        });
    }
    if let Some(c) = multiplicities.iter().position(|&m| m == 0) {
        return Err(Error::InvalidArgument(format!("multiplicity of base column {c} is 0")));
    }
    let mut source: Vec<usize> = multiplicities
        .iter()
        .enumerate()
        .flat_map(|(c, &m)| std::iter::repeat_n(c, m))
        .collect();
    if let Some(seed) = seed {
        source.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }

    let base_t = base.transpose();
    let mut triplets = Vec::new();
    for (j, &c) in source.iter().enumerate() {
        let (rows, vals) = base_t.row(c);
        triplets.extend(rows.iter().zip(vals).map(|(&i, &v)| (i, j, v)));
    }
    let matrix = FeatureMatrix::from_triplets(base.n_samples(), source.len(), &triplets)?;

    let mut protos = vec![usize::MAX; fc];
    for (j, &c) in source.iter().enumerate() {
        if protos[c] == usize::MAX {
            protos[c] = j;
        }
    }
    let assignment = ClusterAssignment::new(source, fc, Prototypes::Features(protos))?;
    Ok(IdealDataset {
        base: base.clone(),
        multiplicities: multiplicities.to_vec(),
        matrix,
        assignment,
    })
}

/// Random ideal dataset: `n_base` dense uniform base columns in `[-1, 1)`
/// with multiplicities drawn from `1..=max_multiplicity`, shuffled.
pub fn random_ideal_dataset(n_samples: usize, n_base: usize, max_multiplicity: usize, seed: u64) -> Result<IdealDataset> {
    if n_samples == 0 || n_base == 0 || max_multiplicity == 0 {
        return Err(Error::InvalidArgument("ideal dataset sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::with_capacity(n_samples * n_base);
    for i in 0..n_samples {
        for j in 0..n_base {
            triplets.push((i, j, rng.gen_range(-1.0..1.0)));
        }
    }
    let base = FeatureMatrix::from_triplets(n_samples, n_base, &triplets)?;
    let mult: Vec<usize> = (0..n_base).map(|_| rng.gen_range(1..=max_multiplicity)).collect();
    make_ideal_dataset(&base, &mult, Some(rng.gen()))
}
