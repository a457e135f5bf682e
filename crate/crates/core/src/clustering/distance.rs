use serde::{Deserialize, Serialize};

use crate::sparse::FeatureMatrix;

/// Dissimilarity between feature columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMeasure {
    #[default]
    Euclidean,
    /// `1 - cos(angle)`; zero columns are at distance 0 from each other and 1 from anything else.
    Cosine,
    /// Jaccard distance of the nonzero patterns.
    Jaccard,
}

impl std::str::FromStr for DistanceMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "cosine" => Ok(Self::Cosine),
            "jaccard" => Ok(Self::Jaccard),
            other => Err(format!("unknown distance measure `{other}`")),
        }
    }
}

/// Borrowed sparse vector: strictly increasing indices with matching values.
#[derive(Clone, Copy, Debug)]
pub struct SparseCol<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl SparseCol<'_> {
    pub fn sq_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(self.values)
            .map(|(&i, &v)| v * dense[i])
            .sum()
    }

    fn same_as(&self, other: &SparseCol<'_>) -> bool {
        self.indices == other.indices && self.values == other.values
    }
}

/// Column access to a feature matrix through its explicit transpose.
pub struct Columns {
    transposed: FeatureMatrix,
    sq_norms: Vec<f64>,
}

impl Columns {
    pub fn new(x: &FeatureMatrix) -> Self {
        let transposed = x.transpose();
        let sq_norms = x.column_sq_norms();
        Self {
            transposed,
            sq_norms,
        }
    }

    /// Number of feature columns.
    pub fn len(&self) -> usize {
        self.transposed.n_samples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of each column (the sample count).
    pub fn dim(&self) -> usize {
        self.transposed.n_features()
    }

    pub fn col(&self, j: usize) -> SparseCol<'_> {
        let (indices, values) = self.transposed.row(j);
        SparseCol { indices, values }
    }

    pub fn sq_norm(&self, j: usize) -> f64 {
        self.sq_norms[j]
    }

    pub fn to_dense(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        let c = self.col(j);
        for (&i, &v) in c.indices.iter().zip(c.values) {
            out[i] = v;
        }
        out
    }
}

/// Merge-walks two sparse vectors, calling `f(a_i, b_i)` on the union of their patterns.
#[inline]
fn merge(a: SparseCol<'_>, b: SparseCol<'_>, mut f: impl FnMut(f64, f64)) {
    let (mut i, mut j) = (0, 0);
    while i < a.indices.len() && j < b.indices.len() {
        match a.indices[i].cmp(&b.indices[j]) {
            std::cmp::Ordering::Less => {
                f(a.values[i], 0.0);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                f(0.0, b.values[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                f(a.values[i], b.values[j]);
                i += 1;
                j += 1;
            }
        }
    }
    a.values[i..].iter().for_each(|&v| f(v, 0.0));
    b.values[j..].iter().for_each(|&v| f(0.0, v));
}

/// `sum_d ((a_d - b_d) / scale_d)^2` over the union pattern.
pub(crate) fn scaled_sq_distance(a: SparseCol<'_>, b: SparseCol<'_>, inv_sq_scale: Option<&[f64]>) -> f64 {
    match inv_sq_scale {
        None => sq_euclidean(a, b),
        Some(w) => {
            let (mut i, mut j) = (0, 0);
            let mut acc = 0.0;
            while i < a.indices.len() || j < b.indices.len() {
                let ia = a.indices.get(i).copied().unwrap_or(usize::MAX);
                let ib = b.indices.get(j).copied().unwrap_or(usize::MAX);
                let (d, diff) = if ia < ib {
                    i += 1;
                    (ia, a.values[i - 1])
                } else if ib < ia {
                    j += 1;
                    (ib, -b.values[j - 1])
                } else {
                    i += 1;
                    j += 1;
                    (ia, a.values[i - 1] - b.values[j - 1])
                };
                acc += diff * diff * w[d];
            }
            acc
        }
    }
}

pub(crate) fn sq_euclidean(a: SparseCol<'_>, b: SparseCol<'_>) -> f64 {
    let mut acc = 0.0;
    merge(a, b, |x, y| acc += (x - y) * (x - y));
    acc
}

impl DistanceMeasure {
    pub fn between(&self, a: SparseCol<'_>, b: SparseCol<'_>) -> f64 {
        match self {
            Self::Euclidean => sq_euclidean(a, b).sqrt(),
            Self::Cosine => {
                if a.same_as(&b) {
                    return 0.0;
                }
                let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
                merge(a, b, |x, y| {
                    dot += x * y;
                    na += x * x;
                    nb += y * y;
                });
                cosine_from_parts(dot, na, nb)
            }
            Self::Jaccard => {
                let (mut inter, mut union) = (0usize, 0usize);
                merge(a, b, |x, y| {
                    union += 1;
                    if x != 0.0 && y != 0.0 {
                        inter += 1;
                    }
                });
                jaccard_from_parts(inter, union)
            }
        }
    }

    /// Distance from a sparse column to a dense prototype vector.
    pub fn to_dense(&self, a: SparseCol<'_>, proto: &[f64]) -> f64 {
        match self {
            Self::Euclidean => {
                let mut acc = 0.0;
                let mut k = 0;
                for (d, &p) in proto.iter().enumerate() {
                    let x = if k < a.indices.len() && a.indices[k] == d {
                        k += 1;
                        a.values[k - 1]
                    } else {
                        0.0
                    };
                    acc += (x - p) * (x - p);
                }
                acc.sqrt()
            }
            Self::Cosine => {
                let dot = a.dot_dense(proto);
                let na = a.sq_norm();
                let nb: f64 = proto.iter().map(|v| v * v).sum();
                cosine_from_parts(dot, na, nb)
            }
            Self::Jaccard => {
                let proto_nnz = proto.iter().filter(|v| **v != 0.0).count();
                let inter = a
                    .indices
                    .iter()
                    .zip(a.values)
                    .filter(|(&i, &v)| v != 0.0 && proto[i] != 0.0)
                    .count();
                let a_nnz = a.values.iter().filter(|v| **v != 0.0).count();
                jaccard_from_parts(inter, a_nnz + proto_nnz - inter)
            }
        }
    }
}

fn cosine_from_parts(dot: f64, na: f64, nb: f64) -> f64 {
    match (na == 0.0, nb == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => (1.0 - dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 2.0),
    }
}

fn jaccard_from_parts(inter: usize, union: usize) -> f64 {
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols() -> Columns {
        // columns: a = (1, 0, 2), b = (0, 0, 2), c = (0, 0, 0), d = (1, 0, 2)
        let x = FeatureMatrix::from_triplets(
            3,
            4,
            &[(0, 0, 1.0), (2, 0, 2.0), (2, 1, 2.0), (0, 3, 1.0), (2, 3, 2.0)],
        )
        .unwrap();
        Columns::new(&x)
    }

    #[test]
    fn euclidean_values() {
        let c = cols();
        assert_eq!(DistanceMeasure::Euclidean.between(c.col(0), c.col(1)), 1.0);
        assert_eq!(DistanceMeasure::Euclidean.between(c.col(0), c.col(3)), 0.0);
        assert_eq!(DistanceMeasure::Euclidean.between(c.col(1), c.col(2)), 2.0);
        let dense = c.to_dense(1);
        assert_eq!(DistanceMeasure::Euclidean.to_dense(c.col(0), &dense), 1.0);
    }

    #[test]
    fn cosine_and_jaccard_values() {
        let c = cols();
        let cos = DistanceMeasure::Cosine.between(c.col(0), c.col(1));
        assert!((cos - (1.0 - 2.0 / 5f64.sqrt())).abs() < 1e-15);
        assert_eq!(DistanceMeasure::Cosine.between(c.col(0), c.col(3)), 0.0);
        assert_eq!(DistanceMeasure::Cosine.between(c.col(2), c.col(2)), 0.0);
        assert_eq!(DistanceMeasure::Cosine.between(c.col(1), c.col(2)), 1.0);
        assert_eq!(DistanceMeasure::Jaccard.between(c.col(0), c.col(1)), 0.5);
        assert_eq!(DistanceMeasure::Jaccard.between(c.col(2), c.col(2)), 0.0);
        let dense = c.to_dense(1);
        assert_eq!(DistanceMeasure::Jaccard.to_dense(c.col(0), &dense), 0.5);
    }

    #[test]
    fn parse_names() {
        assert_eq!("cosine".parse::<DistanceMeasure>().unwrap(), DistanceMeasure::Cosine);
        assert!("manhattan".parse::<DistanceMeasure>().is_err());
    }
}
