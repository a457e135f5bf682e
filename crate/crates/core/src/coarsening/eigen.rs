use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::{vector::dot, FeatureMatrix, LinearOperator, RidgeOperator};

/// Dominant eigenpairs of `X^T X` with energy weights.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    /// `F x K`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    /// Eigenvalues of `X^T X`, descending.
    pub values: Vec<f64>,
    /// `eta_k = <(X^T X + beta I) v_k, v_k>`
    pub weights: Vec<f64>,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Builds a basis from given vectors, computing Rayleigh quotients and weights.
    pub fn from_vectors(x: &FeatureMatrix, beta: f64, vectors: DMatrix<f64>) -> Result<Self> {
        if vectors.nrows() != x.n_features() {
            return Err(Error::DimensionMismatch {
                context: "eigen basis rows",
                expected: x.n_features(),
                actual: vectors.nrows(),
            });
        }
        let gram = RidgeOperator::new(x, 0.0)?;
        let mut values = Vec::with_capacity(vectors.ncols());
        let mut weights = Vec::with_capacity(vectors.ncols());
        for k in 0..vectors.ncols() {
            let v: Vec<f64> = vectors.column(k).iter().copied().collect();
            let gv = gram.apply(&v)?;
            let vv = dot(&v, &v);
            let lambda = dot(&gv, &v) / vv;
            values.push(lambda);
            weights.push(lambda * vv + beta * vv);
        }
        Ok(Self {
            vectors,
            values,
            weights,
        })
    }
}

/// `K` dominant eigenpairs of `X^T X` from a dense SVD of `X`.
pub fn top_eigenpairs(x: &FeatureMatrix, beta: f64, k: usize, cap: usize) -> Result<EigenBasis> {
    let (n, f) = (x.n_samples(), x.n_features());
    if f > cap {
        return Err(Error::DenseCapExceeded { dim: f, cap });
    }
    if k == 0 || k > n.min(f) {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs but min(N, F) = {}",
            n.min(f)
        )));
    }
    let svd = x.to_dense().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut vectors = DMatrix::zeros(f, k);
    let mut values = Vec::with_capacity(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let s = svd.singular_values[idx];
        values.push(s * s);
        for j in 0..f {
            vectors[(j, col)] = v_t[(idx, j)];
        }
    }
    let op = RidgeOperator::new(x, beta)?;
    let mut weights = Vec::with_capacity(k);
    for col in 0..k {
        let v: Vec<f64> = vectors.column(col).iter().copied().collect();
        weights.push(dot(&op.apply(&v)?, &v));
    }
    Ok(EigenBasis {
        vectors,
        values,
        weights,
    })
}
