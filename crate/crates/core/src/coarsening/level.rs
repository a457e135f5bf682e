use nalgebra::DMatrix;

use super::prolongation::{InterpolationKind, Prolongation};
use crate::error::{Error, Result};
use crate::sparse::{FeatureMatrix, RidgeOperator};

/// Coarse feature matrix `X_c = X P` with the data needed for its Galerkin operator.
#[derive(Clone, Debug)]
pub struct CoarseLevel {
    pub coarse_matrix: FeatureMatrix,
    pub prolongation: Prolongation,
    pub beta: f64,
    /// Dense `P^T P`, kept only when it is not the identity.
    pub galerkin_correction: Option<DMatrix<f64>>,
}

impl CoarseLevel {
    /// `w -> X_c^T X_c w + beta (P^T P) w`
    pub fn operator(&self) -> Result<RidgeOperator<'_>> {
        RidgeOperator::new(&self.coarse_matrix, self.beta)?.with_mass(self.galerkin_correction.as_ref())
    }
}

/// Sparse product `X P`, one dense accumulator row at a time.
pub fn multiply_prolongation(x: &FeatureMatrix, p: &Prolongation) -> Result<FeatureMatrix> {
    if p.n_fine() != x.n_features() {
        return Err(Error::DimensionMismatch {
            context: "coarsen: prolongation rows vs features",
            expected: x.n_features(),
            actual: p.n_fine(),
        });
    }
    let fc = p.n_coarse();
    let mut accum = vec![0.0; fc];
    let mut touched_flag = vec![false; fc];
    let mut touched = Vec::new();
    let mut row_offsets = Vec::with_capacity(x.n_samples() + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    for i in 0..x.n_samples() {
        let (cols, vals) = x.row(i);
        for (&j, &xij) in cols.iter().zip(vals) {
            let (pc, pv) = p.row(j);
            for (&c, &w) in pc.iter().zip(pv) {
                if !touched_flag[c] {
                    touched_flag[c] = true;
                    touched.push(c);
                }
                accum[c] += xij * w;
            }
        }
        touched.sort_unstable();
        for &c in &touched {
            if accum[c] != 0.0 {
                col_indices.push(c);
                values.push(accum[c]);
            }
            accum[c] = 0.0;
            touched_flag[c] = false;
        }
        touched.clear();
        row_offsets.push(values.len());
    }
    FeatureMatrix::from_csr(x.n_samples(), fc, row_offsets, col_indices, values)
}

/// Builds `X_c = X P`; `P^T P` is stored densely unless `P` is the adjusted average.
pub fn coarsen(x: &FeatureMatrix, p: &Prolongation, beta: f64) -> Result<CoarseLevel> {
    let coarse_matrix = multiply_prolongation(x, p)?;
    let galerkin_correction = match p.kind() {
        InterpolationKind::AdjustedAverage => None,
        _ => Some(p.gram()),
    };
    Ok(CoarseLevel {
        coarse_matrix,
        prolongation: p.clone(),
        beta,
        galerkin_correction,
    })
}
