use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clustering::ClusterAssignment;
use crate::error::{check_len, Error, Result};

/// How the rows of a prolongation were built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationKind {
    /// `1/sqrt(n_S)` per row; `P^T P = I`.
    AdjustedAverage,
    /// `1/n_S` per row; `P^T P = diag(1/n_S)`.
    PlainAverage,
    /// Least-squares fit of principal eigenvectors.
    LeastSquaresA,
    /// Least-squares fit of principal eigenvectors with residual scaling.
    LeastSquaresB,
}

/// Sparse `F x F_C` interpolation operator, stored by fine rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation {
    n_fine: usize,
    n_coarse: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    kind: InterpolationKind,
}

impl Prolongation {
    /// Assembles a prolongation from per-row `(coarse column, weight)` lists.
    pub(crate) fn from_rows(
        n_coarse: usize,
        rows: Vec<Vec<(usize, f64)>>,
        kind: InterpolationKind,
    ) -> Result<Self> {
        let n_fine = rows.len();
        let mut row_offsets = Vec::with_capacity(n_fine + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        let mut hit = vec![false; n_coarse];
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(c, _)| c);
            for (k, &(c, w)) in row.iter().enumerate() {
                if c >= n_coarse {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: c,
                        n_rows: n_fine,
                        n_cols: n_coarse,
                    });
                }
                if k > 0 && row[k - 1].0 == c {
                    return Err(Error::MalformedCsr(format!("duplicate column {c} in prolongation row {i}")));
                }
                if !w.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: c, value: w });
                }
                hit[c] = true;
                col_indices.push(c);
                values.push(w);
            }
            row_offsets.push(values.len());
        }
        if let Some(empty) = hit.iter().position(|h| !h) {
            return Err(Error::EmptyCluster(empty));
        }
        Ok(Self {
            n_fine,
            n_coarse,
            row_offsets,
            col_indices,
            values,
            kind,
        })
    }

    pub fn n_fine(&self) -> usize {
        self.n_fine
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    pub fn kind(&self) -> InterpolationKind {
        self.kind
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    /// `fine = P coarse`
    pub fn prolong_into(&self, coarse: &[f64], fine: &mut [f64]) -> Result<()> {
        check_len("prolongation input", self.n_coarse, coarse.len())?;
        check_len("prolongation output", self.n_fine, fine.len())?;
        for (i, out) in fine.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *out = cols.iter().zip(vals).map(|(&c, &w)| w * coarse[c]).sum();
        }
        Ok(())
    }

    pub fn prolong(&self, coarse: &[f64]) -> Result<Vec<f64>> {
        let mut fine = vec![0.0; self.n_fine];
        self.prolong_into(coarse, &mut fine)?;
        Ok(fine)
    }

    /// `coarse = P^T fine`
    pub fn restrict_into(&self, fine: &[f64], coarse: &mut [f64]) -> Result<()> {
        check_len("restriction input", self.n_fine, fine.len())?;
        check_len("restriction output", self.n_coarse, coarse.len())?;
        coarse.fill(0.0);
        for (i, &fi) in fine.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &w) in cols.iter().zip(vals) {
                coarse[c] += w * fi;
            }
        }
        Ok(())
    }

    pub fn restrict(&self, fine: &[f64]) -> Result<Vec<f64>> {
        let mut coarse = vec![0.0; self.n_coarse];
        self.restrict_into(fine, &mut coarse)?;
        Ok(coarse)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.n_fine, self.n_coarse);
        for i in 0..self.n_fine {
            let (cols, vals) = self.row(i);
            for (&c, &w) in cols.iter().zip(vals) {
                p[(i, c)] = w;
            }
        }
        p
    }

    /// Dense `P^T P`.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.n_coarse, self.n_coarse);
        for i in 0..self.n_fine {
            let (cols, vals) = self.row(i);
            for (&a, &wa) in cols.iter().zip(vals) {
                for (&b, &wb) in cols.iter().zip(vals) {
                    g[(a, b)] += wa * wb;
                }
            }
        }
        g
    }
}

fn averaging(assignment: &ClusterAssignment, kind: InterpolationKind) -> Result<Prolongation> {
    let sizes = assignment.sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    let rows = assignment
        .membership()
        .iter()
        .map(|&c| {
            let n = sizes[c] as f64;
            let w = match kind {
                InterpolationKind::PlainAverage => 1.0 / n,
                _ => 1.0 / n.sqrt(),
            };
            vec![(c, w)]
        })
        .collect();
    Prolongation::from_rows(assignment.n_clusters(), rows, kind)
}

/// Row `i` carries `1/sqrt(n_S)` in the column of its cluster `S`.
pub fn build_adjusted_average(assignment: &ClusterAssignment) -> Result<Prolongation> {
    averaging(assignment, InterpolationKind::AdjustedAverage)
}

/// Row `i` carries `1/n_S`; kept as the non-orthonormal counterpart of the adjusted average.
pub fn build_plain_average(assignment: &ClusterAssignment) -> Result<Prolongation> {
    averaging(assignment, InterpolationKind::PlainAverage)
}
