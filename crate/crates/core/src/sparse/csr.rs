use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};

/// Rows per task when the parallel kernels split the matrix.
const PAR_ROW_CHUNK: usize = 512;

/// Sparse `N x F` data matrix stored by rows (samples).
///
/// Column indices within a row are strictly increasing and no entry is
/// stored twice. The transpose is never stored: `X^T u` scatters over rows.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n_samples: usize,
    n_features: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl FeatureMatrix {
    /// Builds the canonical compressed form from `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets(
        n_samples: usize,
        n_features: usize,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(row, col, value) in entries {
            if row >= n_samples || col >= n_features {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    n_rows: n_samples,
                    n_cols: n_features,
                });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry { row, col, value });
            }
        }

        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|a| (a.0, a.1));

        let mut row_offsets = vec![0usize; n_samples + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut rows = Vec::with_capacity(sorted.len());

        let mut iter = sorted.into_iter().peekable();
        while let Some((row, col, mut value)) = iter.next() {
            while let Some(&(r, c, v)) = iter.peek() {
                if r == row && c == col {
                    value += v;
                    iter.next();
                } else {
                    break;
                }
            }
            if value != 0.0 {
                rows.push(row);
                col_indices.push(col);
                values.push(value);
            }
        }
        for &row in &rows {
            row_offsets[row + 1] += 1;
        }
        for i in 0..n_samples {
            row_offsets[i + 1] += row_offsets[i];
        }

        Ok(Self {
            n_samples,
            n_features,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Wraps existing compressed-row arrays after checking every structural invariant.
    pub fn from_csr(
        n_samples: usize,
        n_features: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_samples + 1 {
            return Err(Error::MalformedCsr(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_samples + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::MalformedCsr("row_offsets must start at 0".into()));
        }
        if col_indices.len() != values.len() {
            return Err(Error::MalformedCsr(
                "column index and value arrays differ in length".into(),
            ));
        }
        if *row_offsets.last().unwrap() != values.len() {
            return Err(Error::MalformedCsr(format!(
                "last row offset {} does not equal nnz {}",
                row_offsets.last().unwrap(),
                values.len()
            )));
        }
        for i in 0..n_samples {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if end < start {
                return Err(Error::MalformedCsr(format!("row_offsets decrease at row {i}")));
            }
            let cols = &col_indices[start..end];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n_features {
                    return Err(Error::IndexOutOfRange {
                        row: i,
                        col: c,
                        n_rows: n_samples,
                        n_cols: n_features,
                    });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::MalformedCsr(format!(
                        "column indices in row {i} are not strictly increasing"
                    )));
                }
                let v = values[start + k];
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: c, value: v });
                }
            }
        }
        Ok(Self {
            n_samples,
            n_features,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_samples: n,
            n_features: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Keeps every nonzero of a dense matrix.
    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let (n, f) = dense.shape();
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..n {
            for j in 0..f {
                let v = dense[(i, j)];
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self {
            n_samples: n,
            n_features: f,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.n_samples, self.n_features);
        for i in 0..self.n_samples {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                dense[(i, c)] = v;
            }
        }
        dense
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// `out = X v`
    pub fn spmv_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("spmv input", self.n_features, v.len())?;
        check_len("spmv output", self.n_samples, out.len())?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_dot(i, v);
        }
        Ok(())
    }

    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_samples];
        self.spmv_into(v, &mut out)?;
        Ok(out)
    }

    /// `out = X^T u`, scattering each row into the output.
    pub fn spmv_transpose_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("spmv_transpose input", self.n_samples, u.len())?;
        check_len("spmv_transpose output", self.n_features, out.len())?;
        out.fill(0.0);
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * ui;
            }
        }
        Ok(())
    }

    pub fn spmv_transpose(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_features];
        self.spmv_transpose_into(u, &mut out)?;
        Ok(out)
    }

    /// Parallel `X v`. Each output entry is still a sequential row sum,
    /// so the result matches [`Self::spmv_into`] bitwise.
    pub fn par_spmv_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("spmv input", self.n_features, v.len())?;
        check_len("spmv output", self.n_samples, out.len())?;
        out.par_iter_mut()
            .with_min_len(PAR_ROW_CHUNK)
            .enumerate()
            .for_each(|(i, o)| *o = self.row_dot(i, v));
        Ok(())
    }

    /// Parallel `X^T u`: per-chunk partial sums are reduced in an unspecified order.
    pub fn par_spmv_transpose_into(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("spmv_transpose input", self.n_samples, u.len())?;
        check_len("spmv_transpose output", self.n_features, out.len())?;
        let f = self.n_features;
        let n_chunks = self.n_samples.div_ceil(PAR_ROW_CHUNK);
        let total = (0..n_chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut partial = vec![0.0; f];
                let start = chunk * PAR_ROW_CHUNK;
                let end = (start + PAR_ROW_CHUNK).min(self.n_samples);
                for i in start..end {
                    let ui = u[i];
                    let (cols, vals) = self.row(i);
                    for (&c, &v) in cols.iter().zip(vals) {
                        partial[c] += v * ui;
                    }
                }
                partial
            })
            .reduce(
                || vec![0.0; f],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            );
        out.copy_from_slice(&total);
        Ok(())
    }

    #[inline]
    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).map(|(&c, &x)| x * v[c]).sum()
    }

    /// Squared Euclidean norm of every column, in one pass over the nonzeros.
    pub fn column_sq_norms(&self) -> Vec<f64> {
        let mut norms = vec![0.0; self.n_features];
        for (&c, &v) in self.col_indices.iter().zip(&self.values) {
            norms[c] += v * v;
        }
        norms
    }

    /// Explicit transpose (`F x N`). Rows of the result are the columns of `self`;
    /// clustering uses it for column access.
    pub fn transpose(&self) -> FeatureMatrix {
        let mut counts = vec![0usize; self.n_features + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_features {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n_samples {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_indices[slot] = i;
                values[slot] = v;
                next[c] += 1;
            }
        }
        FeatureMatrix {
            n_samples: self.n_features,
            n_features: self.n_samples,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Dense `X^T X`, accumulated row by row. Only for small dense paths
    /// (coarsest-level factorization and diagnostics).
    pub fn gram_dense(&self) -> DMatrix<f64> {
        let f = self.n_features;
        let mut gram = DMatrix::zeros(f, f);
        for i in 0..self.n_samples {
            let (cols, vals) = self.row(i);
            for (a, (&ca, &va)) in cols.iter().zip(vals).enumerate() {
                for (&cb, &vb) in cols[a..].iter().zip(&vals[a..]) {
                    gram[(ca, cb)] += va * vb;
                }
            }
        }
        // only the upper triangle (ca <= cb) was filled
        for j in 0..f {
            for i in (j + 1)..f {
                gram[(i, j)] = gram[(j, i)];
            }
        }
        gram
    }
}
