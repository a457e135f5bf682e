use nalgebra::DMatrix;

use super::csr::FeatureMatrix;
use crate::error::{check_len, Error, Result};

/// A square linear map applied into a caller-owned buffer.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// `out = A x`
    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len("dense operator input", self.ncols(), x.len())?;
        check_len("dense operator output", self.nrows(), out.len())?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
        Ok(())
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).apply_into(x, out)
    }
}

/// The implicit SPD operator `w -> X^T (X w) + beta * M w`.
///
/// `M` is the identity unless a Galerkin mass matrix `P^T P` is attached
/// (coarse levels built with a non-orthonormal prolongation). `X^T X` is
/// never formed: every application is two sparse passes.
#[derive(Clone, Copy, Debug)]
pub struct RidgeOperator<'a> {
    matrix: &'a FeatureMatrix,
    beta: f64,
    mass: Option<&'a DMatrix<f64>>,
    parallel: bool,
}

impl<'a> RidgeOperator<'a> {
    pub fn new(matrix: &'a FeatureMatrix, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "regularization must be finite and nonnegative, got {beta}"
            )));
        }
        Ok(Self {
            matrix,
            beta,
            mass: None,
            parallel: false,
        })
    }

    /// Replaces the identity in the regularization term with `mass`.
    pub fn with_mass(mut self, mass: Option<&'a DMatrix<f64>>) -> Result<Self> {
        if let Some(m) = mass {
            let f = self.matrix.n_features();
            if m.shape() != (f, f) {
                return Err(Error::DimensionMismatch {
                    context: "ridge mass matrix",
                    expected: f,
                    actual: m.nrows(),
                });
            }
        }
        self.mass = mass;
        Ok(self)
    }

    /// Opt into rayon-parallel matvecs. `X^T u` then reduces in an unspecified order.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn matrix(&self) -> &'a FeatureMatrix {
        self.matrix
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> Option<&'a DMatrix<f64>> {
        self.mass
    }

    /// `diag(X^T X) + beta * diag(M)`, one pass over the nonzeros.
    pub fn gram_diagonal(&self) -> Vec<f64> {
        let mut diag = self.matrix.column_sq_norms();
        match self.mass {
            None => diag.iter_mut().for_each(|d| *d += self.beta),
            Some(m) => diag
                .iter_mut()
                .enumerate()
                .for_each(|(j, d)| *d += self.beta * m[(j, j)]),
        }
        diag
    }

    /// Dense `X^T X + beta * M`. Small problems only.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = self.matrix.gram_dense();
        match self.mass {
            None => {
                for j in 0..a.nrows() {
                    a[(j, j)] += self.beta;
                }
            }
            Some(m) => a += m * self.beta,
        }
        a
    }
}

impl LinearOperator for RidgeOperator<'_> {
    fn dim(&self) -> usize {
        self.matrix.n_features()
    }

    fn apply_into(&self, w: &[f64], out: &mut [f64]) -> Result<()> {
        let f = self.matrix.n_features();
        check_len("ridge operator input", f, w.len())?;
        check_len("ridge operator output", f, out.len())?;
        let mut xw = vec![0.0; self.matrix.n_samples()];
        if self.parallel {
            self.matrix.par_spmv_into(w, &mut xw)?;
            self.matrix.par_spmv_transpose_into(&xw, out)?;
        } else {
            self.matrix.spmv_into(w, &mut xw)?;
            self.matrix.spmv_transpose_into(&xw, out)?;
        }
        match self.mass {
            None => {
                for (o, wi) in out.iter_mut().zip(w) {
                    *o += self.beta * wi;
                }
            }
            Some(m) => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mw: f64 = (0..f).map(|j| m[(i, j)] * w[j]).sum();
                    *o += self.beta * mw;
                }
            }
        }
        Ok(())
    }
}
