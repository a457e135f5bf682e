use crate::error::{check_len, Error, Result};

/// `z = M^{-1} r`, possibly different on every call.
///
/// Returns the number of inner iterations spent (0 for fixed operators).
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize>;
}

impl<T: Preconditioner + ?Sized> Preconditioner for &T {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        (**self).apply(r, z)
    }
}

/// `M = I`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        check_len("identity preconditioner", r.len(), z.len())?;
        z.copy_from_slice(r);
        Ok(0)
    }
}

/// Diagonal scaling by the inverse of a positive diagonal.
#[derive(Clone, Debug)]
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(diag: &[f64]) -> Result<Self> {
        if let Some((i, &d)) = diag.iter().enumerate().find(|(_, &d)| !(d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "Jacobi diagonal entry {i} is {d}; it must be positive"
            )));
        }
        Ok(Self {
            inv_diag: diag.iter().map(|d| 1.0 / d).collect(),
        })
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        check_len("Jacobi preconditioner", self.inv_diag.len(), r.len())?;
        check_len("Jacobi preconditioner", r.len(), z.len())?;
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
        Ok(0)
    }
}
