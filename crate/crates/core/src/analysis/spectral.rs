use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::coarsening::Prolongation;
use crate::error::{Error, Result};
use crate::limits::dense_cap;
use crate::sparse::FeatureMatrix;

/// Eigenvalue magnitudes of the two-level iteration matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    /// `F_C`-th smallest eigenvalue magnitude.
    pub rho_eff: f64,
    pub f_c: usize,
    /// All `F` magnitudes, ascending.
    pub eigenvalue_magnitudes: Vec<f64>,
    pub fine_dim: usize,
}

/// Dense two-level error propagator `T = (I - omega A)(I - P A_c^{-1} P^T A)`
/// with `A = X^T X + beta I` and `A_c = P^T A P`.
pub fn iteration_matrix(x: &FeatureMatrix, beta: f64, p: &Prolongation, omega: f64) -> Result<DMatrix<f64>> {
    let f = x.n_features();
    let cap = dense_cap();
    if f > cap {
        return Err(Error::DenseCapExceeded { dim: f, cap });
    }
    if p.n_fine() != f {
        return Err(Error::DimensionMismatch {
            context: "iteration matrix: prolongation rows vs features",
            expected: f,
            actual: p.n_fine(),
        });
    }
    let mut a = x.gram_dense();
    for i in 0..f {
        a[(i, i)] += beta;
    }
    let pd = p.to_dense();
    let pt_a = pd.transpose() * &a;
    let a_c = &pt_a * &pd;
    let dim = a_c.nrows();
    let chol = a_c.cholesky().ok_or(Error::CholeskyFailed { level: 1, dim })?;
    let coarse = &pd * chol.solve(&pt_a);
    let id = DMatrix::<f64>::identity(f, f);
    Ok((&id - &a * omega) * (&id - coarse))
}

/// `F_C`-th smallest eigenvalue magnitude of the two-level iteration matrix.
///
/// With `Q = I - B (B^T B)^{-1} B^T`, `B = A^{1/2} P`, the propagator is
/// similar to `(I - omega A) Q`, which shares its spectrum with the symmetric
/// `Q (I - omega A) Q`. The eigenvalues are therefore real and are computed
/// from that symmetric form, avoiding a nonsymmetric Schur iteration on a
/// highly defective matrix.
pub fn effective_spectral_radius(x: &FeatureMatrix, beta: f64, p: &Prolongation, omega: f64) -> Result<SpectralReport> {
    let f = x.n_features();
    let cap = dense_cap();
    if f > cap {
        return Err(Error::DenseCapExceeded { dim: f, cap });
    }
    if p.n_fine() != f {
        return Err(Error::DimensionMismatch {
            context: "effective spectral radius: prolongation rows vs features",
            expected: f,
            actual: p.n_fine(),
        });
    }
    let mut a = x.gram_dense();
    for i in 0..f {
        a[(i, i)] += beta;
    }
    let eig = SymmetricEigen::new(a.clone());
    if eig.eigenvalues.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::InvalidArgument("operator is not positive definite".into()));
    }
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let a_half = &eig.eigenvectors * sqrt_d * eig.eigenvectors.transpose();

    let b = a_half * p.to_dense();
    let gram = b.transpose() * &b;
    let dim = gram.nrows();
    let chol = gram.cholesky().ok_or(Error::CholeskyFailed { level: 1, dim })?;
    let id = DMatrix::<f64>::identity(f, f);
    let q = &id - &b * chol.solve(&b.transpose());
    let mut sym = &q * (&id - &a * omega) * &q;
    sym = (&sym + sym.transpose()) * 0.5;

    let mut mags: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let f_c = p.n_coarse();
    Ok(SpectralReport {
        rho_eff: mags[f_c - 1],
        f_c,
        eigenvalue_magnitudes: mags,
        fine_dim: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterAssignment;
    use crate::coarsening::build_adjusted_average;

    #[test]
    fn symmetric_form_matches_nonsymmetric_spectrum() {
        let x = FeatureMatrix::from_triplets(
            3,
            4,
            &[(0, 0, 1.0), (0, 1, 0.5), (1, 1, 2.0), (1, 2, -1.0), (2, 3, 1.5), (2, 0, 0.3)],
        )
        .unwrap();
        let a = ClusterAssignment::new(vec![0, 0, 1, 1], 2, crate::clustering::Prototypes::Features(vec![0, 2])).unwrap();
        let p = build_adjusted_average(&a).unwrap();
        let rep = effective_spectral_radius(&x, 0.1, &p, 0.2).unwrap();
        let t = iteration_matrix(&x, 0.1, &p, 0.2).unwrap();
        let mut want: Vec<f64> = t.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in rep.eigenvalue_magnitudes.iter().zip(&want) {
            assert!((g - w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn singletons_give_zero() {
        let x = FeatureMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 0.5), (0, 2, 1.0)]).unwrap();
        let p = build_adjusted_average(&ClusterAssignment::singletons(3)).unwrap();
        let rep = effective_spectral_radius(&x, 1e-2, &p, 0.3).unwrap();
        assert_eq!(rep.eigenvalue_magnitudes.len(), 3);
        assert!(rep.rho_eff <= 1e-12);
        assert!(rep.eigenvalue_magnitudes.iter().all(|m| *m <= 1e-12));
    }
}
