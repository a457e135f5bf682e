use std::time::Instant;

use super::config::{SolveReport, SolverConfig};
use super::precond::Preconditioner;
use crate::error::{check_len, Error, Result};
use crate::sparse::vector::{all_finite, axpy, dot, norm2, scale};
use crate::sparse::LinearOperator;

/// Relative size of `h_{j+1,j}` below which the Krylov space is invariant.
const HAPPY_BREAKDOWN: f64 = 1e-14;

/// Flexible GMRES without restarts, `x0 = 0`.
///
/// Each preconditioned vector `z_j = M_j^{-1} v_j` is stored so the
/// preconditioner may vary; the Hessenberg least-squares problem is kept in
/// upper-triangular form by Givens rotations.
pub fn fgmres<A: LinearOperator, M: Preconditioner>(
    a: &A,
    b: &[f64],
    config: &SolverConfig,
    m: &M,
) -> Result<(Vec<f64>, SolveReport)> {
    const NAME: &str = "fgmres";
    config.validate()?;
    let n = a.dim();
    check_len("fgmres right-hand side", n, b.len())?;
    if !all_finite(b) {
        return Err(Error::InvalidArgument("right-hand side has non-finite entries".into()));
    }
    let start = Instant::now();
    let mut report = SolveReport {
        residual_history: vec![1.0],
        ..Default::default()
    };
    let mut x = vec![0.0; n];
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        report.residual_history[0] = 0.0;
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }

    let mut v: Vec<Vec<f64>> = vec![b.iter().map(|bi| bi / b_norm).collect()];
    let mut z: Vec<Vec<f64>> = Vec::new();
    // column j of the rotated Hessenberg matrix, entries 0..=j
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![b_norm];

    for j in 0..config.max_iters {
        let it = j + 1;
        let mut zj = vec![0.0; n];
        let inner = m.apply(&v[j], &mut zj)?;
        report.inner_iteration_counts.push(inner);
        let mut w = a.apply(&zj)?;
        z.push(zj);
        let w_norm0 = norm2(&w);

        let mut h = vec![0.0; j + 2];
        for (i, vi) in v.iter().enumerate() {
            h[i] = dot(&w, vi);
            axpy(-h[i], vi, &mut w);
        }
        h[j + 1] = norm2(&w);
        if !h.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteRecurrence { solver: NAME, iteration: it });
        }

        for i in 0..j {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let denom = h[j].hypot(h[j + 1]);
        if denom == 0.0 {
            return Err(Error::Breakdown {
                solver: NAME,
                iteration: it,
                reason: "Hessenberg matrix is rank deficient".into(),
            });
        }
        let (c, s) = (h[j] / denom, h[j + 1] / denom);
        cs.push(c);
        sn.push(s);
        let subdiag = h[j + 1];
        h[j] = denom;
        h.truncate(j + 1);
        r_cols.push(h);
        g.push(-s * g[j]);
        g[j] *= c;

        let rel = g[j + 1].abs() / b_norm;
        report.residual_history.push(rel);
        report.iterations = it;
        let happy = subdiag <= HAPPY_BREAKDOWN * w_norm0.max(f64::MIN_POSITIVE);
        if rel <= config.tol || happy {
            report.converged = rel <= config.tol;
            break;
        }
        scale(1.0 / subdiag, &mut w);
        v.push(w);
    }

    let k = r_cols.len();
    let mut y = vec![0.0; k];
    let diag_max = (0..k).map(|i| r_cols[i][i].abs()).fold(0.0, f64::max);
    for i in (0..k).rev() {
        let mut s = g[i];
        for (l, yl) in y.iter().enumerate().skip(i + 1) {
            s -= r_cols[l][i] * yl;
        }
        let rii = r_cols[i][i];
        if rii.abs() <= f64::EPSILON * diag_max {
            return Err(Error::Breakdown {
                solver: NAME,
                iteration: k,
                reason: "Hessenberg matrix is rank deficient".into(),
            });
        }
        y[i] = s / rii;
    }
    for (zi, yi) in z.iter().zip(&y) {
        axpy(*yi, zi, &mut x);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::IdentityPreconditioner;
    use nalgebra::DMatrix;

    #[test]
    fn identity_converges_in_one_iteration() {
        let a = DMatrix::<f64>::identity(4, 4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let (x, rep) = fgmres(&a, &b, &SolverConfig::default(), &IdentityPreconditioner).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn nonsymmetric_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, -2.0, 5.0, 1.0, 0.0, 3.0, 6.0]);
        let b = [1.0, 2.0, 3.0];
        let (x, rep) = fgmres(&a, &b, &SolverConfig::default().with_tol(1e-12), &IdentityPreconditioner).unwrap();
        assert!(rep.converged && rep.iterations <= 3);
        let ax = a.apply(&x).unwrap();
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10);
        }
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }
}
