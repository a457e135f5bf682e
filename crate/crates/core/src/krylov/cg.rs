use std::time::Instant;

use super::config::{SolveReport, SolverConfig};
use super::precond::{JacobiPreconditioner, Preconditioner};
use crate::error::{check_len, Error, Result};
use crate::sparse::vector::{all_finite, axpy, dot, norm2};
use crate::sparse::LinearOperator;

/// Conjugate gradients from `x0 = 0`, optionally Jacobi-preconditioned by `diag`.
pub fn cg<A: LinearOperator>(
    a: &A,
    b: &[f64],
    config: &SolverConfig,
    diag: Option<&[f64]>,
) -> Result<(Vec<f64>, SolveReport)> {
    match diag {
        Some(d) => pcg(a, b, config, Some(&JacobiPreconditioner::new(d)?)),
        None => pcg::<A, JacobiPreconditioner>(a, b, config, None),
    }
}

/// Preconditioned CG; `m` must be a fixed SPD preconditioner.
pub fn pcg<A: LinearOperator, M: Preconditioner>(
    a: &A,
    b: &[f64],
    config: &SolverConfig,
    m: Option<&M>,
) -> Result<(Vec<f64>, SolveReport)> {
    const NAME: &str = "cg";
    config.validate()?;
    let n = a.dim();
    check_len("cg right-hand side", n, b.len())?;
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

    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let apply_m = |r: &[f64], z: &mut [f64]| -> Result<usize> {
        match m {
            Some(m) => m.apply(r, z),
            None => {
                z.copy_from_slice(r);
                Ok(0)
            }
        }
    };
    apply_m(&r, &mut z)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];

    for it in 1..=config.max_iters {
        a.apply_into(&p, &mut q)?;
        let pq = dot(&p, &q);
        if !pq.is_finite() || !rz.is_finite() {
            return Err(Error::NonFiniteRecurrence { solver: NAME, iteration: it });
        }
        if pq <= 0.0 {
            return Err(Error::Breakdown {
                solver: NAME,
                iteration: it,
                reason: format!("<p, Ap> = {pq:e}; the operator is not positive definite"),
            });
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        let rel = norm2(&r) / b_norm;
        if !rel.is_finite() {
            return Err(Error::NonFiniteRecurrence { solver: NAME, iteration: it });
        }
        report.residual_history.push(rel);
        report.iterations = it;
        if rel <= config.tol {
            report.converged = true;
            break;
        }
        apply_m(&r, &mut z)?;
        let rz_new = dot(&r, &z);
        let gamma = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + gamma * *pi;
        }
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}
