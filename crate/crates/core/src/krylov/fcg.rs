use std::collections::VecDeque;
use std::time::Instant;

use super::config::{SolveReport, SolverConfig};
use super::precond::Preconditioner;
use crate::error::{check_len, Error, Result};
use crate::sparse::vector::{all_finite, axpy, dot, norm2};
use crate::sparse::LinearOperator;

/// Number of previous directions `p_i` is orthogonalized against: `m_0 = 0`, `m_i = max(1, i mod (m+1))`.
pub fn truncation_window(i: usize, m: usize) -> usize {
    if i == 0 {
        0
    } else {
        (i % (m + 1)).max(1)
    }
}

struct Direction {
    p: Vec<f64>,
    ap: Vec<f64>,
    pap: f64,
}

/// Flexible conjugate gradients with truncated A-orthogonalization.
///
/// The preconditioner may change between iterations (inexact inner solves).
pub fn fcg<A: LinearOperator, M: Preconditioner>(
    a: &A,
    b: &[f64],
    config: &SolverConfig,
    m: &M,
) -> Result<(Vec<f64>, SolveReport)> {
    const NAME: &str = "fcg";
    config.validate()?;
    let n = a.dim();
    check_len("fcg right-hand side", n, b.len())?;
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
    let mut history: VecDeque<Direction> = VecDeque::with_capacity(config.truncation);
    for i in 0..config.max_iters {
        let it = i + 1;
        let mut z = vec![0.0; n];
        let inner = m.apply(&r, &mut z)?;
        report.inner_iteration_counts.push(inner);

        let window = truncation_window(i, config.truncation).min(history.len());
        let mut p = z.clone();
        for d in history.iter().rev().take(window) {
            let coef = dot(&z, &d.ap) / d.pap;
            axpy(-coef, &d.p, &mut p);
        }
        let mut ap = vec![0.0; n];
        a.apply_into(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if !pap.is_finite() {
            return Err(Error::NonFiniteRecurrence { solver: NAME, iteration: it });
        }
        if pap <= 0.0 {
            return Err(Error::Breakdown {
                solver: NAME,
                iteration: it,
                reason: format!("<p, Ap> = {pap:e}"),
            });
        }
        let alpha = dot(&p, &r) / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
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
        if history.len() == config.truncation {
            history.pop_front();
        }
        history.push_back(Direction { p, ap, pap });
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}
