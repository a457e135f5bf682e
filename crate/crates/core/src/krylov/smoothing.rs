use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::sparse::vector::{dot, norm2, scale};
use crate::sparse::LinearOperator;

/// One damped Richardson step `x + omega (b - A x)`.
pub fn richardson_step<A: LinearOperator>(a: &A, x: &[f64], b: &[f64], omega: f64) -> Result<Vec<f64>> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    check_len("richardson rhs", a.dim(), b.len())?;
    let ax = a.apply(x)?;
    Ok(x.iter()
        .zip(b)
        .zip(&ax)
        .map(|((xi, bi), axi)| xi + omega * (bi - axi))
        .collect())
}

/// Power-iteration estimate of the largest eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaMaxEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when `max_iters` ran out before the relative change dropped below `tol`.
    pub converged: bool,
}

/// Power iteration on a symmetric positive semidefinite operator.
///
/// Starts from a seeded uniform vector and stops when the Rayleigh quotient
/// changes by at most `tol` relative to its current value.
pub fn estimate_lambda_max<A: LinearOperator>(
    a: &A,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<LambdaMaxEstimate> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("operator has dimension 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    scale(1.0 / nv, &mut v);

    let mut lambda = 0.0;
    for it in 1..=max_iters {
        let av = a.apply(&v)?;
        let next = dot(&v, &av);
        let norm = norm2(&av);
        if !next.is_finite() || !norm.is_finite() {
            return Err(Error::NonFiniteRecurrence {
                solver: "power iteration",
                iteration: it,
            });
        }
        if norm == 0.0 {
            return Ok(LambdaMaxEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        let done = it > 1 && (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            return Ok(LambdaMaxEstimate {
                value: lambda,
                iterations: it,
                converged: true,
            });
        }
        v = av;
        scale(1.0 / norm, &mut v);
    }
    Ok(LambdaMaxEstimate {
        value: lambda,
        iterations: max_iters,
        converged: false,
    })
}
