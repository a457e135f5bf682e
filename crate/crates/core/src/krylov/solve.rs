use serde::{Deserialize, Serialize};

use super::cg::cg;
use super::config::{SolveReport, SolverConfig};
use super::fcg::fcg;
use super::fgmres::fgmres;
use super::hierarchy::LevelHierarchy;
use crate::error::{Error, Result};
use crate::sparse::{FeatureMatrix, RidgeOperator};

/// Solver and preconditioner combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cg,
    JacobiCg,
    #[serde(rename = "fcg_twolevel")]
    FcgTwoLevel,
    FcgMultilevel,
    #[serde(rename = "fgmres_twolevel")]
    FgmresTwoLevel,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cg => "cg",
            Method::JacobiCg => "jacobi_cg",
            Method::FcgTwoLevel => "fcg_twolevel",
            Method::FcgMultilevel => "fcg_multilevel",
            Method::FgmresTwoLevel => "fgmres_twolevel",
        }
    }

    pub fn needs_hierarchy(self) -> bool {
        !matches!(self, Method::Cg | Method::JacobiCg)
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            Method::Cg,
            Method::JacobiCg,
            Method::FcgTwoLevel,
            Method::FcgMultilevel,
            Method::FgmresTwoLevel,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Solves `(X^T X + beta I) w = rhs` with the chosen method.
///
/// `rhs` is already `X^T b`. Preconditioned methods need a hierarchy built
/// on the same `X` and `beta`.
pub fn solve_normal_equations(
    x: &FeatureMatrix,
    beta: f64,
    rhs: &[f64],
    method: Method,
    config: &SolverConfig,
    hierarchy: Option<&LevelHierarchy<'_>>,
) -> Result<(Vec<f64>, SolveReport)> {
    let op = RidgeOperator::new(x, beta)?.parallel(config.parallel);
    let hierarchy = if method.needs_hierarchy() {
        let h = hierarchy.ok_or_else(|| Error::InvalidArgument(format!("method {method} needs a level hierarchy")))?;
        if !std::ptr::eq(h.fine_matrix(), x) && h.fine_matrix() != x {
            return Err(Error::InvalidArgument(format!(
                "method {method}: hierarchy was built for a different matrix"
            )));
        }
        if h.fine_beta() != beta {
            return Err(Error::InvalidArgument(format!(
                "method {method}: hierarchy beta {} differs from {beta}",
                h.fine_beta()
            )));
        }
        Some(h)
    } else {
        None
    };
    match method {
        Method::Cg => cg(&op, rhs, config, None),
        Method::JacobiCg => cg(&op, rhs, config, Some(&op.gram_diagonal())),
        Method::FcgTwoLevel | Method::FcgMultilevel => {
            let h = hierarchy.unwrap();
            if method == Method::FcgTwoLevel && h.n_coarse_levels() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "fcg_twolevel expects one coarse level, hierarchy has {}",
                    h.n_coarse_levels()
                )));
            }
            fcg(&op, rhs, config, h)
        }
        Method::FgmresTwoLevel => fgmres(&op, rhs, config, hierarchy.unwrap()),
    }
}

/// Solves `(X^T X + beta I) w = X^T b`.
pub fn solve_system(
    x: &FeatureMatrix,
    beta: f64,
    b: &[f64],
    method: Method,
    config: &SolverConfig,
    hierarchy: Option<&LevelHierarchy<'_>>,
) -> Result<(Vec<f64>, SolveReport)> {
    let rhs = x.spmv_transpose(b)?;
    solve_normal_equations(x, beta, &rhs, method, config, hierarchy)
}
