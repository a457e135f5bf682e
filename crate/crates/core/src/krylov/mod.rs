//! Krylov solvers for the ridge normal equations and the multilevel preconditioner.
//!
//! All solvers start from `x0 = 0` and stop on the relative residual
//! `||r|| / ||rhs|| <= tol`. The preconditioner applies one Richardson
//! post-smoothing step after the coarse correction, so it is not symmetric
//! and has to be paired with FCG or FGMRES.

mod cg;
mod config;
mod fcg;
mod fgmres;
mod hierarchy;
mod precond;
mod smoothing;
mod solve;

pub use cg::{cg, pcg};
pub use config::{OmegaMode, SolveReport, SolverConfig};
pub use fcg::{fcg, truncation_window};
pub use fgmres::fgmres;
pub use hierarchy::{
    build_hierarchy, dense_level_operator, smoothing_weight, CoarseSolverSpec, InterpolationSpec, LevelHierarchy,
    LevelPreconditioner, LevelSpec, TwoLevelPreconditioner, LAMBDA_MAX_ITERS, LAMBDA_MAX_TOL,
};
pub use precond::{IdentityPreconditioner, JacobiPreconditioner, Preconditioner};
pub use smoothing::{estimate_lambda_max, richardson_step, LambdaMaxEstimate};
pub use solve::{solve_normal_equations, solve_system, Method};
