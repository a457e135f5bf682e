use nalgebra::{Cholesky, DMatrix, Dyn};
use serde::{Deserialize, Serialize};

use super::cg::cg;
use super::config::{OmegaMode, SolverConfig};
use super::fcg::fcg;
use super::precond::{IdentityPreconditioner, Preconditioner};
use super::smoothing::estimate_lambda_max;
use crate::clustering::{ClusterAssignment, ClusteringSpec};
use crate::coarsening::{
    build_adjusted_average, build_ls_interpolation, build_plain_average, coarsen, top_eigenpairs, CoarseLevel,
    LsVariant, Prolongation,
};
use crate::error::{check_len, Error, Result};
use crate::limits::{dense_cap, DEFAULT_DIRECT_CAP};
use crate::sparse::{FeatureMatrix, LinearOperator, RidgeOperator};

/// Power-iteration settings used for the automatic smoothing weight.
pub const LAMBDA_MAX_TOL: f64 = 1e-4;
pub const LAMBDA_MAX_ITERS: usize = 200;

fn default_n_eigen() -> usize {
    16
}

fn default_n_interp() -> usize {
    1
}

fn default_inner_iters() -> usize {
    1000
}

/// Prolongation construction for one level.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterpolationSpec {
    #[default]
    AdjustedAverage,
    PlainAverage,
    LeastSquares {
        variant: LsVariant,
        #[serde(default = "default_n_eigen")]
        n_eigen: usize,
        #[serde(default = "default_n_interp")]
        n_interp: usize,
    },
}

impl InterpolationSpec {
    pub fn build(&self, x: &FeatureMatrix, beta: f64, clustering: &ClusteringSpec, assignment: &ClusterAssignment) -> Result<Prolongation> {
        match self {
            Self::AdjustedAverage => build_adjusted_average(assignment),
            Self::PlainAverage => build_plain_average(assignment),
            Self::LeastSquares {
                variant,
                n_eigen,
                n_interp,
            } => {
                let k = (*n_eigen).min(x.n_samples().min(x.n_features()));
                let basis = top_eigenpairs(x, beta, k, dense_cap())?;
                build_ls_interpolation(&basis, assignment, *n_interp, *variant, x, beta, clustering.distance())
            }
        }
    }
}

/// How the system on a coarse level is solved when the level above needs a correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoarseSolverSpec {
    /// Dense Cholesky factorization computed once.
    #[default]
    DirectCholesky,
    /// Unpreconditioned CG to a relative tolerance.
    InnerCg {
        tol: f64,
        #[serde(default = "default_inner_iters")]
        max_iters: usize,
    },
    /// FCG preconditioned by the rest of the hierarchy below this level.
    InnerFcg {
        tol: f64,
        #[serde(default = "default_inner_iters")]
        max_iters: usize,
    },
}

/// Recipe for one coarse level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub clustering: ClusteringSpec,
    #[serde(default)]
    pub interpolation: InterpolationSpec,
    #[serde(default)]
    pub coarse_solver: CoarseSolverSpec,
    /// Regularization on this level; the fine `beta` when absent.
    #[serde(default)]
    pub beta: Option<f64>,
}

impl LevelSpec {
    pub fn new(clustering: ClusteringSpec) -> Self {
        Self {
            clustering,
            interpolation: InterpolationSpec::AdjustedAverage,
            coarse_solver: CoarseSolverSpec::DirectCholesky,
            beta: None,
        }
    }

    pub fn with_interpolation(mut self, interpolation: InterpolationSpec) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn with_coarse_solver(mut self, solver: CoarseSolverSpec) -> Self {
        self.coarse_solver = solver;
        self
    }
}

enum LevelSolve {
    Direct(Cholesky<f64, Dyn>),
    InnerCg(SolverConfig),
    InnerFcg(SolverConfig),
}

struct Level {
    matrix: FeatureMatrix,
    /// From the level above to this one.
    prolongation: Prolongation,
    beta: f64,
    /// Accumulated Galerkin mass `P_l^T ... P_1^T P_1 ... P_l`, absent when it is the identity.
    mass: Option<DMatrix<f64>>,
    solve: LevelSolve,
    /// Smoothing weight applied on this level when it is corrected by the next one.
    omega: f64,
}

/// Multilevel preconditioner: coarse correction followed by one Richardson step on every level.
///
/// Level 0 is the borrowed fine matrix. Applying the preconditioner to `r`
/// restricts to level 1, solves there (directly, or by an inner Krylov solve
/// that recurses into deeper levels), prolongs back and smooths once:
/// `z1 = P A_c^{-1} P^T r`, `z = z1 + omega (r - A z1)`.
pub struct LevelHierarchy<'a> {
    fine: &'a FeatureMatrix,
    fine_beta: f64,
    fine_omega: f64,
    parallel: bool,
    levels: Vec<Level>,
    assignments: Vec<ClusterAssignment>,
}

/// A hierarchy with a single coarse level.
pub type TwoLevelPreconditioner<'a> = LevelHierarchy<'a>;

impl<'a> LevelHierarchy<'a> {
    /// Two-level preconditioner from an already coarsened level.
    pub fn two_level(
        x: &'a FeatureMatrix,
        beta: f64,
        coarse: CoarseLevel,
        omega: f64,
        solver: CoarseSolverSpec,
    ) -> Result<Self> {
        check_omega(omega)?;
        if coarse.prolongation.n_fine() != x.n_features() {
            return Err(Error::DimensionMismatch {
                context: "two-level prolongation rows vs features",
                expected: x.n_features(),
                actual: coarse.prolongation.n_fine(),
            });
        }
        RidgeOperator::new(x, beta)?;
        let mass = coarse.galerkin_correction;
        let solve = make_solve(&coarse.coarse_matrix, coarse.beta, mass.as_ref(), solver, 1, true)?;
        Ok(Self {
            fine: x,
            fine_beta: beta,
            fine_omega: omega,
            parallel: false,
            levels: vec![Level {
                matrix: coarse.coarse_matrix,
                prolongation: coarse.prolongation,
                beta: coarse.beta,
                mass,
                solve,
                omega: f64::NAN,
            }],
            assignments: Vec::new(),
        })
    }

    /// Enables the rayon kernels for the fine-level operator.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn fine_matrix(&self) -> &'a FeatureMatrix {
        self.fine
    }

    pub fn fine_beta(&self) -> f64 {
        self.fine_beta
    }

    pub fn fine_omega(&self) -> f64 {
        self.fine_omega
    }

    /// Number of coarse levels.
    pub fn n_coarse_levels(&self) -> usize {
        self.levels.len()
    }

    /// Feature counts from the fine level down to the coarsest.
    pub fn level_sizes(&self) -> Vec<usize> {
        std::iter::once(self.fine.n_features())
            .chain(self.levels.iter().map(|l| l.matrix.n_features()))
            .collect()
    }

    /// Cluster assignments used to build each coarse level (empty for hand-built two-level setups).
    pub fn assignments(&self) -> &[ClusterAssignment] {
        &self.assignments
    }

    /// Prolongation from level `level - 1` to `level` (1-based).
    pub fn prolongation(&self, level: usize) -> &Prolongation {
        &self.levels[level - 1].prolongation
    }

    /// Ridge operator of the given level (0 = fine).
    pub fn operator(&self, level: usize) -> Result<RidgeOperator<'_>> {
        if level == 0 {
            Ok(RidgeOperator::new(self.fine, self.fine_beta)?.parallel(self.parallel))
        } else {
            let l = &self.levels[level - 1];
            RidgeOperator::new(&l.matrix, l.beta)?.with_mass(l.mass.as_ref())
        }
    }

    fn omega(&self, level: usize) -> f64 {
        if level == 0 {
            self.fine_omega
        } else {
            self.levels[level - 1].omega
        }
    }

    /// Preconditioner acting on level `level` (0 = fine), correcting through `level + 1`.
    pub fn at_level(&self, level: usize) -> LevelPreconditioner<'_, 'a> {
        LevelPreconditioner { hierarchy: self, level }
    }

    /// `z = M^{-1} r` on the fine level; returns inner iterations spent on level 1.
    pub fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        self.apply_at(0, r, z)
    }

    fn apply_at(&self, level: usize, r: &[f64], z: &mut [f64]) -> Result<usize> {
        let next = &self.levels[level];
        let op = self.operator(level)?;
        check_len("preconditioner input", op.dim(), r.len())?;
        check_len("preconditioner output", op.dim(), z.len())?;
        let rc = next.prolongation.restrict(r)?;
        let (ec, inner) = self
            .coarse_solve(level + 1, &rc)
            .map_err(|e| Error::CoarseSolve {
                level: level + 1,
                source: Box::new(e),
            })?;
        next.prolongation.prolong_into(&ec, z)?;
        let az = op.apply(z)?;
        let omega = self.omega(level);
        for ((zi, ri), azi) in z.iter_mut().zip(r).zip(&az) {
            *zi += omega * (ri - azi);
        }
        Ok(inner)
    }

    fn coarse_solve(&self, level: usize, rc: &[f64]) -> Result<(Vec<f64>, usize)> {
        let l = &self.levels[level - 1];
        match &l.solve {
            LevelSolve::Direct(chol) => {
                let sol = chol.solve(&nalgebra::DVector::from_column_slice(rc));
                Ok((sol.iter().copied().collect(), 0))
            }
            LevelSolve::InnerCg(cfg) => {
                let (x, rep) = cg(&self.operator(level)?, rc, cfg, None)?;
                Ok((x, rep.iterations))
            }
            LevelSolve::InnerFcg(cfg) => {
                let op = self.operator(level)?;
                let (x, rep) = if level < self.levels.len() {
                    fcg(&op, rc, cfg, &self.at_level(level))?
                } else {
                    fcg(&op, rc, cfg, &IdentityPreconditioner)?
                };
                Ok((x, rep.iterations))
            }
        }
    }
}

/// [`LevelHierarchy`] viewed as a preconditioner on one of its levels.
pub struct LevelPreconditioner<'h, 'a> {
    hierarchy: &'h LevelHierarchy<'a>,
    level: usize,
}

impl Preconditioner for LevelPreconditioner<'_, '_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        self.hierarchy.apply_at(self.level, r, z)
    }
}

impl Preconditioner for LevelHierarchy<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<usize> {
        self.apply_at(0, r, z)
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    Ok(())
}

/// `2 / (beta + lambda_max(X^T X))` or the fixed override.
pub fn smoothing_weight(x: &FeatureMatrix, beta: f64, mode: OmegaMode, seed: u64) -> Result<f64> {
    match mode {
        OmegaMode::Fixed(w) => {
            check_omega(w)?;
            Ok(w)
        }
        OmegaMode::Auto => {
            let gram = RidgeOperator::new(x, 0.0)?;
            let est = estimate_lambda_max(&gram, LAMBDA_MAX_TOL, LAMBDA_MAX_ITERS, seed)?;
            if !est.converged {
                log::warn!(
                    "power iteration stopped after {} iterations without meeting tolerance; lambda_max ~ {:e}",
                    est.iterations,
                    est.value
                );
            }
            let w = 2.0 / (beta + est.value);
            check_omega(w)?;
            Ok(w)
        }
    }
}

/// Dense Galerkin operator `X_c^T X_c + beta M` of a coarse level.
pub fn dense_level_operator(matrix: &FeatureMatrix, beta: f64, mass: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let mut a = matrix.gram_dense();
    match mass {
        Some(m) => a += m * beta,
        None => {
            for i in 0..a.nrows() {
                a[(i, i)] += beta;
            }
        }
    }
    a
}

fn make_solve(
    matrix: &FeatureMatrix,
    beta: f64,
    mass: Option<&DMatrix<f64>>,
    spec: CoarseSolverSpec,
    level: usize,
    coarsest: bool,
) -> Result<LevelSolve> {
    Ok(match spec {
        CoarseSolverSpec::DirectCholesky => {
            let dim = matrix.n_features();
            if dim > DEFAULT_DIRECT_CAP {
                return Err(Error::DenseCapExceeded {
                    dim,
                    cap: DEFAULT_DIRECT_CAP,
                });
            }
            if !coarsest {
                log::debug!("level {level}: direct solve on a non-coarsest level ignores deeper levels");
            }
            let a = dense_level_operator(matrix, beta, mass);
            LevelSolve::Direct(a.cholesky().ok_or(Error::CholeskyFailed { level, dim })?)
        }
        CoarseSolverSpec::InnerCg { tol, max_iters } => {
            let cfg = SolverConfig::default().with_tol(tol).with_max_iters(max_iters);
            cfg.validate()?;
            LevelSolve::InnerCg(cfg)
        }
        CoarseSolverSpec::InnerFcg { tol, max_iters } => {
            let cfg = SolverConfig::default().with_tol(tol).with_max_iters(max_iters);
            cfg.validate()?;
            LevelSolve::InnerFcg(cfg)
        }
    })
}

/// Builds a hierarchy by repeated cluster-then-coarsen.
///
/// `specs[l]` describes the clustering of level `l` and the solver used on
/// level `l + 1`. The coarsest level must be solved by dense Cholesky and
/// feature counts must strictly decrease.
pub fn build_hierarchy<'a>(
    x: &'a FeatureMatrix,
    beta: f64,
    specs: &[LevelSpec],
    config: &SolverConfig,
) -> Result<LevelHierarchy<'a>> {
    if specs.is_empty() {
        return Err(Error::InvalidArgument("hierarchy needs at least one level spec".into()));
    }
    if !matches!(specs.last().unwrap().coarse_solver, CoarseSolverSpec::DirectCholesky) {
        return Err(Error::InvalidArgument(
            "the coarsest level must use the direct Cholesky solver".into(),
        ));
    }
    RidgeOperator::new(x, beta)?;
    let fine_omega = smoothing_weight(x, beta, config.omega_mode, config.rng_seed)?;

    let mut levels: Vec<Level> = Vec::with_capacity(specs.len());
    let mut assignments = Vec::with_capacity(specs.len());
    for (idx, spec) in specs.iter().enumerate() {
        let level = idx + 1;
        let (above, above_beta, above_mass) = match levels.last() {
            None => (x, beta, None),
            Some(l) => (&l.matrix, l.beta, l.mass.as_ref()),
        };
        let assignment = spec.clustering.run(above)?;
        let fc = assignment.n_clusters();
        if fc >= above.n_features() {
            return Err(Error::InvalidArgument(format!(
                "level {level} has {fc} features but the level above has {}; sizes must strictly decrease",
                above.n_features()
            )));
        }
        let level_beta = spec.beta.unwrap_or(above_beta);
        let p = spec.interpolation.build(above, above_beta, &spec.clustering, &assignment)?;
        let coarse = coarsen(above, &p, level_beta)?;
        let mass = propagate_mass(above_mass, &p, coarse.galerkin_correction);
        let coarsest = level == specs.len();
        let solve = make_solve(&coarse.coarse_matrix, level_beta, mass.as_ref(), spec.coarse_solver, level, coarsest)?;
        let omega = if coarsest {
            f64::NAN
        } else {
            smoothing_weight(&coarse.coarse_matrix, level_beta, config.omega_mode, config.rng_seed)?
        };
        log::debug!("level {level}: {fc} features, nnz {}", coarse.coarse_matrix.nnz());
        levels.push(Level {
            matrix: coarse.coarse_matrix,
            prolongation: p,
            beta: level_beta,
            mass,
            solve,
            omega,
        });
        assignments.push(assignment);
    }
    Ok(LevelHierarchy {
        fine: x,
        fine_beta: beta,
        fine_omega,
        parallel: config.parallel,
        levels,
        assignments,
    })
}

/// `M_{l+1} = P^T M_l P`, keeping `None` for the identity.
fn propagate_mass(above: Option<&DMatrix<f64>>, p: &Prolongation, ptp: Option<DMatrix<f64>>) -> Option<DMatrix<f64>> {
    match above {
        None => ptp,
        Some(m) => {
            let pd = p.to_dense();
            Some(pd.transpose() * m * pd)
        }
    }
}
