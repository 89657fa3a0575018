//! Reduce, solve, lift: sketch the data into `R^r`, find the best partition
//! of the sketched points there, and fit the original points with that
//! partition.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bounds::{theorem_bound, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::fit::bundle_from_partition;
use crate::metrics::bundle_error;
use crate::model::{Bundle, DataSet, Partition};
use crate::projection::{sample_matrix, RandomSpec};
use crate::solver::{
    brute_force_oracle_with_budget, labeling_count, solve_best_model_with, SolverConfig,
};

/// Frobenius-norm tolerance for the unit-norm precondition.
pub const NORMALIZED_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LiftConfig {
    pub solver: SolverConfig,
    /// Seed for the reduced-space solver when it is not exhaustive.
    pub solver_seed: u64,
    /// The `eps` used in the error bound.
    pub epsilon: f64,
    /// Optimal full-space error `e_0(F)`, if known. Enables the bound check.
    pub full_e0: Option<f64>,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            solver_seed: 0,
            epsilon: 0.5,
            full_e0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    /// Best partition found for `A F`.
    pub reduced_partition: Partition,
    /// Bundle generated in `R^N` by `reduced_partition`.
    pub lifted_bundle: Bundle,
    /// `e(F, lifted_bundle)`.
    pub lifted_error: f64,
    /// Error of the reduced-space solution, `e_0(A F)` when certified.
    pub reduced_error: f64,
    /// Whether the reduced-space solve was exhaustive.
    pub reduced_certified: bool,
    /// Numerical rank of `F`.
    pub rank: usize,
    pub epsilon: f64,
    pub r: usize,
    pub full_e0: Option<f64>,
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

/// Row-friendly view of a [`LiftReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftSummary {
    pub r: usize,
    pub epsilon: f64,
    pub rank: usize,
    pub e0: Option<f64>,
    pub reduced_error: f64,
    pub reduced_certified: bool,
    pub lifted_error: f64,
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub labels: Vec<usize>,
}

impl LiftReport {
    pub fn summary(&self) -> LiftSummary {
        LiftSummary {
            r: self.r,
            epsilon: self.epsilon,
            rank: self.rank,
            e0: self.full_e0,
            reduced_error: self.reduced_error,
            reduced_certified: self.reduced_certified,
            lifted_error: self.lifted_error,
            bound_value: self.bound_value,
            bound_satisfied: self.bound_satisfied,
            labels: self.reduced_partition.labels(),
        }
    }
}

/// Samples `A` from `spec` and runs [`reduce_solve_lift_with_matrix`].
pub fn reduce_solve_lift(
    f: &DataSet,
    spec: &RandomSpec,
    l: usize,
    k: usize,
    cfg: &LiftConfig,
) -> Result<LiftReport> {
    spec.validate()?;
    if spec.ambient_dim != f.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.ambient_dim(),
            found: spec.ambient_dim,
        });
    }
    let a = sample_matrix(spec);
    reduce_solve_lift_with_matrix(f, &a, l, k, cfg)
}

/// Solves the model in the sketched space `A F` (exhaustively when `l^m`
/// fits the oracle budget, otherwise by multi-start alternation) and lifts
/// the resulting partition back to `F`.
pub fn reduce_solve_lift_with_matrix(
    f: &DataSet,
    a: &DMatrix<f64>,
    l: usize,
    k: usize,
    cfg: &LiftConfig,
) -> Result<LiftReport> {
    if !f.is_normalized(NORMALIZED_TOL) {
        return Err(Error::NotNormalized {
            norm: f.frobenius_norm(),
        });
    }
    let reduced = f.project(a)?;
    let exhaustive = labeling_count(l, f.count()) <= u128::from(cfg.solver.oracle_budget);
    let solved = if exhaustive {
        brute_force_oracle_with_budget(&reduced, l, k, cfg.solver.oracle_budget)?
    } else {
        solve_best_model_with(&reduced, l, k, &cfg.solver, cfg.solver_seed)?
    };
    let lifted_bundle = bundle_from_partition(f, &solved.partition, k)?;
    let lifted_error = bundle_error(f, &lifted_bundle)?;
    let rank = f.numerical_rank();
    let bound_value = match cfg.full_e0 {
        Some(e0) => Some(theorem_bound(e0, cfg.epsilon, l, rank.max(k), k)?),
        None => None,
    };
    let bound_satisfied = bound_value.map(|b| lifted_error <= b + BOUND_SLACK);
    Ok(LiftReport {
        reduced_partition: solved.partition,
        lifted_bundle,
        lifted_error,
        reduced_error: solved.error,
        reduced_certified: solved.certified_optimal,
        rank,
        epsilon: cfg.epsilon,
        r: a.nrows(),
        full_e0: cfg.full_e0,
        bound_value,
        bound_satisfied,
    })
}
