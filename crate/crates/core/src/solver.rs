//! Search for an optimal bundle.
//!
//! [`alternate_minimize`] alternates between the two halves of the
//! bundle/partition correspondence until the error stops improving.
//! [`solve_best_model`] runs it from many seeded random labelings.
//! [`brute_force_oracle`] enumerates every labeling and so returns the true
//! minimal error `e_0(F)` for instances small enough to enumerate.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{bundle_from_partition, partition_from_bundle};
use crate::metrics::bundle_error;
use crate::model::{check_model, validate, Bundle, DataSet, Partition};
use crate::seed::stream_rng;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub oracle_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be >= 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParams("max_iter must be >= 1".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "tol must be finite and >= 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub bundle: Bundle,
    /// The partition generated by `bundle`.
    pub partition: Partition,
    pub error: f64,
    pub restarts_used: usize,
    /// Number of bundle fits performed by each restart.
    pub iterations: Vec<usize>,
    /// Error after every fit, per restart. Empty for the oracle.
    pub error_traces: Vec<Vec<f64>>,
    /// Restart that produced the returned solution.
    pub best_restart: usize,
    pub seed: u64,
    /// Set only by the exhaustive oracle.
    pub certified_optimal: bool,
}

struct Run {
    bundle: Bundle,
    partition: Partition,
    errors: Vec<f64>,
}

/// Moves points into empty groups: each empty group takes the point with the
/// largest residual among groups that keep at least one member.
fn repair_empty_groups(labels: &mut [usize], residual: &mut [f64], l: usize) {
    let mut sizes = vec![0usize; l];
    for &lab in labels.iter() {
        sizes[lab] += 1;
    }
    for group in 0..l {
        if sizes[group] != 0 {
            continue;
        }
        let mut pick: Option<usize> = None;
        for j in 0..labels.len() {
            if sizes[labels[j]] < 2 {
                continue;
            }
            if pick.is_none_or(|p| residual[j] > residual[p]) {
                pick = Some(j);
            }
        }
        // l < m guarantees some group has two members.
        let Some(j) = pick else { break };
        sizes[labels[j]] -= 1;
        labels[j] = group;
        sizes[group] = 1;
        residual[j] = 0.0;
    }
}

fn alternate(
    f: &DataSet,
    l: usize,
    k: usize,
    init: &Partition,
    tol: f64,
    max_iter: usize,
) -> Result<Run> {
    let mut s = init.clone();
    let mut b = bundle_from_partition(f, &s, k)?;
    let mut err = bundle_error(f, &b)?;
    let mut errors = vec![err];
    while errors.len() < max_iter && err > 0.0 {
        let (assigned, trace) = partition_from_bundle(f, &b)?;
        let mut labels = assigned.labels();
        let mut residual = trace.distance;
        repair_empty_groups(&mut labels, &mut residual, l);
        let next = Partition::from_labels(&labels, l)?;
        if next == s {
            break;
        }
        let b_next = bundle_from_partition(f, &next, k)?;
        let err_next = bundle_error(f, &b_next)?;
        let improvement = err - err_next;
        s = next;
        b = b_next;
        err = err_next;
        errors.push(err);
        if improvement <= tol * (err + improvement) {
            break;
        }
    }
    let (partition, _) = partition_from_bundle(f, &b)?;
    Ok(Run {
        bundle: b,
        partition,
        errors,
    })
}

/// Alternates fitting (partition to bundle) and assignment (bundle to
/// partition) from `init` until the relative improvement drops below `tol`,
/// the partition stops changing, or `max_iter` fits have been made.
pub fn alternate_minimize(
    f: &DataSet,
    l: usize,
    k: usize,
    init: &Partition,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    check_model(l, k, f.count(), f.ambient_dim())?;
    validate(init.groups(), f.count(), l).map_err(Error::InvalidInit)?;
    if max_iter == 0 {
        return Err(Error::InvalidParams("max_iter must be >= 1".into()));
    }
    let run = alternate(f, l, k, init, tol, max_iter)?;
    let error = bundle_error(f, &run.bundle)?;
    Ok(SolveReport {
        bundle: run.bundle,
        partition: run.partition,
        error,
        restarts_used: 1,
        iterations: vec![run.errors.len()],
        error_traces: vec![run.errors],
        best_restart: 0,
        seed: 0,
        certified_optimal: false,
    })
}

/// Uniform random labeling for restart `restart` of a run seeded by `seed`.
pub fn random_partition(m: usize, l: usize, seed: u64, restart: u64) -> Partition {
    let mut rng = stream_rng(seed, restart);
    let labels: Vec<usize> = (0..m).map(|_| rng.random_range(0..l)).collect();
    Partition::from_labels(&labels, l).expect("labels drawn in range")
}

/// Multi-start alternating minimization with the default tolerance and
/// iteration cap.
pub fn solve_best_model(
    f: &DataSet,
    l: usize,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<SolveReport> {
    let cfg = SolverConfig {
        restarts,
        ..SolverConfig::default()
    };
    solve_best_model_with(f, l, k, &cfg, seed)
}

/// Runs `cfg.restarts` alternations from seeded random labelings and keeps
/// the lowest error, preferring the lowest restart index on ties.
pub fn solve_best_model_with(
    f: &DataSet,
    l: usize,
    k: usize,
    cfg: &SolverConfig,
    seed: u64,
) -> Result<SolveReport> {
    check_model(l, k, f.count(), f.ambient_dim())?;
    cfg.validate()?;
    let m = f.count();
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let init = random_partition(m, l, seed, r as u64);
            alternate(f, l, k, &init, cfg.tol, cfg.max_iter)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    let mut best_err = f64::INFINITY;
    let mut finals = Vec::with_capacity(runs.len());
    for (r, run) in runs.iter().enumerate() {
        let e = bundle_error(f, &run.bundle)?;
        if e < best_err {
            best = r;
            best_err = e;
        }
        finals.push(e);
    }
    let iterations = runs.iter().map(|r| r.errors.len()).collect();
    let error_traces = runs.iter().map(|r| r.errors.clone()).collect();
    let Run {
        bundle, partition, ..
    } = runs.into_iter().nth(best).expect("restarts >= 1");
    Ok(SolveReport {
        bundle,
        partition,
        error: best_err,
        restarts_used: cfg.restarts,
        iterations,
        error_traces,
        best_restart: best,
        seed,
        certified_optimal: false,
    })
}

/// Number of ordered labelings `l^m`, saturating.
pub fn labeling_count(l: usize, m: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..m {
        total = total.saturating_mul(l as u128);
    }
    total
}

fn decode_labels(mut code: u64, l: usize, labels: &mut [usize]) {
    for slot in labels.iter_mut() {
        *slot = (code % l as u64) as usize;
        code /= l as u64;
    }
}

/// Exhaustive search with the default budget of 10^7 labelings.
pub fn brute_force_oracle(f: &DataSet, l: usize, k: usize) -> Result<SolveReport> {
    brute_force_oracle_with_budget(f, l, k, DEFAULT_ORACLE_BUDGET)
}

/// Fits the bundle generated by every one of the `l^m` labelings and returns
/// the one with the smallest `e(F, B)`, which is `e_0(F)`.
pub fn brute_force_oracle_with_budget(
    f: &DataSet,
    l: usize,
    k: usize,
    budget: u64,
) -> Result<SolveReport> {
    check_model(l, k, f.count(), f.ambient_dim())?;
    let m = f.count();
    let required = labeling_count(l, m);
    if required > u128::from(budget) {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let total = required as u64;
    let (best_code, _) = (0..total)
        .into_par_iter()
        .map_init(
            || vec![0usize; m],
            |labels, code| -> Result<(u64, f64)> {
                decode_labels(code, l, labels);
                let s = Partition::from_labels(labels, l)?;
                let b = bundle_from_partition(f, &s, k)?;
                Ok((code, bundle_error(f, &b)?))
            },
        )
        .try_reduce(
            || (u64::MAX, f64::INFINITY),
            |a, b| {
                let better = b.1 < a.1 || (b.1 == a.1 && b.0 < a.0);
                Ok(if better { b } else { a })
            },
        )?;

    let mut labels = vec![0usize; m];
    decode_labels(best_code, l, &mut labels);
    let s = Partition::from_labels(&labels, l)?;
    let bundle = bundle_from_partition(f, &s, k)?;
    let (partition, _) = partition_from_bundle(f, &bundle)?;
    let error = bundle_error(f, &bundle)?;
    Ok(SolveReport {
        bundle,
        partition,
        error,
        restarts_used: 0,
        iterations: Vec::new(),
        error_traces: Vec::new(),
        best_restart: 0,
        seed: 0,
        certified_optimal: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ek_min_error;

    fn axis_data() -> DataSet {
        DataSet::from_points(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 3.0, 0.0],
        ])
        .unwrap()
    }

    fn noisy() -> DataSet {
        DataSet::from_points(&[
            vec![1.0, 0.1, 0.05],
            vec![2.0, -0.1, 0.0],
            vec![-1.5, 0.05, 0.1],
            vec![0.1, 1.0, -0.05],
            vec![0.0, 2.0, 0.1],
            vec![-0.05, -1.2, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn ground_truth_init_converges_in_one_iteration() {
        let f = axis_data();
        let init = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let rep = alternate_minimize(&f, 2, 1, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(rep.error < 1e-12);
        assert_eq!(rep.iterations, vec![1]);
        assert_eq!(rep.partition, init);
    }

    #[test]
    fn single_group_is_one_fit() {
        let f = noisy();
        let init = Partition::new(vec![(0..6).collect()], 6).unwrap();
        let rep = alternate_minimize(&f, 1, 1, &init, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(rep.iterations, vec![1]);
        assert!((rep.error - ek_min_error(f.points(), 1)).abs() < 1e-12);
    }

    #[test]
    fn invalid_init_rejected() {
        let f = axis_data();
        let bad = Partition::new(vec![vec![0, 1, 2, 3]], 4).unwrap();
        assert!(matches!(
            alternate_minimize(&f, 2, 1, &bad, DEFAULT_TOL, DEFAULT_MAX_ITER),
            Err(Error::InvalidInit(_))
        ));
        let init = Partition::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        assert!(matches!(
            alternate_minimize(&f, 2, 3, &init, DEFAULT_TOL, DEFAULT_MAX_ITER),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn repair_fills_empty_group_with_worst_point() {
        let mut labels = vec![0, 0, 0, 1];
        let mut residual = vec![0.1, 0.7, 0.3, 0.9];
        repair_empty_groups(&mut labels, &mut residual, 3);
        // Point 3 is alone in group 1, so point 1 moves.
        assert_eq!(labels, vec![0, 2, 0, 1]);
    }

    #[test]
    fn oracle_on_axis_data() {
        let f = axis_data();
        let rep = brute_force_oracle(&f, 2, 1).unwrap();
        assert!(rep.error < 1e-12);
        assert!(rep.certified_optimal);
        let groups = rep.partition.as_set_partition();
        assert!(groups.contains(&vec![0, 1]) && groups.contains(&vec![2, 3]));
    }

    #[test]
    fn oracle_single_group() {
        let f = noisy();
        let rep = brute_force_oracle(&f, 1, 1).unwrap();
        assert!((rep.error - ek_min_error(f.points(), 1)).abs() < 1e-12);
    }

    #[test]
    fn oracle_budget() {
        let f = noisy();
        match brute_force_oracle_with_budget(&f, 2, 1, 63) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 64);
                assert_eq!(budget, 63);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(brute_force_oracle_with_budget(&f, 2, 1, 64).is_ok());
    }

    #[test]
    fn solver_is_deterministic_and_dominated_by_oracle() {
        let f = noisy();
        let a = solve_best_model(&f, 2, 1, 10, 42).unwrap();
        let b = solve_best_model(&f, 2, 1, 10, 42).unwrap();
        assert_eq!(a.error.to_bits(), b.error.to_bits());
        assert_eq!(a.partition, b.partition);
        let oracle = brute_force_oracle(&f, 2, 1).unwrap();
        assert!(a.error >= oracle.error - 1e-9);
        for trace in &a.error_traces {
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn zero_restarts_rejected() {
        assert!(solve_best_model(&noisy(), 2, 1, 0, 1).is_err());
    }
}
