//! Monte Carlo runner for the reduce/solve/lift bound.
//!
//! Each trial draws its data (when resampling), sketch, and solver restarts
//! from seeds derived from `(master_seed, trial)`, so every row can be
//! recomputed from the config alone.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{eta_admissibility_epsilon, min_reduced_dim, BOUND_SLACK};
use crate::error::{Error, Result};
use crate::harness::config::{DatasetSource, ExperimentConfig, ReductionMode};
use crate::harness::io::{read_dataset, write_json};
use crate::harness::synth::generate_synthetic;
use crate::metrics::bundle_error;
use crate::model::{check_model, DataSet};
use crate::pipeline::{reduce_solve_lift, LiftConfig};
use crate::projection::RandomSpec;
use crate::seed::{derive_seed, tag};
use crate::solver::{brute_force_oracle_with_budget, labeling_count};

/// Slack for the hard invariants checked on every trial.
pub const HARD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub r: usize,
    pub epsilon: f64,
    pub rank: usize,
    pub e0: Option<f64>,
    pub reduced_error: f64,
    pub reduced_certified: bool,
    pub lifted_error: f64,
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
    /// `e_0(A F) <= (1 + eps) e_0(F)`, when both are certified.
    pub inflation_ok: Option<bool>,
    pub hard_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub trials: usize,
    pub with_e0: usize,
    pub reduced_certified: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violations {
    pub bound: usize,
    pub inflation: usize,
    pub hard: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rates {
    pub bound_violation_rate: Option<f64>,
    pub inflation_violation_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config_echo: ExperimentConfig,
    pub totals: Totals,
    pub violations: Violations,
    pub rates: Rates,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<TrialRow>,
    /// Wall time of each trial in seconds.
    pub timings: Vec<f64>,
    pub summary: Summary,
}

impl ExperimentReport {
    /// True when some trial broke an invariant that must always hold (as
    /// opposed to a probabilistic bound).
    pub fn has_hard_violation(&self) -> bool {
        self.summary.violations.hard > 0
    }
}

enum Data {
    Fixed(DataSet),
    Synthetic,
}

fn trial_dataset(cfg: &ExperimentConfig, data: &Data, trial: usize) -> Result<DataSet> {
    match (data, &cfg.dataset) {
        (Data::Fixed(f), _) => Ok(f.clone()),
        (Data::Synthetic, DatasetSource::Synthetic { spec, resample }) => {
            let mut spec = spec.clone();
            if *resample {
                spec.seed = derive_seed(cfg.master_seed, tag::DATA, trial as u64);
            }
            Ok(generate_synthetic(&spec)?.0)
        }
        (Data::Synthetic, DatasetSource::File { .. }) => {
            unreachable!("file data is loaded up front")
        }
    }
}

fn run_trial(cfg: &ExperimentConfig, data: &Data, trial: usize) -> Result<TrialRow> {
    let f = trial_dataset(cfg, data, trial)?;
    let (l, k) = (cfg.model.l, cfg.model.k);
    let m = f.count();
    let d = f.numerical_rank().max(k);
    let budget = cfg.solver.solver.oracle_budget;

    let e0 = if cfg.solver.full_oracle && labeling_count(l, m) <= u128::from(budget) {
        Some(brute_force_oracle_with_budget(&f, l, k, budget)?.error)
    } else {
        None
    };

    let (r, epsilon) = match cfg.reduction.mode()? {
        ReductionMode::Fixed { r, epsilon } => (r, epsilon),
        ReductionMode::Auto { eta, delta } => (
            min_reduced_dim(eta, delta, l, d, k, m)?,
            eta_admissibility_epsilon(eta, l, d, k)?,
        ),
    };
    let spec = RandomSpec::new(
        cfg.reduction.distribution,
        r,
        f.ambient_dim(),
        derive_seed(cfg.master_seed, tag::SKETCH, trial as u64),
    )?;
    let lift_cfg = LiftConfig {
        solver: cfg.solver.solver,
        solver_seed: derive_seed(cfg.master_seed, tag::SOLVER, trial as u64),
        epsilon,
        full_e0: e0,
    };
    let rep = reduce_solve_lift(&f, &spec, l, k, &lift_cfg)?;

    let recomputed = bundle_error(&f, &rep.lifted_bundle)?;
    let mut hard_ok = (recomputed - rep.lifted_error).abs() <= HARD_TOL && rep.reduced_error >= 0.0;
    if let Some(e0) = e0 {
        hard_ok &= rep.lifted_error >= e0 - HARD_TOL;
    }
    let inflation_ok = match (e0, rep.reduced_certified) {
        (Some(e0), true) => Some(rep.reduced_error <= (1.0 + epsilon) * e0 + BOUND_SLACK),
        _ => None,
    };

    Ok(TrialRow {
        trial,
        r,
        epsilon,
        rank: rep.rank,
        e0,
        reduced_error: rep.reduced_error,
        reduced_certified: rep.reduced_certified,
        lifted_error: rep.lifted_error,
        bound_value: rep.bound_value,
        bound_satisfied: rep.bound_satisfied,
        inflation_ok,
        hard_ok,
    })
}

fn rate(bad: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| bad as f64 / total as f64)
}

/// Validates the config, loads the data, and runs every trial. Rows come
/// back in trial order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let data = match &cfg.dataset {
        DatasetSource::File { path, header } => {
            let f = read_dataset(path, *header)?.normalize()?;
            check_model(cfg.model.l, cfg.model.k, f.count(), f.ambient_dim())
                .map_err(|e| Error::Config(e.to_string()))?;
            Data::Fixed(f)
        }
        DatasetSource::Synthetic {
            spec,
            resample: false,
        } => Data::Fixed(generate_synthetic(spec)?.0),
        DatasetSource::Synthetic { .. } => Data::Synthetic,
    };

    let start = Instant::now();
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let t0 = Instant::now();
            run_trial(cfg, &data, t).map(|row| (row, t0.elapsed().as_secs_f64()))
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed_seconds = start.elapsed().as_secs_f64();
    let (rows, timings): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let bound_checked = rows.iter().filter(|r| r.bound_satisfied.is_some()).count();
    let inflation_checked = rows.iter().filter(|r| r.inflation_ok.is_some()).count();
    let violations = Violations {
        bound: rows
            .iter()
            .filter(|r| r.bound_satisfied == Some(false))
            .count(),
        inflation: rows
            .iter()
            .filter(|r| r.inflation_ok == Some(false))
            .count(),
        hard: rows.iter().filter(|r| !r.hard_ok).count(),
    };
    let summary = Summary {
        config_echo: cfg.clone(),
        totals: Totals {
            trials: rows.len(),
            with_e0: rows.iter().filter(|r| r.e0.is_some()).count(),
            reduced_certified: rows.iter().filter(|r| r.reduced_certified).count(),
        },
        rates: Rates {
            bound_violation_rate: rate(violations.bound, bound_checked),
            inflation_violation_rate: rate(violations.inflation, inflation_checked),
        },
        violations,
        elapsed_seconds,
    };
    Ok(ExperimentReport {
        rows,
        timings,
        summary,
    })
}

/// The rows as CSV text with a header line.
pub fn rows_csv(rows: &[TrialRow]) -> Result<String> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    wtr.write_record([
        "trial",
        "r",
        "epsilon",
        "rank",
        "e0",
        "reduced_error",
        "reduced_certified",
        "lifted_error",
        "bound_value",
        "bound_satisfied",
        "inflation_ok",
        "hard_ok",
    ])?;
    for row in rows {
        wtr.serialize(row)?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn timings_csv(timings: &[f64]) -> String {
    let mut out = String::from("trial,wall_seconds\n");
    for (t, s) in timings.iter().enumerate() {
        out.push_str(&format!("{t},{s}\n"));
    }
    out
}

/// Writes rows, timings and summary to the paths named in the config,
/// resolving relative paths against `base` when given.
pub fn write_reports(
    report: &ExperimentReport,
    cfg: &ExperimentConfig,
    base: Option<&Path>,
) -> Result<()> {
    let resolve = |p: &Path| match base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    };
    if let Some(path) = &cfg.output.rows {
        std::fs::write(resolve(path), rows_csv(&report.rows)?)?;
    }
    if let Some(path) = &cfg.output.timings {
        std::fs::write(resolve(path), timings_csv(&report.timings))?;
    }
    if let Some(path) = &cfg.output.summary {
        write_json(&resolve(path), &report.summary)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: usize) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            r#"
            trials = {trials}
            master_seed = 11
            [dataset]
            source = "synthetic"
            ambient_dim = 12
            l = 2
            k = 1
            count = 6
            noise_sigma = 0.05
            [model]
            l = 2
            k = 1
            [reduction]
            distribution = "gaussian"
            r = 3
            epsilon = 0.5
            "#
        ))
        .unwrap()
    }

    #[test]
    fn zero_trials() {
        let rep = run_experiment(&config(0)).unwrap();
        assert!(rep.rows.is_empty());
        assert_eq!(rep.summary.totals.trials, 0);
        assert_eq!(rep.summary.rates.bound_violation_rate, None);
        assert!(!rep.has_hard_violation());
        assert_eq!(rows_csv(&rep.rows).unwrap().lines().count(), 1);
    }

    #[test]
    fn rows_are_reproducible() {
        let a = run_experiment(&config(4)).unwrap();
        let b = run_experiment(&config(4)).unwrap();
        assert_eq!(rows_csv(&a.rows).unwrap(), rows_csv(&b.rows).unwrap());
        assert_eq!(a.rows.len(), 4);
        assert!(a
            .rows
            .iter()
            .all(|r| r.hard_ok && r.e0.is_some() && r.reduced_certified));
        assert_eq!(a.rows[2].trial, 2);
    }

    #[test]
    fn auto_reduction_mode() {
        let mut cfg = config(1);
        cfg.reduction.r = None;
        cfg.reduction.epsilon = None;
        cfg.reduction.eta = Some(0.9);
        cfg.reduction.delta = Some(0.5);
        let rep = run_experiment(&cfg).unwrap();
        let row = &rep.rows[0];
        let d = row.rank;
        assert_eq!(row.r, min_reduced_dim(0.9, 0.5, 2, d, 1, 6).unwrap());
        assert!((row.epsilon - eta_admissibility_epsilon(0.9, 2, d, 1).unwrap()).abs() < 1e-15);
        // bound = (1+eps) e0 + eps c1 <= e0 + eta since e0 <= 1.
        assert!(row.bound_value.unwrap() <= row.e0.unwrap() + 0.9 + 1e-12);
    }
}
