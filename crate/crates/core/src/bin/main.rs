use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand_distr::{Distribution as _, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use subspace_reduce::bounds::{
    eta_admissibility_epsilon, min_reduced_dim, theorem_bound, theorem_failure_probability,
};
use subspace_reduce::harness::{
    generate_synthetic, read_dataset, run_experiment, write_dataset, write_reports, BundleJson,
    ExperimentConfig, SyntheticSpec, TruthJson,
};
use subspace_reduce::projection::{c0, concentration_failure_bound, empirical_concentration};
use subspace_reduce::seed::{stream_rng, tag};
use subspace_reduce::solver::{
    brute_force_oracle_with_budget, labeling_count, solve_best_model_with, DEFAULT_ORACLE_BUDGET,
    DEFAULT_RESTARTS,
};
use subspace_reduce::{
    reduce_solve_lift, DataSet, Distribution, Error, LiftConfig, RandomSpec, SolveReport,
    SolverConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "subspace-reduce",
    version,
    about = "Union-of-subspaces models with random-projection reduction"
)]
struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path; JSON results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative-improvement tolerance for the alternating solver.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Dataset CSV, one point per row.
    input: PathBuf,
    /// Skip a header line.
    #[arg(long)]
    header: bool,
    #[arg(long = "l")]
    l: usize,
    #[arg(long = "k")]
    k: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic union-of-subspaces dataset and its ground truth.
    Generate {
        #[arg(long)]
        ambient_dim: usize,
        #[arg(long = "l")]
        l: usize,
        #[arg(long = "k")]
        k: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// Points per subspace, comma separated.
        #[arg(long, value_delimiter = ',')]
        balance: Option<Vec<usize>>,
    },
    /// Multi-start alternating solve in the full dimension.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
    /// Exhaustive solve over all labelings.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
    },
    /// Sketch, solve in the reduced space, and lift the partition back.
    ReduceSolve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "gaussian")]
        dist: Distribution,
        #[arg(long, conflicts_with_all = ["eta", "delta"])]
        r: Option<usize>,
        /// The bound's epsilon when `--r` is given.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, requires = "delta")]
        eta: Option<f64>,
        #[arg(long, requires = "eta")]
        delta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
        /// Do not compute the full-space optimum for the bound.
        #[arg(long)]
        no_full_oracle: bool,
    },
    /// Evaluate the closed-form constants and bounds.
    Bounds {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        e0: Option<f64>,
        #[arg(long = "l")]
        l: Option<usize>,
        #[arg(long = "d")]
        d: Option<usize>,
        #[arg(long = "k")]
        k: Option<usize>,
        #[arg(long = "m")]
        m: Option<usize>,
        #[arg(long = "r")]
        r: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Run a TOML-configured Monte Carlo experiment.
    Experiment { config: PathBuf },
    /// Empirical norm-concentration rate of a sketch family.
    CheckConcentration {
        #[arg(long, default_value = "gaussian")]
        dist: Distribution,
        #[arg(long = "r")]
        r: usize,
        #[arg(long)]
        ambient_dim: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 100)]
        vectors: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Serialize)]
struct SolveJson {
    error: f64,
    certified_optimal: bool,
    partition: Vec<Vec<usize>>,
    labels: Vec<usize>,
    bundle: BundleJson,
    restarts_used: usize,
    iterations: Vec<usize>,
    best_restart: usize,
    seed: u64,
}

impl From<&SolveReport> for SolveJson {
    fn from(rep: &SolveReport) -> Self {
        Self {
            error: rep.error,
            certified_optimal: rep.certified_optimal,
            partition: rep.partition.groups().to_vec(),
            labels: rep.partition.labels(),
            bundle: BundleJson::from_bundle(&rep.bundle),
            restarts_used: rep.restarts_used,
            iterations: rep.iterations.clone(),
            best_restart: rep.best_restart,
            seed: rep.seed,
        }
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    Ok(())
}

fn load(input: &Input) -> Result<DataSet, Error> {
    read_dataset(&input.input, input.header)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let out = cli.out.as_deref();
    let solver_cfg = |restarts: usize, budget: u64| {
        let mut cfg = SolverConfig {
            restarts,
            oracle_budget: budget,
            ..SolverConfig::default()
        };
        if let Some(tol) = cli.tol {
            cfg.tol = tol;
        }
        cfg
    };

    match &cli.command {
        Command::Generate {
            ambient_dim,
            l,
            k,
            count,
            noise,
            balance,
        } => {
            let out = out.ok_or_else(|| Error::InvalidInput("generate needs --out PATH".into()))?;
            let spec = SyntheticSpec {
                ambient_dim: *ambient_dim,
                l: *l,
                k: *k,
                count: *count,
                noise_sigma: *noise,
                seed: cli.seed,
                balance: balance.clone(),
            };
            let (data, truth) = generate_synthetic(&spec)?;
            write_dataset(out, &data)?;
            let sidecar = out.with_extension("truth.json");
            subspace_reduce::harness::io::write_json(&sidecar, &TruthJson::new(&spec, &truth))?;
        }
        Command::Solve {
            input,
            restarts,
            max_iter,
        } => {
            let f = load(input)?;
            let mut cfg = solver_cfg(*restarts, DEFAULT_ORACLE_BUDGET);
            cfg.max_iter = *max_iter;
            let rep = solve_best_model_with(&f, input.l, input.k, &cfg, cli.seed)?;
            emit(out, &SolveJson::from(&rep))?;
        }
        Command::Oracle { input, budget } => {
            let f = load(input)?;
            let rep = brute_force_oracle_with_budget(&f, input.l, input.k, *budget)?;
            emit(out, &SolveJson::from(&rep))?;
        }
        Command::ReduceSolve {
            input,
            dist,
            r,
            epsilon,
            eta,
            delta,
            restarts,
            budget,
            no_full_oracle,
        } => {
            let f = load(input)?.normalize()?;
            let (l, k) = (input.l, input.k);
            let d = f.numerical_rank().max(k);
            let (r, epsilon) = match (r, eta, delta) {
                (Some(r), _, _) => (*r, *epsilon),
                (None, Some(eta), Some(delta)) => (
                    min_reduced_dim(*eta, *delta, l, d, k, f.count())?,
                    eta_admissibility_epsilon(*eta, l, d, k)?,
                ),
                _ => {
                    return Err(Error::InvalidInput(
                        "reduce-solve needs --r or both --eta and --delta".into(),
                    ))
                }
            };
            let solver = solver_cfg(*restarts, *budget);
            let full_e0 = if !no_full_oracle && labeling_count(l, f.count()) <= u128::from(*budget)
            {
                Some(brute_force_oracle_with_budget(&f, l, k, *budget)?.error)
            } else {
                None
            };
            let spec = RandomSpec::new(*dist, r, f.ambient_dim(), cli.seed)?;
            let cfg = LiftConfig {
                solver,
                solver_seed: cli.seed,
                epsilon,
                full_e0,
            };
            let rep = reduce_solve_lift(&f, &spec, l, k, &cfg)?;
            emit(out, &rep.summary())?;
        }
        Command::Bounds {
            epsilon,
            e0,
            l,
            d,
            k,
            m,
            r,
            eta,
            delta,
        } => {
            let mut obj = serde_json::Map::new();
            if let Some(eps) = epsilon {
                obj.insert("c0".into(), json!(c0(*eps)?));
                if let Some(r) = r {
                    obj.insert(
                        "concentration_failure_bound".into(),
                        json!(concentration_failure_bound(*r, *eps)?),
                    );
                    if let Some(m) = m {
                        obj.insert(
                            "theorem_failure_probability".into(),
                            json!(theorem_failure_probability(*m, *r, *eps)?),
                        );
                    }
                }
                if let (Some(e0), Some(l), Some(d), Some(k)) = (e0, l, d, k) {
                    obj.insert(
                        "theorem_bound".into(),
                        json!(theorem_bound(*e0, *eps, *l, *d, *k)?),
                    );
                }
            }
            if let (Some(eta), Some(l), Some(d), Some(k)) = (eta, l, d, k) {
                obj.insert(
                    "eta_epsilon".into(),
                    json!(eta_admissibility_epsilon(*eta, *l, *d, *k)?),
                );
                if let (Some(delta), Some(m)) = (delta, m) {
                    obj.insert(
                        "min_reduced_dim".into(),
                        json!(min_reduced_dim(*eta, *delta, *l, *d, *k, *m)?),
                    );
                }
            }
            if obj.is_empty() {
                return Err(Error::InvalidInput(
                    "bounds needs --epsilon, or --eta with --l --d --k".into(),
                ));
            }
            emit(out, &Value::Object(obj))?;
        }
        Command::Experiment { config } => {
            let mut cfg = ExperimentConfig::from_path(config)?;
            if let Some(tol) = cli.tol {
                cfg.solver.solver.tol = tol;
            }
            let report = run_experiment(&cfg)?;
            let base = config.parent();
            write_reports(&report, &cfg, base)?;
            if cfg.output.summary.is_none() {
                emit(out, &report.summary)?;
            }
            if report.has_hard_violation() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::CheckConcentration {
            dist,
            r,
            ambient_dim,
            epsilon,
            vectors,
            trials,
        } => {
            let spec = RandomSpec::new(*dist, *r, *ambient_dim, cli.seed)?;
            let mut rng = stream_rng(cli.seed, tag::VECTORS);
            let xs: Vec<DVector<f64>> = (0..*vectors)
                .map(|_| {
                    let v: DVector<f64> =
                        DVector::from_fn(*ambient_dim, |_, _| StandardNormal.sample(&mut rng));
                    let n = v.norm();
                    v / n
                })
                .collect();
            let rep = empirical_concentration(&spec, *epsilon, &xs, *trials)?;
            let slack = rep.theoretical_bound + 3.0 * rep.binomial_sigma();
            emit(
                out,
                &json!({
                    "report": rep,
                    "binomial_sigma": rep.binomial_sigma(),
                    "within_bound": rep.empirical_rate <= slack,
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
