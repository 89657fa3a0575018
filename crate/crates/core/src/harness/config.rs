//! Experiment configuration, read from TOML.
//!
//! ```toml
//! trials = 100
//! master_seed = 7
//!
//! [dataset]
//! source = "synthetic"      # or "file" with `path` and optional `header`
//! ambient_dim = 20
//! l = 2
//! k = 1
//! count = 8
//! noise_sigma = 0.01
//!
//! [model]
//! l = 2
//! k = 1
//!
//! [reduction]
//! distribution = "gaussian"
//! r = 4
//! epsilon = 0.5             # or `eta` and `delta` to derive both r and epsilon
//!
//! [solver]
//! restarts = 20
//!
//! [output]
//! rows = "rows.csv"
//! summary = "summary.json"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::synth::SyntheticSpec;
use crate::model::check_model;
use crate::projection::Distribution;
use crate::solver::SolverConfig;

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DatasetSource {
    /// A dataset CSV, normalized on load.
    File {
        path: PathBuf,
        #[serde(default)]
        header: bool,
    },
    /// Synthetic data. With `resample` (the default) every trial draws a new
    /// dataset from a seed derived from the master seed; otherwise the
    /// spec's own seed is used for all trials.
    Synthetic {
        #[serde(flatten)]
        spec: SyntheticSpec,
        #[serde(default = "yes")]
        resample: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub l: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub distribution: Distribution,
    #[serde(default)]
    pub r: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
}

/// How the reduced dimension and the bound's `eps` are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReductionMode {
    Fixed {
        r: usize,
        epsilon: f64,
    },
    /// `r` from the minimal-dimension formula, `eps` from `eta`.
    Auto {
        eta: f64,
        delta: f64,
    },
}

impl ReductionConfig {
    pub fn mode(&self) -> Result<ReductionMode> {
        let in_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(v)
            } else {
                Err(Error::Config(format!(
                    "{name} must be strictly between 0 and 1, got {v}"
                )))
            }
        };
        match (self.r, self.epsilon, self.eta, self.delta) {
            (Some(r), Some(eps), None, None) => {
                if r == 0 {
                    return Err(Error::Config("r must be >= 1".into()));
                }
                Ok(ReductionMode::Fixed {
                    r,
                    epsilon: in_unit("epsilon", eps)?,
                })
            }
            (None, None, Some(eta), Some(delta)) => Ok(ReductionMode::Auto {
                eta: in_unit("eta", eta)?,
                delta: in_unit("delta", delta)?,
            }),
            _ => Err(Error::Config(
                "reduction needs either `r` and `epsilon`, or `eta` and `delta`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSolver {
    #[serde(flatten)]
    pub solver: SolverConfig,
    /// Compute `e_0(F)` in the full space when `l^m` fits the budget.
    pub full_oracle: bool,
}

impl Default for ExperimentSolver {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            full_oracle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default)]
    pub rows: Option<PathBuf>,
    #[serde(default)]
    pub summary: Option<PathBuf>,
    /// Per-trial wall times, kept apart from the rows so those stay
    /// reproducible byte for byte.
    #[serde(default)]
    pub timings: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub model: ModelConfig,
    pub reduction: ReductionConfig,
    #[serde(default)]
    pub solver: ExperimentSolver,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let DatasetSource::File { path: data, .. } = &mut cfg.dataset {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    /// Checks everything that can be checked before data is loaded.
    pub fn validate(&self) -> Result<()> {
        let mode = self.reduction.mode()?;
        self.solver
            .solver
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let ModelConfig { l, k } = self.model;
        if let DatasetSource::Synthetic { spec, .. } = &self.dataset {
            spec.validate()?;
            check_model(l, k, spec.count, spec.ambient_dim)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        if let ReductionMode::Fixed { r, .. } = mode {
            if k >= r {
                return Err(Error::Config(format!("need k < r, got k = {k}, r = {r}")));
            }
        }
        Ok(())
    }
}
