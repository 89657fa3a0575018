//! Random sketching matrices and the concentration machinery around them.
//!
//! A sketch `A` is `r x N` with i.i.d. entries, either `N(0, 1/r)` or
//! `+-1/sqrt(r)` with equal probability. For `0 < eps < 1` both families
//! satisfy
//!
//! ```text
//! Pr[(1 - eps)||x||^2 <= ||A x||^2 <= (1 + eps)||x||^2] >= 1 - 2 exp(-r c0(eps))
//! ```
//!
//! with `c0(eps) = eps^2/4 - eps^3/6`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{matrix_rank, Subspace};
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Gaussian,
    Bernoulli,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Bernoulli => "bernoulli",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "bernoulli" => Ok(Self::Bernoulli),
            other => Err(Error::InvalidInput(format!(
                "unknown distribution '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub distribution: Distribution,
    pub reduced_dim: usize,
    pub ambient_dim: usize,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(
        distribution: Distribution,
        reduced_dim: usize,
        ambient_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            distribution,
            reduced_dim,
            ambient_dim,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reduced_dim == 0 || self.ambient_dim == 0 {
            return Err(Error::InvalidParams(format!(
                "sketch dimensions must be positive, got {}x{}",
                self.reduced_dim, self.ambient_dim
            )));
        }
        Ok(())
    }
}

/// The sketch for `spec`.
pub fn sample_matrix(spec: &RandomSpec) -> DMatrix<f64> {
    sample_matrix_for_trial(spec, 0)
}

/// The sketch for trial `trial` under `spec`. Entries are drawn in row-major
/// order from the stream keyed by `(spec.seed, trial)`.
pub fn sample_matrix_for_trial(spec: &RandomSpec, trial: u64) -> DMatrix<f64> {
    let r = spec.reduced_dim;
    let n = spec.ambient_dim;
    let scale = 1.0 / (r as f64).sqrt();
    let mut rng = stream_rng(spec.seed, trial);
    let entries: Vec<f64> = match spec.distribution {
        Distribution::Gaussian => (0..r * n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
            .collect(),
        Distribution::Bernoulli => (0..r * n)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect(),
    };
    DMatrix::from_row_slice(r, n, &entries)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            expected: "0 < epsilon < 1",
        })
    }
}

/// `c0(eps) = eps^2/4 - eps^3/6`.
pub fn c0(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(epsilon * epsilon / 4.0 - epsilon.powi(3) / 6.0)
}

/// `2 exp(-r c0(eps))`, the per-vector failure bound.
pub fn concentration_failure_bound(reduced_dim: usize, epsilon: f64) -> Result<f64> {
    Ok(2.0 * (-(reduced_dim as f64) * c0(epsilon)?).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub distribution: Distribution,
    pub reduced_dim: usize,
    pub epsilon: f64,
    /// Number of `(trial, vector)` pairs evaluated.
    pub trials: usize,
    pub failures: usize,
    pub empirical_rate: f64,
    pub theoretical_bound: f64,
}

impl ConcentrationReport {
    /// Standard deviation of the empirical rate if failures occurred at
    /// exactly the theoretical rate.
    pub fn binomial_sigma(&self) -> f64 {
        let p = self.theoretical_bound.min(1.0);
        if self.trials == 0 {
            return 0.0;
        }
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Whether `||A x||^2` lies in `[(1 - eps)||x||^2, (1 + eps)||x||^2]`.
pub fn norm_preserved(a: &DMatrix<f64>, x: &DVector<f64>, epsilon: f64) -> bool {
    let before = x.norm_squared();
    let after = (a * x).norm_squared();
    after >= (1.0 - epsilon) * before && after <= (1.0 + epsilon) * before
}

/// Draws a fresh sketch for every `(trial, vector)` pair and counts how often
/// the squared norm leaves the `(1 +- eps)` band. The pair `(t, v)` uses the
/// stream `t * vectors.len() + v`.
pub fn empirical_concentration(
    spec: &RandomSpec,
    epsilon: f64,
    vectors: &[DVector<f64>],
    trials: usize,
) -> Result<ConcentrationReport> {
    spec.validate()?;
    let theoretical_bound = concentration_failure_bound(spec.reduced_dim, epsilon)?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    if vectors.is_empty() {
        return Err(Error::InvalidInput("need at least one vector".into()));
    }
    for x in vectors {
        if x.len() != spec.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: spec.ambient_dim,
                found: x.len(),
            });
        }
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput("vectors must be nonzero".into()));
        }
    }
    let nvec = vectors.len();
    let failures: usize = (0..trials * nvec)
        .into_par_iter()
        .map(|pair| {
            let a = sample_matrix_for_trial(spec, pair as u64);
            usize::from(!norm_preserved(&a, &vectors[pair % nvec], epsilon))
        })
        .sum();
    let pairs = trials * nvec;
    Ok(ConcentrationReport {
        distribution: spec.distribution,
        reduced_dim: spec.reduced_dim,
        epsilon,
        trials: pairs,
        failures,
        empirical_rate: failures as f64 / pairs as f64,
        theoretical_bound,
    })
}

/// `|<u, v> - <A u, A v>|`.
pub fn inner_product_distortion(a: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.dot(v) - (a * u).dot(&(a * v))).abs()
}

/// True iff `rank(A V) > k`, i.e. `A` does not collapse `v` to dimension
/// `k` or less.
pub fn check_rank_preservation(a: &DMatrix<f64>, v: &Subspace, k: usize) -> Result<bool> {
    if a.ncols() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            found: a.ncols(),
        });
    }
    Ok(matrix_rank(&(a * v.basis())) > k)
}
