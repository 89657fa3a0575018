//! Model a finite point set by an optimal union of low-dimensional
//! subspaces, and speed up the search by solving in a randomly sketched
//! low-dimensional space and lifting the resulting partition back.
//!
//! The pieces, bottom up:
//!
//! - [`model`]: data sets, subspaces, bundles, partitions.
//! - [`metrics`]: squared-distance errors `e(F, B)`, `E(M, V)` and `E_k(M)`.
//! - [`fit`]: bundle generated by a partition and partition generated by a
//!   bundle.
//! - [`solver`]: alternating minimization and an exhaustive oracle.
//! - [`projection`]: gaussian and Bernoulli sketches and concentration checks.
//! - [`bounds`] and [`pipeline`]: closed-form error bounds and the
//!   reduce/solve/lift procedure.
//! - [`harness`]: synthetic data, CSV/JSON files and the experiment runner.

pub mod bounds;
pub mod error;
pub mod fit;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod projection;
pub mod seed;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Bundle, DataSet, ModelParams, Partition, PartitionViolation, Subspace};
pub use pipeline::{reduce_solve_lift, reduce_solve_lift_with_matrix, LiftConfig, LiftReport};
pub use projection::{Distribution, RandomSpec};
pub use solver::{SolveReport, SolverConfig};
