//! The two directions of the bundle/partition correspondence: per-group
//! best rank-`k` fits, and nearest-subspace assignment.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metrics::residual_norm2;
use crate::model::{dominant_left_basis, Bundle, DataSet, Partition, Subspace};

/// Two distances within this absolute gap of the minimum are a tie.
pub const TIE_TOL: f64 = 1e-12;

/// Per-point record of a nearest-subspace assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentTrace {
    /// Index of the chosen subspace for each point.
    pub chosen: Vec<usize>,
    /// Squared distance from each point to its chosen subspace.
    pub distance: Vec<f64>,
    /// Whether at least two subspaces were within [`TIE_TOL`] of the minimum.
    pub tie: Vec<bool>,
}

impl AssignmentTrace {
    pub fn total(&self) -> f64 {
        self.distance.iter().sum()
    }
}

/// Span of the top `min(k, rank M)` left singular vectors of `m`.
///
/// The result minimizes `E(m, V)` over subspaces of dimension at most `k`,
/// and has smaller dimension when `m` has rank below `k`.
pub fn best_subspace(m: &DMatrix<f64>, k: usize) -> Subspace {
    let n = m.nrows();
    if m.ncols() == 0 || k == 0 || m.iter().all(|&v| v == 0.0) {
        return Subspace::zero(n);
    }
    Subspace::from_orthonormal(dominant_left_basis(m, k)).expect("eigenvector basis is orthonormal")
}

/// Bundle generated by a partition: `V_i = best_subspace(F[S_i], k)`, with
/// empty groups mapped to the zero subspace.
pub fn bundle_from_partition(f: &DataSet, s: &Partition, k: usize) -> Result<Bundle> {
    if s.count() != f.count() {
        return Err(Error::InvalidPartition(
            crate::model::PartitionViolation::WrongLength {
                expected: f.count(),
                found: s.count(),
            },
        ));
    }
    if s.is_empty() {
        return Err(Error::EmptyBundle);
    }
    let subspaces = s
        .groups()
        .iter()
        .map(|g| best_subspace(&f.select(g), k))
        .collect();
    Bundle::new(subspaces, k)
}

/// Partition generated by a bundle: each point goes to its nearest subspace,
/// ties broken toward the lowest index.
pub fn partition_from_bundle(f: &DataSet, b: &Bundle) -> Result<(Partition, AssignmentTrace)> {
    if b.is_empty() {
        return Err(Error::EmptyBundle);
    }
    if b.ambient_dim() != f.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let m = f.count();
    let mut trace = AssignmentTrace {
        chosen: Vec::with_capacity(m),
        distance: Vec::with_capacity(m),
        tie: Vec::with_capacity(m),
    };
    let mut dists = vec![0.0; b.len()];
    for j in 0..m {
        let x = f.point(j);
        for (d, v) in dists.iter_mut().zip(b.subspaces()) {
            *d = residual_norm2(&x, v.basis());
        }
        let mut best = 0;
        for (i, &d) in dists.iter().enumerate().skip(1) {
            if d < dists[best] {
                best = i;
            }
        }
        let dmin = dists[best];
        let near = dists.iter().filter(|&&d| d - dmin <= TIE_TOL).count();
        trace.chosen.push(best);
        trace.distance.push(dmin);
        trace.tie.push(near >= 2);
    }
    let partition = Partition::from_labels(&trace.chosen, b.len())?;
    Ok((partition, trace))
}
