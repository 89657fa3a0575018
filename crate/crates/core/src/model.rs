//! Shared data types: point sets, subspaces, bundles and partitions.
//!
//! Points are stored as the columns of an `N x m` matrix. Point indices are
//! 0-based everywhere in the library.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVectorView, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative factor in the numerical-rank cutoff `sigma_1 * max(N, m) * 1e-12`.
pub const RANK_RTOL: f64 = 1e-12;

/// Entrywise tolerance on `Q^T Q = I` for a subspace basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// Singular values strictly above this value count toward the numerical rank
/// of an `nrows x ncols` matrix whose largest singular value is `sigma_max`.
pub fn rank_cutoff(sigma_max: f64, nrows: usize, ncols: usize) -> f64 {
    sigma_max * nrows.max(ncols) as f64 * RANK_RTOL
}

/// Numerical rank from an unordered list of singular values.
pub fn rank_from_singular_values(singular_values: &[f64], nrows: usize, ncols: usize) -> usize {
    let sigma_max = singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let cutoff = rank_cutoff(sigma_max, nrows, ncols);
    singular_values.iter().filter(|&&s| s > cutoff).count()
}

pub fn matrix_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    rank_from_singular_values(sv.as_slice(), m.nrows(), m.ncols())
}

/// Orthonormal basis of the dominant left singular subspace of `m`, of
/// dimension `min(max_dim, rank m)`.
///
/// Taken from the eigenvectors of the smaller Gram matrix instead of an SVD,
/// whose singular vectors can miss the column span of exactly
/// rank-deficient input. On a tall `m` the eigenvectors are mapped through
/// `m`, so the basis always lies in the column span.
pub(crate) fn dominant_left_basis(m: &DMatrix<f64>, max_dim: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let t = matrix_rank(m).min(max_dim);
    if t == 0 {
        return DMatrix::zeros(n, 0);
    }
    let tall = m.ncols() < n;
    let gram = if tall { m.tr_mul(m) } else { m * m.transpose() };
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = DMatrix::from_fn(eig.eigenvectors.nrows(), t, |i, j| {
        eig.eigenvectors[(i, order[j])]
    });
    if tall {
        (m * top).qr().q()
    } else {
        top
    }
}

/// A finite point set in `R^N`, one point per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    points: DMatrix<f64>,
    frobenius_norm: f64,
    numerical_rank: usize,
}

impl DataSet {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::InvalidInput(format!(
                "data set must have at least one point and one coordinate, got {}x{}",
                points.nrows(),
                points.ncols()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "data set contains non-finite values".into(),
            ));
        }
        let frobenius_norm = points.norm();
        let numerical_rank = matrix_rank(&points);
        Ok(Self {
            points,
            frobenius_norm,
            numerical_rank,
        })
    }

    /// Builds a data set from a list of points of equal length.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.first().map(Vec::len).unwrap_or(0);
        if let Some(bad) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let m = points.len();
        let mat = DMatrix::from_fn(n, m, |i, j| points[j][i]);
        Self::new(mat)
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn into_points(self) -> DMatrix<f64> {
        self.points
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.nrows()
    }

    pub fn count(&self) -> usize {
        self.points.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm
    }

    pub fn numerical_rank(&self) -> usize {
        self.numerical_rank
    }

    pub fn point(&self, j: usize) -> DVectorView<'_, f64> {
        self.points.column(j)
    }

    /// Column submatrix holding the points with the given indices, in order.
    pub fn select(&self, indices: &[usize]) -> DMatrix<f64> {
        self.points.select_columns(indices)
    }

    /// `alpha * F`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(&self.points * alpha)
    }

    /// Rescales to unit Frobenius norm.
    pub fn normalize(&self) -> Result<Self> {
        if self.frobenius_norm == 0.0 {
            return Err(Error::ZeroData);
        }
        let mut out = self.scaled(1.0 / self.frobenius_norm)?;
        // Keep the rank computed on the unscaled data; it is scale invariant
        // and this avoids a second decomposition disagreeing at the cutoff.
        out.numerical_rank = self.numerical_rank;
        Ok(out)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.frobenius_norm - 1.0).abs() <= tol
    }

    /// The image `A F`.
    pub fn project(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: a.ncols(),
            });
        }
        Self::new(a * &self.points)
    }
}

/// A linear subspace of `R^N` held as an orthonormal basis `N x t`.
/// `t = 0` is the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// Wraps a basis after checking `Q^T Q = I` entrywise within
    /// [`ORTHONORMAL_TOL`].
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        if basis.ncols() > basis.nrows() {
            return Err(Error::InvalidInput(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                basis.ncols(),
                basis.nrows()
            )));
        }
        let gram = basis.transpose() * &basis;
        let t = basis.ncols();
        for i in 0..t {
            for j in 0..t {
                let target = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - target).abs() > ORTHONORMAL_TOL {
                    return Err(Error::InvalidInput(
                        "basis columns are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self { basis })
    }

    /// Column span of an arbitrary `N x s` matrix.
    pub fn span_of(vectors: &DMatrix<f64>) -> Self {
        let n = vectors.nrows();
        if vectors.ncols() == 0 || vectors.iter().all(|&v| v == 0.0) {
            return Self::zero(n);
        }
        Self {
            basis: dominant_left_basis(vectors, usize::MAX),
        }
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthogonal projector `Q Q^T`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Frobenius distance between projectors; zero iff the subspaces agree.
    pub fn projector_distance(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        Ok((self.projector() - other.projector()).norm())
    }

    /// The image `A V`, re-orthonormalized.
    pub fn image(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: a.ncols(),
            });
        }
        Ok(Self::span_of(&(a * &self.basis)))
    }
}

/// An ordered list of `l` subspaces of dimension at most `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    subspaces: Vec<Subspace>,
    cap_dim: usize,
}

impl Bundle {
    pub fn new(subspaces: Vec<Subspace>, cap_dim: usize) -> Result<Self> {
        let first = subspaces.first().ok_or(Error::EmptyBundle)?;
        let n = first.ambient_dim();
        for v in &subspaces {
            if v.ambient_dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.ambient_dim(),
                });
            }
            if v.dim() > cap_dim {
                return Err(Error::InvalidParams(format!(
                    "subspace of dimension {} exceeds cap {}",
                    v.dim(),
                    cap_dim
                )));
            }
        }
        Ok(Self { subspaces, cap_dim })
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn cap_dim(&self) -> usize {
        self.cap_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    /// `{A V_1, ..., A V_l}`.
    pub fn image(&self, a: &DMatrix<f64>) -> Result<Self> {
        let subspaces = self
            .subspaces
            .iter()
            .map(|v| v.image(a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(subspaces, self.cap_dim)
    }

    /// Reorders the subspaces: slot `i` of the result is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            subspaces: perm.iter().map(|&i| self.subspaces[i].clone()).collect(),
            cap_dim: self.cap_dim,
        }
    }
}

/// Reason a list of index sets fails to be a partition of `{0, ..., m-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    WrongLength { expected: usize, found: usize },
    OutOfRange { index: usize, count: usize },
    Overlap { index: usize },
    Uncovered { index: usize },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::WrongLength { expected, found } => {
                write!(f, "expected {expected} groups, found {found}")
            }
            Self::OutOfRange { index, count } => {
                write!(f, "index {index} is outside 0..{count}")
            }
            Self::Overlap { index } => write!(f, "index {index} appears in more than one group"),
            Self::Uncovered { index } => write!(f, "index {index} is not covered"),
        }
    }
}

impl std::error::Error for PartitionViolation {}

/// Checks that `groups` is an `l`-sequence of disjoint sets covering
/// `{0, ..., m-1}`. Empty groups are allowed.
pub fn validate(groups: &[Vec<usize>], m: usize, l: usize) -> Result<(), PartitionViolation> {
    if groups.len() != l {
        return Err(PartitionViolation::WrongLength {
            expected: l,
            found: groups.len(),
        });
    }
    let mut seen = vec![false; m];
    for g in groups {
        for &j in g {
            if j >= m {
                return Err(PartitionViolation::OutOfRange { index: j, count: m });
            }
            if seen[j] {
                return Err(PartitionViolation::Overlap { index: j });
            }
            seen[j] = true;
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(index) => Err(PartitionViolation::Uncovered { index }),
        None => Ok(()),
    }
}

/// An ordered `l`-tuple of disjoint index sets covering `{0, ..., m-1}`.
/// Each group is kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    groups: Vec<Vec<usize>>,
    count: usize,
}

impl Partition {
    pub fn new(mut groups: Vec<Vec<usize>>, count: usize) -> Result<Self> {
        let l = groups.len();
        validate(&groups, count, l).map_err(Error::InvalidPartition)?;
        for g in &mut groups {
            g.sort_unstable();
        }
        Ok(Self { groups, count })
    }

    /// Builds a partition from per-point labels in `0..l`.
    pub fn from_labels(labels: &[usize], l: usize) -> Result<Self> {
        let mut groups = vec![Vec::new(); l];
        for (j, &lab) in labels.iter().enumerate() {
            if lab >= l {
                return Err(Error::InvalidPartition(PartitionViolation::OutOfRange {
                    index: lab,
                    count: l,
                }));
            }
            groups[lab].push(j);
        }
        Ok(Self {
            groups,
            count: labels.len(),
        })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Label of each point.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.count];
        for (i, g) in self.groups.iter().enumerate() {
            for &j in g {
                labels[j] = i;
            }
        }
        labels
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            groups: perm.iter().map(|&i| self.groups[i].clone()).collect(),
            count: self.count,
        }
    }

    /// Order-insensitive view for comparing partitions up to relabeling.
    pub fn as_set_partition(&self) -> BTreeSet<Vec<usize>> {
        self.groups
            .iter()
            .filter(|g| !g.is_empty())
            .cloned()
            .collect()
    }
}

/// `(l, k, rho)`: number of subspaces, their maximal dimension, and the
/// sparsity level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub l: usize,
    pub k: usize,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(l: usize, k: usize, rho: f64) -> Self {
        Self { l, k, rho }
    }

    /// Requires `1 <= l < m` and `1 <= k < N`.
    pub fn check(&self, count: usize, ambient_dim: usize) -> Result<()> {
        check_model(self.l, self.k, count, ambient_dim)?;
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "rho must be finite and >= 0, got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_model(l: usize, k: usize, count: usize, ambient_dim: usize) -> Result<()> {
    if l == 0 || l >= count {
        return Err(Error::InvalidParams(format!(
            "need 1 <= l < m, got l = {l}, m = {count}"
        )));
    }
    if k == 0 || k >= ambient_dim {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k < N, got k = {k}, N = {ambient_dim}"
        )));
    }
    Ok(())
}
