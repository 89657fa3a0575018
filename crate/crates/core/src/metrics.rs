//! Squared-distance errors of points against subspaces and bundles, and the
//! `k`-minimal error `E_k` computed from the tail of the Gram spectrum.

use nalgebra::{DMatrix, DVector, Dyn, Matrix, Storage, SymmetricEigen, U1};

use crate::error::{Error, Result};
use crate::model::{Bundle, DataSet, Subspace};

/// Absolute slack used when certifying `e(F, B) <= rho`.
pub const WITNESS_TOL: f64 = 1e-10;

/// `||f - Q Q^T f||^2` for `Q` the basis of `v`.
pub fn dist2_to_subspace<S>(f: &Matrix<f64, Dyn, U1, S>, v: &Subspace) -> Result<f64>
where
    S: Storage<f64, Dyn, U1>,
{
    if f.nrows() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            found: f.nrows(),
        });
    }
    Ok(residual_norm2(f, v.basis()))
}

pub(crate) fn residual_norm2<S>(f: &Matrix<f64, Dyn, U1, S>, q: &DMatrix<f64>) -> f64
where
    S: Storage<f64, Dyn, U1>,
{
    if q.ncols() == 0 {
        return f.norm_squared();
    }
    let coeffs = q.tr_mul(f);
    let residual = f - q * coeffs;
    residual.norm_squared()
}

/// `e(F, B) = sum_i min_j d^2(f_i, V_j)`.
pub fn bundle_error(f: &DataSet, b: &Bundle) -> Result<f64> {
    if b.is_empty() {
        return Err(Error::EmptyBundle);
    }
    if b.ambient_dim() != f.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.ambient_dim(),
            found: b.ambient_dim(),
        });
    }
    let mut total = 0.0;
    for j in 0..f.count() {
        let x = f.point(j);
        let best = b
            .subspaces()
            .iter()
            .map(|v| residual_norm2(&x, v.basis()))
            .fold(f64::INFINITY, f64::min);
        total += best;
    }
    Ok(total)
}

/// `E(M, V) = sum_{f in M} d^2(f, V)` over the columns of `m`.
pub fn group_error(m: &DMatrix<f64>, v: &Subspace) -> Result<f64> {
    if m.ncols() == 0 {
        return Ok(0.0);
    }
    if m.nrows() != v.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: v.ambient_dim(),
            found: m.nrows(),
        });
    }
    Ok(m.column_iter().map(|c| residual_norm2(&c, v.basis())).sum())
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub fn sorted_eigenvalues(sym: DMatrix<f64>) -> Vec<f64> {
    if sym.is_empty() {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .cloned()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Spectrum of `M^T M`, taken from whichever of `M^T M` and `M M^T` is
/// smaller. Negative round-off is clamped to zero.
pub fn gram_spectrum(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let gram = if m.ncols() <= m.nrows() {
        m.tr_mul(m)
    } else {
        m * m.transpose()
    };
    sorted_eigenvalues(gram)
        .into_iter()
        .map(|x| x.max(0.0))
        .collect()
}

/// `E_k(M) = sum_{j > k} lambda_j(M^T M)`, the smallest error of any
/// subspace of dimension at most `k` (Eckart-Young).
pub fn ek_min_error(m: &DMatrix<f64>, k: usize) -> f64 {
    if k >= m.nrows().min(m.ncols()) {
        return 0.0;
    }
    gram_spectrum(m).iter().skip(k).sum()
}

/// True when `b` certifies that `f` is `(l, k, rho)`-sparse. A false result
/// does not refute sparsity; another bundle may still witness it.
pub fn sparsity_witness_check(f: &DataSet, b: &Bundle, rho: f64) -> Result<bool> {
    Ok(bundle_error(f, b)? <= rho + WITNESS_TOL)
}

/// Both sides of the spectral tail inequality for symmetric `a`, `b`:
/// `|sum_{j=k+1}^d (lambda_j(a) - lambda_j(b))|` and
/// `(d - k)^{1/2} ||a - b||_F`. Indices are 1-based as in the usual
/// statement, so `0 <= k <= d <= n`.
pub fn spectral_tail_gap(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    k: usize,
    d: usize,
) -> Result<(f64, f64)> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    if k > d || d > a.nrows() {
        return Err(Error::InvalidParams(format!(
            "need 0 <= k <= d <= n, got k = {k}, d = {d}, n = {}",
            a.nrows()
        )));
    }
    let la = sorted_eigenvalues(a.clone());
    let lb = sorted_eigenvalues(b.clone());
    let lhs: f64 = (k..d).map(|j| la[j] - lb[j]).sum::<f64>().abs();
    let rhs = ((d - k) as f64).sqrt() * (a - b).norm();
    Ok((lhs, rhs))
}

/// `f` as an owned column vector, for callers holding plain slices.
pub fn vector(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}
