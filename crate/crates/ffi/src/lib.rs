//! C ABI over `subspace-reduce`.
//!
//! Objects cross the boundary as opaque handles created by `sr_*_new`-style
//! functions and released with the matching `sr_*_free`. Fallible calls
//! return an [`SrStatus`] and write results through out-pointers; the
//! message for the last failure on the calling thread is available from
//! [`sr_last_error`]. Panics never unwind into C: they are caught and
//! reported as [`SrStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use subspace_reduce::bounds::{min_reduced_dim, theorem_bound};
use subspace_reduce::harness::read_dataset;
use subspace_reduce::projection::c0;
use subspace_reduce::solver::{brute_force_oracle_with_budget, solve_best_model_with};
use subspace_reduce::{
    reduce_solve_lift, DataSet, Distribution, Error, LiftConfig, LiftReport, RandomSpec,
    SolveReport, SolverConfig,
};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    OutOfRange = 4,
    BudgetExceeded = 5,
    NotNormalized = 6,
    InvalidPartition = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrDistribution {
    Gaussian = 0,
    Bernoulli = 1,
}

impl From<SrDistribution> for Distribution {
    fn from(d: SrDistribution) -> Self {
        match d {
            SrDistribution::Gaussian => Distribution::Gaussian,
            SrDistribution::Bernoulli => Distribution::Bernoulli,
        }
    }
}

/// A normalized or raw point set.
pub struct SrDataSet(DataSet);

/// Result of a full-dimension solve or the exhaustive oracle.
pub struct SrSolveReport(SolveReport);

/// Result of a reduce/solve/lift run.
pub struct SrLiftReport(LiftReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SrStatus {
    match e {
        Error::DimensionMismatch { .. } => SrStatus::DimensionMismatch,
        Error::OutOfRange { .. } => SrStatus::OutOfRange,
        Error::BudgetExceeded { .. } => SrStatus::BudgetExceeded,
        Error::NotNormalized { .. } => SrStatus::NotNormalized,
        Error::InvalidPartition(_) | Error::InvalidInit(_) => SrStatus::InvalidPartition,
        Error::Io(_) | Error::Csv(_) => SrStatus::Io,
        _ => SrStatus::InvalidInput,
    }
}

fn fail(status: SrStatus, msg: &str) -> SrStatus {
    set_last_error(msg);
    status
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), SrStatus>) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            SrStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(SrStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, SrStatus>;
}

impl<T> OrStatus<T> for subspace_reduce::Result<T> {
    fn or_status(self) -> Result<T, SrStatus> {
        self.map_err(|e| fail(status_of(&e), &e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, SrStatus> {
    p.as_ref()
        .ok_or_else(|| fail(SrStatus::NullPointer, "null handle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), SrStatus> {
    if out.is_null() {
        return Err(fail(SrStatus::NullPointer, "null out-pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), SrStatus> {
    if out.is_null() {
        return Err(fail(SrStatus::NullPointer, "null out-pointer"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn write_labels(labels: Vec<usize>, buf: *mut usize, len: usize) -> Result<(), SrStatus> {
    if buf.is_null() {
        return Err(fail(SrStatus::NullPointer, "null label buffer"));
    }
    if len < labels.len() {
        return Err(fail(
            SrStatus::BufferTooSmall,
            &format!("label buffer holds {len}, need {}", labels.len()),
        ));
    }
    ptr::copy_nonoverlapping(labels.as_ptr(), buf, labels.len());
    Ok(())
}

/// Message describing the last failed call on this thread, or an empty
/// string. The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies `count` points of dimension `ambient_dim` from `data`, stored
/// point after point (`data[j * ambient_dim + i]` is coordinate `i` of point
/// `j`).
///
/// # Safety
/// `data` must point to `ambient_dim * count` readable doubles and `out` to
/// writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_new(
    data: *const f64,
    ambient_dim: usize,
    count: usize,
    out: *mut *mut SrDataSet,
) -> SrStatus {
    guard(|| {
        if data.is_null() {
            return Err(fail(SrStatus::NullPointer, "null data"));
        }
        let len = ambient_dim
            .checked_mul(count)
            .ok_or_else(|| fail(SrStatus::InvalidInput, "size overflow"))?;
        let values = std::slice::from_raw_parts(data, len);
        let m = nalgebra::DMatrix::from_column_slice(ambient_dim, count, values);
        write_handle(out, SrDataSet(DataSet::new(m).or_status()?))
    })
}

/// Reads a dataset CSV (one point per row).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_read_csv(
    path: *const c_char,
    header: bool,
    out: *mut *mut SrDataSet,
) -> SrStatus {
    guard(|| {
        if path.is_null() {
            return Err(fail(SrStatus::NullPointer, "null path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(SrStatus::InvalidInput, "path is not UTF-8"))?;
        write_handle(
            out,
            SrDataSet(read_dataset(Path::new(path), header).or_status()?),
        )
    })
}

/// New handle holding `f / ||f||_F`.
///
/// # Safety
/// `f` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_normalize(
    f: *const SrDataSet,
    out: *mut *mut SrDataSet,
) -> SrStatus {
    guard(|| {
        let f = deref(f)?;
        write_handle(out, SrDataSet(f.0.normalize().or_status()?))
    })
}

/// # Safety
/// `f` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_ambient_dim(f: *const SrDataSet) -> usize {
    f.as_ref().map_or(0, |f| f.0.ambient_dim())
}

/// # Safety
/// `f` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_count(f: *const SrDataSet) -> usize {
    f.as_ref().map_or(0, |f| f.0.count())
}

/// # Safety
/// `f` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_rank(f: *const SrDataSet) -> usize {
    f.as_ref().map_or(0, |f| f.0.numerical_rank())
}

/// # Safety
/// `f` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_frobenius_norm(f: *const SrDataSet) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.0.frobenius_norm())
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_dataset_free(f: *mut SrDataSet) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Multi-start alternating solve. `restarts = 0` selects the default.
///
/// # Safety
/// `f` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_solve(
    f: *const SrDataSet,
    l: usize,
    k: usize,
    restarts: usize,
    seed: u64,
    out: *mut *mut SrSolveReport,
) -> SrStatus {
    guard(|| {
        let f = deref(f)?;
        let mut cfg = SolverConfig::default();
        if restarts > 0 {
            cfg.restarts = restarts;
        }
        write_handle(
            out,
            SrSolveReport(solve_best_model_with(&f.0, l, k, &cfg, seed).or_status()?),
        )
    })
}

/// Exhaustive solve over all `l^m` labelings; fails with
/// `BudgetExceeded` when `l^m > budget`.
///
/// # Safety
/// `f` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_oracle(
    f: *const SrDataSet,
    l: usize,
    k: usize,
    budget: u64,
    out: *mut *mut SrSolveReport,
) -> SrStatus {
    guard(|| {
        let f = deref(f)?;
        write_handle(
            out,
            SrSolveReport(brute_force_oracle_with_budget(&f.0, l, k, budget).or_status()?),
        )
    })
}

/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_report_error(rep: *const SrSolveReport) -> f64 {
    rep.as_ref().map_or(f64::NAN, |r| r.0.error)
}

/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_report_certified(rep: *const SrSolveReport) -> bool {
    rep.as_ref().is_some_and(|r| r.0.certified_optimal)
}

/// Writes the 0-based group label of every point into `buf`, which must
/// hold at least as many entries as the dataset has points.
///
/// # Safety
/// `rep` must be a live report handle and `buf` must have `len` writable
/// entries.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_report_labels(
    rep: *const SrSolveReport,
    buf: *mut usize,
    len: usize,
) -> SrStatus {
    guard(|| write_labels(deref(rep)?.0.partition.labels(), buf, len))
}

/// # Safety
/// `rep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_solve_report_free(rep: *mut SrSolveReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Sketches the normalized dataset `f` into `R^r`, solves there, and lifts
/// the partition back. Pass NaN for `full_e0` when the full-space optimum
/// is unknown; the bound fields are then NaN.
///
/// # Safety
/// `f` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sr_reduce_solve_lift(
    f: *const SrDataSet,
    dist: SrDistribution,
    r: usize,
    seed: u64,
    l: usize,
    k: usize,
    epsilon: f64,
    full_e0: f64,
    out: *mut *mut SrLiftReport,
) -> SrStatus {
    guard(|| {
        let f = deref(f)?;
        let spec = RandomSpec::new(dist.into(), r, f.0.ambient_dim(), seed).or_status()?;
        let cfg = LiftConfig {
            solver_seed: seed,
            epsilon,
            full_e0: (!full_e0.is_nan()).then_some(full_e0),
            ..LiftConfig::default()
        };
        write_handle(
            out,
            SrLiftReport(reduce_solve_lift(&f.0, &spec, l, k, &cfg).or_status()?),
        )
    })
}

/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_lifted_error(rep: *const SrLiftReport) -> f64 {
    rep.as_ref().map_or(f64::NAN, |r| r.0.lifted_error)
}

/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_reduced_error(rep: *const SrLiftReport) -> f64 {
    rep.as_ref().map_or(f64::NAN, |r| r.0.reduced_error)
}

/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_reduced_certified(rep: *const SrLiftReport) -> bool {
    rep.as_ref().is_some_and(|r| r.0.reduced_certified)
}

/// NaN when no full-space optimum was supplied.
///
/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_bound_value(rep: *const SrLiftReport) -> f64 {
    rep.as_ref()
        .and_then(|r| r.0.bound_value)
        .unwrap_or(f64::NAN)
}

/// 1 if the lifted error is within the bound, 0 if not, -1 if unchecked.
///
/// # Safety
/// `rep` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_bound_satisfied(rep: *const SrLiftReport) -> i32 {
    match rep.as_ref().and_then(|r| r.0.bound_satisfied) {
        Some(true) => 1,
        Some(false) => 0,
        None => -1,
    }
}

/// # Safety
/// `rep` must be a live report handle and `buf` must have `len` writable
/// entries.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_labels(
    rep: *const SrLiftReport,
    buf: *mut usize,
    len: usize,
) -> SrStatus {
    guard(|| write_labels(deref(rep)?.0.reduced_partition.labels(), buf, len))
}

/// # Safety
/// `rep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sr_lift_report_free(rep: *mut SrLiftReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// `c0(eps) = eps^2/4 - eps^3/6`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_c0(epsilon: f64, out: *mut f64) -> SrStatus {
    guard(|| write_out(out, c0(epsilon).or_status()?))
}

/// `(1 + eps) e0 + eps sqrt(l (d - k))`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_theorem_bound(
    e0: f64,
    epsilon: f64,
    l: usize,
    d: usize,
    k: usize,
    out: *mut f64,
) -> SrStatus {
    guard(|| write_out(out, theorem_bound(e0, epsilon, l, d, k).or_status()?))
}

/// Smallest reduced dimension for which the lifted error is within `eta`
/// of optimal with probability at least `1 - delta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_min_reduced_dim(
    eta: f64,
    delta: f64,
    l: usize,
    d: usize,
    k: usize,
    m: usize,
    out: *mut usize,
) -> SrStatus {
    guard(|| write_out(out, min_reduced_dim(eta, delta, l, d, k, m).or_status()?))
}
