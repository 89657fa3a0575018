//! Closed-form error bounds for the lifted solution and the distortion
//! quantities they are built from.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metrics::ek_min_error;
use crate::projection::c0;

/// Slack added to closed-form bounds before declaring a violation.
pub const BOUND_SLACK: f64 = 1e-9;

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected: "strictly between 0 and 1",
        })
    }
}

fn rank_gap(d: usize, k: usize) -> Result<usize> {
    d.checked_sub(k)
        .ok_or_else(|| Error::InvalidParams(format!("need d >= k, got d = {d}, k = {k}")))
}

/// `c1 = (l (d - k))^{1/2}`.
pub fn c1(l: usize, d: usize, k: usize) -> Result<f64> {
    Ok(((l * rank_gap(d, k)?) as f64).sqrt())
}

/// `(1 + eps) e0 + eps (l (d - k))^{1/2}`.
pub fn theorem_bound(e0: f64, epsilon: f64, l: usize, d: usize, k: usize) -> Result<f64> {
    unit_interval("epsilon", epsilon)?;
    Ok((1.0 + epsilon) * e0 + epsilon * c1(l, d, k)?)
}

/// `(2 m^2 + 4 m) exp(-r c0(eps))`, the failure probability that comes with
/// [`theorem_bound`]. Often exceeds 1 at small `r`.
pub fn theorem_failure_probability(m: usize, reduced_dim: usize, epsilon: f64) -> Result<f64> {
    let m = m as f64;
    Ok((2.0 * m * m + 4.0 * m) * (-(reduced_dim as f64) * c0(epsilon)?).exp())
}

/// Smallest integer `r >= 12 (1 + sqrt(l (d - k)))^2 / eta^2 * ln((2 m^2 + 4 m) / delta)`.
pub fn min_reduced_dim(
    eta: f64,
    delta: f64,
    l: usize,
    d: usize,
    k: usize,
    m: usize,
) -> Result<usize> {
    unit_interval("eta", eta)?;
    unit_interval("delta", delta)?;
    if m == 0 {
        return Err(Error::InvalidParams("m must be >= 1".into()));
    }
    let lead = 1.0 + c1(l, d, k)?;
    let mf = m as f64;
    let rhs = 12.0 * lead * lead / (eta * eta) * ((2.0 * mf * mf + 4.0 * mf) / delta).ln();
    Ok(rhs.ceil() as usize)
}

/// `eta / (1 + sqrt(l (d - k)))`.
pub fn eta_admissibility_epsilon(eta: f64, l: usize, d: usize, k: usize) -> Result<f64> {
    unit_interval("eta", eta)?;
    Ok(eta / (1.0 + c1(l, d, k)?))
}

/// `||M^T M - M^T A^T A M||_F`.
pub fn gram_distortion(m: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<f64> {
    if a.ncols() != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: a.ncols(),
        });
    }
    let am = a * m;
    Ok((m.tr_mul(m) - am.tr_mul(&am)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkPerturbation {
    /// `|E_k(S) - E_k(A S)|`.
    pub lhs: f64,
    /// `(d - k)^{1/2} ||S^T S - S^T A^T A S||_F`.
    pub rhs: f64,
    pub ok: bool,
}

/// Checks `|E_k(S) - E_k(A S)| <= (d - k)^{1/2} ||S^T S - S^T A^T A S||_F`,
/// where `d` is the rank of the data set `S` was taken from.
pub fn ek_perturbation_check(
    s: &DMatrix<f64>,
    a: &DMatrix<f64>,
    k: usize,
    d: usize,
) -> Result<EkPerturbation> {
    let gap = rank_gap(d, k)?;
    let distortion = gram_distortion(s, a)?;
    let lhs = (ek_min_error(s, k) - ek_min_error(&(a * s), k)).abs();
    let rhs = (gap as f64).sqrt() * distortion;
    Ok(EkPerturbation {
        lhs,
        rhs,
        ok: lhs <= rhs + BOUND_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn theorem_bound_examples() {
        assert!((theorem_bound(0.3, 0.5, 2, 1, 1).unwrap() - 0.45).abs() < 1e-15);
        assert!((theorem_bound(0.0, 0.5, 2, 3, 1).unwrap() - 1.0).abs() < 1e-15);
        let a = theorem_bound(0.2, 0.1, 2, 3, 1).unwrap();
        let b = theorem_bound(0.2, 0.2, 2, 3, 1).unwrap();
        assert!(b > a);
        assert!(theorem_bound(0.2, 1.0, 2, 3, 1).is_err());
        assert!(theorem_bound(0.2, 0.5, 2, 1, 3).is_err());
    }

    #[test]
    fn min_reduced_dim_examples() {
        // 12 * 9 / 0.25 = 432, ln(8800) = 9.08284..., product 3923.79...
        assert_eq!(min_reduced_dim(0.5, 0.1, 2, 3, 1, 20).unwrap(), 3924);
        let collapsed = (12.0 / 0.25 * (880.0f64 / 0.1).ln()).ceil() as usize;
        assert_eq!(min_reduced_dim(0.5, 0.1, 2, 3, 3, 20).unwrap(), collapsed);
        let full = min_reduced_dim(0.5, 0.1, 2, 3, 1, 20).unwrap();
        let half = min_reduced_dim(0.25, 0.1, 2, 3, 1, 20).unwrap();
        assert!(half >= 4 * full - 3);
        assert!(min_reduced_dim(0.0, 0.1, 2, 3, 1, 20).is_err());
        assert!(min_reduced_dim(0.5, 1.0, 2, 3, 1, 20).is_err());
    }

    #[test]
    fn eta_epsilon_examples() {
        assert_eq!(eta_admissibility_epsilon(0.4, 2, 3, 3).unwrap(), 0.4);
        assert!((eta_admissibility_epsilon(0.5, 2, 3, 1).unwrap() - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gram_distortion_examples() {
        let m = dmatrix![0.6; 0.8];
        let a = DMatrix::<f64>::identity(3, 2);
        assert!(gram_distortion(&m, &a).unwrap() < 1e-15);
        assert!((gram_distortion(&m, &(a * 2.0)).unwrap() - 3.0).abs() < 1e-12);
        assert!(gram_distortion(&m, &DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn ek_perturbation_trivial_branches() {
        let s = dmatrix![1.0, 0.5; 0.0, 1.0; 0.0, 0.0];
        let lossless = DMatrix::<f64>::identity(2, 3);
        let rep = ek_perturbation_check(&s, &lossless, 1, 2).unwrap();
        assert!(rep.lhs < 1e-12 && rep.ok);

        let rank_one = dmatrix![1.0, 2.0; 1.0, 2.0; 0.0, 0.0];
        let a = dmatrix![3.0, -1.0, 2.0; 0.5, 0.0, 1.0];
        let rep = ek_perturbation_check(&rank_one, &a, 1, 2).unwrap();
        assert!(rep.lhs < 1e-9 && rep.ok);
    }
}
