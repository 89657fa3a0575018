//! Synthetic union-of-subspaces data.

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Bundle, DataSet, Partition, Subspace};
use crate::seed::stream_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub ambient_dim: usize,
    pub l: usize,
    pub k: usize,
    pub count: usize,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
    /// Points per subspace; near-equal split when absent.
    #[serde(default)]
    pub balance: Option<Vec<usize>>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.l == 0 {
            return bad("l must be >= 1".into());
        }
        if self.k == 0 || self.k >= self.ambient_dim {
            return bad(format!(
                "need 1 <= k < N, got k = {}, N = {}",
                self.k, self.ambient_dim
            ));
        }
        if self.count == 0 {
            return bad("count must be >= 1".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            ));
        }
        if let Some(b) = &self.balance {
            if b.len() != self.l {
                return bad(format!(
                    "balance has {} entries, expected {}",
                    b.len(),
                    self.l
                ));
            }
            if b.iter().sum::<usize>() != self.count {
                return bad(format!(
                    "balance sums to {}, expected {}",
                    b.iter().sum::<usize>(),
                    self.count
                ));
            }
        }
        Ok(())
    }

    pub fn counts(&self) -> Vec<usize> {
        match &self.balance {
            Some(b) => b.clone(),
            None => {
                let base = self.count / self.l;
                let extra = self.count % self.l;
                (0..self.l).map(|i| base + usize::from(i < extra)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub bundle: Bundle,
    pub partition: Partition,
}

/// Draws `l` random `k`-dimensional subspaces, places the prescribed number
/// of points on each with gaussian coefficients, adds isotropic gaussian
/// noise, and normalizes to unit Frobenius norm. Points of subspace `i`
/// occupy a contiguous block of columns.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(DataSet, GroundTruth)> {
    spec.validate()?;
    let n = spec.ambient_dim;
    let mut rng = stream_rng(spec.seed, 0);
    let mut gaussian = |rows: usize, cols: usize| -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    };

    let bases: Vec<DMatrix<f64>> = (0..spec.l).map(|_| gaussian(n, spec.k).qr().q()).collect();
    let counts = spec.counts();
    let mut points = DMatrix::zeros(n, spec.count);
    let mut groups = Vec::with_capacity(spec.l);
    let mut col = 0;
    for (basis, &c) in bases.iter().zip(&counts) {
        let coeffs = gaussian(spec.k, c);
        let block = basis * coeffs;
        points.columns_mut(col, c).copy_from(&block);
        groups.push((col..col + c).collect::<Vec<_>>());
        col += c;
    }
    if spec.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sigma).expect("sigma validated");
        let mut rng = stream_rng(spec.seed, 1);
        for v in points.iter_mut() {
            *v += noise.sample(&mut rng);
        }
    }

    let data = DataSet::new(points)?.normalize()?;
    let subspaces = bases
        .into_iter()
        .map(Subspace::from_orthonormal)
        .collect::<Result<Vec<_>>>()?;
    let truth = GroundTruth {
        bundle: Bundle::new(subspaces, spec.k)?,
        partition: Partition::new(groups, spec.count)?,
    };
    Ok((data, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::bundle_error;

    fn spec(noise: f64) -> SyntheticSpec {
        SyntheticSpec {
            ambient_dim: 10,
            l: 3,
            k: 2,
            count: 20,
            noise_sigma: noise,
            seed: 17,
            balance: None,
        }
    }

    #[test]
    fn noiseless_data_lies_on_union() {
        let (f, truth) = generate_synthetic(&spec(0.0)).unwrap();
        assert!(bundle_error(&f, &truth.bundle).unwrap() < 1e-10);
        assert!((f.frobenius_norm() - 1.0).abs() < 1e-12);
        assert_eq!(
            truth
                .partition
                .groups()
                .iter()
                .map(Vec::len)
                .collect::<Vec<_>>(),
            vec![7, 7, 6]
        );
    }

    #[test]
    fn same_seed_same_data() {
        let (a, _) = generate_synthetic(&spec(0.05)).unwrap();
        let (b, _) = generate_synthetic(&spec(0.05)).unwrap();
        assert_eq!(a, b);
        let mut other = spec(0.05);
        other.seed = 18;
        assert_ne!(generate_synthetic(&other).unwrap().0, a);
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(0.0);
        s.k = 10;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec(0.0);
        s.balance = Some(vec![10, 5, 4]);
        assert!(matches!(generate_synthetic(&s), Err(Error::InvalidSpec(_))));
        let mut s = spec(0.0);
        s.noise_sigma = -1.0;
        assert!(generate_synthetic(&s).is_err());
    }

    #[test]
    fn explicit_balance() {
        let mut s = spec(0.0);
        s.balance = Some(vec![2, 8, 10]);
        let (_, truth) = generate_synthetic(&s).unwrap();
        assert_eq!(truth.partition.groups()[0], vec![0, 1]);
        assert_eq!(truth.partition.groups()[2].len(), 10);
    }
}
