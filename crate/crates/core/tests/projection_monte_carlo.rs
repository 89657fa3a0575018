use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution as _, StandardNormal};

use subspace_reduce::bounds::{eta_admissibility_epsilon, gram_distortion, min_reduced_dim};
use subspace_reduce::harness::{generate_synthetic, SyntheticSpec};
use subspace_reduce::metrics::bundle_error;
use subspace_reduce::projection::{c0, inner_product_distortion, sample_matrix};
use subspace_reduce::seed::{derive_seed, stream_rng, tag};
use subspace_reduce::solver::brute_force_oracle;
use subspace_reduce::{reduce_solve_lift, DataSet, Distribution, LiftConfig, RandomSpec};

const EPS: f64 = 0.5;
const R: usize = 2000;

fn sketch(dist: Distribution, r: usize, n: usize, master: u64, trial: u64) -> DMatrix<f64> {
    sample_matrix(&RandomSpec::new(dist, r, n, derive_seed(master, tag::SKETCH, trial)).unwrap())
}

fn synthetic(n: usize, m: usize, noise: f64, seed: u64) -> (DataSet, f64, subspace_reduce::Bundle) {
    let spec = SyntheticSpec {
        ambient_dim: n,
        l: 2,
        k: 1,
        count: m,
        noise_sigma: noise,
        seed,
        balance: None,
    };
    let (f, truth) = generate_synthetic(&spec).unwrap();
    let rho = bundle_error(&f, &truth.bundle).unwrap();
    (f, rho, truth.bundle)
}

/// Allowed failure count: expected count at rate `p` plus three binomial
/// deviations.
fn allowed(p: f64, trials: usize) -> f64 {
    let p = p.min(1.0);
    let n = trials as f64;
    n * p + 3.0 * (n * p * (1.0 - p)).sqrt()
}

#[test]
fn inner_products_are_preserved() {
    let n = 10;
    let trials: usize = 1000;
    let mut rng = stream_rng(31, tag::VECTORS);
    let mut failures = 0;
    for t in 0..trials {
        let u: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let v: DVector<f64> = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let a = sketch(Distribution::Gaussian, R, n, 31, t as u64);
        if inner_product_distortion(&a, &u, &v) > EPS * u.norm() * v.norm() {
            failures += 1;
        }
    }
    let p = 4.0 * (-(R as f64) * c0(EPS).unwrap()).exp();
    assert!(failures as f64 <= allowed(p, trials), "{failures} failures");
}

#[test]
fn gram_distortion_is_bounded_for_both_families() {
    let trials = 200;
    for dist in [Distribution::Gaussian, Distribution::Bernoulli] {
        let mut failures = 0;
        for t in 0..trials {
            let mut rng = stream_rng(32, t);
            let mm = DMatrix::from_fn(6, 5, |_, _| StandardNormal.sample(&mut rng));
            let a = sketch(dist, R, 6, 32, t);
            if gram_distortion(&mm, &a).unwrap() > EPS * mm.norm_squared() {
                failures += 1;
            }
        }
        let m = 5.0;
        let p = 2.0 * (m * m + m) * (-(R as f64) * c0(EPS).unwrap()).exp();
        assert!(
            failures as f64 <= allowed(p, trials as usize),
            "{dist}: {failures} failures"
        );
    }
}

#[test]
fn projected_witness_keeps_sparsity() {
    for t in 0..200u64 {
        let (f, rho, witness) = synthetic(20, 8, 0.05, derive_seed(33, tag::DATA, t));
        let a = sketch(Distribution::Gaussian, R, 20, 33, t);
        let reduced = f.project(&a).unwrap();
        let projected = witness.image(&a).unwrap();
        let e = bundle_error(&reduced, &projected).unwrap();
        assert!(
            e <= (1.0 + EPS) * rho + 1e-12,
            "trial {t}: {e} > (1 + eps) {rho}"
        );
    }
}

#[test]
fn optimal_error_inflates_by_at_most_one_plus_eps() {
    for t in 0..100u64 {
        let (f, _, _) = synthetic(10, 6, 0.05, derive_seed(34, tag::DATA, t));
        let a = sketch(Distribution::Gaussian, R, 10, 34, t);
        let e0 = brute_force_oracle(&f, 2, 1).unwrap().error;
        let e0_reduced = brute_force_oracle(&f.project(&a).unwrap(), 2, 1)
            .unwrap()
            .error;
        assert!(
            e0_reduced <= (1.0 + EPS) * e0 + 1e-12,
            "trial {t}: {e0_reduced} vs {e0}"
        );
    }
}

#[test]
fn eta_admissible_dimension_lifts_within_eta() {
    let (eta, delta, l, k) = (0.5, 0.1, 2, 1);
    for t in 0..20u64 {
        let (f, _, _) = synthetic(4, 5, 0.05, derive_seed(35, tag::DATA, t));
        let m = f.count();
        let d = f.numerical_rank().max(k);
        let r = min_reduced_dim(eta, delta, l, d, k, m).unwrap();
        let epsilon = eta_admissibility_epsilon(eta, l, d, k).unwrap();
        let e0 = brute_force_oracle(&f, l, k).unwrap().error;
        let spec = RandomSpec::new(
            Distribution::Bernoulli,
            r,
            4,
            derive_seed(35, tag::SKETCH, t),
        )
        .unwrap();
        let cfg = LiftConfig {
            epsilon,
            full_e0: Some(e0),
            ..LiftConfig::default()
        };
        let rep = reduce_solve_lift(&f, &spec, l, k, &cfg).unwrap();
        assert!(rep.reduced_certified);
        assert!(rep.lifted_error <= e0 + eta + 1e-9, "trial {t}");
        assert_eq!(rep.bound_satisfied, Some(true));
        // With e0 <= ||F||^2 = 1 the bound itself is within eta of e0.
        assert!(rep.bound_value.unwrap() <= e0 + eta + 1e-12);
    }
}

#[test]
fn sparse_data_stays_sparse_in_any_generic_sketch() {
    for t in 0..30u64 {
        let (f, rho, _) = synthetic(12, 7, 0.0, derive_seed(36, tag::DATA, t));
        assert!(rho < 1e-20);
        for (i, dist) in [Distribution::Gaussian, Distribution::Bernoulli]
            .into_iter()
            .enumerate()
        {
            let a = sketch(dist, 2, 12, 36 + i as u64, t);
            let reduced = brute_force_oracle(&f.project(&a).unwrap(), 2, 1).unwrap();
            assert!(reduced.error <= 1e-12, "trial {t}: {}", reduced.error);
        }
    }
}
