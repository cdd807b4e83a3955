use std::f64::consts::PI;

use beta_density::bulk::{mp_density, wigner_density};
use beta_density::ensembles::*;
use beta_density::{EnsembleSpec, Scaling};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

// Critical value for p = 0.01.
fn ks_critical(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

fn erf(x: f64) -> f64 {
    // Simpson rule, ample for a KS test at 1e4 samples
    let n = 2000;
    let h = x / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(0.0) + f(x);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    2.0 / PI.sqrt() * s * h / 3.0
}

#[test]
fn chi_one_is_half_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let m = 10_000;
    let xs: Vec<f64> = (0..m).map(|_| chi_sample(1.0, &mut rng).unwrap()).collect();
    assert!(xs.iter().all(|&x| x > 0.0));
    let d = ks_statistic(xs, |x| erf(x / 2f64.sqrt()));
    assert!(d < ks_critical(m), "D = {d}");
}

#[test]
fn hermite_single_eigenvalue_variance() {
    let spec = EnsembleSpec::hermite(1, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = 100_000;
    let xs: Vec<f64> = (0..m).map(|_| sample_eigenvalues(&spec, &mut rng).unwrap()[0]).collect();
    let var = xs.iter().map(|x| x * x).sum::<f64>() / m as f64;
    // variance of a squared N(0, 1/2) is 2 (1/2)^2
    let sd = (2.0f64 * 0.25 / m as f64).sqrt();
    assert!((var - 0.5).abs() < 3.0 * sd, "{var}");
}

#[test]
fn laguerre_single_eigenvalue_is_exponential() {
    let spec = EnsembleSpec::laguerre(1, 2.0, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let m = 10_000;
    let xs: Vec<f64> = (0..m).map(|_| sample_eigenvalues(&spec, &mut rng).unwrap()[0]).collect();
    let d = ks_statistic(xs, |x| 1.0 - (-x).exp());
    assert!(d < ks_critical(m), "D = {d}");
}

#[test]
fn two_by_two_unitary_histogram() {
    let spec = EnsembleSpec::hermite(2, 2.0).unwrap();
    let grid: Vec<f64> = (0..=160).map(|i| -4.0 + 0.05 * i as f64).collect();
    let mc = mc_curve(&spec, &grid, Scaling::Raw, 200_000, 9).unwrap();
    let l1: f64 = mc
        .values
        .iter()
        .zip(&grid)
        .map(|(v, &x)| {
            let exact = 2.0 / PI.sqrt() * (-x * x).exp() * (x * x + 0.5);
            (v - exact).abs() / 2.0 * 0.05
        })
        .sum();
    assert!(l1 <= 0.02, "L1 = {l1}");
}

#[test]
fn trace_and_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for spec in [
        EnsembleSpec::hermite(12, 6.0).unwrap(),
        EnsembleSpec::laguerre(12, 4.0, 0.0).unwrap(),
        EnsembleSpec::laguerre(5, 1.0, 2.5).unwrap(),
    ] {
        for _ in 0..2000 {
            let t = sample_tridiag(&spec, &mut rng).unwrap();
            let ev = tridiag_eigenvalues(&t).unwrap();
            let tr = t.trace();
            let sum: f64 = ev.iter().sum();
            assert!((sum - tr).abs() <= 1e-10 * tr.abs().max(t.norm_bound()));
            assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            if spec.family == beta_density::Family::Laguerre {
                assert!(ev[0] >= -1e-10 * t.norm_bound(), "{ev:?}");
            }
        }
    }
}

#[test]
fn hermite_pool_is_sign_symmetric() {
    let spec = EnsembleSpec::hermite(5, 4.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pooled: Vec<f64> = (0..20_000).flat_map(|_| sample_eigenvalues(&spec, &mut rng).unwrap()).collect();
    let m = pooled.len() as f64;
    let mean = pooled.iter().sum::<f64>() / m;
    let var = pooled.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    assert!(mean.abs() < 4.0 * (var / m).sqrt(), "{mean}");
}

#[test]
fn results_do_not_depend_on_threads() {
    let spec = EnsembleSpec::laguerre(4, 6.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..50).map(|i| 0.01 + 0.02 * i as f64).collect();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_curve(&spec, &grid, Scaling::BulkLaguerre, 10_000, 77).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    let c = run(2);
    assert_eq!(a, c);
}

#[test]
fn auto_bins_are_reproducible() {
    let spec = EnsembleSpec::hermite(6, 2.0).unwrap();
    let a = mc_histogram_auto(&spec, Scaling::BulkHermite, 5000, 1).unwrap();
    let b = mc_histogram_auto(&spec, Scaling::BulkHermite, 5000, 1).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.draws, 5000);
}

#[test]
fn semicircle_at_moderate_size() {
    let spec = EnsembleSpec::hermite(64, 2.0).unwrap();
    let grid: Vec<f64> = (0..50).map(|i| -0.98 + 0.04 * i as f64).collect();
    let mc = mc_curve(&spec, &grid, Scaling::BulkHermite, 10_000, 5).unwrap();
    let l1: f64 = mc.values.iter().zip(&grid).map(|(v, &x)| (v - wigner_density(x)).abs() * 0.04).sum();
    assert!(l1 <= 0.05, "L1 = {l1}");
}

#[test]
fn marchenko_pastur_at_moderate_size() {
    let spec = EnsembleSpec::laguerre(64, 2.0, 0.0).unwrap();
    let grid: Vec<f64> = (0..50).map(|i| 0.01 + 0.02 * i as f64).collect();
    let mc = mc_curve(&spec, &grid, Scaling::BulkLaguerre, 10_000, 6).unwrap();
    let l1: f64 = mc
        .values
        .iter()
        .zip(&grid)
        .skip(1)
        .map(|(v, &x)| (v - mp_density(x)).abs() * 0.02)
        .sum();
    assert!(l1 <= 0.08, "L1 = {l1}");
}
