//! Oscillatory finite-N corrections to the semicircle and Marchenko-Pastur laws.
//!
//! Run with `cargo run --release --example bulk_corrections`.

use beta_density::bulk::{bulk_curve, hermite_terms, laguerre_terms, mp_density, wigner_density};
use beta_density::EnsembleSpec;

fn main() -> beta_density::Result<()> {
    println!("Hermite, N = 8, x = 0.3: correction terms");
    for beta in [2.0, 6.0, 10.0] {
        for t in hermite_terms(8, beta, 0.3)? {
            println!("  beta {beta:>4}: k = {} amplitude {:+.5} phase {:.4}", t.k, t.amplitude, t.phase);
        }
    }

    let grid: Vec<f64> = (0..=180).map(|i| -0.9 + 0.01 * i as f64).collect();
    println!("\nHermite, N = 8: largest deviation from the semicircle on [-0.9, 0.9]");
    for beta in [2.0, 6.0, 10.0] {
        let curve = bulk_curve(&EnsembleSpec::hermite(8, beta)?, grid.clone())?;
        let dev = curve
            .grid
            .iter()
            .zip(&curve.values)
            .map(|(&x, v)| (v - wigner_density(x)).abs())
            .fold(0.0, f64::max);
        println!("  beta {beta:>4}: {dev:.4}, {} maxima", curve.local_maxima().len());
    }

    let grid: Vec<f64> = (0..=90).map(|i| 0.05 + 0.01 * i as f64).collect();
    println!("\nLaguerre, N = 5, a = 0: largest deviation from Marchenko-Pastur on [0.05, 0.95]");
    for beta in [4.0, 6.0, 8.0] {
        let curve = bulk_curve(&EnsembleSpec::laguerre(5, beta, 0.0)?, grid.clone())?;
        let dev = curve
            .grid
            .iter()
            .zip(&curve.values)
            .map(|(&x, v)| (v - mp_density(x)).abs())
            .fold(0.0, f64::max);
        println!("  beta {beta:>4}: {dev:.4}, {} maxima", curve.local_maxima().len());
    }

    println!("\nLaguerre, N = 4, beta = 6: the exponent a moves the phase only");
    for a in [0.0, 1.0, 2.0] {
        let t = laguerre_terms(4, 6.0, a, 0.4)?[0];
        println!("  a = {a}: amplitude {:+.5} phase {:.4}", t.amplitude, t.phase);
    }
    Ok(())
}
