//! Exact finite-N densities for small Hermite and Laguerre ensembles.
//!
//! Run with `cargo run --release --example exact_density`.

use std::time::Instant;

use beta_density::symop::{exact_curve, rectangular_generalized_polynomial};
use beta_density::{EnsembleSpec, Scaling};

fn main() -> beta_density::Result<()> {
    let specs = [
        EnsembleSpec::hermite(2, 2.0)?,
        EnsembleSpec::hermite(7, 6.0)?,
        EnsembleSpec::laguerre(4, 6.0, 0.0)?,
        EnsembleSpec::laguerre(4, 6.0, 1.0)?,
    ];
    for spec in &specs {
        let t = Instant::now();
        let poly = rectangular_generalized_polynomial(spec)?;
        let build = t.elapsed();
        let grid: Vec<f64> = match spec.family {
            beta_density::Family::Hermite => (0..=400).map(|i| -1.3 + i as f64 * 0.0065).collect(),
            beta_density::Family::Laguerre => (0..=500).map(|i| 1.5 * (i as f64 / 500.0).powi(2)).collect(),
        };
        let curve = exact_curve(spec, grid, Scaling::bulk(spec.family))?;
        println!(
            "{:?} N={} beta={} a={}: degree {}, built in {:.2?}, {} local maxima, mass {:.6}",
            spec.family,
            spec.n,
            spec.beta,
            spec.a,
            poly.degree(),
            build,
            curve.local_maxima().len(),
            curve.integral()
        );
    }
    Ok(())
}
