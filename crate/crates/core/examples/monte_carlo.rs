//! Tridiagonal-model sampling compared with the exact and limiting densities.
//!
//! Run with `cargo run --release --example monte_carlo`.

use beta_density::bulk::wigner_density;
use beta_density::ensembles::{mc_curve, mc_histogram_auto};
use beta_density::symop::exact_curve;
use beta_density::{EnsembleSpec, Scaling};

fn main() -> beta_density::Result<()> {
    let spec = EnsembleSpec::hermite(7, 6.0)?;
    let grid: Vec<f64> = (0..=240).map(|i| -1.2 + 0.01 * i as f64).collect();
    let mc = mc_curve(&spec, &grid, Scaling::BulkHermite, 200_000, 1)?;
    let exact = exact_curve(&spec, grid, Scaling::BulkHermite)?;
    println!("Hermite N=7 beta=6: L1(histogram, exact) = {:.4}", mc.l1_distance(&exact)?);

    let spec = EnsembleSpec::hermite(64, 2.0)?;
    let grid: Vec<f64> = (0..=55).map(|i| -1.1 + 0.04 * i as f64).collect();
    let mc = mc_curve(&spec, &grid, Scaling::BulkHermite, 20_000, 2)?;
    let l1: f64 = mc.values.iter().zip(&grid).map(|(v, &x)| (v - wigner_density(x)).abs() * 0.04).sum();
    println!("Hermite N=64 beta=2: L1(histogram, semicircle) = {l1:.4}");

    let spec = EnsembleSpec::laguerre(4, 6.0, 1.0)?;
    let h = mc_histogram_auto(&spec, Scaling::BulkLaguerre, 50_000, 3)?;
    println!(
        "Laguerre N=4 beta=6 a=1: {} automatic bins of width {:.4}, {} samples outside",
        h.bins(),
        h.edges[1] - h.edges[0],
        h.clipped
    );
    Ok(())
}
