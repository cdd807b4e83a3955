//! Soft-edge densities and their tails, in edge and physical coordinates.
//!
//! Run with `cargo run --release --example soft_edge`.

use beta_density::softedge::{
    edge_coordinate, edge_density_at, edge_to_physical, k_asym_left, sigma_asym_right, soft_edge_density,
    KQuadConfig,
};
use beta_density::specfun::airy_ai;
use beta_density::EnsembleSpec;

fn main() -> beta_density::Result<()> {
    let cfg = KQuadConfig::default();
    println!("{:>6} {:>14} {:>14} {:>14}", "x", "beta=2", "Airy kernel", "beta=4");
    for x in [-6.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
        let a = airy_ai(x);
        println!(
            "{x:>6} {:>14.8e} {:>14.8e} {:>14.8e}",
            soft_edge_density(2, x, &cfg)?,
            a.aip * a.aip - x * a.ai * a.ai,
            soft_edge_density(4, x, &cfg)?
        );
    }

    println!("\ntails at beta = 2");
    for x in [-16.0, -10.0] {
        println!("  x = {x}: sigma {:.6}, left asymptote {:.6}", soft_edge_density(2, x, &cfg)?, k_asym_left(2, x)?);
    }
    for x in [4.0, 6.0] {
        println!("  x = {x}: sigma {:.6e}, right asymptote {:.6e}", soft_edge_density(2, x, &cfg)?, sigma_asym_right(2, x)?);
    }

    println!("\nthe same edge point seen from two ensembles (beta = 2)");
    for spec in [EnsembleSpec::hermite(8, 2.0)?, EnsembleSpec::laguerre(8, 2.0, 0.0)?] {
        let phys = edge_to_physical(&spec, -1.0);
        let (x, jac) = edge_coordinate(&spec, phys);
        println!(
            "  {:?}: eigenvalue {phys:.4} -> x = {x:.4}, dX/dx = {jac:.4}, density {:.6}",
            spec.family,
            edge_density_at(&spec, phys, &cfg)?
        );
    }
    Ok(())
}
