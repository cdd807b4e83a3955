//! The multidimensional Airy-type integral `K_{n,beta}(x)` and its quadrature diagnostics.
//!
//! Run with `cargo run --release --example kontsevich_integral`.

use std::time::Instant;

use beta_density::softedge::{k_det_beta2, k_integral_detailed, Contour, KMethod, KQuadConfig};

fn main() -> beta_density::Result<()> {
    let steep = KQuadConfig::default();
    let two = KQuadConfig { contour: Contour::TwoRay, ..Default::default() };

    println!("beta = 2 against the Hankel determinant of Airy derivatives");
    for (n, x) in [(2, -3.0), (2, 1.0), (3, 0.0)] {
        let k = k_integral_detailed(n, 2.0, x, &steep)?;
        println!("  n={n} x={x}: {:.12e} (determinant {:.12e}, error {:.1e})", k.value, k_det_beta2(n, x)?, k.error);
    }

    println!("\nsteepest and two-ray contours");
    for (n, beta, x) in [(2, 2.0, -2.0), (3, 6.0, 0.5), (4, 4.0, 0.0)] {
        let t = Instant::now();
        let a = k_integral_detailed(n, beta, x, &steep)?;
        let b = k_integral_detailed(n, beta, x, &two)?;
        println!(
            "  n={n} beta={beta} x={x}: {:.10e} vs {:.10e} ({} + {} evaluations, {:.1?})",
            a.value,
            b.value,
            a.evaluations,
            b.evaluations,
            t.elapsed()
        );
    }

    println!("\nbeta = 4, n = 2 is purely imaginary: the reality check rejects it");
    match k_integral_detailed(2, 4.0, 0.0, &steep) {
        Ok(k) => println!("  unexpected value {k:?}"),
        Err(e) => println!("  {e}"),
    }

    println!("\nnested Gauss and quasi Monte Carlo (1e6 points, four seeds) at n = 3, beta = 6, x = 0");
    let gauss = k_integral_detailed(3, 6.0, 0.0, &steep)?;
    println!("  nested Gauss: {:.10e} +- {:.1e}", gauss.value, gauss.error);
    for seed in 1..=4 {
        let cfg = KQuadConfig { method: Some(KMethod::QuasiMonteCarlo), points: Some(1_000_000), seed, ..Default::default() };
        let k = k_integral_detailed(3, 6.0, 0.0, &cfg)?;
        println!("  seed {seed}: {:.8e} +- {:.1e} (off by {:.2} standard errors)", k.value, k.error, (k.value - gauss.value) / k.error);
    }
    Ok(())
}
