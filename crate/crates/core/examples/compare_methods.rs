//! Exact, asymptotic and sampled curves side by side, as the `compare` command reports them.
//!
//! Run with `cargo run --release --example compare_methods`.

use beta_density::cli::{build_report, Cli, Command};
use clap::Parser;

fn main() -> beta_density::Result<()> {
    let cli = Cli::parse_from([
        "betadensity", "compare", "--family", "laguerre", "--n", "4", "--beta", "6",
        "--methods", "exact,bulk,mc,bulk@a=1", "--grid", "0.0025:1:0.005", "--samples", "100000",
    ]);
    let Command::Compare(args) = cli.command else { unreachable!() };
    let report = build_report(&args)?;
    for c in &report.metrics.curves {
        // sampling noise adds spurious maxima to the histogram
        if c.label == "mc" {
            println!("{:>10}: {} maxima (noisy)", c.label, c.peak_count);
        } else {
            println!("{:>10}: {} maxima at {:.3?}", c.label, c.peak_count, c.peaks);
        }
    }
    for p in &report.metrics.pairs {
        println!("{:>10} vs {:<10} L1 {:.4}  Linf {:.4}", p.a, p.b, p.l1, p.linf);
    }
    Ok(())
}
