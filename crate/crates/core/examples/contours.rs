//! Integration contours of the soft-edge integral, written as CSV.
//!
//! Run with `cargo run --release --example contours -- airy|ordered OUT_DIR`.
//!
//! `airy` writes the one-variable paths (through the saddle for x = 1, and up
//! the imaginary axis for x = -2) and the boundaries of the sectors where
//! `exp(v^3/3)` decays. `ordered` writes the two-ray path for n = 4 with one
//! ordered node configuration `v_1, ..., v_4` on it.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use beta_density::softedge::{contour_path, Contour, ContourPoint, KQuadConfig};

fn path_csv(pts: &[ContourPoint]) -> String {
    let mut csv = String::from("segment,s,re,im\n");
    for p in pts {
        let _ = writeln!(csv, "{},{:.12},{:.12},{:.12}", p.segment, p.s, p.re, p.im);
    }
    csv
}

fn main() -> beta_density::Result<()> {
    let mut args = std::env::args().skip(1);
    let (Some(which), Some(dir)) = (args.next(), args.next()) else {
        eprintln!("usage: contours airy|ordered OUT_DIR");
        std::process::exit(2);
    };
    let dir = PathBuf::from(dir);
    std::fs::create_dir_all(&dir)?;
    let mut files: Vec<(&str, String)> = Vec::new();
    match which.as_str() {
        "airy" => {
            let cfg = KQuadConfig { truncation: Some(3.0), ..Default::default() };
            files.push(("airy_path_x1.csv", path_csv(&contour_path(1, 2.0, 1.0, &cfg, 60)?)));
            files.push(("airy_path_xm2.csv", path_csv(&contour_path(1, 2.0, -2.0, &cfg, 60)?)));
            let mut sectors = String::from("angle,decays_between_next\n");
            for k in 0..6 {
                let a = -PI / 2.0 + k as f64 * PI / 3.0;
                let _ = writeln!(sectors, "{:.12},{}", a, k % 2 == 1);
            }
            files.push(("airy_sectors.csv", sectors));
        }
        "ordered" => {
            let n = 4;
            let cfg = KQuadConfig { contour: Contour::TwoRay, truncation: Some(3.0), ..Default::default() };
            let pts = contour_path(n, 4.0, 0.0, &cfg, 60)?;
            let total = pts.last().map_or(0.0, |p| p.s);
            // v_1 is the latest point along the path
            let mut nodes = String::from("index,s,re,im\n");
            for j in 1..=n {
                let s = total * (n + 1 - j) as f64 / (n + 1) as f64;
                let q = pts.iter().min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs())).unwrap();
                let _ = writeln!(nodes, "{j},{:.12},{:.12},{:.12}", q.s, q.re, q.im);
            }
            files.push(("ordered_path.csv", path_csv(&pts)));
            files.push(("ordered_nodes.csv", nodes));
        }
        other => {
            eprintln!("unknown figure `{other}`; expected airy or ordered");
            std::process::exit(2);
        }
    }
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        println!("{}", path.display());
    }
    Ok(())
}
