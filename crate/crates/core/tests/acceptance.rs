//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use beta_density::bulk::{self, mp_cdf, mp_density, wigner_cdf, wigner_density};
use beta_density::ensembles::mc_curve;
use beta_density::softedge::{self, gauss_legendre, k_integral_detailed, Contour, KQuadConfig};
use beta_density::specfun::{airy_ai, soft_edge_prefactor};
use beta_density::symop::{exact_curve, exact_density};
use beta_density::{EnsembleSpec, Family, Scaling};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + h * i as f64).collect()
}

// Composite Gauss-Legendre on [lo, hi].
fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(32);
    let w = (hi - lo) / panels as f64;
    (0..panels)
        .map(|p| {
            let a = lo + w * p as f64;
            nodes.iter().zip(&weights).map(|(t, wt)| wt * f(a + w * t)).sum::<f64>() * w
        })
        .sum()
}

// Bin averages over `[c - h/2, c + h/2]` by Simpson on 9 points.
fn bin_averages(centers: &[f64], h: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    centers
        .iter()
        .map(|&c| {
            let a = c - h / 2.0;
            let s: f64 = (0..=8)
                .map(|i| {
                    let w = if i == 0 || i == 8 { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * f(a + h * i as f64 / 8.0)
                })
                .sum();
            s / 24.0
        })
        .collect()
}

fn l1(h: f64, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * h
}

fn c1_normalization() -> Outcome {
    let specs = [
        EnsembleSpec::hermite(2, 2.0),
        EnsembleSpec::hermite(3, 2.0),
        EnsembleSpec::hermite(2, 4.0),
        EnsembleSpec::hermite(7, 6.0),
        EnsembleSpec::laguerre(2, 2.0, 0.0),
        EnsembleSpec::laguerre(4, 6.0, 0.0),
        EnsembleSpec::laguerre(4, 6.0, 1.0),
    ];
    let mut worst = 0.0f64;
    for s in specs {
        let s = s.unwrap();
        let nf = s.n as f64;
        let total = match s.family {
            Family::Hermite => {
                let l = (2.0 * nf).sqrt() + 8.0;
                integrate(|x| exact_density(&s, x).unwrap(), -l, l, 64)
            }
            Family::Laguerre => integrate(|x| exact_density(&s, x).unwrap(), 0.0, 12.0 * nf + 60.0, 128),
        };
        worst = worst.max((total - nf).abs());
    }
    check(worst <= 1e-8, format!("max |integral - N| = {worst:.2e}"))
}

fn c2_closed_forms() -> Outcome {
    let s = EnsembleSpec::hermite(2, 2.0).unwrap();
    let mut worst = 0.0f64;
    for x in grid(-5.0, 5.0, 10.0 / 199.0) {
        let want = 2.0 / PI.sqrt() * (-x * x).exp() * (x * x + 0.5);
        worst = worst.max((exact_density(&s, x).unwrap() - want).abs());
    }
    // integer aβ/2 keeps the normalizing Gamma a factorial
    for (beta, a) in [(2.0, 0.0), (2.0, 2.0), (4.0, 1.0), (4.0, 0.5), (6.0, 1.0)] {
        let s = EnsembleSpec::laguerre(1, beta, a).unwrap();
        let e: f64 = a * beta / 2.0;
        let fact: f64 = (1..=e as u32).map(f64::from).product();
        for x in grid(0.05, 8.0, 0.05) {
            let want = (beta / 2.0).powf(e + 1.0) * x.powf(e) * (-beta * x / 2.0).exp() / fact;
            worst = worst.max((exact_density(&s, x).unwrap() - want).abs());
        }
    }
    check(worst <= 1e-10, format!("max abs deviation {worst:.2e}"))
}

fn c3_bulk_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=1000usize);
        let x: f64 = rng.random_range(-0.99..0.99);
        let (rho, p) = (wigner_density(x), wigner_cdf(x).unwrap());
        let nf = n as f64;
        let two = -2.0 / (PI.powi(3) * rho * rho * nf) * (2.0 * PI * nf * p).cos();
        let four = -1.0 / (PI * rho.sqrt() * nf.sqrt()) * (2.0 * PI * nf * p + 0.5 * x.asin()).cos();
        for (beta, want) in [(2.0, two), (4.0, four)] {
            let s = EnsembleSpec::hermite(n, beta).unwrap();
            let got = bulk::bulk_density(&s, x).unwrap() - rho;
            let scale = rho.max(want.abs());
            worst = worst.max((got - want).abs() / scale);
        }
    }
    check(worst <= 64.0 * f64::EPSILON, format!("max relative deviation {worst:.2e}"))
}

fn c4_hermite_seven() -> Outcome {
    let s = EnsembleSpec::hermite(7, 6.0).unwrap();
    let g = grid(-0.99, 0.99, 0.0025);
    let exact = exact_curve(&s, g.clone(), Scaling::BulkHermite).unwrap();
    let asym = bulk::bulk_curve(&s, g.clone()).unwrap();
    let (pe, pa) = (exact.local_maxima(), asym.local_maxima());
    let delta = if pe.len() == pa.len() {
        pe.iter().zip(&pa).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let linf = exact.linf_distance_on(&asym, -0.85, 0.85).unwrap();
    check(
        pe.len() == 7 && delta <= 0.03 && linf <= 0.06,
        format!("maxima {} / {}, max shift {delta:.4}, Linf {linf:.4}", pe.len(), pa.len()),
    )
}

fn c5_laguerre_shift() -> Outcome {
    let g = grid(0.005, 0.995, 0.0025);
    let s0 = EnsembleSpec::laguerre(4, 6.0, 0.0).unwrap();
    let s1 = EnsembleSpec::laguerre(4, 6.0, 1.0).unwrap();
    let a0 = bulk::bulk_curve(&s0, g.clone()).unwrap();
    let a1 = bulk::bulk_curve(&s1, g.clone()).unwrap();
    // the a = 0 curve peaks at the hard edge itself, which pairs with the first a = 1 maximum
    let mut m0 = vec![0.0];
    m0.extend(a0.local_maxima());
    let m1 = a1.local_maxima();
    let shifted = m1.iter().zip(&m0).all(|(r, l)| r > l);
    let exact = exact_curve(&s0, g, Scaling::BulkLaguerre).unwrap();
    let linf = exact.linf_distance_on(&a0, 0.1, 0.9).unwrap();
    check(
        shifted && linf <= 0.08,
        format!("a=0 maxima {m0:.4?}, a=1 maxima {m1:.4?}, a=0 Linf on [0.1, 0.9] {linf:.4}"),
    )
}

fn c6_monte_carlo() -> Outcome {
    let draws = 200_000;
    let h = 0.01;
    let mut details = Vec::new();
    let mut ok = true;
    let hg = grid(-1.2, 1.2, h);
    let s = EnsembleSpec::hermite(7, 6.0).unwrap();
    let mc = mc_curve(&s, &hg, Scaling::BulkHermite, draws, 61).unwrap();
    let scale = (2.0 * 7.0f64).sqrt();
    let ex = bin_averages(&hg, h, |x| exact_density(&s, scale * x).unwrap() * scale / 7.0);
    let d = l1(h, &mc.values, &ex);
    ok &= d <= 0.02;
    details.push(format!("H(7,6) {d:.4}"));
    let lg = grid(0.005, 1.195, h);
    for a in [0.0, 1.0] {
        let s = EnsembleSpec::laguerre(4, 6.0, a).unwrap();
        let mc = mc_curve(&s, &lg, Scaling::BulkLaguerre, draws, 62).unwrap();
        let ex = bin_averages(&lg, h, |x| exact_density(&s, 16.0 * x).unwrap() * 4.0);
        let d = l1(h, &mc.values, &ex);
        ok &= d <= 0.03;
        details.push(format!("L(4,6,{a}) {d:.4}"));
    }
    let s = EnsembleSpec::hermite(64, 2.0).unwrap();
    let wg = grid(-1.1, 1.1, 0.02);
    let mc = mc_curve(&s, &wg, Scaling::BulkHermite, draws, 63).unwrap();
    let ex = bin_averages(&wg, 0.02, wigner_density);
    let d = l1(0.02, &mc.values, &ex);
    ok &= d <= 0.05;
    details.push(format!("semicircle N=64 {d:.4}"));
    check(ok, format!("L1 {}", details.join(", ")))
}

fn c7_k_integral() -> Outcome {
    let cfg = KQuadConfig::default();
    let mut airy = 0.0f64;
    for beta in [2.0, 4.0, 6.0] {
        for x in [-4.0, -1.0, 0.0, 1.0, 2.0] {
            let k = softedge::k_integral(1, beta, x, &cfg).unwrap();
            airy = airy.max((k + airy_ai(x).ai).abs());
        }
    }
    let mut det = 0.0f64;
    for x in grid(-6.0, 2.0, 0.25) {
        let k = softedge::k_integral(2, 2.0, x, &cfg).unwrap();
        det = det.max((k - softedge::k_det_beta2(2, x).unwrap()).abs());
    }
    let two = KQuadConfig { contour: Contour::TwoRay, ..Default::default() };
    let mut contour_ok = true;
    let mut contour_gap = 0.0f64;
    for (n, beta, x) in [(2usize, 2.0, 0.0), (2, 2.0, -2.0), (2, 2.0, 1.0), (3, 2.0, -1.0), (4, 4.0, 0.0)] {
        let a = k_integral_detailed(n, beta, x, &cfg).unwrap();
        let b = k_integral_detailed(n, beta, x, &two).unwrap();
        let tol = cfg.tolerance_for(n) * a.value.abs().max(1e-3);
        contour_gap = contour_gap.max((a.value - b.value).abs() / tol);
        contour_ok &= (a.value - b.value).abs() <= 3.0 * tol;
    }
    check(
        airy <= 1e-6 && det <= 1e-4 && contour_ok,
        format!("n=1 vs -Ai {airy:.2e}, n=2 vs determinant {det:.2e}, contour gap {contour_gap:.2}x tolerance"),
    )
}

fn c8_universality() -> Outcome {
    let c2 = soft_edge_prefactor(2).unwrap();
    let mut worst = 0.0f64;
    for x in grid(-6.0, 3.0, 0.1) {
        let a = airy_ai(x);
        let want = a.aip * a.aip - x * a.ai * a.ai;
        worst = worst.max((c2 * softedge::k_det_beta2(2, x).unwrap() - want).abs());
    }
    let cfg = KQuadConfig { points: Some(16), ..Default::default() };
    let g = vec![-2.0, -0.5, 0.0, 1.0];
    let h = softedge::edge_curve(&EnsembleSpec::hermite(8, 4.0).unwrap(), g.clone(), &cfg).unwrap();
    let l = softedge::edge_curve(&EnsembleSpec::laguerre(5, 4.0, 1.0).unwrap(), g, &cfg).unwrap();
    let same = h.values.iter().zip(&l.values).all(|(a, b)| a.to_bits() == b.to_bits());
    check(worst <= 1e-6 && same, format!("max |C2 K - (Ai'^2 - x Ai^2)| {worst:.2e}, beta=4 pipelines identical: {same}"))
}

fn c9_right_tail() -> Outcome {
    let errs: Vec<f64> = [2.0, 3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|&x| {
            let k = softedge::k_det_beta2(2, x).unwrap();
            ((softedge::k_asym_right(2, x).unwrap() - k) / k).abs()
        })
        .collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let mut pref = 0.0f64;
    for x in [1.0, 2.5, 4.0, 9.0] {
        let want = (-4.0 * f64::powf(x, 1.5) / 3.0).exp() / (4.0 * PI * x);
        pref = pref.max(((softedge::k_asym_right(2, x).unwrap() - want) / want).abs());
    }
    check(
        errs[2] <= 0.15 && errs[4] <= 0.08 && monotone && pref <= 1e-13,
        format!("relative errors at 2..6 {errs:.4?}, prefactor deviation {pref:.1e}"),
    )
}

fn c10_left_tail() -> Outcome {
    let cfg = KQuadConfig::default();
    let mut ok = true;
    let mut errs = Vec::new();
    for (x, tol) in [(-4.0, 0.05), (-6.0, 0.02), (-8.0, 0.015)] {
        let sigma = softedge::soft_edge_density(2, x, &cfg).unwrap();
        let e = ((softedge::k_asym_left(2, x).unwrap() - sigma) / sigma).abs();
        ok &= e <= tol;
        errs.push(e);
    }
    let pts: Vec<(f64, f64)> = grid(10.0, 20.0, 0.25)
        .into_iter()
        .map(|t| (t.ln(), softedge::soft_edge_density(2, -t, &cfg).unwrap().ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ok &= (slope - 0.5).abs() <= 0.01;
    check(ok, format!("relative errors at -4/-6/-8 {errs:.4?}, fitted exponent {slope:.4}"))
}

fn c11_cdf_derivatives() -> Outcome {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for x in grid(-0.95, 0.95, 0.05) {
        let d = (wigner_cdf(x + h).unwrap() - wigner_cdf(x - h).unwrap()) / (2.0 * h);
        worst = worst.max((d - wigner_density(x)).abs());
    }
    for x in grid(0.05, 0.95, 0.05) {
        let d = (mp_cdf(x + h).unwrap() - mp_cdf(x - h).unwrap()) / (2.0 * h);
        worst = worst.max((d - mp_density(x)).abs());
    }
    check(worst <= 1e-6, format!("max derivative deviation {worst:.2e}"))
}

fn c12_determinism() -> Outcome {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_betadensity"))
            .args([
                "compare", "--family", "hermite", "--n", "6", "--beta", "4", "--methods", "exact,mc,bulk",
                "--samples", "30000", "--seed", "12", "--grid", "-1:1:0.02", "--threads", threads,
            ])
            .output()
            .unwrap()
    };
    let base = run("1");
    let mut ok = base.status.success();
    for t in ["2", "4"] {
        ok &= run(t).stdout == base.stdout;
    }
    let again = run("1");
    ok &= again.stdout == base.stdout;
    let s = EnsembleSpec::laguerre(4, 2.0, 0.0).unwrap();
    let g = grid(0.01, 1.19, 0.02);
    let lib = |t| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| mc_curve(&s, &g, Scaling::BulkLaguerre, 20_000, 5).unwrap())
    };
    let one = lib(1);
    ok &= [2, 3].iter().all(|&t| lib(t).values.iter().zip(&one.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    check(ok, "CLI report and library sampler bit-identical over 1..4 threads".to_string())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("exact normalization", c1_normalization),
        ("closed forms", c2_closed_forms),
        ("bulk reductions at beta 2 and 4", c3_bulk_reductions),
        ("Hermite N=7 beta=6 structure", c4_hermite_seven),
        ("Laguerre N=4 beta=6 shift and deviation", c5_laguerre_shift),
        ("Monte Carlo agreement", c6_monte_carlo),
        ("K integral validation", c7_k_integral),
        ("soft-edge universality", c8_universality),
        ("right asymptote", c9_right_tail),
        ("left asymptote", c10_left_tail),
        ("CDF derivatives", c11_cdf_derivatives),
        ("determinism", c12_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} ({secs:.1}s)", i + 1),
            Err(d) => {
                println!("criterion {:>2} FAIL  {name}: {d} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
