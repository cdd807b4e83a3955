//! Soft-edge density from the Kontsevich-type integral
//!
//! `K_{n,b}(x) = -(1/(2 pi i)^n) int_{iR^n} prod_j exp(v_j^3/3 - x v_j) prod_{k<l} |v_k - v_l|^{4/b} dv`.
//!
//! The integral is evaluated on deformed contours through (or near) the saddle,
//! with the variables ordered along the path (`v_1` latest) and analytic powers
//! `(v_k - v_l)^{4/b}`. Two contour families are available:
//!
//! * [`Contour::Steepest`]: one path from `inf e^{-i theta}` through `shift` to
//!   `inf e^{i theta}`, prefactor `-n!/(2 pi i)^n`;
//! * [`Contour::TwoRay`]: two paths joined at infinity on the left, the first
//!   from `inf e^{i theta}` to `inf e^{i(pi - phi)}`, the second from
//!   `inf e^{-i(pi - phi)}` to `inf e^{-i theta}`, prefactor `(-1)^{n+1} n!/(2 pi i)^n`.
//!
//! Branches are fixed by continuity along the path: for an earlier point with
//! (lifted) heading `H`, `arg(v_later - v_earlier)` is taken in `(H - pi/2, H + 3pi/2]`.
//! On the steepest contour this coincides with the principal branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{CurveMeta, DensityCurve, Method, Scaling};
use crate::error::{Error, Result};
use crate::specfun::{self, airy_ai, EnsembleSpec};

/// Largest number of integration variables accepted.
pub const MAX_K_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMethod {
    NestedGauss,
    QuasiMonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Contour {
    Steepest,
    TwoRay,
}

/// Quadrature settings for [`k_integral`]. `None` fields are chosen from `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KQuadConfig {
    /// Angle of the outgoing rays, in `(pi/6, pi/2)`.
    pub ray_angle: f64,
    /// Angle `phi` of the left rays of the two-ray contour, in `(0, pi/6)`.
    pub left_angle: f64,
    pub contour: Contour,
    /// Arclength of every ray; by default the tail is cut below `e^{-40}` of the peak.
    pub truncation: Option<f64>,
    pub method: Option<KMethod>,
    /// Gauss nodes per dimension, or total QMC points.
    pub points: Option<usize>,
    /// Real point the contour passes through. By default the steepest contour
    /// passes through `sqrt x` for `x >= 0` and, for `x < 0`, runs up the
    /// imaginary axis between the saddles `-+ i sqrt|x|`; the two-ray contour
    /// is joined at the origin.
    pub shift: Option<f64>,
    pub seed: u64,
    /// Largest tolerated `|Im K| / |Re K|`.
    pub tol_imag: f64,
    /// Target accuracy; default `1e-6` (n <= 2), `1e-4` (n = 3), `1e-3` (n >= 4).
    pub tolerance: Option<f64>,
    /// `soft_edge_density` uses the right asymptote above this point.
    pub right_switch: f64,
    /// `soft_edge_density` uses the left asymptote below this point.
    pub left_switch: f64,
}

impl Default for KQuadConfig {
    fn default() -> Self {
        KQuadConfig {
            ray_angle: PI / 3.0,
            left_angle: PI / 12.0,
            contour: Contour::Steepest,
            truncation: None,
            method: None,
            points: None,
            shift: None,
            seed: 0x5eed,
            tol_imag: 1e-6,
            tolerance: None,
            right_switch: 5.0,
            left_switch: -8.0,
        }
    }
}

impl KQuadConfig {
    pub fn method_for(&self, n: usize) -> KMethod {
        self.method.unwrap_or(if n <= 4 { KMethod::NestedGauss } else { KMethod::QuasiMonteCarlo })
    }

    pub fn tolerance_for(&self, n: usize) -> f64 {
        self.tolerance.unwrap_or(match n {
            0..=2 => 1e-6,
            3 => 1e-4,
            _ => 1e-3,
        })
    }

    pub fn points_for(&self, n: usize) -> usize {
        if let Some(p) = self.points {
            return p;
        }
        match self.method_for(n) {
            KMethod::NestedGauss => match n {
                1 => 128,
                2 => 96,
                3 => 40,
                4 => 20,
                5 => 12,
                _ => 10,
            },
            KMethod::QuasiMonteCarlo => 2_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ray_angle > PI / 6.0 && self.ray_angle < PI / 2.0) {
            return Err(Error::Contour(format!(
                "ray angle {} outside (pi/6, pi/2)",
                self.ray_angle
            )));
        }
        if !(self.left_angle > 0.0 && self.left_angle < PI / 6.0) {
            return Err(Error::Contour(format!(
                "left ray angle {} outside (0, pi/6)",
                self.left_angle
            )));
        }
        if let Some(t) = self.truncation {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::domain(format!("truncation must be positive, got {t}")));
            }
        }
        if !(self.tol_imag > 0.0) {
            return Err(Error::domain("tol_imag must be positive"));
        }
        if !(self.left_switch < self.right_switch) {
            return Err(Error::domain("left_switch must lie below right_switch"));
        }
        Ok(())
    }
}

/// A quadrature result with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KEstimate {
    pub value: f64,
    /// Imaginary part of the computed complex value.
    pub imag: f64,
    /// Estimated absolute error (two Gauss levels, or the QMC standard error).
    pub error: f64,
    /// `|prefactor| * int |integrand|`, the scale of cancellation.
    pub abs_mass: f64,
    pub evaluations: u64,
}

// One straight piece of the contour. Points are `anchor + r * outward`,
// `0 <= r <= len`; `inward` pieces are traversed towards the anchor.
#[derive(Debug, Clone, Copy)]
struct Segment {
    anchor: Complex64,
    outward: Complex64,
    inward: bool,
    heading: f64,
    len: f64,
}

impl Segment {
    fn point(&self, r: f64) -> Complex64 {
        self.anchor + self.outward * r
    }

    fn dv(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.heading)
    }
}

struct Path {
    segments: Vec<Segment>,
    sign: f64,
}

fn build_path(n: usize, beta: f64, x: f64, cfg: &KQuadConfig) -> Result<Path> {
    let ray = |a: f64| Complex64::from_polar(1.0, a);
    let th = cfg.ray_angle;
    let phi = cfg.left_angle;
    let seg = |anchor: Complex64, outward: Complex64, inward: bool, heading: f64| Segment {
        anchor,
        outward,
        inward,
        heading,
        len: 0.0,
    };
    let mut segments = match (cfg.contour, cfg.shift) {
        // x < 0: climb the imaginary axis between the saddles at -+ i sqrt|x|
        (Contour::Steepest, None) if x < 0.0 => {
            let s = (-x).sqrt();
            let (lo, hi) = (Complex64::new(0.0, -s), Complex64::new(0.0, s));
            let zero = Complex64::new(0.0, 0.0);
            let mut v = vec![
                seg(lo, ray(-th), true, PI - th),
                seg(zero, ray(-PI / 2.0), true, PI / 2.0),
                seg(zero, ray(PI / 2.0), false, PI / 2.0),
                seg(hi, ray(th), false, th),
            ];
            v[1].len = s;
            v[2].len = s;
            v
        }
        (contour, shift) => {
            let default = match contour {
                Contour::Steepest => x.max(0.0).sqrt(),
                Contour::TwoRay => 0.0,
            };
            let shift = shift.unwrap_or(default);
            if !shift.is_finite() {
                return Err(Error::domain("shift must be finite"));
            }
            let c = Complex64::new(shift, 0.0);
            match contour {
                Contour::Steepest => vec![seg(c, ray(-th), true, PI - th), seg(c, ray(th), false, th)],
                Contour::TwoRay => vec![
                    seg(c, ray(th), true, th - PI),
                    seg(c, ray(PI - phi), false, -PI - phi),
                    seg(c, ray(-(PI - phi)), true, phi),
                    seg(c, ray(-th), false, -th),
                ],
            }
        }
    };
    // rays are the pieces still without a length; mirror pairs share one cut
    let len = match cfg.truncation {
        Some(t) => t,
        None => segments
            .iter()
            .filter(|s| s.len == 0.0)
            .map(|s| auto_truncation(s, n, beta, x))
            .fold(0.0, f64::max),
    };
    for s in &mut segments {
        if s.len == 0.0 {
            s.len = len;
        }
    }
    let sign = match cfg.contour {
        Contour::Steepest => -1.0,
        Contour::TwoRay => {
            if n % 2 == 1 {
                1.0
            } else {
                -1.0
            }
        }
    };
    Ok(Path { segments, sign })
}

/// A sampled point of the integration contour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub segment: usize,
    /// Arc length from the start of the whole path.
    pub s: f64,
    pub re: f64,
    pub im: f64,
}

/// The contour used for `K_{n,beta}(x)`, in traversal order, with
/// `per_segment + 1` points on each straight piece.
pub fn contour_path(n: usize, beta: f64, x: f64, cfg: &KQuadConfig, per_segment: usize) -> Result<Vec<ContourPoint>> {
    cfg.validate()?;
    if per_segment == 0 {
        return Err(Error::domain("per_segment must be positive"));
    }
    let path = build_path(n, beta, x, cfg)?;
    let mut out = Vec::new();
    let mut start = 0.0;
    for (k, seg) in path.segments.iter().enumerate() {
        for i in 0..=per_segment {
            let t = seg.len * i as f64 / per_segment as f64;
            let r = if seg.inward { seg.len - t } else { t };
            let v = seg.point(r);
            out.push(ContourPoint { segment: k, s: start + t, re: v.re, im: v.im });
        }
        start += seg.len;
    }
    Ok(out)
}

// Smallest r past the peak where the one-variable log-magnitude, padded by
// the Vandermonde growth, has fallen 40 below the peak.
fn auto_truncation(seg: &Segment, n: usize, beta: f64, x: f64) -> f64 {
    let pad = 4.0 / beta * (n as f64 - 1.0);
    let logmag = |r: f64| {
        let v = seg.point(r);
        (v * v * v / 3.0 - x * v).re + pad * (1.0 + v.norm()).ln()
    };
    let h = 0.01;
    let mut peak = f64::NEG_INFINITY;
    let mut r = 0.0;
    loop {
        let m = logmag(r);
        peak = peak.max(m);
        if m < peak - 40.0 || r > 1e3 {
            return r.max(1.0);
        }
        r += h;
    }
}

// (d)^e on the branch continuous from heading `h` of the earlier point.
#[inline]
fn lifted_pow(d: Complex64, e: f64, int_e: Option<i32>, h: f64) -> Complex64 {
    if let Some(k) = int_e {
        return d.powi(k);
    }
    let norm = d.norm();
    if norm == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let rot = h + PI / 2.0;
    let rel = (d * Complex64::from_polar(1.0, -rot)).arg();
    Complex64::from_polar(norm.powf(e), e * (rot + rel))
}

struct Integrand<'a> {
    path: &'a Path,
    x: f64,
    e: f64,
    int_e: Option<i32>,
}

impl Integrand<'_> {
    // `slots` lists (segment, r) from the latest variable to the earliest.
    fn eval(&self, slots: &[(usize, f64)], buf: &mut Vec<Complex64>) -> Complex64 {
        buf.clear();
        let mut f = Complex64::new(1.0, 0.0);
        for &(s, r) in slots {
            let seg = &self.path.segments[s];
            let v = seg.point(r);
            buf.push(v);
            f *= (v * v * v / 3.0 - self.x * v).exp() * seg.dv();
        }
        for k in 0..slots.len() {
            for l in k + 1..slots.len() {
                let h = self.path.segments[slots[l].0].heading;
                f *= lifted_pow(buf[k] - buf[l], self.e, self.int_e, h);
            }
        }
        f
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = mf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[m - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

// Nodes for 1 > r_1 > r_2 > ... > r_c > 0, collapsed coordinates
// r_1 = w_1, r_k = r_{k-1} w_k, with w_k = 1 - (1 - u)^q (k >= 2) to smooth
// the (r_{k-1} - r_k)^{4/b} factor.
struct SimplexRule {
    c: usize,
    rs: Vec<f64>,
    ws: Vec<f64>,
}

fn simplex_rule(c: usize, m: usize, q: f64) -> SimplexRule {
    if c == 0 {
        return SimplexRule { c, rs: vec![], ws: vec![1.0] };
    }
    let (u, wu) = gauss_legendre(m);
    let count = m.pow(c as u32);
    let mut rs = Vec::with_capacity(count * c);
    let mut ws = Vec::with_capacity(count);
    let mut idx = vec![0usize; c];
    let mut cur = vec![0.0; c];
    loop {
        let mut w = 1.0;
        let mut r = 1.0;
        for k in 0..c {
            let (wk, jac) = if k == 0 {
                (u[idx[k]], 1.0)
            } else {
                let t = 1.0 - u[idx[k]];
                (1.0 - t.powf(q), q * t.powf(q - 1.0))
            };
            r *= wk;
            cur[k] = r;
            // d r_k = (r_{k-1}) d w_k, and d w_k = jac d u_k
            w *= wu[idx[k]] * jac * (r / wk.max(f64::MIN_POSITIVE));
        }
        if cur.iter().all(|v| v.is_finite()) {
            rs.extend_from_slice(&cur);
            ws.push(w);
        } else {
            rs.extend(std::iter::repeat_n(0.0, c));
            ws.push(0.0);
        }
        let mut k = c;
        loop {
            if k == 0 {
                return SimplexRule { c, rs, ws };
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn two_pi_i_pow(n: usize) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI).powi(n as i32)
}

// Sum over all segment compositions; returns (integral, int |f|, evaluations).
fn nested_gauss(path: &Path, f: &Integrand, n: usize, m: usize) -> (Complex64, f64, u64) {
    let q = if f.beta_exponent_is_smooth() { 1.0 } else { (2.0 / f.e).max(1.0) };
    let rules: Vec<SimplexRule> = (0..=n).map(|c| simplex_rule(c, m, q)).collect();
    let nseg = path.segments.len();
    let mut total = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    let mut evals = 0u64;
    for comp in compositions(n, nseg) {
        let seg_rules: Vec<&SimplexRule> = comp.iter().map(|&c| &rules[c]).collect();
        let outer = seg_rules[0].ws.len();
        // parallel over the first segment's nodes, ordered merge
        let parts: Vec<(Complex64, f64, u64)> = (0..outer)
            .into_par_iter()
            .map(|i0| {
                let mut idx = vec![0usize; nseg];
                idx[0] = i0;
                let mut slots = Vec::with_capacity(n);
                let mut buf = Vec::with_capacity(n);
                let mut acc = PairwiseSum::default();
                let mut acc_abs = 0.0;
                let mut count = 0u64;
                loop {
                    slots.clear();
                    let mut w = 1.0;
                    for s in (0..nseg).rev() {
                        let rule = seg_rules[s];
                        let len = path.segments[s].len;
                        w *= rule.ws[idx[s]] * len.powi(rule.c as i32);
                        let rs = &rule.rs[idx[s] * rule.c..(idx[s] + 1) * rule.c];
                        if path.segments[s].inward {
                            slots.extend(rs.iter().rev().map(|&r| (s, r * len)));
                        } else {
                            slots.extend(rs.iter().map(|&r| (s, r * len)));
                        }
                    }
                    if w != 0.0 {
                        let val = f.eval(&slots, &mut buf) * w;
                        acc.add(val);
                        acc_abs += val.norm();
                        count += 1;
                    }
                    // odometer over segments 1..nseg
                    let mut s = nseg;
                    loop {
                        if s == 1 {
                            return (acc.total(), acc_abs, count);
                        }
                        s -= 1;
                        idx[s] += 1;
                        if idx[s] < seg_rules[s].ws.len() {
                            break;
                        }
                        idx[s] = 0;
                    }
                }
            })
            .collect();
        let mut acc = PairwiseSum::default();
        for (v, a, c) in parts {
            acc.add(v);
            mass += a;
            evals += c;
        }
        total += acc.total();
    }
    (total, mass, evals)
}

impl Integrand<'_> {
    fn beta_exponent_is_smooth(&self) -> bool {
        self.int_e.is_some_and(|k| k >= 2)
    }
}

/// Cascade (pairwise) summation with a deterministic association order.
#[derive(Default)]
struct PairwiseSum {
    levels: Vec<Option<Complex64>>,
    block: Complex64,
    in_block: usize,
}

impl PairwiseSum {
    const BLOCK: usize = 64;

    fn add(&mut self, v: Complex64) {
        self.block += v;
        self.in_block += 1;
        if self.in_block == Self::BLOCK {
            let mut carry = std::mem::take(&mut self.block);
            self.in_block = 0;
            for slot in self.levels.iter_mut() {
                match slot.take() {
                    None => {
                        *slot = Some(carry);
                        return;
                    }
                    Some(prev) => carry += prev,
                }
            }
            self.levels.push(Some(carry));
        }
    }

    fn total(&self) -> Complex64 {
        let mut t = self.block;
        for v in self.levels.iter().flatten() {
            t += v;
        }
        t
    }
}

// Generalized golden-ratio (R_d) Kronecker sequence increments.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|i| (1.0 / g).powi(i as i32).fract()).collect()
}

const QMC_REPLICAS: usize = 8;

// Randomly shifted rank-1 lattice over the path parameter cube, with every
// point paired with its mirror image under complex conjugation.
fn qmc(path: &Path, f: &Integrand, n: usize, points: usize, seed: u64) -> (Complex64, f64, f64, u64) {
    let starts: Vec<f64> = path
        .segments
        .iter()
        .scan(0.0, |acc, s| {
            let start = *acc;
            *acc += s.len;
            Some(start)
        })
        .collect();
    let total_len: f64 = path.segments.iter().map(|s| s.len).sum();
    let alphas = kronecker_alphas(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..QMC_REPLICAS)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    let per = (points / QMC_REPLICAS).max(1);
    let locate = |p: f64| -> (usize, f64, f64) {
        // returns (segment, r, path time)
        let s = starts.partition_point(|&b| b <= p).saturating_sub(1);
        let seg = &path.segments[s];
        let local = (p - starts[s]).clamp(0.0, seg.len);
        let r = if seg.inward { seg.len - local } else { local };
        (s, r, p)
    };
    const CHUNK: usize = 4096;
    let replicas: Vec<(Complex64, f64)> = shifts
        .iter()
        .map(|shift| {
            let chunks: Vec<(Complex64, f64)> = (0..per.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut acc = PairwiseSum::default();
                    let mut acc_abs = 0.0;
                    let mut pts: Vec<(usize, f64, f64)> = Vec::with_capacity(n);
                    let mut slots = Vec::with_capacity(n);
                    let mut buf = Vec::with_capacity(n);
                    for k in c * CHUNK..((c + 1) * CHUNK).min(per) {
                        let kf = (k + 1) as f64;
                        for mirror in [false, true] {
                            pts.clear();
                            for i in 0..n {
                                let u = (shift[i] + kf * alphas[i]).fract();
                                let p = u * total_len;
                                pts.push(locate(if mirror { total_len - p } else { p }));
                            }
                            pts.sort_by(|a, b| b.2.total_cmp(&a.2));
                            slots.clear();
                            slots.extend(pts.iter().map(|&(s, r, _)| (s, r)));
                            let val = f.eval(&slots, &mut buf);
                            acc.add(val * 0.5);
                            acc_abs += 0.5 * val.norm();
                        }
                    }
                    (acc.total(), acc_abs)
                })
                .collect();
            let mut acc = PairwiseSum::default();
            let mut abs = 0.0;
            for (v, a) in chunks {
                acc.add(v);
                abs += a;
            }
            let vol = total_len.powi(n as i32) / per as f64;
            (acc.total() * vol, abs * vol)
        })
        .collect();
    let r = QMC_REPLICAS as f64;
    let mean = replicas.iter().map(|p| p.0).sum::<Complex64>() / r;
    let mass = replicas.iter().map(|p| p.1).sum::<f64>() / r;
    let var = replicas.iter().map(|p| (p.0 - mean).norm_sqr()).sum::<f64>() / (r * (r - 1.0));
    (mean, mass, var.sqrt(), (2 * per * QMC_REPLICAS) as u64)
}

/// Full quadrature result for `K_{n,beta}(x)`.
pub fn k_integral_detailed(n: usize, beta: f64, x: f64, cfg: &KQuadConfig) -> Result<KEstimate> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if n > MAX_K_DIM {
        return Err(Error::Budget(format!("K integral limited to n <= {MAX_K_DIM}, got {n}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    cfg.validate()?;
    let path = build_path(n, beta, x, cfg)?;
    let e = 4.0 / beta;
    let int_e = if e.fract() == 0.0 { Some(e as i32) } else { None };
    let integrand = Integrand { path: &path, x, e, int_e };
    let points = cfg.points_for(n);

    let (raw, mass, err, evals) = match cfg.method_for(n) {
        KMethod::NestedGauss => {
            if points < 2 {
                return Err(Error::domain("need at least 2 Gauss nodes"));
            }
            let pref = path.sign * factorial(n);
            let (fine, mass, e1) = nested_gauss(&path, &integrand, n, points);
            let coarse_m = (points * 3 / 4).max(points - 8).max(1);
            let (coarse, _, e2) = nested_gauss(&path, &integrand, n, coarse_m);
            (fine * pref, mass * factorial(n), (fine - coarse).norm() * factorial(n), e1 + e2)
        }
        KMethod::QuasiMonteCarlo => {
            let mix = cfg.seed ^ x.to_bits().rotate_left(17) ^ ((n as u64) << 48) ^ beta.to_bits();
            let (mean, mass, se, evals) = qmc(&path, &integrand, n, points, mix);
            (mean * path.sign, mass, se, evals)
        }
    };
    let k = raw / two_pi_i_pow(n);
    let scale = (2.0 * PI).powi(n as i32);
    let est = KEstimate {
        value: k.re,
        imag: k.im,
        error: err / scale,
        abs_mass: mass / scale,
        evaluations: evals,
    };
    let floor = 1e-9 * est.abs_mass;
    if est.imag.abs() > cfg.tol_imag * est.value.abs().max(floor) {
        return Err(Error::Contour(format!(
            "imaginary residue {:.3e} against real part {:.3e} (n={n}, beta={beta}, x={x})",
            est.imag, est.value
        )));
    }
    Ok(est)
}

/// `K_{n,beta}(x)` by quadrature.
pub fn k_integral(n: usize, beta: f64, x: f64, cfg: &KQuadConfig) -> Result<f64> {
    k_integral_detailed(n, beta, x, cfg).map(|e| e.value)
}

/// `K_{n,2}(x) = -n! det[Ai^{(i+j-2)}(x)]_{i,j=1..n}`.
pub fn k_det_beta2(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let d = airy_ai(x).derivatives(x, 2 * n - 1);
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d[i + j]).collect()).collect();
    Ok(-factorial(n) * determinant(&mut a))
}

fn determinant(a: &mut [Vec<f64>]) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for i in col + 1..n {
            let factor = a[i][col] / a[col][col];
            let (top, rest) = a.split_at_mut(i);
            for (v, p) in rest[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *v -= factor * p;
            }
        }
    }
    det
}

/// `Gamma_{b,b} (2 pi)^{-b} e^{-2b x^{3/2}/3} / x^{3b/4 - 1/2}`, the large-`x` form of `K_{b,b}`.
pub fn k_asym_right(beta: u32, x: f64) -> Result<f64> {
    let b = specfun::even_beta(beta as f64)? as f64;
    if !(x >= 1.0) {
        return Err(Error::domain(format!("right asymptote needs x >= 1, got {x}")));
    }
    let ln = specfun::ln_gamma_n_beta(beta as usize, b)? - b * (2.0 * PI).ln()
        - 2.0 * b / 3.0 * x.powf(1.5)
        - (0.75 * b - 0.5) * x.ln();
    Ok(ln.exp())
}

/// `C_b K_asym_right`, the right tail of the soft-edge density.
pub fn sigma_asym_right(beta: u32, x: f64) -> Result<f64> {
    Ok(specfun::soft_edge_prefactor(beta)? * k_asym_right(beta, x)?)
}

/// The oscillating factor `k_{x,b}` of the left asymptote.
pub fn k_left_factor(beta: u32, x: f64) -> Result<f64> {
    let b = specfun::even_beta(beta as f64)? as f64;
    let ax = x.abs();
    let terms = (b / 2.0).sqrt().floor() as u32;
    let mut sum = 0.0;
    for k in 1..=terms {
        let kf = k as f64;
        let prod: f64 = (1..=k)
            .map(|j| {
                let j = j as f64;
                specfun::ln_gamma_pos(1.0 + 2.0 * j / b) - specfun::ln_gamma_pos(1.0 + 2.0 * (j - kf) / b)
            })
            .sum::<f64>()
            .exp();
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let amp = 2f64.powf(-6.0 * kf * kf / b) * ax.powf(-3.0 * kf * kf / b);
        let phase = 4.0 * kf / 3.0 * ax.powf(1.5) - PI / 2.0 * kf * (1.0 - 2.0 / b);
        sum += sign * amp * prod * phase.cos();
    }
    Ok(1.0 + 2.0 * sum)
}

/// Left asymptote on the density scale: `C_b (Gamma_{b/2,b})^2 / pi^b binom(b, b/2) sqrt|x| k_{x,b}`.
///
/// The constant in front of `sqrt|x| k_{x,b}` equals `1/pi`.
pub fn k_asym_left(beta: u32, x: f64) -> Result<f64> {
    if !(x <= -2.0) {
        return Err(Error::domain(format!("left asymptote needs x <= -2, got {x}")));
    }
    Ok(left_constant(beta)? * x.abs().sqrt() * k_left_factor(beta, x)?)
}

/// `C_b (Gamma_{b/2,b})^2 binom(b, b/2) / pi^b`.
pub fn left_constant(beta: u32) -> Result<f64> {
    let b = specfun::even_beta(beta as f64)? as f64;
    let half = beta as usize / 2;
    let ln_binom = specfun::ln_gamma_pos(b + 1.0) - 2.0 * specfun::ln_gamma_pos(b / 2.0 + 1.0);
    let ln = 2.0 * specfun::ln_gamma_n_beta(half, b)? - b * PI.ln() + ln_binom;
    Ok(specfun::soft_edge_prefactor(beta)? * ln.exp())
}

/// Soft-edge density `sigma(x) = C_b K_{b,b}(x)`.
///
/// `beta = 2` uses the determinant formula everywhere; other `beta` use the
/// quadrature inside `[left_switch, right_switch]` and the asymptotes outside.
pub fn soft_edge_density(beta: u32, x: f64, cfg: &KQuadConfig) -> Result<f64> {
    specfun::even_beta(beta as f64)?;
    if beta == 2 {
        return Ok(specfun::soft_edge_prefactor(2)? * k_det_beta2(2, x)?);
    }
    if beta as usize > MAX_K_DIM {
        return Err(Error::Budget(format!("soft-edge quadrature limited to beta <= {MAX_K_DIM}")));
    }
    if x > cfg.right_switch {
        sigma_asym_right(beta, x)
    } else if x < cfg.left_switch {
        k_asym_left(beta, x)
    } else {
        Ok(specfun::soft_edge_prefactor(beta)? * k_integral(beta as usize, beta as f64, x, cfg)?)
    }
}

/// Edge variable `x` and Jacobian `J` for a physical eigenvalue `X`, with
/// `sigma(x) ~ J rho_N(X)`.
pub fn edge_coordinate(spec: &EnsembleSpec, physical: f64) -> (f64, f64) {
    let scaling = Scaling::edge(spec.family);
    let x = scaling.from_raw(spec.n, physical);
    let (_, jac) = scaling.to_raw(spec.n, x);
    (x, jac)
}

/// Physical eigenvalue for edge variable `x`.
pub fn edge_to_physical(spec: &EnsembleSpec, x: f64) -> f64 {
    Scaling::edge(spec.family).to_raw(spec.n, x).0
}

/// Limiting density near the soft edge at a physical point, `sigma(x(X)) / J`.
pub fn edge_density_at(spec: &EnsembleSpec, physical: f64, cfg: &KQuadConfig) -> Result<f64> {
    let beta = spec.even_beta()?;
    let (x, jac) = edge_coordinate(spec, physical);
    Ok(soft_edge_density(beta, x, cfg)? / jac)
}

/// Soft-edge curve on an edge-scaled grid; identical values for both families.
pub fn edge_curve(spec: &EnsembleSpec, grid: Vec<f64>, cfg: &KQuadConfig) -> Result<DensityCurve> {
    let beta = spec.even_beta()?;
    let meta = CurveMeta { spec: *spec, method: Method::Edge, seed: None, samples: None };
    DensityCurve::tabulate(grid, Scaling::edge(spec.family), meta, |x| soft_edge_density(beta, x, cfg))
}
