//! Airy function `Ai` and its derivative for real arguments.
//!
//! `|x| <= 8`: Maclaurin series summed in double-double, so the cancellation
//! between the two series (a factor of roughly `exp(4/3 |x|^{3/2})` on the
//! positive axis) stays below `f64` resolution. Beyond that the classical
//! asymptotic expansions are used; their smallest term at `|x| = 8` is below
//! `1e-13` relative.

use std::f64::consts::{FRAC_PI_4, PI};

use super::dd::Dd;

/// `Ai(0)` to double-double precision.
const AI0: Dd = Dd::new(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
/// `-Ai'(0)` to double-double precision.
const MINUS_AIP0: Dd = Dd::new(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);

pub(crate) const SERIES_LIMIT: f64 = 8.0;

/// `Ai(x)` together with `Ai'(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Airy {
    pub ai: f64,
    pub aip: f64,
}

impl Airy {
    /// `Ai''(x) = x Ai(x)`.
    pub fn second(&self, x: f64) -> f64 {
        x * self.ai
    }

    /// `d^k Ai / dx^k` for `k = 0..len`, generated from the Airy equation:
    /// `Ai^{(k+2)} = x Ai^{(k)} + k Ai^{(k-1)}`.
    pub fn derivatives(&self, x: f64, len: usize) -> Vec<f64> {
        let mut d = Vec::with_capacity(len);
        for k in 0..len {
            let v = match k {
                0 => self.ai,
                1 => self.aip,
                _ => {
                    let m = k - 2;
                    let prev = if m >= 1 { m as f64 * d[m - 1] } else { 0.0 };
                    x * d[m] + prev
                }
            };
            d.push(v);
        }
        d
    }
}

/// Evaluates `Ai(x)` and `Ai'(x)`.
pub fn airy_ai(x: f64) -> Airy {
    if x.is_nan() {
        return Airy { ai: f64::NAN, aip: f64::NAN };
    }
    if x.abs() <= SERIES_LIMIT {
        series(x)
    } else if x > 0.0 {
        asymptotic_positive(x)
    } else {
        asymptotic_negative(-x)
    }
}

pub(crate) fn series(x: f64) -> Airy {
    let xd = Dd::from_f64(x);
    let x3 = xd * xd * xd;

    // f = sum c_k x^{3k}, g = sum d_k x^{3k+1}
    let mut f = Dd::from_f64(1.0);
    let mut g = xd;
    let mut fp = Dd::ZERO;
    let mut gp = Dd::from_f64(1.0);
    let mut tf = Dd::from_f64(1.0); // c_k x^{3k}
    let mut tg = Dd::from_f64(1.0); // d_k x^{3k}
    for k in 1..200 {
        let kf = k as f64;
        tf = x3 * tf / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg = x3 * tg / ((3.0 * kf) * (3.0 * kf + 1.0));
        f = f + tf;
        g = g + tg * xd;
        // f' = sum 3k c_k x^{3k-1}, identically zero at the origin
        if x != 0.0 {
            fp = fp + tf / x * (3.0 * kf);
        }
        gp = gp + tg * (3.0 * kf + 1.0);
        let small = tf.hi.abs().max(tg.hi.abs());
        if small <= 1e-34 * (f.hi.abs() + g.hi.abs()) && k > 2 {
            break;
        }
    }
    let ai = AI0 * f - MINUS_AIP0 * g;
    let aip = AI0 * fp - MINUS_AIP0 * gp;
    Airy { ai: ai.to_f64(), aip: aip.to_f64() }
}

// Coefficients u_k, v_k of the Airy asymptotic expansions.
fn uv_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..count {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

// Sums sum_k sign_k c_k z^{-k}, stopping at the smallest term.
fn truncated(coeffs: &[f64], inv: f64, alternate: bool, start: usize, step: usize) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < coeffs.len() {
        let term = coeffs[k] * inv.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += sign * term;
        last = term.abs();
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        if alternate {
            sign = -sign;
        }
        k += step;
    }
    sum
}

pub(crate) fn asymptotic_positive(x: f64) -> Airy {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = uv_coefficients(40);
    let inv = 1.0 / zeta;
    let su = truncated(&u, inv, true, 0, 1);
    let sv = truncated(&v, inv, true, 0, 1);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    Airy { ai: e / q * su, aip: -e * q * sv }
}

pub(crate) fn asymptotic_negative(y: f64) -> Airy {
    let zeta = 2.0 / 3.0 * y * y.sqrt();
    let (u, v) = uv_coefficients(60);
    let inv = 1.0 / zeta;
    let u_even = truncated(&u, inv, true, 0, 2);
    let u_odd = truncated(&u, inv, true, 1, 2);
    let v_even = truncated(&v, inv, true, 0, 2);
    let v_odd = truncated(&v, inv, true, 1, 2);
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = y.powf(0.25);
    let rp = 1.0 / PI.sqrt();
    Airy {
        ai: rp / q * (c * u_even + s * u_odd),
        aip: rp * q * (s * v_even - c * v_odd),
    }
}
