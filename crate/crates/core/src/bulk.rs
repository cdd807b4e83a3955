//! Global laws and their oscillatory finite-N corrections.
//!
//! Hermite densities are in the scaling `sqrt(2/N) rho_N(sqrt(2N) x)` on
//! `(-1, 1)`, Laguerre densities in `4 rho_N(4N x)` on `(0, 1)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::curve::{CurveMeta, DensityCurve, Method, Scaling};
use crate::error::{Error, Result};
use crate::specfun::{self, EnsembleSpec, Family};

/// Hermite corrections are evaluated only for `|x| <= HERMITE_BAND`.
pub const HERMITE_BAND: f64 = 0.995;
/// Laguerre corrections are evaluated only for `x` in `LAGUERRE_BAND`.
pub const LAGUERRE_BAND: (f64, f64) = (0.005, 0.995);

/// Semicircle `(2/pi) sqrt(1 - x^2)`, zero outside `(-1, 1)`.
pub fn wigner_density(x: f64) -> f64 {
    if x.abs() < 1.0 {
        2.0 / PI * (1.0 - x * x).sqrt()
    } else {
        0.0
    }
}

/// Marchenko-Pastur law `(2/pi) sqrt(1/x - 1)` on `(0, 1)`; `+inf` at `x = 0`.
pub fn mp_density(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else if x > 0.0 && x < 1.0 {
        2.0 / PI * (1.0 / x - 1.0).sqrt()
    } else {
        0.0
    }
}

/// `P_W(x) = 1 + (x/2) rho_W(x) - arccos(x)/pi`.
pub fn wigner_cdf(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("wigner_cdf needs -1 <= x <= 1, got {x}")));
    }
    Ok((1.0 + x / 2.0 * wigner_density(x) - x.acos() / PI).clamp(0.0, 1.0))
}

/// `P_MP(x) = 1 + x rho_MP(x) - (2/pi) arccos(sqrt x)`.
pub fn mp_cdf(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("mp_cdf needs 0 <= x <= 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((1.0 + x * mp_density(x) - 2.0 / PI * x.sqrt().acos()).clamp(0.0, 1.0))
}

/// `prod_{j=1}^k Gamma(1+2j/b) / Gamma(1+2(j-k)/b)`.
fn gamma_product(k: u32, beta: f64) -> f64 {
    (1..=k)
        .map(|j| {
            let j = j as f64;
            let k = k as f64;
            specfun::ln_gamma_pos(1.0 + 2.0 * j / beta) - specfun::ln_gamma_pos(1.0 + 2.0 * (j - k) / beta)
        })
        .sum::<f64>()
        .exp()
}

fn terms(beta: f64) -> u32 {
    (beta / 2.0).sqrt().floor() as u32
}

/// One oscillatory term of `r_{N,beta}`: its amplitude (sign included) and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionTerm {
    pub k: u32,
    pub amplitude: f64,
    pub phase: f64,
}

impl CorrectionTerm {
    pub fn value(&self) -> f64 {
        2.0 * self.amplitude * self.phase.cos()
    }
}

/// Hermite correction terms `k = 1..floor(sqrt(beta/2))`, for any `beta > 0`.
pub fn hermite_terms(n: usize, beta: f64, x: f64) -> Result<Vec<CorrectionTerm>> {
    check_beta(beta)?;
    if !(x.abs() <= HERMITE_BAND) {
        return Err(Error::domain(format!(
            "bulk Hermite formula needs |x| <= {HERMITE_BAND}, got {x}; use the soft-edge route"
        )));
    }
    let nf = n as f64;
    let rho = wigner_density(x);
    let p = wigner_cdf(x)?;
    let phi = (1.0 - 2.0 / beta) * x.asin();
    let base = PI.powi(3) * rho.powi(3) * nf;
    Ok((1..=terms(beta))
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            CorrectionTerm {
                k,
                amplitude: sign * base.powf(-2.0 * kf * kf / beta) * gamma_product(k, beta),
                phase: 2.0 * PI * kf * nf * p + kf * phi,
            }
        })
        .collect())
}

/// Laguerre correction terms; `a` enters the phase only.
pub fn laguerre_terms(n: usize, beta: f64, a: f64, x: f64) -> Result<Vec<CorrectionTerm>> {
    check_beta(beta)?;
    if !(x >= LAGUERRE_BAND.0 && x <= LAGUERRE_BAND.1) {
        return Err(Error::domain(format!(
            "bulk Laguerre formula needs {} <= x <= {}, got {x}",
            LAGUERRE_BAND.0, LAGUERRE_BAND.1
        )));
    }
    let nf = n as f64;
    let rho = mp_density(x);
    let p = mp_cdf(x)?;
    let phi = (1.0 - 2.0 / beta) * FRAC_PI_2 - 2.0 * a * x.sqrt().acos();
    let base = 2.0 * PI.powi(3) * x * x * rho.powi(3) * nf;
    Ok((1..=terms(beta))
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            CorrectionTerm {
                k,
                amplitude: sign * base.powf(-2.0 * kf * kf / beta) * gamma_product(k, beta),
                phase: 2.0 * PI * kf * nf * p + kf * phi,
            }
        })
        .collect())
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("beta must be positive, got {beta}")))
    }
}

fn check_spec(spec: &EnsembleSpec, family: Family) -> Result<()> {
    if spec.family != family {
        return Err(Error::domain(format!("expected a {family} spec")));
    }
    spec.even_beta().map(|_| ())
}

/// `r_{N,beta}(x)` for the Hermite ensemble.
pub fn hermite_r(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    check_spec(spec, Family::Hermite)?;
    Ok(1.0 + hermite_terms(spec.n, spec.beta, x)?.iter().map(CorrectionTerm::value).sum::<f64>())
}

/// `r_{N,beta}(x)` for the Laguerre ensemble.
pub fn laguerre_r(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    check_spec(spec, Family::Laguerre)?;
    Ok(1.0
        + laguerre_terms(spec.n, spec.beta, spec.a, x)?
            .iter()
            .map(CorrectionTerm::value)
            .sum::<f64>())
}

/// `rho_W(x) r_{N,beta}(x)`, approximating `sqrt(2/N) rho_N(sqrt(2N) x)`.
pub fn bulk_hermite_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    Ok(wigner_density(x) * hermite_r(spec, x)?)
}

/// `rho_MP(x) r_{N,beta}(x)`, approximating `4 rho_N(4N x)`.
pub fn bulk_laguerre_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    Ok(mp_density(x) * laguerre_r(spec, x)?)
}

/// The same formulas at any `beta > 0`, without the even-integer check.
///
/// Nothing is claimed about accuracy away from even `beta`.
pub fn bulk_density_any_beta(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    let sum = |t: Vec<CorrectionTerm>| 1.0 + t.iter().map(CorrectionTerm::value).sum::<f64>();
    match spec.family {
        Family::Hermite => Ok(wigner_density(x) * sum(hermite_terms(spec.n, spec.beta, x)?)),
        Family::Laguerre => Ok(mp_density(x) * sum(laguerre_terms(spec.n, spec.beta, spec.a, x)?)),
    }
}

pub fn bulk_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    match spec.family {
        Family::Hermite => bulk_hermite_density(spec, x),
        Family::Laguerre => bulk_laguerre_density(spec, x),
    }
}

/// Whether `x` (bulk coordinates) lies inside the guard band of `family`.
pub fn in_band(family: Family, x: f64) -> bool {
    match family {
        Family::Hermite => x.abs() <= HERMITE_BAND,
        Family::Laguerre => (LAGUERRE_BAND.0..=LAGUERRE_BAND.1).contains(&x),
    }
}

/// Bulk-asymptotic curve on a bulk-scaled grid; every point must be in band.
pub fn bulk_curve(spec: &EnsembleSpec, grid: Vec<f64>) -> Result<DensityCurve> {
    spec.even_beta()?;
    let meta = CurveMeta { spec: *spec, method: Method::Bulk, seed: None, samples: None };
    DensityCurve::tabulate(grid, Scaling::bulk(spec.family), meta, |x| bulk_density(spec, x))
}
