//! Density curves on a grid, their scaling conventions and file encodings.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::specfun::{EnsembleSpec, Family};

/// Coordinate convention of a curve.
///
/// * `Raw`: `x -> rho_N(x)`, integrates to `N`.
/// * `BulkHermite`: `x -> sqrt(2/N) rho_N(sqrt(2N) x)`, integrates to 1.
/// * `BulkLaguerre`: `x -> 4 rho_N(4N x)`, integrates to 1.
/// * `EdgeHermite`: `x -> rho_N(sqrt(2N) + x / sqrt(2 N^{1/3})) / sqrt(2 N^{1/3})`.
/// * `EdgeLaguerre`: `x -> 2 (2N)^{1/3} rho_N(4N + 2 (2N)^{1/3} x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    Raw,
    BulkHermite,
    BulkLaguerre,
    EdgeHermite,
    EdgeLaguerre,
}

impl Scaling {
    pub fn bulk(family: Family) -> Scaling {
        match family {
            Family::Hermite => Scaling::BulkHermite,
            Family::Laguerre => Scaling::BulkLaguerre,
        }
    }

    pub fn edge(family: Family) -> Scaling {
        match family {
            Family::Hermite => Scaling::EdgeHermite,
            Family::Laguerre => Scaling::EdgeLaguerre,
        }
    }

    /// Maps a scaled coordinate to the raw eigenvalue coordinate, returning
    /// `(X, jacobian)` with `scaled_density(x) = jacobian * rho_N(X)`.
    pub fn to_raw(self, n: usize, x: f64) -> (f64, f64) {
        let nf = n as f64;
        match self {
            Scaling::Raw => (x, 1.0),
            Scaling::BulkHermite => ((2.0 * nf).sqrt() * x, (2.0 / nf).sqrt()),
            Scaling::BulkLaguerre => (4.0 * nf * x, 4.0),
            Scaling::EdgeHermite => {
                let w = (2.0 * nf.cbrt()).sqrt();
                ((2.0 * nf).sqrt() + x / w, 1.0 / w)
            }
            Scaling::EdgeLaguerre => {
                let w = 2.0 * (2.0 * nf).cbrt();
                (4.0 * nf + w * x, w)
            }
        }
    }

    /// Inverse of [`Scaling::to_raw`] on the coordinate.
    pub fn from_raw(self, n: usize, raw: f64) -> f64 {
        let nf = n as f64;
        match self {
            Scaling::Raw => raw,
            Scaling::BulkHermite => raw / (2.0 * nf).sqrt(),
            Scaling::BulkLaguerre => raw / (4.0 * nf),
            Scaling::EdgeHermite => (raw - (2.0 * nf).sqrt()) * (2.0 * nf.cbrt()).sqrt(),
            Scaling::EdgeLaguerre => (raw - 4.0 * nf) / (2.0 * (2.0 * nf).cbrt()),
        }
    }

    /// Total mass a curve with this scaling carries.
    pub fn mass(self, n: usize) -> f64 {
        match self {
            Scaling::BulkHermite | Scaling::BulkLaguerre => 1.0,
            _ => n as f64,
        }
    }
}

/// How a curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Bulk,
    Edge,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Bulk => "bulk",
            Method::Edge => "edge",
            Method::MonteCarlo => "mc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "bulk" => Ok(Method::Bulk),
            "edge" => Ok(Method::Edge),
            "mc" | "monte-carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::domain(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub spec: EnsembleSpec,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<u64>,
}

/// Density values on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub scaling: Scaling,
    pub meta: CurveMeta,
}

impl DensityCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, scaling: Scaling, meta: CurveMeta) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::domain(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite density value {v}")));
        }
        Ok(DensityCurve { grid, values, scaling, meta })
    }

    /// Evaluates `f` on every grid point in parallel; order is preserved.
    pub fn tabulate<F>(grid: Vec<f64>, scaling: Scaling, meta: CurveMeta, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        use rayon::prelude::*;
        let values = grid.par_iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values, scaling, meta)
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Interior strict local maxima, returned as grid coordinates.
    pub fn local_maxima(&self) -> Vec<f64> {
        local_maxima(&self.grid, &self.values)
    }

    /// Trapezoidal `int |self - other|` over the shared grid.
    pub fn l1_distance(&self, other: &DensityCurve) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .grid
            .windows(2)
            .enumerate()
            .map(|(i, g)| {
                let d0 = (self.values[i] - other.values[i]).abs();
                let d1 = (self.values[i + 1] - other.values[i + 1]).abs();
                0.5 * (g[1] - g[0]) * (d0 + d1)
            })
            .sum())
    }

    /// `max |self - other|` over grid points in `[lo, hi]`.
    pub fn linf_distance_on(&self, other: &DensityCurve, lo: f64, hi: f64) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .grid
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `max |self - other|` over the whole grid.
    pub fn linf_distance(&self, other: &DensityCurve) -> Result<f64> {
        self.linf_distance_on(other, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn check_grid(&self, other: &DensityCurve) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::domain("curves are tabulated on different grids"));
        }
        Ok(())
    }

    /// CSV with header `x,density`, LF endings, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", fmt_g12(*x), fmt_g12(*v));
        }
        out
    }

    pub fn from_csv(text: &str, scaling: Scaling, meta: CurveMeta) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("x,density") => {}
            other => return Err(Error::Io(format!("bad CSV header {other:?}"))),
        }
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let (x, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Io(format!("bad CSV row `{line}`")))?;
            grid.push(x.trim().parse().map_err(|_| Error::Io(format!("bad number `{x}`")))?);
            values.push(v.trim().parse().map_err(|_| Error::Io(format!("bad number `{v}`")))?);
        }
        Self::new(grid, values, scaling, meta)
    }

    /// JSON document carrying the meta block; numbers rounded like the CSV.
    pub fn to_json(&self) -> Result<String> {
        let rounded = DensityCurve {
            grid: self.grid.iter().map(|&x| round_g12(x)).collect(),
            values: self.values.iter().map(|&v| round_g12(v)).collect(),
            scaling: self.scaling,
            meta: self.meta.clone(),
        };
        let doc = serde_json::json!({
            "schema": 1,
            "curve": rounded,
        });
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Interior strict local maxima of sampled values; a flat top reports its midpoint.
pub fn local_maxima(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            // walk across a flat top
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                out.push(0.5 * (grid[i] + grid[j]));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Uniform grid `start:stop:step`, both ends included up to rounding.
pub fn grid_from_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop > start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::domain(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::Budget(format!("grid has {count} points")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Parses `start:stop:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!("grid must be start:stop:step, got `{s}`")));
    }
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| Error::domain(format!("bad grid number `{p}`")))
    };
    grid_from_range(num(parts[0])?, num(parts[1])?, num(parts[2])?)
}

/// `%.12g`.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{:.11e}", x);
        let (mant, e) = s.split_once('e').unwrap();
        let mant = trim_zeros(mant);
        let e: i32 = e.parse().unwrap();
        format!("{mant}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub(crate) fn round_g12(x: f64) -> f64 {
    fmt_g12(x).parse().unwrap_or(x)
}
