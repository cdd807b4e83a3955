//! Tridiagonal matrix models and Monte Carlo densities.
//!
//! Hermite: diagonal `N(0,1)/sqrt(b)`, off-diagonal `chi_{(N-j) b} / sqrt(2b)`,
//! so the eigenvalues have joint density proportional to
//! `exp(-b/2 sum l^2) prod |l_i - l_j|^b`.
//!
//! Laguerre: `L = B B^T / b` with lower bidiagonal `B`, diagonal
//! `chi_{b(P - i + 1)}`, sub-diagonal `chi_{b(N - i)}`, `P = a + N - 1 + 2/b`,
//! giving the weight `l^{a b/2} exp(-b l/2)`.
//!
//! `chi_k` is the standard chi law, density proportional to `x^{k-1} e^{-x^2/2}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{CurveMeta, DensityCurve, Method, Scaling};
use crate::error::{Error, Result};
use crate::specfun::{EnsembleSpec, Family};

/// Draws per independently seeded chunk.
pub const CHUNK_DRAWS: u64 = 1024;

const QL_ITERATION_CAP: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::domain(format!(
                "tridiagonal needs N >= 1 diagonal and N-1 off-diagonal entries, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::domain("tridiagonal entries must be finite"));
        }
        Ok(SymTridiagonal { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// A `chi_k` variate, `k > 0` real.
pub fn chi_sample<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("chi degrees of freedom must be positive, got {k}")));
    }
    let g = Gamma::new(k / 2.0, 2.0).map_err(|e| Error::domain(e.to_string()))?;
    Ok(g.sample(rng).sqrt())
}

pub fn sample_hermite_tridiag<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<SymTridiagonal> {
    if spec.family != Family::Hermite {
        return Err(Error::domain("Hermite sampler called with a Laguerre spec"));
    }
    let n = spec.n;
    let b = spec.beta;
    let sd = 1.0 / b.sqrt();
    let diag = (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
    let off_scale = 1.0 / (2.0 * b).sqrt();
    let offdiag = (1..n)
        .map(|j| chi_sample((n - j) as f64 * b, rng).map(|c| off_scale * c))
        .collect::<Result<Vec<_>>>()?;
    SymTridiagonal::new(diag, offdiag)
}

pub fn sample_laguerre_tridiag<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<SymTridiagonal> {
    if spec.family != Family::Laguerre {
        return Err(Error::domain("Laguerre sampler called with a Hermite spec"));
    }
    if !(spec.a >= 0.0) {
        return Err(Error::domain(format!("Laguerre parameter a must be >= 0, got {}", spec.a)));
    }
    let n = spec.n;
    let b = spec.beta;
    let p = spec.laguerre_p();
    let d = (1..=n)
        .map(|i| chi_sample(b * (p - i as f64 + 1.0), rng))
        .collect::<Result<Vec<_>>>()?;
    let e = (1..n)
        .map(|i| chi_sample(b * (n - i) as f64, rng))
        .collect::<Result<Vec<_>>>()?;
    // (B B^T)_{ii} = d_i^2 + e_{i-1}^2, (B B^T)_{i,i+1} = d_i e_i
    let diag = (0..n)
        .map(|i| (d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }) / b)
        .collect();
    let offdiag = (0..n - 1).map(|i| d[i] * e[i] / b).collect();
    SymTridiagonal::new(diag, offdiag)
}

/// One draw of the matrix model for `spec`.
pub fn sample_tridiag<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<SymTridiagonal> {
    match spec.family {
        Family::Hermite => sample_hermite_tridiag(spec, rng),
        Family::Laguerre => sample_laguerre_tridiag(spec, rng),
    }
}

/// All eigenvalues in ascending order: implicit QL, bisection on Sturm counts
/// if any eigenvalue needs more than 30 sweeps.
pub fn tridiag_eigenvalues(t: &SymTridiagonal) -> Result<Vec<f64>> {
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    let mut vals = match implicit_ql(&mut d, &mut e) {
        Ok(()) => d,
        Err(()) => sturm_bisection(t)?,
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn implicit_ql(d: &mut [f64], e: &mut [f64]) -> std::result::Result<(), ()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_ITERATION_CAP {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

// Number of eigenvalues strictly below `x`.
fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..t.len() {
        let off = if i > 0 { t.offdiag[i - 1] * t.offdiag[i - 1] } else { 0.0 };
        q = t.diag[i] - x - if i > 0 { off / q } else { 0.0 };
        if q == 0.0 {
            q = -f64::EPSILON * (t.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn sturm_bisection(t: &SymTridiagonal) -> Result<Vec<f64>> {
    let r = t.norm_bound().max(f64::MIN_POSITIVE);
    let tol = 4.0 * f64::EPSILON * r;
    let mut out = Vec::with_capacity(t.len());
    for k in 0..t.len() {
        let (mut lo, mut hi) = (-r - tol, r + tol);
        let mut steps = 0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if sturm_count(t, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
            if steps > 2000 {
                return Err(Error::Numeric("bisection did not converge".into()));
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Eigenvalues of one fresh draw, ascending.
pub fn sample_eigenvalues<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<Vec<f64>> {
    tridiag_eigenvalues(&sample_tridiag(spec, rng)?)
}

/// Binned eigenvalues in a scaled coordinate; `density` integrates to the
/// mass of the scaling times the fraction of eigenvalues inside the edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Eigenvalues falling outside the edges.
    pub clipped: u64,
    /// Number of matrices accumulated.
    pub draws: u64,
    /// Eigenvalues per matrix.
    pub n: usize,
    pub scaling: Scaling,
}

impl Histogram {
    pub fn new(edges: Vec<f64>, n: usize, scaling: Scaling) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("histogram edges must be strictly increasing, at least two"));
        }
        let bins = edges.len() - 1;
        Ok(Histogram { edges, counts: vec![0; bins], clipped: 0, draws: 0, n, scaling })
    }

    /// Bins centred on the grid points, split at the midpoints.
    pub fn centered_on(grid: &[f64], n: usize, scaling: Scaling) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::domain("histogram grid needs at least two points"));
        }
        let m = grid.len();
        let mut edges = Vec::with_capacity(m + 1);
        edges.push(grid[0] - 0.5 * (grid[1] - grid[0]));
        edges.extend(grid.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        edges.push(grid[m - 1] + 0.5 * (grid[m - 1] - grid[m - 2]));
        Self::new(edges, n, scaling)
    }

    /// Freedman-Diaconis bins over the range of a first batch of scaled values.
    pub fn freedman_diaconis(values: &[f64], n: usize, scaling: Scaling) -> Result<Self> {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
        if v.len() < 4 {
            return Err(Error::domain("Freedman-Diaconis needs at least 4 values"));
        }
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((v.len() - 1) as f64 * p).round() as usize];
        let iqr = q(0.75) - q(0.25);
        let (lo, hi) = (v[0], v[v.len() - 1]);
        let width = if iqr > 0.0 {
            2.0 * iqr / (v.len() as f64).cbrt()
        } else {
            ((hi - lo) / 10.0).max(1e-12)
        };
        let bins = (((hi - lo) / width).ceil() as usize).clamp(1, 100_000);
        let edges = (0..=bins).map(|i| lo + (hi - lo + width * 1e-9) * i as f64 / bins as f64).collect();
        Self::new(edges, n, scaling)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Adds one matrix's raw eigenvalues.
    pub fn add_sample(&mut self, eigenvalues: &[f64]) {
        for &lam in eigenvalues {
            let x = self.scaling.from_raw(self.n, lam);
            let lo = self.edges[0];
            let hi = self.edges[self.edges.len() - 1];
            if !(x >= lo && x < hi) {
                self.clipped += 1;
                continue;
            }
            let last = self.counts.len() - 1;
            let i = self.edges.partition_point(|&e| e <= x) - 1;
            self.counts[i.min(last)] += 1;
        }
        self.draws += 1;
    }

    /// Sums counts of a histogram with identical bins.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.edges != other.edges || self.n != other.n || self.scaling != other.scaling {
            return Err(Error::domain("cannot merge histograms with different bins"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.clipped += other.clipped;
        self.draws += other.draws;
        Ok(())
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Density per bin, normalized by draws and the scaling's mass per eigenvalue.
    pub fn density(&self) -> Vec<f64> {
        let per_eigen = self.scaling.mass(self.n) / self.n as f64;
        let draws = self.draws.max(1) as f64;
        self.counts
            .iter()
            .zip(self.edges.windows(2))
            .map(|(&c, w)| c as f64 * per_eigen / (draws * (w[1] - w[0])))
            .collect()
    }

    pub fn to_curve(&self, meta: CurveMeta) -> Result<DensityCurve> {
        DensityCurve::new(self.centers(), self.density(), self.scaling, meta)
    }
}

/// Histogram of given eigenvalue lists, binned around the grid points.
pub fn empirical_density(samples: &[Vec<f64>], grid: &[f64], scaling: Scaling) -> Result<DensityCurve> {
    let first = samples.first().ok_or_else(|| Error::domain("no samples"))?;
    let n = first.len();
    if n == 0 || samples.iter().any(|s| s.len() != n) {
        return Err(Error::domain("samples must be non-empty and of equal size"));
    }
    let mut h = Histogram::centered_on(grid, n, scaling)?;
    for s in samples {
        h.add_sample(s);
    }
    let grid = grid.to_vec();
    let spec = EnsembleSpec {
        family: match scaling {
            Scaling::BulkLaguerre | Scaling::EdgeLaguerre => Family::Laguerre,
            _ => Family::Hermite,
        },
        n,
        beta: f64::NAN,
        a: 0.0,
    };
    let meta = CurveMeta { spec, method: Method::MonteCarlo, seed: None, samples: Some(samples.len() as u64) };
    DensityCurve::new(grid, h.density(), scaling, meta)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Accumulates `draws` matrices into copies of `template`.
///
/// Draws are split into fixed chunks of [`CHUNK_DRAWS`], each with its own
/// ChaCha8 stream, and integer counts are summed, so the result does not
/// depend on the number of worker threads.
pub fn monte_carlo(spec: &EnsembleSpec, draws: u64, seed: u64, template: &Histogram) -> Result<Histogram> {
    if draws == 0 {
        return Err(Error::domain("need at least one draw"));
    }
    if template.n != spec.n {
        return Err(Error::domain("histogram was built for a different N"));
    }
    let chunks = draws.div_ceil(CHUNK_DRAWS);
    let parts: Vec<Histogram> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut h = template.clone();
            h.counts.iter_mut().for_each(|v| *v = 0);
            h.clipped = 0;
            h.draws = 0;
            let count = CHUNK_DRAWS.min(draws - c * CHUNK_DRAWS);
            for _ in 0..count {
                h.add_sample(&sample_eigenvalues(spec, &mut rng)?);
            }
            Ok(h)
        })
        .collect::<Result<_>>()?;
    let mut total = template.clone();
    total.counts.iter_mut().for_each(|v| *v = 0);
    total.clipped = 0;
    total.draws = 0;
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// Monte Carlo density on bins centred at `grid`, reported on `grid` itself.
pub fn mc_curve(spec: &EnsembleSpec, grid: &[f64], scaling: Scaling, draws: u64, seed: u64) -> Result<DensityCurve> {
    let template = Histogram::centered_on(grid, spec.n, scaling)?;
    let h = monte_carlo(spec, draws, seed, &template)?;
    let meta = CurveMeta { spec: *spec, method: Method::MonteCarlo, seed: Some(seed), samples: Some(draws) };
    DensityCurve::new(grid.to_vec(), h.density(), scaling, meta)
}

/// Monte Carlo histogram with Freedman-Diaconis bins fixed by the first chunk.
pub fn mc_histogram_auto(spec: &EnsembleSpec, scaling: Scaling, draws: u64, seed: u64) -> Result<Histogram> {
    let mut rng = chunk_rng(seed, 0);
    let mut first = Vec::new();
    for _ in 0..CHUNK_DRAWS.min(draws) {
        first.extend(sample_eigenvalues(spec, &mut rng)?.into_iter().map(|l| scaling.from_raw(spec.n, l)));
    }
    let template = Histogram::freedman_diaconis(&first, spec.n, scaling)?;
    monte_carlo(spec, draws, seed, &template)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(d: &[f64], e: &[f64]) -> SymTridiagonal {
        SymTridiagonal::new(d.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn small_spectra() {
        assert_eq!(tridiag_eigenvalues(&tri(&[1.0, 2.0, 3.0], &[0.0, 0.0])).unwrap(), vec![1.0, 2.0, 3.0]);
        let v = tridiag_eigenvalues(&tri(&[0.0, 0.0], &[1.0])).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        let v = tridiag_eigenvalues(&tri(&[0.0; 3], &[1.0, 1.0])).unwrap();
        let s = 2f64.sqrt();
        assert!((v[0] + s).abs() < 1e-15 && v[1].abs() < 1e-15 && (v[2] - s).abs() < 1e-15);
    }

    #[test]
    fn bisection_matches_ql() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = EnsembleSpec::hermite(9, 2.0).unwrap();
        for _ in 0..20 {
            let t = sample_tridiag(&spec, &mut rng).unwrap();
            let a = tridiag_eigenvalues(&t).unwrap();
            let mut b = sturm_bisection(&t).unwrap();
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12 * t.norm_bound());
            }
        }
    }

    #[test]
    fn malformed_tridiagonal() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn chi_rejects_bad_dof() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(chi_sample(0.0, &mut rng).is_err());
        assert!(chi_sample(-1.0, &mut rng).is_err());
        assert!(chi_sample(0.3, &mut rng).unwrap() > 0.0);
    }

    #[test]
    fn chi_two_second_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 100_000;
        let xs: Vec<f64> = (0..m).map(|_| chi_sample(2.0, &mut rng).unwrap().powi(2)).collect();
        let mean = xs.iter().sum::<f64>() / m as f64;
        // chi_2^2 is exponential with mean 2 and sd 2
        assert!((mean - 2.0).abs() < 3.0 * 2.0 / (m as f64).sqrt(), "{mean}");
    }

    #[test]
    fn draws_have_positive_off_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [EnsembleSpec::hermite(6, 3.0).unwrap(), EnsembleSpec::laguerre(5, 2.0, 0.5).unwrap()] {
            let t = sample_tridiag(&spec, &mut rng).unwrap();
            assert_eq!(t.len(), spec.n);
            assert!(t.offdiag.iter().all(|&e| e > 0.0));
        }
    }

    #[test]
    fn single_sample_histogram() {
        let grid: Vec<f64> = (-5..=5).map(|i| i as f64 * 0.1).collect();
        let c = empirical_density(&[vec![0.0]], &grid, Scaling::Raw).unwrap();
        let i = grid.iter().position(|&g| g == 0.0).unwrap();
        assert!((c.values[i] * 0.1 - 1.0).abs() < 1e-12);
        assert_eq!(c.values.iter().filter(|&&v| v > 0.0).count(), 1);
        assert!(empirical_density(&[], &grid, Scaling::Raw).is_err());
    }

    #[test]
    fn uniform_values_give_flat_histogram() {
        let m = 200_000;
        let samples: Vec<Vec<f64>> = (0..m).map(|k| vec![(k as f64 + 0.5) / m as f64]).collect();
        let grid: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let c = empirical_density(&samples, &grid, Scaling::Raw).unwrap();
        assert!(c.values.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn histogram_merge_is_additive() {
        let spec = EnsembleSpec::hermite(3, 2.0).unwrap();
        let t = Histogram::centered_on(&[-2.0, -1.0, 0.0, 1.0, 2.0], 3, Scaling::Raw).unwrap();
        let a = monte_carlo(&spec, 3000, 5, &t).unwrap();
        assert_eq!(a.draws, 3000);
        assert_eq!(a.counts.iter().sum::<u64>() + a.clipped, 9000);
        let other = Histogram::centered_on(&[0.0, 1.0], 3, Scaling::Raw).unwrap();
        assert!(a.clone().merge(&other).is_err());
    }

    #[test]
    fn freedman_diaconis_covers_batch() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 / 999.0).powi(2)).collect();
        let h = Histogram::freedman_diaconis(&v, 1, Scaling::Raw).unwrap();
        assert!(h.edges[0] <= 0.0 && *h.edges.last().unwrap() > 1.0);
        assert!(h.bins() > 5);
    }
}
