//! Exact finite-N densities from Jack-operator series.
//!
//! Polynomials carry exact rational coefficients. The rectangular monomial
//! `x_1^{N-1} ... x_b^{N-1}` is pushed through `exp(-D_0/4)` (Hermite) or
//! `exp(-(D_1 + (a + 2/b) E_0))` (Laguerre); both series terminate because
//! every operator lowers the degree. Only the last step, evaluation of the
//! specialized univariate polynomial, uses floating point.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curve::{CurveMeta, DensityCurve, Method, Scaling};
use crate::error::{Error, Result};
use crate::specfun::{self, EnsembleSpec, Family};

/// Largest `beta (N - 1)` accepted by the exact route.
pub const MAX_RECTANGLE_DEGREE: u32 = 48;

pub type Exponents = Vec<u8>;

/// Polynomial in `x_1..x_n` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(exps: Exponents, c: BigRational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// `x_1^e ... x_n^e`.
    pub fn rectangular(nvars: usize, e: u8) -> Self {
        Self::monomial(vec![e; nvars], BigRational::one())
    }

    /// Sum of `c * x^sigma(exps)` over all distinct permutations `sigma`.
    pub fn symmetrized(exps: &[u8], c: BigRational) -> Self {
        let mut sorted = exps.to_vec();
        sorted.sort_unstable();
        let mut p = Self::zero(exps.len());
        loop {
            p.add_term(sorted.clone(), c.clone());
            if !next_permutation(&mut sorted) {
                break;
            }
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u8]) -> Option<&BigRational> {
        self.terms.get(exps)
    }

    /// Adds `c x^exps`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exps: Exponents, c: BigRational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &BigRational) {
        assert_eq!(self.nvars, other.nvars);
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| total(e)).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| total(e));
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Invariance under every adjacent transposition, hence under all of `S_n`.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.nvars.saturating_sub(1) {
            for (e, c) in &self.terms {
                if e[i] == e[i + 1] {
                    continue;
                }
                let mut s = e.clone();
                s.swap(i, i + 1);
                if self.terms.get(&s) != Some(c) {
                    return false;
                }
            }
        }
        true
    }

    /// Specialization `x_1 = ... = x_n = x`.
    pub fn specialize(&self) -> UniPoly {
        let deg = self.degree().unwrap_or(0) as usize;
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for (e, c) in &self.terms {
            coeffs[total(e) as usize] += c;
        }
        UniPoly::new(coeffs)
    }

    /// Floating-point evaluation, for tests and diagnostics.
    pub fn eval(&self, xs: &[f64]) -> f64 {
        assert_eq!(xs.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(xs).map(|(&k, &x)| x.powi(k as i32)).product();
                rat_to_f64(c) * m
            })
            .sum()
    }
}

fn total(e: &[u8]) -> u32 {
    e.iter().map(|&k| k as u32).sum()
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn bump(e: &[u8], i: usize, delta: i32) -> Result<Exponents> {
    let mut out = e.to_vec();
    let v = out[i] as i32 + delta;
    if !(0..=u8::MAX as i32).contains(&v) {
        return Err(Error::Budget(format!("exponent {v} out of range")));
    }
    out[i] = v as u8;
    Ok(out)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `E_k = sum_i x_i^k d/dx_i`.
pub fn apply_ek(p: &MultiPoly, k: u8) -> Result<MultiPoly> {
    let mut out = MultiPoly::zero(p.nvars);
    for (e, c) in &p.terms {
        for (i, &a) in e.iter().enumerate() {
            if a == 0 {
                continue;
            }
            out.add_term(bump(e, i, k as i32 - 1)?, c * int(a as i64));
        }
    }
    Ok(out)
}

/// `D_k = sum_i x_i^k d^2/dx_i^2 + (2/alpha) sum_{i<j} (x_i^k d_i - x_j^k d_j) / (x_i - x_j)`.
///
/// Each pair numerator is formed over the whole polynomial and divided by
/// `x_i - x_j` synthetically; a nonzero remainder is reported, never dropped.
pub fn apply_dk(p: &MultiPoly, k: u8, alpha: &BigRational) -> Result<MultiPoly> {
    if !alpha.is_positive() {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    if !p.is_symmetric() {
        return Err(Error::Symmetry("D_k needs a symmetric polynomial".into()));
    }
    let n = p.nvars;
    let two_over_alpha = int(2) / alpha;
    let mut out = MultiPoly::zero(n);
    let ki = k as i32;

    for (e, c) in &p.terms {
        for (i, &a) in e.iter().enumerate() {
            if a >= 2 {
                out.add_term(bump(e, i, ki - 2)?, c * int(a as i64 * (a as i64 - 1)));
            }
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            // numerator grouped by the exponents of the other variables,
            // then by the power of x_i, leaving a polynomial in x_j
            let mut groups: HashMap<Exponents, BTreeMap<u8, BTreeMap<u8, BigRational>>> =
                HashMap::new();
            let mut push = |e: Exponents, c: BigRational| {
                let (pi, pj) = (e[i], e[j]);
                let mut key = e;
                key[i] = 0;
                key[j] = 0;
                let slot = groups
                    .entry(key)
                    .or_default()
                    .entry(pi)
                    .or_default()
                    .entry(pj)
                    .or_insert_with(BigRational::zero);
                *slot += c;
            };
            for (e, c) in &p.terms {
                let (a, b) = (e[i], e[j]);
                if a > 0 {
                    push(bump(e, i, ki - 1)?, c * int(a as i64));
                }
                if b > 0 {
                    push(bump(e, j, ki - 1)?, -(c * int(b as i64)));
                }
            }
            for (key, by_pi) in groups {
                divide_pair(&key, i, j, by_pi, &two_over_alpha, &mut out)?;
            }
        }
    }
    Ok(out)
}

// Divides sum_p x_i^p n_p(x_j) by (x_i - x_j): q_{p-1} = n_p + x_j q_p, and the
// remainder n_0 + x_j q_0 must vanish.
fn divide_pair(
    key: &[u8],
    i: usize,
    j: usize,
    mut by_pi: BTreeMap<u8, BTreeMap<u8, BigRational>>,
    scale: &BigRational,
    out: &mut MultiPoly,
) -> Result<()> {
    let top = match by_pi.keys().next_back() {
        Some(&t) => t,
        None => return Ok(()),
    };
    let mut carry: BTreeMap<u8, BigRational> = BTreeMap::new();
    for pdeg in (1..=top).rev() {
        let mut cur = by_pi.remove(&pdeg).unwrap_or_default();
        for (pj, c) in carry {
            *cur.entry(pj).or_insert_with(BigRational::zero) += c;
        }
        cur.retain(|_, c| !c.is_zero());
        let mut next = BTreeMap::new();
        for (&pj, c) in &cur {
            let mut e = key.to_vec();
            e[i] = pdeg - 1;
            e[j] = pj;
            out.add_term(e, c * scale);
            let up = pj
                .checked_add(1)
                .ok_or_else(|| Error::Budget("exponent out of range".into()))?;
            next.insert(up, c.clone());
        }
        carry = next;
    }
    let mut rem = by_pi.remove(&0).unwrap_or_default();
    for (pj, c) in carry {
        *rem.entry(pj).or_insert_with(BigRational::zero) += c;
    }
    if rem.values().any(|c| !c.is_zero()) {
        return Err(Error::Consistency(format!(
            "nonzero remainder dividing by x_{} - x_{}",
            i + 1,
            j + 1
        )));
    }
    Ok(())
}

/// Univariate polynomial with exact coefficients, `coeffs[d]` multiplying `x^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<BigRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Compensated Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        compensated_horner(&self.coeffs_f64(), x)
    }

    /// `{"degree": d, "coeffs": ["p/q", ...]}`, lowest degree first.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "degree": self.degree(),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let mut s = match coeffs.last() {
        Some(&c) => c,
        None => return 0.0,
    };
    let mut err = 0.0;
    for &c in coeffs.iter().rev().skip(1) {
        let p = s * x;
        let pe = s.mul_add(x, -p);
        let t = p + c;
        let bb = t - p;
        let se = (p - (t - bb)) + (c - bb);
        s = t;
        err = err * x + (pe + se);
    }
    s + err
}

/// `H = exp(-D_0/4) x_1^{N-1}...x_b^{N-1}` (Hermite) or
/// `exp(-(D_1 + (a + 2/b) E_0)) x_1^{N-1}...x_b^{N-1}` (Laguerre), in `b` variables
/// with Jack parameter `b/2`.
pub fn rectangular_multivariate(spec: &EnsembleSpec) -> Result<MultiPoly> {
    let mut total_poly = None;
    run_series(spec, |term, weight| {
        let acc = total_poly.get_or_insert_with(|| MultiPoly::zero(term.nvars()));
        acc.add_scaled(term, weight);
    })?;
    Ok(total_poly.unwrap_or_else(|| MultiPoly::zero(1)))
}

fn check_budget(spec: &EnsembleSpec) -> Result<u32> {
    let beta = spec.even_beta()?;
    let deg = beta as u64 * (spec.n as u64 - 1);
    if deg > MAX_RECTANGLE_DEGREE as u64 {
        return Err(Error::Budget(format!(
            "exact route needs beta (N - 1) <= {MAX_RECTANGLE_DEGREE}, got {deg}"
        )));
    }
    Ok(beta)
}

// Calls `sink(term_n, weight_n)` for every nonzero series term.
fn run_series<F: FnMut(&MultiPoly, &BigRational)>(spec: &EnsembleSpec, mut sink: F) -> Result<()> {
    let beta = check_budget(spec)?;
    let alpha = BigRational::new(BigInt::from(beta), BigInt::from(2));
    let mut term = MultiPoly::rectangular(beta as usize, (spec.n - 1) as u8);
    let mut weight = BigRational::one();
    let mut step = 0i64;
    let e0_coeff = match spec.family {
        Family::Hermite => BigRational::zero(),
        Family::Laguerre => {
            let a = BigRational::from_float(spec.a)
                .ok_or_else(|| Error::domain(format!("a must be finite, got {}", spec.a)))?;
            a + BigRational::new(BigInt::from(2), BigInt::from(beta))
        }
    };
    while !term.is_zero() {
        sink(&term, &weight);
        step += 1;
        term = match spec.family {
            Family::Hermite => {
                weight = -weight / int(4 * step);
                apply_dk(&term, 0, &alpha)?
            }
            Family::Laguerre => {
                weight = -weight / int(step);
                let mut next = apply_dk(&term, 1, &alpha)?;
                next.add_scaled(&apply_ek(&term, 0)?, &e0_coeff);
                next
            }
        };
    }
    Ok(())
}

fn compute_rectangular(spec: &EnsembleSpec) -> Result<UniPoly> {
    let mut coeffs: Vec<BigRational> = Vec::new();
    run_series(spec, |term, weight| {
        let u = term.specialize();
        if coeffs.len() < u.coeffs.len() {
            coeffs.resize(u.coeffs.len(), BigRational::zero());
        }
        for (d, c) in u.coeffs.iter().enumerate() {
            coeffs[d] += c * weight;
        }
    })?;
    Ok(UniPoly::new(coeffs))
}

type CacheKey = (Family, usize, u32, u64);
type Slot = Arc<Mutex<Option<Arc<UniPoly>>>>;

fn cache() -> &'static Mutex<HashMap<CacheKey, Slot>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Slot>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The rectangular polynomial specialized at equal arguments; memoized per spec.
///
/// Concurrent callers for the same spec wait for a single computation.
pub fn rectangular_generalized_polynomial(spec: &EnsembleSpec) -> Result<Arc<UniPoly>> {
    let beta = check_budget(spec)?;
    let a_bits = match spec.family {
        Family::Hermite => 0,
        Family::Laguerre => spec.a.to_bits(),
    };
    let key = (spec.family, spec.n, beta, a_bits);
    let slot = {
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    let mut guard = slot.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(u) = guard.as_ref() {
        return Ok(u.clone());
    }
    let u = Arc::new(compute_rectangular(spec)?);
    *guard = Some(u.clone());
    Ok(u)
}

fn signed_exp(ln_mag: f64, sign: f64) -> f64 {
    sign * ln_mag.exp()
}

/// Exact Hermite density `rho_N(x)`, integrating to `N`.
pub fn exact_hermite_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    if spec.family != Family::Hermite {
        return Err(Error::domain("exact_hermite_density needs a Hermite spec"));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let u = rectangular_generalized_polynomial(spec)?;
    let p = u.eval(x);
    if p == 0.0 {
        return Ok(0.0);
    }
    let ln = (spec.n as f64).ln() + specfun::ln_hermite_norm_ratio(spec.n, spec.beta)?
        - spec.beta * x * x / 2.0
        + p.abs().ln();
    Ok(signed_exp(ln, p.signum()))
}

/// Exact Laguerre density `rho_N(x)` for `x >= 0`, integrating to `N`.
pub fn exact_laguerre_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    if spec.family != Family::Laguerre {
        return Err(Error::domain("exact_laguerre_density needs a Laguerre spec"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Laguerre density needs x >= 0, got {x}")));
    }
    let u = rectangular_generalized_polynomial(spec)?;
    let p = u.eval(x);
    if p == 0.0 || (x == 0.0 && spec.a > 0.0) {
        return Ok(0.0);
    }
    let hard_edge = if spec.a > 0.0 { spec.a * spec.beta / 2.0 * x.ln() } else { 0.0 };
    let ln = (spec.n as f64).ln() + specfun::ln_laguerre_norm_ratio(spec)?
        + hard_edge
        - spec.beta * x / 2.0
        + p.abs().ln();
    Ok(signed_exp(ln, p.signum()))
}

/// Either exact density; Laguerre returns 0 for `x < 0`.
pub fn exact_density(spec: &EnsembleSpec, x: f64) -> Result<f64> {
    match spec.family {
        Family::Hermite => exact_hermite_density(spec, x),
        Family::Laguerre if x < 0.0 => Ok(0.0),
        Family::Laguerre => exact_laguerre_density(spec, x),
    }
}

/// Exact density on a grid given in `scaling` coordinates.
pub fn exact_curve(spec: &EnsembleSpec, grid: Vec<f64>, scaling: Scaling) -> Result<DensityCurve> {
    rectangular_generalized_polynomial(spec)?;
    let meta = CurveMeta { spec: *spec, method: Method::Exact, seed: None, samples: None };
    let n = spec.n;
    DensityCurve::tabulate(grid, scaling, meta, |x| {
        let (raw, jac) = scaling.to_raw(n, x);
        Ok(jac * exact_density(spec, raw)?)
    })
}
