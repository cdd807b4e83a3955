//! Command-line front end: `density` tabulates one curve, `compare` tabulates
//! several on a shared grid and reports distances and peak structure.
//!
//! Exit codes: 0 success, 1 a requested tolerance failed, 2 usage or domain error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bulk;
use crate::curve::{local_maxima, parse_grid, round_g12, CurveMeta, DensityCurve, Method, Scaling};
use crate::ensembles;
use crate::error::{Error, Result};
use crate::softedge::{self, KQuadConfig};
use crate::specfun::{EnsembleSpec, Family};
use crate::symop;

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "betadensity",
    version,
    about = "Eigenvalue densities of Hermite and Laguerre beta-ensembles",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BETADENSITY_THREADS")]
    pub threads: Option<usize>,

    /// JSON object whose keys are long flag names; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate one density curve.
    Density(DensityArgs),
    /// Tabulate several curves on one grid and compare them.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    Raw,
    Bulk,
    Edge,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub beta: f64,
    /// Laguerre exponent parameter.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `start:stop:step` in the curve's scaled coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Coordinate convention; default bulk, or edge for the edge method.
    #[arg(long, value_enum)]
    pub scaling: Option<ScalingArg>,
    /// Monte Carlo draws.
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Soft-edge quadrature settings: inline JSON or a JSON file.
    ///
    /// Defaults: ray_angle pi/3, left_angle pi/12, contour "steepest",
    /// nested Gauss for n <= 4 (128/96/40/20 nodes), quasi Monte Carlo with
    /// 2e6 points for n = 5, 6, tol_imag 1e-6, right_switch 5, left_switch -8.
    #[arg(long, value_name = "JSON|FILE")]
    pub quad: Option<String>,
    /// Evaluate the bulk formula for any beta > 0 (no even-beta check).
    #[arg(long)]
    pub any_beta: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output file; `-` or absent writes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format; default from the file extension, else CSV.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Comma-separated curves, each `method[@key=value...]` with keys n, beta, a,
    /// e.g. `exact,bulk` or `bulk@beta=2,bulk@beta=6`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<String>,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Report file (JSON); absent writes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write all curves as one CSV, columns `x,<label>...`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Fail unless every pairwise L1 distance is at most this.
    #[arg(long)]
    pub assert_l1: Option<f64>,
    /// Fail unless every pairwise Linf distance (on --linf-range) is at most this.
    #[arg(long)]
    pub assert_linf: Option<f64>,
    /// `lo:hi` window for Linf; default the whole grid.
    #[arg(long, allow_hyphen_values = true)]
    pub linf_range: Option<String>,
    /// `label=count`, repeatable: required number of interior maxima.
    #[arg(long)]
    pub assert_peaks: Vec<String>,
    /// Fail unless matched maxima of every pair with equal counts differ by at most this.
    #[arg(long)]
    pub assert_peak_delta: Option<f64>,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One curve request of `compare`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub label: String,
    pub method: Method,
    pub spec: EnsembleSpec,
}

/// Parses `method[@key=value...]` against a base ensemble.
pub fn parse_curve_request(token: &str, base: &EnsembleSpec) -> Result<CurveRequest> {
    let mut parts = token.trim().split('@');
    let method: Method = parts.next().unwrap_or_default().parse()?;
    let (mut n, mut beta, mut a) = (base.n, base.beta, base.a);
    for kv in parts {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("override `{kv}` is not key=value")))?;
        let bad = || Error::domain(format!("bad value in `{kv}`"));
        match k {
            "n" => n = v.parse().map_err(|_| bad())?,
            "beta" => beta = v.parse().map_err(|_| bad())?,
            "a" => a = v.parse().map_err(|_| bad())?,
            other => return Err(Error::domain(format!("unknown override key `{other}`"))),
        }
    }
    let spec = EnsembleSpec::new(base.family, n, beta, a)?;
    Ok(CurveRequest { label: token.trim().to_string(), method, spec })
}

fn scaling_for(method: Method, family: Family, arg: Option<ScalingArg>) -> Result<Scaling> {
    let s = match (arg, method) {
        (None, Method::Edge) | (Some(ScalingArg::Edge), _) => Scaling::edge(family),
        (None, _) | (Some(ScalingArg::Bulk), _) => Scaling::bulk(family),
        (Some(ScalingArg::Raw), _) => Scaling::Raw,
    };
    match method {
        Method::Bulk if s != Scaling::bulk(family) => {
            Err(Error::domain("the bulk method is tabulated in bulk scaling only"))
        }
        Method::Edge if s != Scaling::edge(family) => {
            Err(Error::domain("the edge method is tabulated in edge scaling only"))
        }
        _ => Ok(s),
    }
}

fn default_grid(scaling: Scaling) -> &'static str {
    match scaling {
        Scaling::BulkHermite => "-1.2:1.2:0.005",
        Scaling::BulkLaguerre => "0.0025:1.2:0.005",
        Scaling::EdgeHermite | Scaling::EdgeLaguerre => "-6:3:0.05",
        Scaling::Raw => "-5:5:0.01",
    }
}

fn quad_config(arg: &Option<String>) -> Result<KQuadConfig> {
    match arg {
        None => Ok(KQuadConfig::default()),
        Some(s) if s.trim_start().starts_with('{') => Ok(serde_json::from_str(s)?),
        Some(path) => Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?),
    }
}

/// Drops grid points outside the bulk guard band, noting it on stderr.
fn clip_to_band(family: Family, grid: Vec<f64>) -> Result<Vec<f64>> {
    let before = grid.len();
    let kept: Vec<f64> = grid.into_iter().filter(|&x| bulk::in_band(family, x)).collect();
    if kept.len() < before {
        eprintln!(
            "note: {} grid point(s) outside the bulk band dropped",
            before - kept.len()
        );
    }
    if kept.len() < 2 {
        return Err(Error::domain("grid has fewer than two points inside the bulk band"));
    }
    Ok(kept)
}

/// Tabulates one curve.
pub fn compute_curve(
    req: &CurveRequest,
    grid: Vec<f64>,
    scaling: Scaling,
    common: &CommonArgs,
) -> Result<DensityCurve> {
    let spec = &req.spec;
    match req.method {
        Method::Exact => {
            spec.even_beta()?;
            symop::exact_curve(spec, grid, scaling)
        }
        Method::Bulk => {
            if common.any_beta {
                let meta = CurveMeta { spec: *spec, method: Method::Bulk, seed: None, samples: None };
                DensityCurve::tabulate(grid, scaling, meta, |x| bulk::bulk_density_any_beta(spec, x))
            } else {
                bulk::bulk_curve(spec, grid)
            }
        }
        Method::Edge => softedge::edge_curve(spec, grid, &quad_config(&common.quad)?),
        Method::MonteCarlo => ensembles::mc_curve(spec, &grid, scaling, common.samples, common.seed),
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn format_for(path: &Option<PathBuf>, format: Option<Format>) -> Format {
    format.unwrap_or_else(|| match path.as_deref().and_then(Path::extension) {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    })
}

fn base_spec(e: &EnsembleArgs) -> Result<EnsembleSpec> {
    EnsembleSpec::new(e.family, e.n, e.beta, e.a)
}

pub fn cmd_density(args: &DensityArgs) -> Result<i32> {
    let spec = base_spec(&args.ensemble)?;
    let req = CurveRequest { label: args.method.tag().into(), method: args.method, spec };
    let scaling = scaling_for(args.method, spec.family, args.common.scaling)?;
    let mut grid = parse_grid(args.common.grid.as_deref().unwrap_or(default_grid(scaling)))?;
    if args.method == Method::Bulk {
        grid = clip_to_band(spec.family, grid)?;
    }
    let curve = compute_curve(&req, grid, scaling, &args.common)?;
    let text = match format_for(&args.output, args.format) {
        Format::Csv => curve.to_csv(),
        Format::Json => curve.to_json()? + "\n",
    };
    write_output(&args.output, &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveReport {
    pub label: String,
    pub method: Method,
    pub spec: EnsembleSpec,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMetrics {
    pub label: String,
    pub peak_count: usize,
    pub peaks: Vec<f64>,
    pub integral: f64,
    /// `max |curve - limiting law|` in bulk scaling, absent otherwise.
    pub oscillation_amplitude: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairMetrics {
    pub a: String,
    pub b: String,
    pub l1: f64,
    pub linf: f64,
    /// Differences of matched maxima (b - a), present when both counts agree.
    pub peak_location_deltas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub curves: Vec<CurveMetrics>,
    pub pairs: Vec<PairMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

/// Curves on one grid with metrics derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub spec: EnsembleSpec,
    pub scaling: Scaling,
    pub methods: Vec<String>,
    pub grid: Vec<f64>,
    pub curves: Vec<CurveReport>,
    pub metrics: Metrics,
    pub assertions: Vec<AssertionOutcome>,
}

fn limiting_law(scaling: Scaling, x: f64) -> Option<f64> {
    match scaling {
        Scaling::BulkHermite => Some(bulk::wigner_density(x)),
        Scaling::BulkLaguerre => Some(bulk::mp_density(x)),
        _ => None,
    }
}

impl ComparisonReport {
    /// Builds the report, computing every metric from the curves.
    pub fn new(spec: EnsembleSpec, scaling: Scaling, grid: Vec<f64>, curves: Vec<CurveReport>, linf_range: (f64, f64)) -> Self {
        let curve_metrics = curves
            .iter()
            .map(|c| {
                let peaks = local_maxima(&grid, &c.values);
                let integral = grid
                    .windows(2)
                    .zip(c.values.windows(2))
                    .map(|(g, v)| 0.5 * (g[1] - g[0]) * (v[0] + v[1]))
                    .sum();
                let oscillation_amplitude = grid
                    .iter()
                    .zip(&c.values)
                    .map(|(&x, v)| limiting_law(scaling, x).map(|l| (v - l).abs()))
                    .try_fold(0.0f64, |m, d| d.map(|d| if d.is_finite() { m.max(d) } else { m }));
                CurveMetrics { label: c.label.clone(), peak_count: peaks.len(), peaks, integral, oscillation_amplitude }
            })
            .collect::<Vec<_>>();
        let mut pairs = Vec::new();
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let (a, b) = (&curves[i].values, &curves[j].values);
                let mut l1 = 0.0;
                for k in 0..grid.len().saturating_sub(1) {
                    let d0 = (a[k] - b[k]).abs();
                    let d1 = (a[k + 1] - b[k + 1]).abs();
                    l1 += 0.5 * (grid[k + 1] - grid[k]) * (d0 + d1);
                }
                let linf = grid
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x >= linf_range.0 && x <= linf_range.1)
                    .map(|(k, _)| (a[k] - b[k]).abs())
                    .fold(0.0, f64::max);
                let (pa, pb) = (&curve_metrics[i].peaks, &curve_metrics[j].peaks);
                let peak_location_deltas =
                    (pa.len() == pb.len()).then(|| pa.iter().zip(pb).map(|(x, y)| y - x).collect());
                pairs.push(PairMetrics {
                    a: curves[i].label.clone(),
                    b: curves[j].label.clone(),
                    l1,
                    linf,
                    peak_location_deltas,
                });
            }
        }
        ComparisonReport {
            schema: 1,
            spec,
            scaling,
            methods: curves.iter().map(|c| c.label.clone()).collect(),
            grid,
            curves,
            metrics: Metrics { curves: curve_metrics, pairs },
            assertions: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.grid.iter_mut().for_each(|v| *v = round_g12(*v));
        for c in &mut r.curves {
            c.values.iter_mut().for_each(|v| *v = round_g12(*v));
        }
        for m in &mut r.metrics.curves {
            m.peaks.iter_mut().for_each(|v| *v = round_g12(*v));
            m.integral = round_g12(m.integral);
            m.oscillation_amplitude = m.oscillation_amplitude.map(round_g12);
        }
        for p in &mut r.metrics.pairs {
            p.l1 = round_g12(p.l1);
            p.linf = round_g12(p.linf);
            if let Some(d) = &mut p.peak_location_deltas {
                d.iter_mut().for_each(|v| *v = round_g12(*v));
            }
        }
        for a in &mut r.assertions {
            a.value = round_g12(a.value);
        }
        Ok(serde_json::to_string_pretty(&r)?)
    }

    /// `x,<label>...` with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x");
        for c in &self.curves {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        for (k, x) in self.grid.iter().enumerate() {
            out.push_str(&crate::curve::fmt_g12(*x));
            for c in &self.curves {
                out.push(',');
                out.push_str(&crate::curve::fmt_g12(c.values[k]));
            }
            out.push('\n');
        }
        out
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::domain(format!("range `{s}` is not lo:hi")))?;
    let lo: f64 = a.trim().parse().map_err(|_| Error::domain(format!("bad range `{s}`")))?;
    let hi: f64 = b.trim().parse().map_err(|_| Error::domain(format!("bad range `{s}`")))?;
    if !(lo < hi) {
        return Err(Error::domain(format!("empty range `{s}`")));
    }
    Ok((lo, hi))
}

fn evaluate_assertions(report: &mut ComparisonReport, args: &CompareArgs) -> Result<()> {
    let mut out = Vec::new();
    for p in &report.metrics.pairs {
        if let Some(limit) = args.assert_l1 {
            out.push(AssertionOutcome { name: format!("l1({},{})", p.a, p.b), value: p.l1, limit, pass: p.l1 <= limit });
        }
        if let Some(limit) = args.assert_linf {
            out.push(AssertionOutcome { name: format!("linf({},{})", p.a, p.b), value: p.linf, limit, pass: p.linf <= limit });
        }
        if let Some(limit) = args.assert_peak_delta {
            let worst = p
                .peak_location_deltas
                .as_ref()
                .map(|d| d.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .unwrap_or(f64::INFINITY);
            out.push(AssertionOutcome { name: format!("peak_delta({},{})", p.a, p.b), value: worst, limit, pass: worst <= limit });
        }
    }
    for spec in &args.assert_peaks {
        let (label, count) = spec
            .rsplit_once('=')
            .ok_or_else(|| Error::domain(format!("--assert-peaks `{spec}` is not label=count")))?;
        let count: usize = count.parse().map_err(|_| Error::domain(format!("bad count in `{spec}`")))?;
        let m = report
            .metrics
            .curves
            .iter()
            .find(|c| c.label == label)
            .ok_or_else(|| Error::domain(format!("no curve labelled `{label}`")))?;
        out.push(AssertionOutcome {
            name: format!("peak_count({label})"),
            value: m.peak_count as f64,
            limit: count as f64,
            pass: m.peak_count == count,
        });
    }
    report.assertions = out;
    Ok(())
}

/// Builds the comparison report for `compare` arguments.
pub fn build_report(args: &CompareArgs) -> Result<ComparisonReport> {
    let base = base_spec(&args.ensemble)?;
    if args.methods.len() < 2 {
        return Err(Error::domain("compare needs at least two curves"));
    }
    let reqs = args
        .methods
        .iter()
        .map(|t| parse_curve_request(t, &base))
        .collect::<Result<Vec<_>>>()?;
    let has_edge = reqs.iter().any(|r| r.method == Method::Edge);
    let scaling = scaling_for(if has_edge { Method::Edge } else { Method::Exact }, base.family, args.common.scaling)?;
    for r in &reqs {
        scaling_for(r.method, base.family, Some(match scaling {
            Scaling::Raw => ScalingArg::Raw,
            Scaling::BulkHermite | Scaling::BulkLaguerre => ScalingArg::Bulk,
            _ => ScalingArg::Edge,
        }))?;
    }
    let mut grid = parse_grid(args.common.grid.as_deref().unwrap_or(default_grid(scaling)))?;
    if reqs.iter().any(|r| r.method == Method::Bulk) {
        grid = clip_to_band(base.family, grid)?;
    }
    let curves = reqs
        .iter()
        .map(|r| {
            let c = compute_curve(r, grid.clone(), scaling, &args.common)?;
            Ok(CurveReport { label: r.label.clone(), method: r.method, spec: r.spec, values: c.values })
        })
        .collect::<Result<Vec<_>>>()?;
    let range = match &args.linf_range {
        Some(s) => parse_range(s)?,
        None => (f64::NEG_INFINITY, f64::INFINITY),
    };
    let mut report = ComparisonReport::new(base, scaling, grid, curves, range);
    evaluate_assertions(&mut report, args)?;
    Ok(report)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let report = build_report(args)?;
    write_output(&args.output, &(report.to_json()? + "\n"))?;
    if let Some(path) = &args.csv {
        write_output(&Some(path.clone()), &report.to_csv())?;
    }
    let failed: Vec<_> = report.assertions.iter().filter(|a| !a.pass).collect();
    for f in &failed {
        eprintln!("fail: {} = {} (limit {})", f.name, f.value, f.limit);
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_TOLERANCE })
}

/// Turns a JSON config object into long flags inserted after the subcommand.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let (path, rest) = match pos {
        Some(i) if i + 1 < args.len() => {
            let mut rest = args.clone();
            let path = rest.remove(i + 1);
            rest.remove(i);
            (Some(PathBuf::from(path)), rest)
        }
        _ => match args.iter().position(|a| a.to_string_lossy().starts_with("--config=")) {
            Some(i) => {
                let mut rest = args.clone();
                let flag = rest.remove(i);
                let p = flag.to_string_lossy()["--config=".len()..].to_string();
                (Some(PathBuf::from(p)), rest)
            }
            None => (None, args),
        },
    };
    let Some(path) = path else { return Ok(rest) };
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::domain("config file must hold a JSON object"))?;
    let mut flags: Vec<OsString> = Vec::new();
    for (k, v) in obj {
        let flag = OsString::from(format!("--{}", k.replace('_', "-")));
        match v {
            serde_json::Value::Bool(true) => flags.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => flags.extend([flag, s.into()]),
            serde_json::Value::Number(n) => flags.extend([flag, n.to_string().into()]),
            serde_json::Value::Array(items) if k == "assert_peaks" || k == "assert-peaks" => {
                for it in items {
                    let s = it.as_str().map(str::to_string).unwrap_or_else(|| it.to_string());
                    flags.extend([flag.clone(), s.into()]);
                }
            }
            serde_json::Value::Array(items) => {
                let joined = items
                    .iter()
                    .map(|it| it.as_str().map(str::to_string).unwrap_or_else(|| it.to_string()))
                    .collect::<Vec<_>>()
                    .join(",");
                flags.extend([flag, joined.into()]);
            }
            serde_json::Value::Object(_) => flags.extend([flag, v.to_string().into()]),
        }
    }
    let sub = rest
        .iter()
        .position(|a| a == "density" || a == "compare")
        .ok_or_else(|| Error::domain("--config needs a subcommand"))?;
    let mut out = rest[..=sub].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[sub + 1..]);
    Ok(out)
}

fn error_line(e: &Error) -> String {
    format!("error: kind={} message={}", e.kind(), e.to_string().replace('\n', " "))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let work = || match &cli.command {
        Command::Density(a) => cmd_density(a),
        Command::Compare(a) => cmd_compare(a),
    };
    let result = match cli.threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Error::Numeric(format!("thread pool: {e}"))),
        },
        _ => work(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            EXIT_USAGE
        }
    }
}
