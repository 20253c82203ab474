//! The `confquant` command line: JSON on stdout, summaries on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::coefficients::{self, classify_resonance, resonance_report, Weights};
use crate::curved::{
    quantize_curved_with, quantize_geodesic, resonant_laplacians, LaplacianCase, PointOperator,
    SymbolJet2,
};
use crate::error::{Error, Result};
use crate::flat::{quantize, QuantizationParams, Symbol2};
use crate::geometry::{self, ConformalFactorJet, DiffeoJet1D, MetricJet2};
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::random;
use crate::scalar::{format_rational, int, parse_rational, rat, Rational};
use crate::verify::{run_suite, Suite, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "confquant", version, about = "Exact conformally equivariant quantization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the coefficients of the quantization map at given weights.
    Coeffs(CoeffsArgs),
    /// Quantize a symbol on a flat or curved background.
    Quantize(QuantizeArgs),
    /// Print the resonances and admissible weights of a dimension.
    Resonances(ResonancesArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// List the named example operators and background jets.
    Examples(ExamplesArgs),
}

#[derive(Debug, Args)]
struct WeightArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
}

impl WeightArgs {
    fn weights(&self, n_hint: Option<usize>) -> Result<Weights> {
        let (Some(l), Some(m)) = (&self.lambda, &self.mu) else {
            return Err(Error::Parse("--lambda and --mu are required".into()));
        };
        let n = self.n.or(n_hint).or(self.p.map(|p| p + self.q.unwrap_or(0)));
        let Some(n) = n else {
            return Err(Error::Parse("--n (or --p/--q) is required".into()));
        };
        let q = self.q.unwrap_or(0);
        let p = self.p.unwrap_or(n.saturating_sub(q));
        if p + q != n {
            return Err(Error::Parse(format!("--p {p} and --q {q} do not add up to --n {n}")));
        }
        Weights::new(p, q, parse_rational(l)?, parse_rational(m)?)
    }
}

#[derive(Debug, Args)]
struct CoeffsArgs {
    #[command(flatten)]
    weights: WeightArgs,
    /// Value of the designated free parameter at a resonance.
    #[arg(long, allow_hyphen_values = true)]
    free_value: Option<String>,
    /// Pin resonant families by formal self-adjointness (needs lambda + mu = 1).
    #[arg(long)]
    pin: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Flat,
    Curved,
}

#[derive(Debug, Args)]
struct QuantizeArgs {
    #[arg(long, value_enum, default_value = "flat")]
    mode: Mode,
    /// Symbol file: a polynomial symbol for flat mode, symbol jets for curved mode.
    #[arg(long)]
    symbol: Option<PathBuf>,
    #[arg(long)]
    metric_jets: Option<PathBuf>,
    /// Conformally flat presentation `g = F^{-1} g0`: {"factor": {F, dF, ddF}, "g0": [[..]]}.
    #[arg(long)]
    presentation: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    free_value: Option<String>,
    /// Quantize the geodesic Hamiltonian of the metric instead of a symbol file.
    #[arg(long)]
    geodesic: bool,
    /// A named resonant Laplacian: yamabe, laplace, new or sturm_liouville.
    #[arg(long)]
    example: Option<String>,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Debug, Args)]
struct ResonancesArgs {
    #[arg(long)]
    n: usize,
    /// Classify a single shift instead of listing every resonance.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Also solve the system with lambda as an unknown at each resonance.
    #[arg(long)]
    lambda_free: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_degree: Option<u32>,
}

#[derive(Debug, Args)]
struct ExamplesArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Print the jets of a named background: sphere2, sphere3 or hyperbolic2.
    #[arg(long)]
    jets: Option<String>,
}

/// Outcome of a command: JSON for stdout, a summary for stderr, an exit code.
struct Output {
    json: serde_json::Value,
    summary: String,
    code: i32,
}

impl Output {
    fn ok(json: serde_json::Value, summary: impl Into<String>) -> Self {
        Output {
            json,
            summary: summary.into(),
            code: 0,
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::UnknownVariable(_)
        | Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::UnexpectedMomentum(_) => 2,
        Error::Inadmissible { .. } => 3,
        Error::Unresolved(_) | Error::Resonant { .. } => 4,
        Error::PresentationRequired(_) => 5,
        _ => 1,
    }
}

/// Runs the command line with explicit arguments and streams; returns the exit code.
pub fn run_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(o) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("serializable"));
            let _ = writeln!(err, "{}", o.summary);
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point used by the binary.
pub fn main_with(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn dispatch(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Coeffs(a) => coeffs(&a),
        Command::Quantize(a) => quantize_cmd(&a),
        Command::Resonances(a) => resonances(&a),
        Command::Verify(a) => verify(&a),
        Command::Examples(a) => examples(&a),
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn opt_rational(s: &Option<String>) -> Result<Option<Rational>> {
    s.as_deref().map(parse_rational).transpose()
}

fn coeffs(a: &CoeffsArgs) -> Result<Output> {
    let w = a.weights.weights(None)?;
    let delta = w.delta();
    let resonance = classify_resonance(w.n, &delta)?;
    let free = opt_rational(&a.free_value)?;
    let pin = a.pin && resonance.resonant;
    let set = match free {
        Some(v) if pin && &w.lambda + &w.mu == int(1) => {
            QuantizationParams::new(w.clone()).with_free_value(v).coefficients()?
        }
        free => coefficients::coefficients(&w, free, pin)?,
    };
    let open: Vec<&str> = set
        .free_parameters
        .iter()
        .filter(|p| p.value.is_none())
        .map(|p| p.name.as_str())
        .collect();
    let summary = if resonance.resonant {
        format!(
            "{w}: resonant delta = {}; free parameters: {}",
            format_rational(&delta),
            if open.is_empty() { "none".to_string() } else { open.join(", ") }
        )
    } else {
        format!("{w}: generic weights")
    };
    Ok(Output::ok(
        json!({ "coefficients": to_json(&set), "resonance": to_json(&resonance) }),
        summary,
    ))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A symbol file in text form: `{"symbol": "xi1^2 + xi2^2", "weights": {...}}`.
#[derive(Deserialize)]
struct SymbolText {
    symbol: String,
    weights: Weights,
}

fn read_symbol(path: &Path) -> Result<Symbol2> {
    let text = read_file(path)?;
    if let Ok(s) = serde_json::from_str::<Symbol2>(&text) {
        return Ok(s);
    }
    let t: SymbolText = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Symbol2::new(Poly::parse(t.weights.n, &t.symbol)?, t.weights)
}

/// A conformally flat presentation `g = F^{-1} g0` with constant `g0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationFile {
    pub factor: ConformalFactorJet,
    /// Defaults to the identity.
    #[serde(default)]
    pub g0: Option<Vec<Vec<String>>>,
}

impl PresentationFile {
    pub fn new(factor: ConformalFactorJet, g0: &Matrix) -> Self {
        let g0 = g0.iter().map(|r| r.iter().map(format_rational).collect()).collect();
        PresentationFile { factor, g0: Some(g0) }
    }

    pub fn base(&self) -> Result<Matrix> {
        match &self.g0 {
            None => Ok(linalg::identity(self.factor.n())),
            Some(rows) => rows.iter().map(|r| r.iter().map(|x| parse_rational(x)).collect()).collect(),
        }
    }

    pub fn metric(&self) -> Result<MetricJet2> {
        MetricJet2::presentation(&self.factor, &self.base()?)
    }
}

fn background(a: &QuantizeArgs) -> Result<(Option<MetricJet2>, Option<ConformalFactorJet>)> {
    let pres: Option<PresentationFile> = a.presentation.as_deref().map(read_json).transpose()?;
    let metric = match (&a.metric_jets, &pres) {
        (Some(path), _) => Some(read_json::<MetricJet2>(path)?),
        (None, Some(p)) => Some(p.metric()?),
        (None, None) => None,
    };
    Ok((metric, pres.map(|p| p.factor)))
}

fn quantize_cmd(a: &QuantizeArgs) -> Result<Output> {
    let hbar = opt_rational(&a.hbar)?;
    if let Some(name) = &a.example {
        return laplacian_example(a, name, hbar.unwrap_or_else(|| int(1)));
    }
    match a.mode {
        Mode::Flat => {
            let path = a.symbol.as_deref().ok_or_else(|| Error::Parse("--symbol is required".into()))?;
            let s = read_symbol(path)?;
            let mut params = QuantizationParams::new(s.weights().clone());
            if let Some(h) = hbar {
                params = params.with_hbar(h);
            }
            if let Some(v) = opt_rational(&a.free_value)? {
                params = params.with_free_value(v);
            }
            let op = quantize(&params, &s)?;
            Ok(Output::ok(to_json(&op), format!("flat quantization at {}", s.weights())))
        }
        Mode::Curved => {
            let (metric, pres) = background(a)?;
            let m = metric.ok_or_else(|| Error::Parse("--metric-jets or --presentation is required".into()))?;
            let n = m.n();
            if a.geodesic {
                let w = a.weights.weights(Some(n))?;
                let h = hbar.unwrap_or_else(|| int(1));
                let op = quantize_geodesic(&w, &m, &h)?;
                let c = coefficients::c_coefficient(&w).expect("non-resonant");
                let r = geometry::curvature_from_jets(&m)?.scalar;
                return Ok(Output::ok(
                    json!({ "operator": to_json(&op), "C": format_rational(&c), "R": format_rational(&r) }),
                    format!("geodesic Hamiltonian at {w}: C = {}", format_rational(&c)),
                ));
            }
            let path = a.symbol.as_deref().ok_or_else(|| Error::Parse("--symbol is required".into()))?;
            let s: SymbolJet2 = read_json(path)?;
            if n <= 2 && pres.is_none() && !s.p2.iter().flatten().all(num_traits::Zero::is_zero) {
                return Err(Error::PresentationRequired(n));
            }
            let mut params = QuantizationParams::new(s.weights.clone());
            if let Some(v) = opt_rational(&a.free_value)? {
                params = params.with_free_value(v);
            }
            let set = params.coefficients()?;
            let op = quantize_curved_with(&set, &m, &s, pres.as_ref(), hbar.as_ref())?;
            Ok(Output::ok(to_json(&op), format!("curved quantization at {}", s.weights)))
        }
    }
}

fn default_background(case: LaplacianCase, n: usize) -> Result<(MetricJet2, Option<ConformalFactorJet>)> {
    if case == LaplacianCase::SturmLiouville {
        let fp = DiffeoJet1D::exponential(int(1))?.presentation();
        let m = MetricJet2::presentation(&fp, &linalg::identity(1))?;
        return Ok((m, Some(fp)));
    }
    let point: Vec<Rational> = (0..n).map(|i| rat(1, i as i64 + 2)).collect();
    Ok((geometry::examples::sphere(&int(1), &point), None))
}

fn laplacian_example(a: &QuantizeArgs, name: &str, hbar: Rational) -> Result<Output> {
    let case = LaplacianCase::parse(name)?;
    let (metric, pres) = background(a)?;
    let n = match (&metric, a.weights.n) {
        (Some(m), _) => m.n(),
        (None, Some(n)) => n,
        (None, None) if case == LaplacianCase::SturmLiouville => 1,
        (None, None) => return Err(Error::Parse("--n is required without a background".into())),
    };
    let (lambda, mu) = case.weights(n)?;
    let (m, pres) = match metric {
        Some(m) => (m, pres),
        None => default_background(case, n)?,
    };
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    let op: PointOperator = resonant_laplacians(case, &m, pres.as_ref(), &hbar)?;
    let scalar = case.scalar_coefficient(n).ok().map(|c| format_rational(&c));
    let summary = match &scalar {
        Some(c) => format!("{} Laplacian, n = {n}: scalar coefficient {c}", case.name()),
        None => format!("{} operator, n = {n}: Schwarzian term", case.name()),
    };
    Ok(Output::ok(
        json!({
            "case": case.name(),
            "n": n,
            "lambda": format_rational(&lambda),
            "mu": format_rational(&mu),
            "scalar_coefficient": scalar,
            "operator": to_json(&op),
        }),
        summary,
    ))
}

fn resonances(a: &ResonancesArgs) -> Result<Output> {
    if let Some(d) = &a.delta {
        let delta = parse_rational(d)?;
        let slice = classify_resonance(a.n, &delta)?;
        let mut v = to_json(&slice);
        if a.lambda_free {
            v["lambda_free"] = lambda_free_json(a.n, &delta)?;
        }
        let summary = format!("n = {}, delta = {}: resonant = {}", a.n, d, slice.resonant);
        return Ok(Output::ok(v, summary));
    }
    let report = resonance_report(a.n)?;
    let mut v = to_json(&report);
    if a.lambda_free {
        let mut solved = serde_json::Map::new();
        for d in coefficients::resonant_deltas(a.n) {
            solved.insert(format_rational(&d), lambda_free_json(a.n, &d)?);
        }
        v["lambda_free"] = serde_json::Value::Object(solved);
    }
    let summary = format!("n = {}: resonances {}", a.n, report.resonant_deltas.join(", "));
    Ok(Output::ok(v, summary))
}

fn lambda_free_json(n: usize, delta: &Rational) -> Result<serde_json::Value> {
    Ok(match coefficients::solve_lambda_free(n, delta)? {
        coefficients::LambdaFreeSolution::Generic { exceptions } => json!({
            "generic": true,
            "exceptions": exceptions.iter().map(format_rational).collect::<Vec<_>>(),
        }),
        coefficients::LambdaFreeSolution::Finite(v) => json!({
            "generic": false,
            "lambdas": v.iter().map(|(l, _)| format_rational(l)).collect::<Vec<_>>(),
        }),
    })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let suite: Suite = a.suite.parse()?;
    let opts = VerifyOptions {
        n: a.n,
        seed: a.seed.unwrap_or_else(random::seed_from_env),
        max_degree: a.max_degree,
    };
    let report = run_suite(suite, &opts)?;
    let mut summary = format!(
        "{}: {} cases, {} failures, seed {}, {:.2}s",
        report.suite,
        report.cases_run,
        report.failures.len(),
        report.seed,
        report.elapsed_seconds
    );
    for note in &report.notes {
        summary.push_str(&format!("\n  note: {note}"));
    }
    for f in report.failures.iter().take(10) {
        summary.push_str(&format!("\n  FAIL {}: {}", f.case_id, f.residual));
    }
    let code = if report.passed() { 0 } else { 1 };
    Ok(Output {
        json: to_json(&report),
        summary,
        code,
    })
}

/// A named background with exact jets.
pub fn named_background(name: &str) -> Result<(MetricJet2, Option<PresentationFile>)> {
    let half = rat(1, 2);
    let third = rat(1, 3);
    match name {
        "sphere2" => {
            let f = geometry::examples::sphere_factor(&int(1), &[half.clone(), third.clone()]);
            let p = PresentationFile::new(f.reciprocal(), &linalg::identity(2));
            Ok((p.metric()?, Some(p)))
        }
        "sphere3" => Ok((geometry::examples::sphere(&int(1), &[half, third, rat(1, 4)]), None)),
        "hyperbolic2" => {
            let f = geometry::examples::hyperbolic_factor(&[int(0), int(2)]);
            let p = PresentationFile::new(f.reciprocal(), &linalg::identity(2));
            Ok((p.metric()?, Some(p)))
        }
        other => Err(Error::Parse(format!(
            "unknown background `{other}`; expected sphere2, sphere3 or hyperbolic2"
        ))),
    }
}

fn examples(a: &ExamplesArgs) -> Result<Output> {
    if let Some(name) = &a.jets {
        let (m, p) = named_background(name)?;
        let r = geometry::curvature_from_jets(&m)?.scalar;
        return Ok(Output::ok(
            json!({ "name": name, "metric_jets": to_json(&m), "presentation": p.map(|p| to_json(&p)), "R": format_rational(&r) }),
            format!("{name}: scalar curvature {}", format_rational(&r)),
        ));
    }
    let dims: Vec<usize> = a.n.map_or_else(|| (1..=6).collect(), |n| vec![n]);
    let mut rows = Vec::new();
    for n in dims {
        for case in LaplacianCase::ALL {
            let Ok((l, mu)) = case.weights(n) else { continue };
            rows.push(json!({
                "case": case.name(),
                "n": n,
                "lambda": format_rational(&l),
                "mu": format_rational(&mu),
                "scalar_coefficient": case.scalar_coefficient(n).ok().map(|c| format_rational(&c)),
            }));
        }
        if n >= 2 {
            let w = Weights::euclidean(n, rat(1, 2), rat(1, 2));
            rows.push(json!({
                "case": "half_density_geodesic",
                "n": n,
                "lambda": "1/2",
                "mu": "1/2",
                "scalar_coefficient": coefficients::c_coefficient(&w).map(|c| format_rational(&c)),
            }));
        }
    }
    let backgrounds = ["sphere2", "sphere3", "hyperbolic2"];
    Ok(Output::ok(
        json!({ "operators": rows, "backgrounds": backgrounds }),
        "named operators; use `quantize --example <case> --n <n>` or `examples --jets <name>`",
    ))
}
