//! Command-line front end.
//!
//! Every command prints one JSON document on stdout. Exit codes: 0 success,
//! 1 verification failure, 2 usage error, 3 I/O error.
//!
//! Settings are analyzer directions: a named axis (`x`, `-z`), an angle in
//! degrees measured from +z towards +x in the x–z plane (`45`), or explicit
//! components (`1,0,1`, normalized on parse).
//!
//! `--config FILE` reads `key=value` lines (keys are long flag names, `#`
//! starts a comment); flags given on the command line take precedence.

mod verify;

use std::ffi::OsString;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::experiment::{run_trials_with, EventWriter, RunSummary, TrialConfig};
use crate::geometry::UnitVector;
use crate::inequalities::{
    chsh_from, chsh_report, leggett_scan, noncontextual_control, InequalityReport, LabeledCorrelation,
    SettingsPlan, TwoPlaneBound,
};
use crate::ks_single::TieBreak;
use crate::ks_two::{correlation_closed, correlation_numeric, SourceModel};
use crate::qm::{bell_state, correlation_tensor, BellState, CorrelationTensor};
use crate::quadrature::{McConfig, NumericMethod};

pub use verify::{run_verify, Check, VerifyOptions, VerifyReport};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_N_THETA: usize = 512;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "contextual-hv", version, about = "Contextual hidden-variable model: correlations, inequalities, event simulation")]
#[command(args_override_self = true)]
pub struct Cli {
    /// key=value file of default flag values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suites of all modules
    Verify(VerifyArgs),
    /// Model correlation (closed form and numeric) next to the QM value
    Correlate(CorrelateArgs),
    /// Leggett-type scan or CHSH value
    Inequality(InequalityArgs),
    /// Event-level simulation; writes events.csv and summary.json with --out
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// RNG seed
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Common {
    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct SourceArgs {
    /// Bell state: singlet (psi-), psi+, phi+, phi-
    #[arg(long)]
    pub state: Option<String>,
    /// Correlation tensor: "0", a scalar s (s·I), 3 diagonal or 9 row-major entries
    #[arg(long, allow_hyphen_values = true)]
    pub tensor: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Subsampled suite with the same report schema
    #[arg(long)]
    pub quick: bool,
    /// Polar grid resolution for the quadrature checks
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Debug: analytic Θ(0)=1 tie-break in the equator completeness check
    #[arg(long)]
    pub heaviside_tie: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Grid,
    Mc,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Alice's analyzer
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Bob's analyzer
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, value_enum, default_value_t = Method::Grid)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_N_THETA)]
    pub n_theta: usize,
    /// Monte Carlo samples (accepts 1e6)
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_MC_SAMPLES)]
    pub trials: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InequalityKind {
    Leggett,
    Chsh,
}

#[derive(Debug, Args)]
pub struct InequalityArgs {
    #[arg(value_enum)]
    pub kind: InequalityKind,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Use the setting-independent control distribution instead of the model
    #[arg(long)]
    pub control: bool,
    /// Scan start, degrees
    #[arg(long, default_value_t = 1.0)]
    pub from: f64,
    /// Scan end, degrees (inclusive)
    #[arg(long, default_value_t = 89.0)]
    pub to: f64,
    /// Scan step, degrees
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub a: String,
    #[arg(long, allow_hyphen_values = true, default_value = "90")]
    pub a_prime: String,
    #[arg(long, allow_hyphen_values = true, default_value = "45")]
    pub b: String,
    #[arg(long, allow_hyphen_values = true, default_value = "135")]
    pub b_prime: String,
    /// CHSH only: also estimate the value from this many simulated events per setting
    #[arg(long, value_parser = parse_count)]
    pub trials: Option<u64>,
    /// Write the per-row CSV here
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlanKind {
    Single,
    Chsh,
    Leggett,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = PlanKind::Single)]
    pub plan: PlanKind,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub a: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub b: String,
    #[arg(long, allow_hyphen_values = true, default_value = "90")]
    pub a_prime: String,
    #[arg(long, allow_hyphen_values = true, default_value = "135")]
    pub b_prime: String,
    /// Leggett plan angle, degrees
    #[arg(long, default_value_t = 18.0)]
    pub phi: f64,
    /// Trials per setting pair (accepts 1e6)
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    /// Output directory for events.csv and summary.json
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::MalformedRow { .. } => CliError::Io(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Integer count, also in scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if !(x >= 0.0) || x.fract() != 0.0 || x > 9.0e15 {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    Ok(x as u64)
}

/// Analyzer direction from a named axis, an x–z angle in degrees, or
/// comma-separated components.
pub fn parse_direction(s: &str) -> std::result::Result<UnitVector, String> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c.is_ascii_alphabetic()) && !rest.is_empty() => (-1.0, rest),
        _ => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let named = match body.to_ascii_lowercase().as_str() {
        "x" => Some(UnitVector::X),
        "y" => Some(UnitVector::Y),
        "z" => Some(UnitVector::Z),
        _ => None,
    };
    if let Some(v) = named {
        return Ok(if sign < 0.0 { -v } else { v });
    }
    if t.contains(',') {
        let parts: Vec<f64> = t
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format!("'{s}': components must be numbers"))?;
        if parts.len() != 3 {
            return Err(format!("'{s}': expected 3 components"));
        }
        return UnitVector::new(parts[0], parts[1], parts[2]).map_err(|e| e.to_string());
    }
    let deg: f64 = t
        .parse()
        .map_err(|_| format!("'{s}' is not an axis name, angle in degrees, or x,y,z components"))?;
    if !deg.is_finite() {
        return Err(format!("'{s}' is not a finite angle"));
    }
    Ok(UnitVector::in_xz_plane(deg.to_radians()))
}

pub fn parse_tensor(s: &str) -> std::result::Result<CorrelationTensor, String> {
    let vals: Vec<f64> = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
        .map(str::parse::<f64>)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("tensor '{s}': entries must be numbers"))?;
    let t = match vals.len() {
        1 => CorrelationTensor::diagonal([vals[0]; 3]),
        3 => CorrelationTensor::diagonal([vals[0], vals[1], vals[2]]),
        9 => CorrelationTensor::new([
            [vals[0], vals[1], vals[2]],
            [vals[3], vals[4], vals[5]],
            [vals[6], vals[7], vals[8]],
        ]),
        n => return Err(format!("tensor '{s}': expected 1, 3 or 9 entries, found {n}")),
    };
    t.map_err(|e| e.to_string())
}

/// The model source and its QM oracle for `--state` / `--tensor`.
struct Source {
    name: String,
    model: SourceModel,
    tensor: CorrelationTensor,
}

impl Source {
    fn from_args(args: &SourceArgs) -> CliResult<Self> {
        if let Some(t) = &args.tensor {
            let tensor = parse_tensor(t).map_err(CliError::Usage)?;
            return Ok(Source {
                name: "tensor".into(),
                model: SourceModel::Tensor(tensor),
                tensor,
            });
        }
        let kind: BellState = args.state.as_deref().unwrap_or("singlet").parse()?;
        let tensor = correlation_tensor(&bell_state(kind));
        let model = match kind {
            BellState::PsiMinus => SourceModel::Singlet,
            _ => SourceModel::Tensor(tensor),
        };
        Ok(Source {
            name: kind.name().into(),
            model,
            tensor,
        })
    }

    fn qm(&self, a: UnitVector, b: UnitVector) -> f64 {
        self.tensor.correlation(a, b)
    }
}

fn direction(s: &str, flag: &str) -> CliResult<UnitVector> {
    parse_direction(s).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<(Value, bool)> {
    let opts = VerifyOptions {
        quick: args.quick,
        seed: args.common.seed,
        workers: args.common.workers(),
        n_theta: args.n_theta,
        tie: if args.heaviside_tie {
            TieBreak::Heaviside
        } else {
            TieBreak::Dichotomic
        },
    };
    let report = run_verify(&opts)?;
    let passed = report.passed;
    Ok((to_value(&report)?, passed))
}

fn cmd_correlate(args: &CorrelateArgs) -> CliResult<Value> {
    let src = Source::from_args(&args.source)?;
    let a = direction(&args.a, "a")?;
    let b = direction(&args.b, "b")?;
    let f = src.model.distribution(a, b);
    let closed = correlation_closed(&f, a, b);
    let numeric = match args.method {
        Method::Closed => json!({ "method": "closed", "value": closed, "std_error": 0.0 }),
        Method::Grid => to_value(&correlation_numeric(&f, a, b, NumericMethod::Grid { n_theta: args.n_theta })?)?,
        Method::Mc => {
            let cfg = McConfig::new(args.trials as usize, args.common.seed).with_workers(args.common.workers());
            let mut v = to_value(&correlation_numeric(&f, a, b, NumericMethod::MonteCarlo(cfg))?)?;
            v["samples"] = json!(args.trials);
            v["seed"] = json!(args.common.seed);
            v
        }
    };
    Ok(json!({
        "source": src.name,
        "contextual": src.model.is_contextual(),
        "a": a,
        "b": b,
        "mass": f.mass(),
        "closed": closed,
        "numeric": numeric,
        "qm": src.qm(a, b),
    }))
}

#[derive(Serialize)]
struct ReportRow<'a> {
    phi_deg: Option<f64>,
    #[serde(flatten)]
    report: &'a InequalityReport,
}

fn scan_angles(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || from > to {
        return Err(CliError::Usage(format!(
            "empty scan range: from {from} to {to} step {step}"
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    let phis: Vec<f64> = (0..n).map(|k| (from + k as f64 * step).to_radians()).collect();
    if phis.iter().any(|&p| !(0.0..=PI + 1e-12).contains(&p)) {
        return Err(CliError::Usage("Leggett scan angles must lie in [0, 180] degrees".into()));
    }
    Ok(phis.into_iter().map(|p| p.min(PI)).collect())
}

fn cmd_inequality(args: &InequalityArgs) -> CliResult<Value> {
    let src = Source::from_args(&args.source)?;
    let control = noncontextual_control();
    let source_name = if args.control {
        "control".to_string()
    } else {
        src.name.clone()
    };
    let model = |a: UnitVector, b: UnitVector| {
        if args.control {
            correlation_closed(&control, a, b)
        } else {
            src.model.correlation(a, b)
        }
    };
    match args.kind {
        InequalityKind::Leggett => {
            let phis = scan_angles(args.from, args.to, args.step)?;
            let scan = leggett_scan(&model, &phis, &TwoPlaneBound)?;
            if let Some(path) = &args.out {
                write_report_csv(path, &scan.reports)?;
            }
            let s = &scan.summary;
            let deg = |x: f64| x.to_degrees();
            let rows: Vec<ReportRow> = scan
                .reports
                .iter()
                .map(|r| ReportRow {
                    phi_deg: r.phi.map(deg),
                    report: r,
                })
                .collect();
            Ok(json!({
                "kind": "leggett",
                "source": source_name,
                "bound": scan.bound,
                "reports": rows,
                "summary": {
                    "n_points": s.n_points,
                    "n_violations": s.n_violations,
                    "max_margin": s.max_margin,
                    "phi_at_max_margin_deg": deg(s.phi_at_max_margin),
                    "violation_interval_deg": s.violation_interval.map(|[lo, hi]| [deg(lo), deg(hi)]),
                    "upper_edge_deg": s.upper_edge.map(deg),
                },
            }))
        }
        InequalityKind::Chsh => {
            let plan = SettingsPlan::chsh(
                direction(&args.a, "a")?,
                direction(&args.a_prime, "a-prime")?,
                direction(&args.b, "b")?,
                direction(&args.b_prime, "b-prime")?,
            );
            let report = chsh_report(&model, &plan);
            if let Some(path) = &args.out {
                write_report_csv(path, std::slice::from_ref(&report))?;
            }
            let qm = chsh_report(&|a, b| src.qm(a, b), &plan).lhs;
            let simulated = match args.trials {
                Some(n) => {
                    let source = if args.control {
                        SourceModel::Fixed(control.clone())
                    } else {
                        src.model.clone()
                    };
                    let cfg = TrialConfig::new(n, args.common.seed).with_workers(args.common.workers());
                    let sums = run_trials_with(&source, &plan, cfg, |_| Ok(()))?;
                    Some(simulated_chsh(&sums))
                }
                None => None,
            };
            Ok(json!({
                "kind": "chsh",
                "source": source_name,
                "local_bound": 2.0,
                "report": ReportRow { phi_deg: None, report: &report },
                "qm": qm,
                "simulated": simulated,
            }))
        }
    }
}

fn simulated_chsh(sums: &[RunSummary]) -> Value {
    let corr: Vec<LabeledCorrelation> = sums
        .iter()
        .map(|s| LabeledCorrelation {
            label: s.setting_label.clone(),
            a: s.n_a,
            b: s.n_b,
            value: s.correlation,
        })
        .collect();
    let value = chsh_from(&corr);
    let std_error = sums.iter().map(|s| s.std_error * s.std_error).sum::<f64>().sqrt();
    json!({
        "value": value,
        "std_error": std_error,
        "n_trials_per_setting": sums.first().map_or(0, |s| s.n_trials),
        "seed": sums.first().and_then(|s| s.seed),
        "settings": sums,
    })
}

fn write_report_csv(path: &Path, reports: &[InequalityReport]) -> CliResult<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(Error::Io { path: path.to_path_buf(), source: io }),
        other => CliError::Usage(format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["phi_deg", "lhs", "bound", "margin", "violated"]).map_err(io)?;
    for r in reports {
        let phi = r.phi.map_or(String::new(), |p| format!("{:.16e}", p.to_degrees()));
        w.write_record([
            phi,
            format!("{:.16e}", r.lhs),
            format!("{:.16e}", r.bound),
            format!("{:.16e}", r.margin),
            r.violated.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(Error::Io { path: path.to_path_buf(), source: e }))
}

#[derive(Serialize)]
struct SettingResult<'a> {
    #[serde(flatten)]
    summary: &'a RunSummary,
    expected: f64,
    z_score: f64,
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<Value> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let src = Source::from_args(&args.source)?;
    let plan = match args.plan {
        PlanKind::Single => SettingsPlan::single(direction(&args.a, "a")?, direction(&args.b, "b")?),
        PlanKind::Chsh => SettingsPlan::chsh(
            direction(&args.a, "a")?,
            direction(&args.a_prime, "a-prime")?,
            direction(&args.b, "b")?,
            direction(&args.b_prime, "b-prime")?,
        ),
        PlanKind::Leggett => {
            if !(0.0..=180.0).contains(&args.phi) {
                return Err(CliError::Usage("--phi must lie in [0, 180] degrees".into()));
            }
            SettingsPlan::leggett(args.phi.to_radians())
        }
    };
    let cfg = TrialConfig::new(args.trials, args.common.seed).with_workers(args.common.workers());
    let summaries = match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(Error::Io { path: dir.clone(), source: e }))?;
            let mut writer = EventWriter::create(dir.join("events.csv"))?;
            let sums = run_trials_with(&src.model, &plan, cfg, |r| writer.write(r))?;
            writer.finish()?;
            sums
        }
        None => run_trials_with(&src.model, &plan, cfg, |_| Ok(()))?,
    };
    let results: Vec<SettingResult> = summaries
        .iter()
        .map(|s| {
            let expected = src.model.correlation(s.n_a, s.n_b);
            SettingResult {
                summary: s,
                expected,
                z_score: if s.std_error > 0.0 {
                    (s.correlation - expected) / s.std_error
                } else {
                    0.0
                },
            }
        })
        .collect();
    let value = to_value(&results)?;
    if let Some(dir) = &args.out {
        let path = dir.join("summary.json");
        write_summaries_value(&path, &value)?;
    }
    Ok(value)
}

fn write_summaries_value(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(Error::Io { path: path.to_path_buf(), source: e }))
}

fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Usage(e.to_string()))
}

/// Reads `key=value` lines into `--key value` arguments. Boolean keys take
/// `true`/`false`.
pub fn config_args(path: &Path) -> CliResult<Vec<OsString>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(Error::Io { path: path.to_path_buf(), source: e }))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        let val = v.trim();
        match val {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => out.push(format!("--{key}={val}").into()),
        }
    }
    Ok(out)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Config values go right after the subcommand so that later command-line
/// flags override them.
fn merge_config(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = find_config(&args) else { return Ok(args) };
    let extra = config_args(&path)?;
    let sub = args
        .iter()
        .position(|a| matches!(a.to_str(), Some("verify" | "correlate" | "inequality" | "simulate")));
    let Some(pos) = sub else { return Ok(args) };
    let mut out: Vec<OsString> = args[..=pos].to_vec();
    // `inequality` takes a positional kind that must stay first.
    let mut rest = args[pos + 1..].to_vec();
    if args[pos] == "inequality" && !rest.is_empty() && !rest[0].to_string_lossy().starts_with('-') {
        out.push(rest.remove(0));
    }
    out.extend(extra);
    out.extend(rest);
    Ok(out)
}

/// Parses `args` (including the program name), runs the command, prints
/// its JSON on stdout and returns the exit code.
pub fn run(args: Vec<OsString>) -> i32 {
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(e) => return report_error(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Correlate(a) => cmd_correlate(a).map(|v| (v, true)),
        Command::Inequality(a) => cmd_inequality(a).map(|v| (v, true)),
        Command::Simulate(a) => cmd_simulate(a).map(|v| (v, true)),
    };
    match result {
        Ok((value, passed)) => {
            match serde_json::to_string_pretty(&value) {
                Ok(s) => println!("{s}"),
                Err(e) => return report_error(CliError::Usage(e.to_string())),
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => report_error(e),
    }
}

fn report_error(e: CliError) -> i32 {
    match e {
        CliError::Usage(m) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        CliError::Io(e) => {
            eprintln!("error: {e}");
            EXIT_IO
        }
    }
}
