//! Command-line front end for the `raman` binary.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 when a
//! numerical computation or invariant check fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::evolution::evolve_covariance;
use crate::ledger::{build_ledger, reference_point};
use crate::model::{initial_state, Beta, ModelParams, Mode};
use crate::photostat::{
    build_distribution_params, choose_truncation, joint_distribution, marginal_state, stokes_distribution_hermite,
    stokes_distribution_legendre, stokes_moments, JOINT_N_MAX_CAP, MARGINAL_N_MAX_CAP,
};
use crate::propagator::GreenFunction;
use crate::validation::{invariant_report, run_validation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const THREADS_ENV: &str = "RAMAN_NUM_THREADS";

const DEFAULT_OMEGA_S: f64 = 1.0;
const DEFAULT_OMEGA_31: f64 = 0.5;
const DEFAULT_KAPPA: f64 = 0.2;
const DEFAULT_BETA: Beta = Beta::Finite(1.0);
const DEFAULT_TIME: f64 = 1.0;
const DEFAULT_JOINT_N_MAX: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "raman", version, about = "Photon and phonon statistics of stimulated Raman scattering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stokes-photon distribution by the Hermite and Legendre routes.
    StokesDist(CommonArgs),
    /// Joint photon-phonon distribution.
    JointDist(CommonArgs),
    /// Cartesian parameter sweep of Stokes moments.
    Sweep(CommonArgs),
    /// Oracle comparison and invariant suite.
    Validate(CommonArgs),
    /// Green function on a coordinate grid.
    Propagator(PropagatorArgs),
    /// Printed closed forms against computed values.
    Ledger(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Stokes frequency: value, comma list, or start:stop:steps.
    #[arg(long, allow_hyphen_values = true)]
    pub omega_s: Option<String>,
    /// Phonon frequency.
    #[arg(long = "omega-31", allow_hyphen_values = true)]
    pub omega_31: Option<String>,
    /// Coupling constant.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Inverse phonon temperature; `inf` for zero temperature.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Time value or comma list.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "time_grid")]
    pub time: Option<String>,
    /// Time grid start:stop:steps.
    #[arg(long)]
    pub time_grid: Option<String>,
    /// Truncation of the Fock index.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON configuration file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps and validation.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PropagatorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial coordinates `x11,x12`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x1_grid")]
    pub x1: Option<String>,
    /// Grid start:stop:steps applied to both initial coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub x1_grid: Option<String>,
    /// Final coordinates `x21,x22`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x2_grid")]
    pub x2: Option<String>,
    /// Grid start:stop:steps applied to both final coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub x2_grid: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A value in the JSON config: number, string list/grid, or array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ConfigValue {
    Num(f64),
    Text(String),
    List(Vec<Value>),
}

impl ConfigValue {
    fn to_spec(&self) -> String {
        match self {
            ConfigValue::Num(v) => format_float(*v),
            ConfigValue::Text(s) => s.clone(),
            ConfigValue::List(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    omega_s: Option<ConfigValue>,
    omega_31: Option<ConfigValue>,
    kappa: Option<ConfigValue>,
    beta: Option<ConfigValue>,
    time: Option<ConfigValue>,
    time_grid: Option<String>,
    n_max: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub omega_s: Vec<f64>,
    pub omega_31: Vec<f64>,
    pub kappa: Vec<f64>,
    pub beta: Vec<Beta>,
    pub times: Vec<f64>,
    pub n_max: Option<usize>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Single parameter point, or a config error if any parameter is a list.
    pub fn single_params(&self) -> CliResult<ModelParams> {
        let one = |name: &str, v: &[f64]| match v {
            [x] => Ok(*x),
            _ => Err(config_err(format!("--{name} takes a single value for this command"))),
        };
        let beta = match self.beta.as_slice() {
            [b] => *b,
            _ => return Err(config_err("--beta takes a single value for this command")),
        };
        ModelParams::new(one("omega-s", &self.omega_s)?, one("omega-31", &self.omega_31)?, one("kappa", &self.kappa)?, beta)
            .map_err(|e| config_err(e.to_string()))
    }
}

/// Parse `start:stop:steps` into `steps + 1` equally spaced points.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(config_err(format!("grid `{spec}` is not start:stop:steps")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| config_err(format!("cannot parse `{s}` in grid `{spec}`")));
    let (start, stop) = (num(start)?, num(stop)?);
    let steps: usize = steps.trim().parse().map_err(|_| config_err(format!("grid steps in `{spec}` must be an integer")))?;
    if steps < 1 {
        return Err(config_err(format!("grid `{spec}` needs steps >= 1")));
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(config_err(format!("grid `{spec}` needs finite start <= stop")));
    }
    Ok((0..=steps).map(|k| start + (stop - start) * k as f64 / steps as f64).collect())
}

/// Parse a single value, a comma list, or a grid.
pub fn parse_values(spec: &str) -> CliResult<Vec<f64>> {
    if spec.contains(':') {
        return parse_grid(spec);
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| config_err(format!("cannot parse `{s}` as a number"))))
        .collect()
}

fn parse_betas(spec: &str) -> CliResult<Vec<Beta>> {
    if spec.contains(':') {
        return parse_grid(spec)?.into_iter().map(|b| Beta::new(b).map_err(|e| config_err(e.to_string()))).collect();
    }
    spec.split(',').map(|s| s.parse::<Beta>().map_err(|e| config_err(e.to_string()))).collect()
}

fn read_config_file(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("invalid config {}: {e}", path.display())))
}

pub fn resolve_config(args: &CommonArgs) -> CliResult<RunConfig> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => ConfigFile::default(),
    };
    let pick = |flag: &Option<String>, file: &Option<ConfigValue>| flag.clone().or_else(|| file.as_ref().map(ConfigValue::to_spec));
    let values = |flag: &Option<String>, file: &Option<ConfigValue>, default: f64| match pick(flag, file) {
        Some(s) => parse_values(&s),
        None => Ok(vec![default]),
    };
    let omega_s = values(&args.omega_s, &file.omega_s, DEFAULT_OMEGA_S)?;
    let omega_31 = values(&args.omega_31, &file.omega_31, DEFAULT_OMEGA_31)?;
    let kappa = values(&args.kappa, &file.kappa, DEFAULT_KAPPA)?;
    let beta = match pick(&args.beta, &file.beta) {
        Some(s) => parse_betas(&s)?,
        None => vec![DEFAULT_BETA],
    };

    // command-line time flags win over both config time keys
    let times = if let Some(g) = &args.time_grid {
        parse_grid(g)?
    } else if let Some(t) = &args.time {
        parse_values(t)?
    } else if let Some(g) = &file.time_grid {
        parse_grid(g)?
    } else if let Some(t) = &file.time {
        parse_values(&t.to_spec())?
    } else {
        vec![DEFAULT_TIME]
    };
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(config_err("times must be finite and >= 0"));
    }
    for (name, v) in [("omega-s", &omega_s), ("omega-31", &omega_31), ("kappa", &kappa)] {
        if v.is_empty() {
            return Err(config_err(format!("--{name} is empty")));
        }
    }
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(config_err("--threads must be >= 1"));
    }
    Ok(RunConfig {
        omega_s,
        omega_31,
        kappa,
        beta,
        times,
        n_max: args.n_max.or(file.n_max),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
        out: args.out.clone().or(file.out),
        threads,
    })
}

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

/// A table of named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) if v.is_nan() => Value::Null,
            Cell::Float(v) => json!(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl Table {
    fn new(headers: Vec<&'static str>) -> Self {
        Self { headers, rows: Vec::new() }
    }

    fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| config_err(format!("csv encoding failed: {e}"));
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| config_err(format!("csv encoding failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| config_err(e.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.to_json())).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Result of a command before serialization.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: Value,
    pub rows: Table,
    /// Second CSV table, separated from the first by a blank line.
    pub footer: Option<(&'static str, Table)>,
    pub invariant_report: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Csv => {
                let mut out = self.rows.to_csv()?;
                if let Some((_, footer)) = &self.footer {
                    out.push('\n');
                    out.push_str(&footer.to_csv()?);
                }
                Ok(out)
            }
            Format::Json => {
                let mut obj = serde_json::Map::new();
                obj.insert("config".into(), self.config.clone());
                obj.insert("rows".into(), self.rows.to_json());
                if let Some((key, footer)) = &self.footer {
                    obj.insert((*key).into(), footer.to_json());
                }
                obj.insert("invariant_report".into(), self.invariant_report.clone());
                serde_json::to_string_pretty(&Value::Object(obj))
                    .map(|s| s + "\n")
                    .map_err(|e| config_err(e.to_string()))
            }
        }
    }
}

/// Write to `path` through a temporary file in the same directory and an
/// atomic rename, or to stdout.
pub fn write_output(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| config_err(format!("cannot write stdout: {e}")))
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .map_err(|e| config_err(format!("cannot create temporary file in {}: {e}", dir.display())))?;
            tmp.write_all(contents.as_bytes()).map_err(|e| config_err(format!("cannot write {}: {e}", p.display())))?;
            tmp.persist(p).map_err(|e| config_err(format!("cannot write {}: {e}", p.display())))?;
            Ok(())
        }
    }
}

fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

fn pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let env = std::env::var(THREADS_ENV).ok();
    let from_env = match env {
        Some(s) => Some(s.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| config_err(format!("{THREADS_ENV} must be a positive integer")))?),
        None => None,
    };
    let n = threads.or(from_env).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| config_err(e.to_string()))
}

pub fn cmd_stokes_dist(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.single_params()?;
    if let Some(n) = cfg.n_max {
        if n > MARGINAL_N_MAX_CAP {
            return Err(config_err(format!("--n-max must be <= {MARGINAL_N_MAX_CAP}")));
        }
    }
    let mut rows = Table::new(vec!["t", "n", "P_n_hermite", "P_n_legendre", "abs_diff"]);
    let mut moments = Table::new(vec!["t", "mean", "variance"]);
    let mut reports = Vec::new();
    for &t in &cfg.times {
        let state = evolve_covariance(&initial_state(&params), &params, t)?;
        let n_max = match cfg.n_max {
            Some(n) => n,
            None => choose_truncation(&marginal_state(&state, Mode::Photon)?)?,
        };
        let h = stokes_distribution_hermite(&state, n_max)?;
        let l = stokes_distribution_legendre(&state, n_max)?;
        for (n, (a, b)) in h.probs().iter().zip(l.probs()).enumerate() {
            rows.rows.push(vec![Cell::Float(t), Cell::Int(n), Cell::Float(*a), Cell::Float(*b), Cell::Float((a - b).abs())]);
        }
        let m = stokes_moments(&state)?;
        moments.rows.push(vec![Cell::Float(t), Cell::Float(m.mean), Cell::Float(m.variance)]);
        reports.push(json!({ "t": t, "report": invariant_report(&params, t)?, "tail_bound": h.tail_bound() }));
    }
    Ok(Report { config: config_json(cfg), rows, footer: Some(("moments", moments)), invariant_report: Value::Array(reports) })
}

pub fn cmd_joint_dist(cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.single_params()?;
    let n_max = cfg.n_max.unwrap_or(DEFAULT_JOINT_N_MAX);
    if n_max > JOINT_N_MAX_CAP {
        return Err(config_err(format!("--n-max must be <= {JOINT_N_MAX_CAP} for joint-dist")));
    }
    let mut rows = Table::new(vec!["t", "n", "m", "P_nm"]);
    let mut reports = Vec::new();
    for &t in &cfg.times {
        let state = evolve_covariance(&initial_state(&params), &params, t)?;
        let d = joint_distribution(&state, n_max)?;
        for n in 0..=n_max {
            for m in 0..=n_max {
                rows.rows.push(vec![Cell::Float(t), Cell::Int(n), Cell::Int(m), Cell::Float(d.joint(n, m).unwrap_or(0.0))]);
            }
        }
        reports.push(json!({ "t": t, "report": invariant_report(&params, t)?, "tail_bound": d.tail_bound() }));
    }
    Ok(Report { config: config_json(cfg), rows, footer: None, invariant_report: Value::Array(reports) })
}

/// One sweep point: `(omega_s, omega_31, kappa, beta, t)`.
type SweepPoint = (f64, f64, f64, Beta, f64);

fn sweep_points(cfg: &RunConfig) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for &ws in &cfg.omega_s {
        for &wb in &cfg.omega_31 {
            for &k in &cfg.kappa {
                for &b in &cfg.beta {
                    for &t in &cfg.times {
                        out.push((ws, wb, k, b, t));
                    }
                }
            }
        }
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig) -> CliResult<Report> {
    let points = sweep_points(cfg);
    for &(ws, wb, k, b, _) in &points {
        ModelParams::new(ws, wb, k, b).map_err(|e| config_err(e.to_string()))?;
    }
    let pool = pool(cfg.threads)?;
    // collect keeps sweep order regardless of completion order
    let results: Vec<crate::Result<(Vec<Cell>, Value)>> = pool.install(|| {
        points
            .par_iter()
            .map(|&(ws, wb, k, b, t)| {
                let params = ModelParams::new(ws, wb, k, b)?;
                let state = evolve_covariance(&initial_state(&params), &params, t)?;
                let m = stokes_moments(&state)?;
                let p0 = build_distribution_params(&marginal_state(&state, Mode::Photon)?)?.p0();
                let fano = if m.mean > 0.0 { m.variance / m.mean } else { f64::NAN };
                let row = vec![
                    Cell::Float(ws),
                    Cell::Float(wb),
                    Cell::Float(k),
                    Cell::Text(b.to_string()),
                    Cell::Float(t),
                    Cell::Float(m.mean),
                    Cell::Float(m.variance),
                    Cell::Float(p0),
                    Cell::Float(fano),
                ];
                Ok((row, serde_json::to_value(invariant_report(&params, t)?).unwrap_or(Value::Null)))
            })
            .collect()
    });
    let mut rows = Table::new(vec!["omega_s", "omega_31", "kappa", "beta", "t", "mean", "variance", "P_0", "fano"]);
    let mut reports = Vec::new();
    for r in results {
        let (row, rep) = r?;
        rows.rows.push(row);
        reports.push(rep);
    }
    Ok(Report { config: config_json(cfg), rows, footer: None, invariant_report: Value::Array(reports) })
}

/// Run the validation suite; returns the report and whether all checks
/// passed.
pub fn cmd_validate(cfg: &RunConfig) -> CliResult<(Report, bool)> {
    let n_max = cfg.n_max.unwrap_or(crate::oracle::DEFAULT_N_MAX);
    let outcomes = pool(cfg.threads)?.install(|| run_validation(n_max));
    let mut rows = Table::new(vec!["check", "max_deviation", "tolerance", "passed"]);
    for o in &outcomes {
        rows.rows.push(vec![Cell::Text(o.name.clone()), Cell::Float(o.max_deviation), Cell::Float(o.tolerance), Cell::Bool(o.passed)]);
    }
    let all = outcomes.iter().all(|o| o.passed);
    let summary = json!({ "checks": outcomes.len(), "failed": outcomes.iter().filter(|o| !o.passed).count() });
    Ok((Report { config: config_json(cfg), rows, footer: None, invariant_report: summary }, all))
}

fn parse_pair(spec: &str) -> CliResult<[f64; 2]> {
    match parse_values(spec)?.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(config_err(format!("`{spec}` must be two comma-separated numbers"))),
    }
}

fn coordinate_points(point: &Option<String>, grid: &Option<String>) -> CliResult<Vec<[f64; 2]>> {
    match (point, grid) {
        (_, Some(g)) => {
            let axis = parse_grid(g)?;
            Ok(axis.iter().flat_map(|&a| axis.iter().map(move |&b| [a, b])).collect())
        }
        (Some(p), None) => Ok(vec![parse_pair(p)?]),
        (None, None) => Ok(vec![[0.0, 0.0]]),
    }
}

pub fn cmd_propagator(args: &PropagatorArgs, cfg: &RunConfig) -> CliResult<Report> {
    let params = cfg.single_params()?;
    let x1s = coordinate_points(&args.x1, &args.x1_grid)?;
    let x2s = coordinate_points(&args.x2, &args.x2_grid)?;
    let mut rows = Table::new(vec!["t", "x11", "x12", "x21", "x22", "re_G", "im_G"]);
    let mut reports = Vec::new();
    for &t in &cfg.times {
        let g = GreenFunction::new(&params, t)?;
        for x1 in &x1s {
            for x2 in &x2s {
                let v = g.eval(*x1, *x2);
                rows.rows.push(vec![
                    Cell::Float(t),
                    Cell::Float(x1[0]),
                    Cell::Float(x1[1]),
                    Cell::Float(x2[0]),
                    Cell::Float(x2[1]),
                    Cell::Float(v.re),
                    Cell::Float(v.im),
                ]);
            }
        }
        reports.push(json!({
            "t": t,
            "det_lambda3": g.det_lambda3(),
            "maslov_index": g.maslov_index(),
            "quadratic_form_asymmetry": g.symmetry_defect(),
        }));
    }
    Ok(Report { config: config_json(cfg), rows, footer: None, invariant_report: Value::Array(reports) })
}

pub fn cmd_ledger(args: &CommonArgs, cfg: &RunConfig) -> CliResult<Report> {
    let (default_params, default_t) = reference_point();
    let any_param = args.omega_s.is_some() || args.omega_31.is_some() || args.kappa.is_some() || args.beta.is_some() || args.config.is_some();
    let params = if any_param { cfg.single_params()? } else { default_params };
    let t = match (&args.time, &args.time_grid, args.config.is_some(), cfg.times.as_slice()) {
        (None, None, false, _) => default_t,
        (_, _, _, [t]) => *t,
        _ => return Err(config_err("ledger takes a single time")),
    };
    let entries = build_ledger(&params, t)?;
    let mut rows = Table::new(vec!["group", "entry", "printed", "computed", "abs_diff", "agrees"]);
    for e in &entries {
        rows.rows.push(vec![
            Cell::Text(e.group.into()),
            Cell::Text(e.entry.clone()),
            Cell::Float(e.printed),
            Cell::Float(e.computed),
            Cell::Float(e.abs_diff),
            Cell::Bool(e.agrees),
        ]);
    }
    let config = json!({
        "omega_s": params.omega_s(),
        "omega_31": params.omega_31(),
        "kappa": params.kappa(),
        "beta": params.beta(),
        "t": t,
        "format": cfg.format,
    });
    let summary = json!({ "entries": entries.len(), "agreeing": entries.iter().filter(|e| e.agrees).count() });
    Ok(Report { config, rows, footer: None, invariant_report: summary })
}

fn emit(cfg: &RunConfig, report: &Report) -> CliResult<()> {
    write_output(cfg.out.as_deref(), &report.render(cfg.format)?)
}

fn execute(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::StokesDist(a) => {
            let cfg = resolve_config(a)?;
            emit(&cfg, &cmd_stokes_dist(&cfg)?)?;
        }
        Command::JointDist(a) => {
            let cfg = resolve_config(a)?;
            emit(&cfg, &cmd_joint_dist(&cfg)?)?;
        }
        Command::Sweep(a) => {
            let cfg = resolve_config(a)?;
            emit(&cfg, &cmd_sweep(&cfg)?)?;
        }
        Command::Validate(a) => {
            let cfg = resolve_config(a)?;
            let (report, all) = cmd_validate(&cfg)?;
            eprintln!("{:<24} {:>24} {:>12}  result", "check", "max_deviation", "tolerance");
            for row in &report.rows.rows {
                if let [Cell::Text(name), Cell::Float(dev), Cell::Float(tol), Cell::Bool(ok)] = row.as_slice() {
                    eprintln!("{name:<24} {:>24} {:>12}  {}", format_float(*dev), format_float(*tol), if *ok { "PASS" } else { "FAIL" });
                }
            }
            emit(&cfg, &report)?;
            if !all {
                return Ok(EXIT_NUMERICAL);
            }
        }
        Command::Propagator(a) => {
            let cfg = resolve_config(&a.common)?;
            emit(&cfg, &cmd_propagator(a, &cfg)?)?;
        }
        Command::Ledger(a) => {
            let cfg = resolve_config(a)?;
            emit(&cfg, &cmd_ledger(a, &cfg)?)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name) and run; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:4").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("1:0:4").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_betas("inf,1").unwrap(), vec![Beta::ZeroTemperature, Beta::Finite(1.0)]);
        assert!(parse_values("x").is_err());
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0, 1e-20, 0.786_447_732_965_927_2, 123456.789] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(1.0), "1");
    }
}
