//! Report-producing runner behind the `config-ot` binary.
//!
//! Each command reads its inputs (inline JSON or a path to a JSON file), runs
//! one library operation, and renders a report. JSON reports carry
//! `"schema": "config-ot/1"`, an echo of the inputs, the seed and sample size
//! of stochastic runs, the result, and `pass` for identity checks. Exit codes:
//! 0 on success or pass, 1 when an identity check fails, 2 on bad input.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distance::{
    barbour_distance, cox_distance, cox_mixture_expected_distance, poisson_coupling_estimate, poisson_distance,
    process_distance, shift_bound_check, tensorization_check, Z_SCORE,
};
use crate::matching::config_cost;
use crate::ot::{AffineShift, DEFAULT_GRID_SIZE};
use crate::point::Configuration;
use crate::processes::{sample_many, CoxMixture, CoxModel, Density, PoissonModel, ProcessModel};
use crate::stats::running_summary;

pub const SCHEMA: &str = "config-ot/1";

/// Agreement required between the two routes of the normalized-cost check.
pub const BARBOUR_TOLERANCE: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IDENTITY_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Cost between two configurations (--eta, --omega).
    ConfigDist,
    /// Closed-form distance between two process models (--mu, --nu).
    ProcessDist,
    /// Poisson identity: lifted-coupling estimate vs T_e² (--sigma1, --sigma2).
    PoissonIdentity,
    /// Per-point empirical transport cost across strata (--sigma1, --sigma2).
    Tensorization,
    /// Normalized cost: count decomposition vs closed form (--sigma1, --sigma2).
    Barbour,
    /// Cox processes: E[T_e] estimate vs mixture closed form (--model).
    Cox,
    /// Shift bound for a Poisson process (--model, --shift).
    ShiftBound,
    /// Draw configurations from a model (--model).
    Sample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ConfigDist => "config-dist",
            Command::ProcessDist => "process-dist",
            Command::PoissonIdentity => "poisson-identity",
            Command::Tensorization => "tensorization",
            Command::Barbour => "barbour",
            Command::Cox => "cox",
            Command::ShiftBound => "shift-bound",
            Command::Sample => "sample",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Command::PoissonIdentity | Command::Tensorization | Command::Cox | Command::ShiftBound | Command::Sample
        )
    }

    pub fn default_samples(self) -> usize {
        match self {
            Command::PoissonIdentity | Command::ShiftBound => 100_000,
            Command::Cox => 10_000,
            Command::Tensorization => 500,
            Command::Sample => 10,
            Command::ConfigDist | Command::ProcessDist | Command::Barbour => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Everything needed to execute one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    /// Input name (`eta`, `omega`, `mu`, `nu`, `sigma1`, `sigma2`, `model`,
    /// `shift`) to inline JSON or a file path.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    /// `None` selects the command's default.
    pub mc_samples: Option<usize>,
    pub nmax: usize,
    pub eps: f64,
    pub grid: usize,
    pub strata: Vec<usize>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunSpec {
    pub fn new(command: Command) -> Self {
        RunSpec {
            command,
            inputs: BTreeMap::new(),
            seed: 0,
            mc_samples: None,
            nmax: 20,
            eps: 1e-12,
            grid: DEFAULT_GRID_SIZE,
            strata: vec![1, 2, 3],
            output: None,
            format: OutputFormat::Json,
        }
    }

    pub fn input(mut self, name: &str, value: impl Into<String>) -> Self {
        self.inputs.insert(name.to_string(), value.into());
        self
    }

    pub fn samples(&self) -> usize {
        self.mc_samples.unwrap_or_else(|| self.command.default_samples())
    }
}

/// Command-line arguments of the `config-ot` binary.
#[derive(Debug, Parser)]
#[command(name = "config-ot", version, about = "Wasserstein distances between finite point-process laws")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// First configuration (config-dist).
    #[arg(long)]
    pub eta: Option<String>,
    /// Second configuration (config-dist).
    #[arg(long)]
    pub omega: Option<String>,
    /// First process model (process-dist).
    #[arg(long)]
    pub mu: Option<String>,
    /// Second process model (process-dist).
    #[arg(long)]
    pub nu: Option<String>,
    /// First unit-mass intensity density.
    #[arg(long)]
    pub sigma1: Option<String>,
    /// Second unit-mass intensity density.
    #[arg(long)]
    pub sigma2: Option<String>,
    /// Process model (sample, shift-bound) or Cox mixture (cox).
    #[arg(long)]
    pub model: Option<String>,
    /// Affine displacement {"scale": s, "offset": [..]} (shift-bound).
    #[arg(long)]
    pub shift: Option<String>,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte-Carlo sample size [default: 100000 for poisson-identity and
    /// shift-bound, 10000 for cox, 500 tuples per stratum for tensorization,
    /// 10 for sample].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Truncation point of count laws.
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    /// Count-law gate tolerance (process-dist).
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,
    /// Quantile grid size for one-dimensional transport.
    #[arg(long, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,
    /// Strata for tensorization.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
    pub strata: Vec<usize>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

impl From<Args> for RunSpec {
    fn from(a: Args) -> Self {
        let mut inputs = BTreeMap::new();
        for (k, v) in [
            ("eta", a.eta),
            ("omega", a.omega),
            ("mu", a.mu),
            ("nu", a.nu),
            ("sigma1", a.sigma1),
            ("sigma2", a.sigma2),
            ("model", a.model),
            ("shift", a.shift),
        ] {
            if let Some(v) = v {
                inputs.insert(k.to_string(), v);
            }
        }
        RunSpec {
            command: a.command,
            inputs,
            seed: a.seed,
            mc_samples: a.samples,
            nmax: a.nmax,
            eps: a.eps,
            grid: a.grid,
            strata: a.strata,
            output: a.out,
            format: a.format,
        }
    }
}

/// Exit status and rendered report of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    /// Set when the run was rejected; the message is also in the report.
    pub error: Option<String>,
}

#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

/// Result of a command before rendering.
struct Outcome {
    echo: BTreeMap<String, Value>,
    result: Value,
    pass: Option<bool>,
    /// CSV header and rows.
    table: (Vec<&'static str>, Vec<Vec<String>>),
}

/// Executes `spec`, writes the report to `spec.output` when set, and returns
/// the exit status together with the report text.
pub fn run(spec: &RunSpec) -> RunOutcome {
    let (exit_code, report, error) = match execute(spec) {
        Ok(out) => {
            let code = match out.pass {
                Some(false) => EXIT_IDENTITY_FAILED,
                _ => EXIT_OK,
            };
            match render(spec, &out) {
                Ok(text) => (code, text, None),
                Err(e) => (EXIT_INPUT_ERROR, error_report(spec, &e.0), Some(e.0)),
            }
        }
        Err(e) => (EXIT_INPUT_ERROR, error_report(spec, &e.0), Some(e.0)),
    };
    if let Some(path) = &spec.output {
        if let Err(e) = std::fs::write(path, &report) {
            let msg = format!("cannot write {}: {e}", path.display());
            return RunOutcome { exit_code: EXIT_INPUT_ERROR, report, error: Some(msg) };
        }
    }
    RunOutcome { exit_code, report, error }
}

fn error_report(spec: &RunSpec, msg: &str) -> String {
    let v = json!({ "schema": SCHEMA, "command": spec.command.name(), "error": msg });
    serde_json::to_string_pretty(&v).expect("json") + "\n"
}

fn read_input(spec: &RunSpec, name: &str) -> Result<(Value, String), InputError> {
    let raw = spec
        .inputs
        .get(name)
        .ok_or_else(|| InputError(format!("missing input --{name} for {}", spec.command.name())))?;
    let trimmed = raw.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        raw.clone()
    } else {
        std::fs::read_to_string(raw).map_err(|e| InputError(format!("--{name}: cannot read {raw}: {e}")))?
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| InputError(format!("--{name}: {e}")))?;
    Ok((value, text))
}

fn parse_input<T: DeserializeOwned>(spec: &RunSpec, name: &str, echo: &mut BTreeMap<String, Value>) -> Result<T, InputError> {
    let (value, _) = read_input(spec, name)?;
    let parsed = T::deserialize(&value).map_err(|e| InputError(format!("--{name}: {e}")))?;
    echo.insert(name.to_string(), value);
    Ok(parsed)
}

fn require_samples(spec: &RunSpec) -> Result<usize, InputError> {
    match spec.samples() {
        0 => Err(InputError("--samples must be positive".into())),
        m => Ok(m),
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn trace_table(values: &[f64]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let rows = values
        .iter()
        .zip(running_summary(values))
        .enumerate()
        .map(|(i, (v, (m, se)))| vec![i.to_string(), num(*v), num(m), num(se)])
        .collect();
    (vec!["sample", "value", "running_mean", "running_std_error"], rows)
}

fn key_value_table(result: &Value) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let rows = match result {
        Value::Object(map) => map
            .iter()
            .filter(|(_, v)| !v.is_array() && !v.is_object())
            .map(|(k, v)| vec![k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string)])
            .collect(),
        _ => Vec::new(),
    };
    (vec!["key", "value"], rows)
}

fn unit_poisson(density: Density) -> Result<PoissonModel, InputError> {
    Ok(PoissonModel::new(1.0, density)?)
}

fn execute(spec: &RunSpec) -> Result<Outcome, InputError> {
    let mut echo = BTreeMap::new();
    let grid = spec.grid.max(1);
    let out = match spec.command {
        Command::ConfigDist => {
            let eta: Configuration = parse_input(spec, "eta", &mut echo)?;
            let omega: Configuration = parse_input(spec, "omega", &mut echo)?;
            let (w2, matching) = config_cost(&eta, &omega)?;
            let result = json!({
                "w2": w2,
                "matching": matching.map(|m| m.permutation),
                "cardinalities": [eta.len(), omega.len()],
            });
            let table = key_value_table(&result);
            Outcome { echo, result, pass: None, table }
        }
        Command::ProcessDist => {
            let mu: ProcessModel = parse_input(spec, "mu", &mut echo)?;
            let nu: ProcessModel = parse_input(spec, "nu", &mut echo)?;
            let d = process_distance(&mu, &nu, spec.nmax, spec.eps, grid)?;
            let result = json!({ "w2": d.w2, "gate": d.gate, "method": d.method });
            let table = key_value_table(&result);
            Outcome { echo, result, pass: None, table }
        }
        Command::PoissonIdentity => {
            let s1 = unit_poisson(parse_input(spec, "sigma1", &mut echo)?)?;
            let s2 = unit_poisson(parse_input(spec, "sigma2", &mut echo)?)?;
            let m = require_samples(spec)?;
            let closed = poisson_distance(&s1, &s2, grid)?;
            let est = poisson_coupling_estimate(&s1, &s2, m, spec.seed, grid)?;
            let e = est.estimate;
            let pass = within(e.mean, closed, e.std_error);
            let result = json!({
                "closed_form": closed,
                "estimate": e.mean,
                "std_error": e.std_error,
                "z_score": Z_SCORE,
            });
            Outcome { echo, result, pass: Some(pass), table: trace_table(&est.values) }
        }
        Command::Tensorization => {
            let d1: Density = parse_input(spec, "sigma1", &mut echo)?;
            let d2: Density = parse_input(spec, "sigma2", &mut echo)?;
            d1.validate()?;
            d2.validate()?;
            let m = require_samples(spec)?;
            let r = tensorization_check(&d1, &d2, &spec.strata, m, spec.seed, grid)?;
            let rows = r
                .rows
                .iter()
                .map(|row| vec![row.n.to_string(), num(row.w2), num(row.per_point), num(row.std_error)])
                .collect();
            let result = json!({ "rows": r.rows, "reference": r.reference, "max_z": r.max_z, "z_score": Z_SCORE });
            Outcome { echo, result, pass: Some(r.pass), table: (vec!["n", "w2", "per_point", "std_error"], rows) }
        }
        Command::Barbour => {
            let s1 = unit_poisson(parse_input(spec, "sigma1", &mut echo)?)?;
            let s2 = unit_poisson(parse_input(spec, "sigma2", &mut echo)?)?;
            let r = barbour_distance(&s1, &s2, spec.nmax, grid)?;
            let pass = r.discrepancy <= BARBOUR_TOLERANCE;
            let result = json!({
                "base_sq": r.base_sq,
                "closed_form": r.closed_form,
                "decomposition": r.decomposition.combined,
                "discrepancy": r.discrepancy,
                "truncation_error_bound": r.decomposition.truncation_error_bound,
                "tolerance": BARBOUR_TOLERANCE,
            });
            let table = key_value_table(&result);
            Outcome { echo, result, pass: Some(pass), table }
        }
        Command::Cox => {
            let mixture: CoxMixture = parse_input(spec, "model", &mut echo)?;
            let m = require_samples(spec)?;
            let expected = cox_mixture_expected_distance(&mixture, grid)?;
            let est = cox_distance(&CoxModel::mixture(mixture), m, spec.seed, grid)?;
            let pass = match (est.distance, expected) {
                (crate::ExtendedCost::Finite(a), crate::ExtendedCost::Finite(b)) => within(a, b, est.std_error),
                (a, b) => a == b,
            };
            let result = json!({
                "estimate": est.distance,
                "std_error": finite_or_null(est.std_error),
                "estimate_squared": est.squared,
                "squared_std_error": finite_or_null(est.squared_std_error),
                "expected": expected,
                "z_score": Z_SCORE,
            });
            Outcome { echo, result, pass: Some(pass), table: trace_table(&est.values) }
        }
        Command::ShiftBound => {
            let model: ProcessModel = parse_input(spec, "model", &mut echo)?;
            let ProcessModel::Poisson(model) = model else {
                return Err(InputError("shift-bound needs a poisson model".into()));
            };
            let shift: AffineShift = parse_input(spec, "shift", &mut echo)?;
            if shift.offset.len() != model.density.dim() {
                return Err(InputError(format!(
                    "--shift: offset has dimension {}, model has {}",
                    shift.offset.len(),
                    model.density.dim()
                )));
            }
            let m = require_samples(spec)?;
            let r = shift_bound_check(&model, &shift, m, spec.seed)?;
            let result = json!({
                "bound": r.bound,
                "estimate": r.estimate.mean,
                "std_error": r.estimate.std_error,
                "z_score": Z_SCORE,
            });
            Outcome { echo, result, pass: Some(r.pass), table: trace_table(&r.values) }
        }
        Command::Sample => {
            let model: ProcessModel = parse_input(spec, "model", &mut echo)?;
            let m = require_samples(spec)?;
            let configs = sample_many(&model, m, spec.seed)?;
            let k = model.dim();
            let mut header = vec!["sample", "atom"];
            header.extend(["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"].iter().take(k.min(8)));
            let rows = configs
                .iter()
                .enumerate()
                .flat_map(|(i, c)| {
                    c.points().iter().enumerate().map(move |(a, p)| {
                        let mut row = vec![i.to_string(), a.to_string()];
                        row.extend(p.coords().iter().take(8).map(|x| num(*x)));
                        row
                    })
                })
                .collect();
            let counts: Vec<usize> = configs.iter().map(Configuration::len).collect();
            let result = json!({ "configurations": configs, "counts": counts });
            Outcome { echo, result, pass: None, table: (header, rows) }
        }
    };
    Ok(out)
}

fn within(estimate: f64, target: f64, std_error: f64) -> bool {
    // zero-variance estimates are compared to rounding precision
    (estimate - target).abs() <= Z_SCORE * std_error + 1e-12 * (1.0 + target.abs())
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn render(spec: &RunSpec, out: &Outcome) -> Result<String, InputError> {
    match spec.format {
        OutputFormat::Json => {
            let mut report = serde_json::Map::new();
            report.insert("schema".into(), json!(SCHEMA));
            report.insert("command".into(), json!(spec.command.name()));
            report.insert("inputs".into(), json!(out.echo));
            report.insert("result".into(), out.result.clone());
            if let Some(p) = out.pass {
                report.insert("pass".into(), json!(p));
            }
            if spec.command.is_stochastic() {
                report.insert("seed".into(), json!(spec.seed));
                report.insert("samples".into(), json!(spec.samples()));
            }
            if matches!(spec.command, Command::ProcessDist | Command::Barbour) {
                report.insert("nmax".into(), json!(spec.nmax));
            }
            Ok(serde_json::to_string_pretty(&Value::Object(report))? + "\n")
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.table.0)?;
            for row in &out.table.1 {
                w.write_record(row)?;
            }
            Ok(String::from_utf8(w.into_inner().map_err(|e| InputError(e.to_string()))?)?)
        }
    }
}
