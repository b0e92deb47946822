//! `ldlab` command-line front end.
//!
//! Scalars go to standard output as JSON; series are written as CSV.
//! Exit codes: 0 ok, 1 check failure, 2 input error, 3 infeasible
//! constraint, 4 degenerate estimate or solver breakdown.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::checks::{run_suite, Suite};
use crate::divergences::{j_divergence, kl, pinsker_check, symmetric_kl};
use crate::error::{Error, Result};
use crate::ldp_lab::{estimate_rate_exact, estimate_rate_mc, fit_rate, RateEstimate};
use crate::measures::{project, tv_distance, DiscreteMeasure, Partition, SimplexVector};
use crate::projections::{
    forward_tilt, j_projection, rate_i1, reverse_projection, SolverDiagnostics, DEFAULT_PROJECTION_GRID,
};
use crate::random_measures::{mean_and_variance, simulate_functional, write_functional_csv, Family, RngStream};

#[derive(Debug, Parser)]
#[command(name = "ldlab", version, about = "Divergences, information projections and LDP experiments on [0,1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Divergence between two measure files.
    Divergence(DivergenceArgs),
    /// Mean-constrained projection of a base measure.
    Project(ProjectArgs),
    /// Rate functions I1, I2, I3 at a mean value.
    Rate(RateArgs),
    /// Replicates of the mean functional of a random measure.
    Simulate(SimulateArgs),
    /// Ball probabilities over a range of n and the fitted decay rate.
    EstimateRate(EstimateArgs),
    /// Run a property suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    Kl,
    Symkl,
    J,
    Tv,
    Pinsker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum RateKind {
    #[value(name = "I1", alias = "i1")]
    I1,
    #[value(name = "I2", alias = "i2")]
    I2,
    #[value(name = "I3", alias = "i3")]
    I3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionKind {
    Forward,
    Reverse,
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Empirical,
    Wn,
    Dp,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Empirical => Family::Empirical,
            FamilyArg::Wn => Family::Wn,
            FamilyArg::Dp => Family::Dp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    MonteCarlo,
    ExactBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteArg {
    Pinsker,
    Oracle,
    Variance,
    Projection,
    Ldp,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Pinsker => Suite::Pinsker,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Variance => Suite::Variance,
            SuiteArg::Projection => Suite::Projection,
            SuiteArg::Ldp => Suite::Ldp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DivergenceArgs {
    #[arg(long, value_enum)]
    pub kind: DivergenceKind,
    #[arg(long)]
    pub mu: PathBuf,
    #[arg(long)]
    pub nu: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaseArgs {
    /// Base measure file; defaults to the uniform grid.
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Size of the default uniform grid.
    #[arg(long, default_value_t = DEFAULT_PROJECTION_GRID)]
    pub grid: usize,
}

impl BaseArgs {
    fn load(&self) -> Result<DiscreteMeasure> {
        match &self.base {
            Some(p) => DiscreteMeasure::load(p),
            None => DiscreteMeasure::uniform_grid(self.grid),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long, value_enum)]
    pub which: ProjectionKind,
    #[arg(long, allow_negative_numbers = true)]
    pub u: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    /// Write the minimizer as `x,mass` CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RateArgs {
    #[arg(long, value_enum)]
    pub which: RateKind,
    #[arg(long, allow_negative_numbers = true)]
    pub u: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    /// Concentration of the `dp` family.
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    #[arg(long, env = "LDLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Interior cut points, e.g. `0.25,0.5`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub cuts: Vec<f64>,
    /// Target cell probabilities, e.g. `0.7,0.3`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub target: Vec<f64>,
    #[arg(long)]
    pub delta: f64,
    /// `start:stop:step`, inclusive of `stop`.
    #[arg(long)]
    pub n_grid: String,
    #[arg(long, default_value_t = 100_000)]
    pub replicates: usize,
    #[arg(long, env = "LDLAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = default_workers())]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::MonteCarlo)]
    pub method: MethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub base: BaseArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteArg,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Echo of the parsed invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(flatten)]
    pub args: Value,
}

/// Renders a float for JSON output; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn to_json(value: &impl Serialize) -> Value {
    serde_json::to_value(value).expect("record serializes")
}

fn diagnostics(d: &SolverDiagnostics) -> Value {
    json!({"method": d.method, "iterations": d.iterations, "residual": num(d.residual)})
}

fn write_file_or_stdout(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
        }
    }
    Ok(())
}

/// Outcome of a command: the JSON record to print and whether a check
/// failed.
pub struct Outcome {
    pub record: Value,
    pub failed_check: bool,
}

impl Outcome {
    fn ok(record: Value) -> Outcome {
        Outcome { record, failed_check: false }
    }
}

fn with_config(mut record: Map<String, Value>, config: RunConfig) -> Value {
    record.insert("config".into(), to_json(&config));
    Value::Object(record)
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are objects"),
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Divergence(a) => cmd_divergence(a),
        Command::Project(a) => cmd_project(a),
        Command::Rate(a) => cmd_rate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::EstimateRate(a) => cmd_estimate_rate(a),
        Command::Check(a) => cmd_check(a),
    }
}

fn cmd_divergence(a: DivergenceArgs) -> Result<Outcome> {
    let mu = DiscreteMeasure::load(&a.mu)?;
    let nu = DiscreteMeasure::load(&a.nu)?;
    let record = match a.kind {
        DivergenceKind::Kl => json!({"kl": num(kl(&mu, &nu)?)}),
        DivergenceKind::Symkl => json!({"symkl": num(symmetric_kl(&mu, &nu)?)}),
        DivergenceKind::J => json!({"j": num(j_divergence(&mu, &nu)?)}),
        DivergenceKind::Tv => json!({"tv": num(tv_distance(&mu, &nu)?)}),
        DivergenceKind::Pinsker => {
            let c = pinsker_check(&mu, &nu)?;
            json!({"tv": num(c.tv), "j": num(c.j), "slack": num(c.slack)})
        }
    };
    let config = RunConfig { command: "divergence", args: to_json(&a) };
    Ok(Outcome::ok(with_config(object(record), config)))
}

fn cmd_project(a: ProjectArgs) -> Result<Outcome> {
    let base = a.base.load()?;
    let (record, minimizer) = match a.which {
        ProjectionKind::Forward => {
            let s = forward_tilt(&base, a.u)?;
            let r = json!({"which": "forward", "u": a.u, "value": num(s.value), "r": num(s.r), "log_c": num(s.log_c),
                "solver": diagnostics(&s.diagnostics)});
            (r, s.minimizer)
        }
        ProjectionKind::Reverse => {
            let s = reverse_projection(&base, a.u)?;
            let r = json!({"which": "reverse", "u": a.u, "value": num(s.value), "lambda1": num(s.lambda1),
                "lambda2": num(s.lambda2), "solver": diagnostics(&s.diagnostics)});
            (r, s.minimizer)
        }
        ProjectionKind::J => {
            let s = j_projection(&base, a.u)?;
            let r = json!({"which": "j", "u": a.u, "value": num(s.value), "lambda1": num(s.lambda1),
                "lambda2": num(s.lambda2), "solver": diagnostics(&s.diagnostics)});
            (r, s.minimizer)
        }
    };
    if let Some(path) = &a.out {
        write_file_or_stdout(Some(path), |w| {
            writeln!(w, "x,mass")?;
            for (x, m) in minimizer.iter() {
                writeln!(w, "{x:.17e},{m:.17e}")?;
            }
            Ok(())
        })?;
    }
    let config = RunConfig { command: "project", args: to_json(&a) };
    Ok(Outcome::ok(with_config(object(record), config)))
}

fn cmd_rate(a: RateArgs) -> Result<Outcome> {
    let (value, solver) = match (a.which, &a.base.base) {
        (RateKind::I1, None) => {
            if !(a.u > 0.0 && a.u < 1.0) {
                return Err(Error::Infeasible { target: a.u, lo: 0.0, hi: 1.0 });
            }
            (rate_i1(a.u), json!({"method": "closed-form", "iterations": 0, "residual": 0.0}))
        }
        (RateKind::I1, Some(_)) => {
            let s = reverse_projection(&a.base.load()?, a.u)?;
            (s.value, diagnostics(&s.diagnostics))
        }
        (RateKind::I3, _) => {
            let s = forward_tilt(&a.base.load()?, a.u)?;
            (s.value, diagnostics(&s.diagnostics))
        }
        (RateKind::I2, path) => {
            // Same as `rate_i2`, but surfaces infeasibility as an error.
            let base = a.base.load()?;
            let base = if path.is_some() { base.coarsen(a.base.grid)? } else { base };
            let s = j_projection(&base, a.u)?;
            (s.value, diagnostics(&s.diagnostics))
        }
    };
    let record = json!({"which": a.which, "u": a.u, "value": num(value), "solver": solver});
    let config = RunConfig { command: "rate", args: to_json(&a) };
    Ok(Outcome::ok(with_config(object(record), config)))
}

fn cmd_simulate(a: SimulateArgs) -> Result<Outcome> {
    let base = a.base.load()?;
    let id = |x: f64| x;
    let family = Family::from(a.family);
    let values = simulate_functional(family, &base, a.n, a.theta, a.replicates, RngStream::new(a.seed, 0), &id)?;
    let (mean, variance) = if values.len() > 1 { mean_and_variance(&values) } else { (values[0], f64::NAN) };
    if a.format == Format::Csv || a.out.is_some() {
        write_file_or_stdout(a.out.as_deref(), |w| write_functional_csv(w, a.n, &values))?;
    }
    let record =
        json!({"family": family, "n": a.n, "replicates": a.replicates, "mean": num(mean), "variance": num(variance)});
    let config = RunConfig { command: "simulate", args: to_json(&a) };
    let out = with_config(object(record), config);
    if a.format == Format::Csv && a.out.is_none() {
        // CSV already went to stdout; the summary goes to stderr.
        eprintln!("{out}");
        return Ok(Outcome { record: Value::Null, failed_check: false });
    }
    Ok(Outcome::ok(out))
}

/// Parses `start:stop:step` into the inclusive list of values.
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("n-grid '{s}': {e}")));
    let (start, stop, step) = match parts.as_slice() {
        [a, b, c] => (parse(a)?, parse(b)?, parse(c)?),
        [a, b] => (parse(a)?, parse(b)?, 1),
        _ => return Err(Error::Parse(format!("n-grid '{s}' is not start:stop:step"))),
    };
    if start == 0 || step == 0 || stop < start {
        return Err(Error::InvalidParameter(format!("n-grid '{s}' needs 1 <= start <= stop and step >= 1")));
    }
    Ok((start..=stop).step_by(step).collect())
}

fn cmd_estimate_rate(a: EstimateArgs) -> Result<Outcome> {
    let base = a.base.load()?;
    let partition = Partition::new(a.cuts.clone())?;
    let target = SimplexVector::new(a.target.clone())?;
    let n_values = parse_n_grid(&a.n_grid)?;
    let family = Family::from(a.family);
    let estimate: RateEstimate = match a.method {
        MethodArg::MonteCarlo => estimate_rate_mc(
            family,
            &base,
            &partition,
            &target,
            a.delta,
            &n_values,
            a.replicates,
            RngStream::new(a.seed, 0),
            a.workers,
        )?,
        MethodArg::ExactBinary => {
            if family != Family::Wn || partition.cells() != 2 {
                return Err(Error::InvalidParameter("exact_binary needs --family wn and a single cut".into()));
            }
            let p = project(&base, &partition).coords()[0];
            estimate_rate_exact(p, target.coords()[0], a.delta, &n_values)?
        }
    };
    let config = RunConfig { command: "estimate-rate", args: to_json(&a) };
    let header = json!({
        "theory": num(estimate.theory),
        "family": family,
        "partition": partition.cuts(),
        "target": target.coords(),
        "delta": a.delta,
        "seed": a.seed,
        "workers": a.workers,
        "replicates": a.replicates,
        "method": estimate.method,
        "config": to_json(&config),
    });
    if let Some(path) = &a.out {
        write_file_or_stdout(Some(path), |w| estimate.write_csv(w, Some(&header)))?;
    }
    let zero = estimate.zero_hit_points();
    let fit = fit_rate(&estimate)?;
    let rel = (fit.slope - estimate.theory) / estimate.theory;
    let record = json!({
        "family": family,
        "method": estimate.method,
        "slope": num(fit.slope),
        "intercept": num(fit.intercept),
        "residual": num(fit.residual),
        "points": fit.points,
        "theory": num(estimate.theory),
        "relative_error": num(rel),
        "zero_hit_n": zero,
        "n_values": estimate.n_values,
        "probs": estimate.probs.iter().map(|&p| num(p)).collect::<Vec<_>>(),
        "log_rates": estimate.log_rates.iter().map(|&p| num(p)).collect::<Vec<_>>(),
    });
    Ok(Outcome::ok(with_config(object(record), config)))
}

fn cmd_check(a: CheckArgs) -> Result<Outcome> {
    let report = run_suite(a.suite.into())?;
    let failed = !report.passed;
    let config = RunConfig { command: "check", args: to_json(&a) };
    Ok(Outcome { record: with_config(object(to_json(&report)), config), failed_check: failed })
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible { .. } => 3,
        Error::Degenerate(_) | Error::Convergence { .. } => 4,
        _ => 2,
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            if !out.record.is_null() {
                let text = serde_json::to_string_pretty(&out.record).expect("record serializes");
                // A closed pipe downstream is not an error worth reporting.
                let _ = writeln!(io::stdout(), "{text}");
            }
            ExitCode::from(if out.failed_check { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_grid_parsing() {
        assert_eq!(parse_n_grid("25:100:25").unwrap(), vec![25, 50, 75, 100]);
        assert_eq!(parse_n_grid("3:5").unwrap(), vec![3, 4, 5]);
        assert!(parse_n_grid("0:5:1").is_err());
        assert!(parse_n_grid("5:1:1").is_err());
        assert!(parse_n_grid("a:b").is_err());
    }

    #[test]
    fn non_finite_rendering() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
        assert_eq!(num(f64::NAN), json!("nan"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Infeasible { target: 2.0, lo: 0.0, hi: 1.0 }), 3);
        assert_eq!(exit_code(&Error::Degenerate("x".into())), 4);
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
    }
}
