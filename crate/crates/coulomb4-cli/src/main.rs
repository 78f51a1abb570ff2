//! Command-line front end for the coulomb4 library: closed-form level
//! solvers, parameter-surface scans, wavefunction profiles, partition
//! sums, and a built-in verification suite.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 when an
//! iteration fails to converge or a grid is too coarse, 3 when the
//! requested configuration is infeasible (energy pole, empty closure
//! window, non-normalizable state, numeric overflow).

use std::fmt;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use coulomb4::fixtures::{ReferenceSet, FIRST_EXCITED_SETS, GROUND_SETS};
use coulomb4::gamma::effective_coefficients;
use coulomb4::gup::{
    bethe_residuals, gup_energy, solve_first_excited_gup_detailed, solve_ground_gup,
};
use coulomb4::heun::{dch_parameters, dch_series, polynomial_termination_check};
use coulomb4::oracle::{fd_eigen_solve, normalize, GridSpec};
use coulomb4::qes::{
    closed_form_energy, qes_determinant_residual, recursion_polynomial, solve_alpha2_ground,
    solve_constraint_n1, solve_ordinary, QesSolution,
};
use coulomb4::thermo::{
    erfi, partition_direct, partition_euler_maclaurin, thermo_quantities, PartitionRequest,
};
use coulomb4::{EnergyPair, Error, GupContext, PotentialParams};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Verify { failed: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verify { .. } => 2,
            CliError::Lib(err) => match err {
                Error::InvalidParams(_) => 1,
                Error::NoConvergence { .. } | Error::GridTooCoarse { .. } => 2,
                Error::EnergyPole { .. }
                | Error::Infeasible(_)
                | Error::NotIntegrable(_)
                | Error::Overflow(_) => 3,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(err) => write!(f, "{err}"),
            CliError::Verify { failed } => {
                write!(f, "verification failed: {failed} check(s) out of tolerance")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "coulomb4",
    version,
    about = "Solvers for the inverse-power Coulomb-4 potential and its deformed extension"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a closed-form level: alpha2 from the constraint surface,
    /// the energy, the wavefunction, and a finite-difference check.
    SolveOrdinary(SolveOrdinaryArgs),
    /// Solve the deformed closure for the potential coefficients that
    /// make level n exactly representable at deformation strength beta.
    SolveGup(SolveGupArgs),
    /// Sweep (alpha3, alpha4) ranges and tabulate the closing alpha2
    /// with its level energy.
    Scan(ScanArgs),
    /// Tabulate the potential and the normalized probability density
    /// over a radial range.
    Profile(ProfileArgs),
    /// Run the built-in cross-check suite and report one line per check.
    Verify(VerifyArgs),
    /// Bound-state partition sum, directly and through the
    /// Euler-Maclaurin route, or a thermodynamic table over a
    /// temperature range.
    Partition(PartitionArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Scope {
    Ordinary,
    Gup,
    Heun,
    Thermo,
    All,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Output format. Defaults to json; scan, profile, and temperature
    /// tables default to csv.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with default values, a flat object keyed by long flag
    /// names. Explicit flags win over config entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn merge(&mut self, cfg: &mut ConfigMap) -> Result<(), CliError> {
        cfg.format("format", &mut self.format)?;
        cfg.path("out", &mut self.out)?;
        Ok(())
    }

    fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }
}

#[derive(Args, Debug)]
struct SolveOrdinaryArgs {
    /// Level index, 0 or 1.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha4: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SolveGupArgs {
    /// Level index, 0 or 1.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    /// Deformation strength in (0, 1].
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Level index, 0 or 1.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    /// Range start:stop:steps over alpha3.
    #[arg(long, allow_hyphen_values = true)]
    alpha3: Option<String>,
    /// Range start:stop:steps over alpha4.
    #[arg(long, allow_hyphen_values = true)]
    alpha4: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    /// Level index, 0 or 1.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha4: Option<f64>,
    /// Deformation strength. When set, the potential column shows the
    /// deformed effective potential and the energy column the deformed
    /// level; the density stays the undeformed closed form.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Radial range start:stop:steps, all positive.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Which module family to check.
    #[arg(long, value_enum)]
    scope: Option<Scope>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha4: Option<f64>,
    /// Highest bound level in the sum.
    #[arg(long)]
    nu: Option<u32>,
    /// Single temperature, or a range start:stop:steps for a
    /// thermodynamic table (at least three points).
    #[arg(long, allow_hyphen_values = true)]
    temperature: Option<String>,
    /// Euler-Maclaurin correction order, 1 to 4. Single-temperature
    /// mode only.
    #[arg(long)]
    em_order: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

/// Declared config entries are consumed as they apply; leftovers are
/// usage errors so typos cannot silently drop a parameter.
struct ConfigMap(Map<String, Value>);

impl ConfigMap {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self(Map::new()));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            Value::Object(map) => Ok(Self(map)),
            _ => Err(usage(format!(
                "config {} must be a JSON object of flag values",
                path.display()
            ))),
        }
    }

    fn f64(&mut self, key: &str, slot: &mut Option<f64>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                *slot = Some(
                    v.as_f64()
                        .ok_or_else(|| usage(format!("config key {key} must be a number")))?,
                );
            }
        }
        Ok(())
    }

    fn u32(&mut self, key: &str, slot: &mut Option<u32>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                let raw = v
                    .as_u64()
                    .ok_or_else(|| usage(format!("config key {key} must be a non-negative integer")))?;
                *slot = Some(
                    u32::try_from(raw)
                        .map_err(|_| usage(format!("config key {key} is out of range")))?,
                );
            }
        }
        Ok(())
    }

    fn usize(&mut self, key: &str, slot: &mut Option<usize>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                *slot = Some(
                    v.as_u64()
                        .ok_or_else(|| usage(format!("config key {key} must be a non-negative integer")))?
                        as usize,
                );
            }
        }
        Ok(())
    }

    fn text(&mut self, key: &str, slot: &mut Option<String>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                *slot = Some(match v {
                    Value::String(s) => s,
                    Value::Number(n) => n.to_string(),
                    _ => return Err(usage(format!("config key {key} must be a string or number"))),
                });
            }
        }
        Ok(())
    }

    fn format(&mut self, key: &str, slot: &mut Option<OutputFormat>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                let s = v
                    .as_str()
                    .ok_or_else(|| usage(format!("config key {key} must be a string")))?;
                *slot = Some(
                    OutputFormat::from_str(s, true)
                        .map_err(|_| usage(format!("config key {key} must be csv or json")))?,
                );
            }
        }
        Ok(())
    }

    fn scope(&mut self, key: &str, slot: &mut Option<Scope>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                let s = v
                    .as_str()
                    .ok_or_else(|| usage(format!("config key {key} must be a string")))?;
                *slot = Some(
                    Scope::from_str(s, true)
                        .map_err(|_| usage(format!("config key {key} is not a known scope")))?,
                );
            }
        }
        Ok(())
    }

    fn path(&mut self, key: &str, slot: &mut Option<PathBuf>) -> Result<(), CliError> {
        if let Some(v) = self.0.remove(key) {
            if slot.is_none() {
                let s = v
                    .as_str()
                    .ok_or_else(|| usage(format!("config key {key} must be a string")))?;
                *slot = Some(PathBuf::from(s));
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<(), CliError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.0.keys().map(String::as_str).collect();
            Err(usage(format!("unknown config keys: {}", keys.join(", "))))
        }
    }
}

fn require<T>(slot: Option<T>, flag: &str) -> Result<T, CliError> {
    slot.ok_or_else(|| usage(format!("missing --{flag} (flag or config entry)")))
}

fn require_level(n: Option<u32>) -> Result<u32, CliError> {
    let n = require(n, "n")?;
    if n > 1 {
        return Err(usage(format!("only levels 0 and 1 close; got n = {n}")));
    }
    Ok(n)
}

/// Inclusive linear range `start:stop:steps` with exact endpoints.
fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let err = || usage(format!("range must be start:stop:steps, got {text:?}"));
    if parts.len() != 3 {
        return Err(err());
    }
    let start: f64 = parts[0].parse().map_err(|_| err())?;
    let stop: f64 = parts[1].parse().map_err(|_| err())?;
    let steps: usize = parts[2].parse().map_err(|_| err())?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(err());
    }
    if steps < 2 {
        return Err(usage(format!("range needs at least 2 steps, got {steps}")));
    }
    let mut values: Vec<f64> = (0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect();
    values[steps - 1] = stop;
    Ok(values)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn to_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("finite output values");
    text.push('\n');
    text
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return std::process::ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SolveOrdinary(args) => run_solve_ordinary(args),
        Command::SolveGup(args) => run_solve_gup(args),
        Command::Scan(args) => run_scan(args),
        Command::Profile(args) => run_profile(args),
        Command::Verify(args) => run_verify(args),
        Command::Partition(args) => run_partition(args),
    }
}

/// The closing `alpha2` roots for level `n`, ascending. The first root
/// carries the interior node for first-excited closures.
fn alpha2_roots(n: u32, alpha1: f64, alpha3: f64, alpha4: f64) -> Result<Vec<f64>, CliError> {
    let roots = match n {
        0 => vec![solve_alpha2_ground(alpha1, alpha3, alpha4)?],
        _ => solve_constraint_n1(alpha1, alpha3, alpha4)?,
    };
    if roots.is_empty() {
        return Err(CliError::Lib(Error::Infeasible(
            "no real alpha2 closes the constraint at these parameters".into(),
        )));
    }
    Ok(roots)
}

struct OracleCheck {
    eigenvalue: f64,
    relative_deviation: f64,
    richardson_error: f64,
    node_count: usize,
}

fn oracle_check(n: u32, p: &PotentialParams, sol: &QesSolution) -> Result<OracleCheck, CliError> {
    let grid = GridSpec::default_for(&sol.wavefunction)?;
    let p = *p;
    let fd = fd_eigen_solve(
        move |x| p.potential_value(x).unwrap(),
        &grid,
        n as usize + 1,
        None,
    )?;
    let k = n as usize;
    Ok(OracleCheck {
        eigenvalue: fd.eigenvalues[k],
        relative_deviation: (fd.eigenvalues[k] - sol.energy).abs() / sol.energy.abs(),
        richardson_error: fd.richardson_error,
        node_count: fd.node_counts[k],
    })
}

fn run_solve_ordinary(mut args: SolveOrdinaryArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.u32("n", &mut args.n)?;
    cfg.f64("alpha1", &mut args.alpha1)?;
    cfg.f64("alpha3", &mut args.alpha3)?;
    cfg.f64("alpha4", &mut args.alpha4)?;
    cfg.finish()?;

    let n = require_level(args.n)?;
    let alpha1 = require(args.alpha1, "alpha1")?;
    let alpha3 = require(args.alpha3, "alpha3")?;
    let alpha4 = require(args.alpha4, "alpha4")?;

    let roots = alpha2_roots(n, alpha1, alpha3, alpha4)?;
    let mut solutions = Vec::new();
    for &alpha2 in &roots {
        let p = PotentialParams::new(alpha1, alpha2, alpha3, alpha4)?;
        solutions.push((alpha2, solve_ordinary(n, &p)?, p));
    }
    let (primary_alpha2, primary, primary_params) = &solutions[0];
    let oracle = oracle_check(n, primary_params, primary)?;

    let text = match args.common.format_or(OutputFormat::Json) {
        OutputFormat::Json => to_json(&json!({
            "inputs": {
                "command": "solve-ordinary",
                "n": n,
                "alpha1": alpha1,
                "alpha3": alpha3,
                "alpha4": alpha4,
            },
            "outputs": {
                "alpha2": primary_alpha2,
                "alpha2_roots": roots,
                "energy": primary.energy,
                "wavefunction": serde_json::to_value(&primary.wavefunction)
                    .expect("finite wavefunction"),
            },
            "residuals": {
                "constraint_residual": primary.constraint_residual,
                "oracle_relative_deviation": oracle.relative_deviation,
            },
            "diagnostics": {
                "oracle_eigenvalue": oracle.eigenvalue,
                "oracle_richardson_error": oracle.richardson_error,
                "oracle_node_count": oracle.node_count,
            },
        })),
        OutputFormat::Csv => {
            let mut text = format!(
                "# solve-ordinary n={n} alpha1={alpha1} alpha3={alpha3} alpha4={alpha4}\n"
            );
            text.push_str("n,alpha2,energy,constraint_residual,oracle_eigenvalue,oracle_relative_deviation\n");
            for (i, (alpha2, sol, _)) in solutions.iter().enumerate() {
                let (oe, od) = if i == 0 {
                    (Some(oracle.eigenvalue), Some(oracle.relative_deviation))
                } else {
                    (None, None)
                };
                text.push_str(&format!(
                    "{n},{},{},{},{},{}\n",
                    fmt_f(*alpha2),
                    fmt_f(sol.energy),
                    fmt_f(sol.constraint_residual),
                    fmt_opt(oe),
                    fmt_opt(od),
                ));
            }
            text
        }
    };
    emit(args.common.out.as_ref(), &text)
}

fn run_solve_gup(mut args: SolveGupArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.u32("n", &mut args.n)?;
    cfg.f64("alpha1", &mut args.alpha1)?;
    cfg.f64("beta", &mut args.beta)?;
    cfg.finish()?;

    let n = require_level(args.n)?;
    let alpha1 = require(args.alpha1, "alpha1")?;
    let beta = require(args.beta, "beta")?;

    let (solutions, rejected) = match n {
        0 => (vec![solve_ground_gup(alpha1, beta)?], 0),
        _ => {
            let (sols, rejected) = solve_first_excited_gup_detailed(alpha1, beta)?;
            if sols.is_empty() {
                return Err(CliError::Lib(Error::NoConvergence {
                    iterations: 25,
                    residual: f64::INFINITY,
                }));
            }
            (sols, rejected)
        }
    };
    let bethe: Vec<Vec<f64>> = solutions
        .iter()
        .map(bethe_residuals)
        .collect::<Result<_, _>>()?;

    let text = match args.common.format_or(OutputFormat::Json) {
        OutputFormat::Json => to_json(&json!({
            "inputs": {
                "command": "solve-gup",
                "n": n,
                "alpha1": alpha1,
                "beta": beta,
            },
            "outputs": {
                "solutions": serde_json::to_value(&solutions).expect("finite solutions"),
            },
            "residuals": {
                "residual_norms": solutions.iter().map(|s| s.residual_norm).collect::<Vec<_>>(),
                "bethe_residuals": bethe,
            },
            "diagnostics": {
                "branches": solutions.len(),
                "rejected_candidates": rejected,
            },
        })),
        OutputFormat::Csv => {
            let mut text = format!("# solve-gup n={n} alpha1={alpha1} beta={beta}\n");
            text.push_str(
                "n,alpha1,beta,alpha2,alpha3,alpha4,eps_ordinary,eps_gup,x1,residual_norm\n",
            );
            for sol in &solutions {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    sol.n,
                    fmt_f(sol.alpha1),
                    fmt_f(sol.beta),
                    fmt_f(sol.alpha2),
                    fmt_f(sol.alpha3),
                    fmt_f(sol.alpha4),
                    fmt_f(sol.eps_ordinary),
                    fmt_f(sol.eps_gup),
                    fmt_opt(sol.bethe_roots.first().copied()),
                    fmt_f(sol.residual_norm),
                ));
            }
            text
        }
    };
    emit(args.common.out.as_ref(), &text)
}

/// All closing rows at one scan point; empty means the point is omitted.
fn scan_point(n: u32, alpha1: f64, alpha3: f64, alpha4: f64) -> Vec<(f64, f64, f64)> {
    let roots = match n {
        0 => solve_alpha2_ground(alpha1, alpha3, alpha4).map(|r| vec![r]),
        _ => solve_constraint_n1(alpha1, alpha3, alpha4),
    };
    let Ok(roots) = roots else {
        return Vec::new();
    };
    roots
        .into_iter()
        .filter_map(|alpha2| {
            let p = PotentialParams::new(alpha1, alpha2, alpha3, alpha4).ok()?;
            let energy = closed_form_energy(n, &p).ok()?;
            let residual = qes_determinant_residual(n, &p).ok()?;
            Some((alpha2, energy, residual))
        })
        .collect()
}

fn run_scan(mut args: ScanArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.u32("n", &mut args.n)?;
    cfg.f64("alpha1", &mut args.alpha1)?;
    cfg.text("alpha3", &mut args.alpha3)?;
    cfg.text("alpha4", &mut args.alpha4)?;
    cfg.finish()?;

    let n = require_level(args.n)?;
    let alpha1 = require(args.alpha1, "alpha1")?;
    let alpha3_spec = require(args.alpha3, "alpha3")?;
    let alpha4_spec = require(args.alpha4, "alpha4")?;
    let alpha3_values = parse_range(&alpha3_spec)?;
    let alpha4_values = parse_range(&alpha4_spec)?;

    let points: Vec<(f64, f64)> = alpha3_values
        .iter()
        .flat_map(|&a3| alpha4_values.iter().map(move |&a4| (a3, a4)))
        .collect();
    let per_point: Vec<Vec<(f64, f64, f64)>> = points
        .par_iter()
        .map(|&(a3, a4)| scan_point(n, alpha1, a3, a4))
        .collect();
    let omitted = per_point.iter().filter(|rows| rows.is_empty()).count();

    let text = match args.common.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut text = format!(
                "# scan n={n} alpha1={alpha1} alpha3={alpha3_spec} alpha4={alpha4_spec}\n"
            );
            text.push_str("alpha3,alpha4,alpha2,energy,residual\n");
            for ((a3, a4), rows) in points.iter().zip(&per_point) {
                for (alpha2, energy, residual) in rows {
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        fmt_f(*a3),
                        fmt_f(*a4),
                        fmt_f(*alpha2),
                        fmt_f(*energy),
                        fmt_f(*residual),
                    ));
                }
            }
            text.push_str(&format!(
                "# omitted {omitted} of {} parameter points\n",
                points.len()
            ));
            text
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = points
                .iter()
                .zip(&per_point)
                .flat_map(|((a3, a4), rows)| {
                    rows.iter().map(move |(alpha2, energy, residual)| {
                        json!({
                            "alpha3": a3,
                            "alpha4": a4,
                            "alpha2": alpha2,
                            "energy": energy,
                            "residual": residual,
                        })
                    })
                })
                .collect();
            to_json(&json!({
                "inputs": {
                    "command": "scan",
                    "n": n,
                    "alpha1": alpha1,
                    "alpha3": alpha3_spec,
                    "alpha4": alpha4_spec,
                },
                "outputs": { "rows": rows },
                "residuals": {},
                "diagnostics": {
                    "points": points.len(),
                    "omitted": omitted,
                },
            }))
        }
    };
    emit(args.common.out.as_ref(), &text)
}

fn run_profile(mut args: ProfileArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.u32("n", &mut args.n)?;
    cfg.f64("alpha1", &mut args.alpha1)?;
    cfg.f64("alpha3", &mut args.alpha3)?;
    cfg.f64("alpha4", &mut args.alpha4)?;
    cfg.f64("beta", &mut args.beta)?;
    cfg.text("x", &mut args.x)?;
    cfg.finish()?;

    let n = require_level(args.n)?;
    let alpha1 = require(args.alpha1, "alpha1")?;
    let alpha3 = require(args.alpha3, "alpha3")?;
    let alpha4 = require(args.alpha4, "alpha4")?;
    let x_spec = require(args.x, "x")?;
    let xs = parse_range(&x_spec)?;
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(usage("the x range must be strictly positive"));
    }

    let alpha2 = alpha2_roots(n, alpha1, alpha3, alpha4)?[0];
    let p = PotentialParams::new(alpha1, alpha2, alpha3, alpha4)?;
    let sol = solve_ordinary(n, &p)?;
    let grid = GridSpec::default_for(&sol.wavefunction)?;
    let (scale, _) = normalize(&sol.wavefunction, &grid)?;

    enum PotentialColumn {
        Bare(PotentialParams),
        Deformed(coulomb4::gamma::EffectiveCoefficients),
    }
    let (energy, column) = match args.beta {
        None => (sol.energy, PotentialColumn::Bare(p)),
        Some(beta) => {
            let ctx = GupContext::new(beta)?;
            let eps_gup = gup_energy(n, sol.energy, alpha1, beta)?;
            let pair = EnergyPair::new(n, sol.energy, eps_gup)?;
            (eps_gup, PotentialColumn::Deformed(effective_coefficients(&p, &ctx, &pair)))
        }
    };

    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = match &column {
            PotentialColumn::Bare(p) => p.potential_value(x)?,
            PotentialColumn::Deformed(eff) => eff.effective_potential_value(x)?,
        };
        let psi = scale * sol.wavefunction.evaluate_wavefunction(x)?;
        rows.push((x, v, psi * psi, energy));
    }

    let text = match args.common.format_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let beta_note = args
                .beta
                .map(|b| format!(" beta={b}"))
                .unwrap_or_default();
            let mut text = format!(
                "# profile n={n} alpha1={alpha1} alpha2={} alpha3={alpha3} alpha4={alpha4}{beta_note}\n",
                fmt_f(alpha2)
            );
            text.push_str("x,V,psi_sq_normalized,energy\n");
            for (x, v, density, energy) in &rows {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f(*x),
                    fmt_f(*v),
                    fmt_f(*density),
                    fmt_f(*energy),
                ));
            }
            text
        }
        OutputFormat::Json => {
            let json_rows: Vec<Value> = rows
                .iter()
                .map(|(x, v, density, energy)| {
                    json!({"x": x, "V": v, "psi_sq_normalized": density, "energy": energy})
                })
                .collect();
            to_json(&json!({
                "inputs": {
                    "command": "profile",
                    "n": n,
                    "alpha1": alpha1,
                    "alpha3": alpha3,
                    "alpha4": alpha4,
                    "beta": args.beta,
                    "x": x_spec,
                },
                "outputs": { "rows": json_rows },
                "residuals": {
                    "constraint_residual": sol.constraint_residual,
                },
                "diagnostics": {
                    "alpha2": alpha2,
                    "norm_scale": scale,
                },
            }))
        }
    };
    emit(args.common.out.as_ref(), &text)
}

fn run_partition(mut args: PartitionArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.f64("alpha1", &mut args.alpha1)?;
    cfg.f64("alpha3", &mut args.alpha3)?;
    cfg.f64("alpha4", &mut args.alpha4)?;
    cfg.u32("nu", &mut args.nu)?;
    cfg.text("temperature", &mut args.temperature)?;
    cfg.usize("em-order", &mut args.em_order)?;
    cfg.finish()?;

    let alpha1 = require(args.alpha1, "alpha1")?;
    let alpha3 = require(args.alpha3, "alpha3")?;
    let alpha4 = require(args.alpha4, "alpha4")?;
    let nu = require(args.nu, "nu")?;
    let spec = require(args.temperature, "temperature")?;
    let em_order = args.em_order.unwrap_or(2);
    let p = PotentialParams::new(alpha1, 0.0, alpha3, alpha4)?;

    let text = if spec.contains(':') {
        let t_grid = parse_range(&spec)?;
        let rows = thermo_quantities(&p, &t_grid, nu)?;
        match args.common.format_or(OutputFormat::Csv) {
            OutputFormat::Csv => {
                let mut text = format!(
                    "# partition alpha1={alpha1} alpha3={alpha3} alpha4={alpha4} nu={nu} temperature={spec}\n"
                );
                text.push_str("temperature,z,f,u,c,s\n");
                for row in &rows {
                    text.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        fmt_f(row.temperature),
                        fmt_f(row.z),
                        fmt_f(row.f),
                        fmt_opt(row.u),
                        fmt_opt(row.c),
                        fmt_opt(row.s),
                    ));
                }
                text
            }
            OutputFormat::Json => to_json(&json!({
                "inputs": {
                    "command": "partition",
                    "alpha1": alpha1,
                    "alpha3": alpha3,
                    "alpha4": alpha4,
                    "nu": nu,
                    "temperature": spec,
                },
                "outputs": {
                    "rows": serde_json::to_value(&rows).expect("finite table"),
                },
                "residuals": {},
                "diagnostics": {},
            })),
        }
    } else {
        let temperature: f64 = spec
            .parse()
            .map_err(|_| usage(format!("temperature must be a number or a range, got {spec:?}")))?;
        let req = PartitionRequest::new(p, temperature, nu, em_order)?;
        let result = partition_euler_maclaurin(&req)?;
        match args.common.format_or(OutputFormat::Json) {
            OutputFormat::Json => to_json(&json!({
                "inputs": {
                    "command": "partition",
                    "alpha1": alpha1,
                    "alpha3": alpha3,
                    "alpha4": alpha4,
                    "nu": nu,
                    "temperature": temperature,
                    "em_order": em_order,
                },
                "outputs": {
                    "z_direct": result.z_direct,
                    "z_euler_maclaurin": result.z_euler_maclaurin,
                    "integral_term": result.integral_term,
                    "correction_terms": result.correction_terms,
                },
                "residuals": {
                    "remainder_estimate": result.remainder_estimate,
                    "route_gap": (result.z_euler_maclaurin - result.z_direct).abs(),
                },
                "diagnostics": {},
            })),
            OutputFormat::Csv => {
                let mut text = format!(
                    "# partition alpha1={alpha1} alpha3={alpha3} alpha4={alpha4} nu={nu} em-order={em_order}\n"
                );
                text.push_str("temperature,z_direct,z_euler_maclaurin,remainder_estimate\n");
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f(temperature),
                    fmt_f(result.z_direct),
                    fmt_f(result.z_euler_maclaurin),
                    fmt_f(result.remainder_estimate),
                ));
                text
            }
        }
    };
    emit(args.common.out.as_ref(), &text)
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn reclose(set: &ReferenceSet) -> Result<PotentialParams, CliError> {
    let p = set.params;
    let alpha2 = alpha2_roots(set.n, p.alpha1, p.alpha3, p.alpha4)?[0];
    Ok(PotentialParams::new(p.alpha1, alpha2, p.alpha3, p.alpha4)?)
}

fn verify_ordinary(checks: &mut Vec<Check>) -> Result<(), CliError> {
    for set in GROUND_SETS.iter().chain(&FIRST_EXCITED_SETS) {
        let p = reclose(set)?;
        let residual = qes_determinant_residual(set.n, &p)?;
        checks.push(check(
            format!("ordinary closure {}", set.name),
            residual.abs() <= 1e-8,
            format!("determinant residual {residual:.2e}"),
        ));
    }
    for set in [&GROUND_SETS[0], &FIRST_EXCITED_SETS[0]] {
        let p = reclose(set)?;
        let sol = solve_ordinary(set.n, &p)?;
        let oracle = oracle_check(set.n, &p, &sol)?;
        let tol = (0.005f64).max(oracle.richardson_error / sol.energy.abs());
        checks.push(check(
            format!("ordinary oracle {}", set.name),
            oracle.relative_deviation <= tol && oracle.node_count == set.n as usize,
            format!(
                "relative deviation {:.2e}, {} node(s)",
                oracle.relative_deviation, oracle.node_count
            ),
        ));
    }
    Ok(())
}

fn verify_gup(checks: &mut Vec<Check>) -> Result<(), CliError> {
    for (alpha1, beta) in [(-0.5, 1.0), (-0.3, 0.5)] {
        let sol = solve_ground_gup(alpha1, beta)?;
        checks.push(check(
            format!("gup ground ({alpha1}, {beta})"),
            sol.residual_norm <= 1e-9 && sol.alpha2 > 0.0 && sol.alpha3 > 0.0 && sol.alpha4 > 0.0,
            format!("residual norm {:.2e}", sol.residual_norm),
        ));
    }
    let (sols, _) = solve_first_excited_gup_detailed(-0.3, 0.5)?;
    let worst_bethe = sols
        .iter()
        .map(|s| {
            bethe_residuals(s)
                .map(|r| r.iter().fold(0.0f64, |m, v| m.max(v.abs())))
                .unwrap_or(f64::INFINITY)
        })
        .fold(0.0f64, f64::max);
    checks.push(check(
        "gup first excited (-0.3, 0.5)",
        !sols.is_empty() && worst_bethe <= 1e-10,
        format!("{} branch(es), worst root residual {worst_bethe:.2e}", sols.len()),
    ));
    let rejected = [-0.7, 0.1]
        .iter()
        .all(|&a1| matches!(solve_ground_gup(a1, 1.0), Err(Error::Infeasible(_))));
    checks.push(check(
        "gup closure window",
        rejected,
        "out-of-window alpha1 values rejected",
    ));
    Ok(())
}

fn verify_heun(checks: &mut Vec<Check>) -> Result<(), CliError> {
    for set in [&GROUND_SETS[0], &FIRST_EXCITED_SETS[0]] {
        let p = reclose(set)?;
        let eps = closed_form_energy(set.n, &p)?;
        let d = dch_parameters(&p, eps)?;
        let (terminated, residual) = polynomial_termination_check(&d, set.n as usize)?;
        checks.push(check(
            format!("series termination {}", set.name),
            terminated && (d.omega + set.n as f64).abs() <= 1e-12,
            format!("index {:.2e}, truncation {residual:.2e}", (d.omega + set.n as f64).abs()),
        ));
    }
    let mut worst = 0.0f64;
    for set in GROUND_SETS.iter().chain(&FIRST_EXCITED_SETS) {
        let p = reclose(set)?;
        let eps = closed_form_energy(set.n, &p)?;
        let d = dch_parameters(&p, eps)?;
        let h = dch_series(&d, set.n as usize)?;
        let (c, _) = recursion_polynomial(set.n, &p, eps)?;
        let two_s = 2.0 * (-eps).sqrt();
        for (k, (hk, ck)) in h.iter().zip(&c).enumerate() {
            worst = worst.max((hk * two_s.powi(k as i32) - ck).abs() / ck.abs().max(1.0));
        }
    }
    checks.push(check(
        "series matches recursion",
        worst <= 1e-9,
        format!("worst coefficient deviation {worst:.2e}"),
    ));
    Ok(())
}

fn verify_thermo(checks: &mut Vec<Check>) -> Result<(), CliError> {
    let value = erfi(1.0)?;
    checks.push(check(
        "erfi reference value",
        (value - 1.650_425_758_797_542_8).abs() <= 1e-14,
        format!("erfi(1) = {value:.16}"),
    ));

    let p = reclose(&GROUND_SETS[0])?;
    let req = PartitionRequest::new(p, 1.0, 10, 2)?;
    let result = partition_euler_maclaurin(&req)?;
    let gap = (result.z_euler_maclaurin - result.z_direct).abs();
    let allowed = (2.0 * result.remainder_estimate).max(1e-6 * result.z_direct);
    checks.push(check(
        "partition routes agree",
        gap <= allowed,
        format!("gap {gap:.2e}, bound {allowed:.2e}"),
    ));

    let z = partition_direct(&req)?;
    let mut reference = 0.0;
    for n in 0..=10 {
        reference += (-closed_form_energy(n, &p)? / 1.0).exp();
    }
    let rel = (z - reference).abs() / reference;
    checks.push(check(
        "ladder matches spectrum",
        rel <= 1e-12,
        format!("relative gap {rel:.2e}"),
    ));
    Ok(())
}

fn run_verify(mut args: VerifyArgs) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(args.common.config.as_ref())?;
    args.common.merge(&mut cfg)?;
    cfg.scope("scope", &mut args.scope)?;
    cfg.finish()?;
    let scope = args.scope.unwrap_or(Scope::All);

    let mut checks = Vec::new();
    if matches!(scope, Scope::Ordinary | Scope::All) {
        verify_ordinary(&mut checks)?;
    }
    if matches!(scope, Scope::Gup | Scope::All) {
        verify_gup(&mut checks)?;
    }
    if matches!(scope, Scope::Heun | Scope::All) {
        verify_heun(&mut checks)?;
    }
    if matches!(scope, Scope::Thermo | Scope::All) {
        verify_thermo(&mut checks)?;
    }

    let mut text = String::new();
    let mut failed = 0usize;
    for c in &checks {
        if !c.pass {
            failed += 1;
        }
        text.push_str(&format!(
            "check {}: {} ({})\n",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail,
        ));
    }
    text.push_str(&format!(
        "verified {}/{} checks\n",
        checks.len() - failed,
        checks.len()
    ));
    emit(args.common.out.as_ref(), &text)?;
    if failed > 0 {
        return Err(CliError::Verify { failed });
    }
    Ok(())
}
