mod args;
mod output;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::Parser;
use helfrich::classical_solutions::compute_constants;
use helfrich::energetics::{
    bound_suite, classify_regime, comparison_bound, cylinder_energy, helfrich,
};
use helfrich::linearised_cylinder::{oscillation_extrema, rc_monotonicity_verdict, rc_profile};
use helfrich::minimiser::{el_residual, first_integral, minimise};
use helfrich::{ConstantsTable, Grid, ProfileCurve, SeedProfile, SolveResult, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use args::{Cli, Command, ConfigFile, Format, SolverArgs};
use output::{num, Sink, Table};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(helfrich::Error),
    Mismatch(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Domain(e) => (e.kind(), e.to_string()),
            CliError::Mismatch(m) => ("verification_mismatch", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
        };
        json!({ "error": kind, "message": message })
    }
}

impl From<helfrich::Error> for CliError {
    fn from(e: helfrich::Error) -> Self {
        match e {
            helfrich::Error::InvalidInput(m) | helfrich::Error::BadGrid(m) => CliError::Usage(m),
            e => CliError::Domain(e),
        }
    }
}

type Params = BTreeMap<String, Value>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = ConfigFile::load(cli.config.as_ref())?;
    let out_dir = cfg.pick(cli.out_dir, "out_dir")?;
    let format = cfg.pick(cli.format, "format")?.unwrap_or(Format::Json);
    let jobs = cfg.pick(cli.jobs, "jobs")?;
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    let mut sink = Sink::new(out_dir)?;
    let mut params = Params::new();
    params.insert("format".into(), json!(format!("{format:?}").to_lowercase()));
    let name = match cli.command {
        Command::Constants => {
            constants(&mut sink, format)?;
            "constants"
        }
        Command::Solve(a) => {
            let alpha = positive(cfg.require(a.alpha, "alpha")?, "alpha")?;
            let eps = nonnegative(cfg.require(a.epsilon, "epsilon")?, "epsilon")?;
            let config = solver_config(&a.solver, &cfg, &mut params)?;
            params.insert("alpha".into(), json!(alpha));
            params.insert("epsilon".into(), json!(eps));
            solve(&mut sink, format, alpha, eps, &config)?;
            "solve"
        }
        Command::Sweep(a) => {
            let alphas = axis(&cfg, [a.alpha_min, a.alpha_max], a.alpha_steps, "alpha", &mut params)?;
            let eps = axis(&cfg, [a.epsilon_min, a.epsilon_max], a.epsilon_steps, "epsilon", &mut params)?;
            if alphas[0] <= 0.0 || eps[0] < 0.0 {
                return Err(CliError::Usage("need alpha > 0 and epsilon >= 0".into()));
            }
            let config = solver_config(&a.solver, &cfg, &mut params)?;
            params.insert("jobs".into(), json!(jobs));
            sweep(&mut sink, format, &alphas, &eps, &config, jobs)?;
            "sweep"
        }
        Command::Rc(a) => {
            let alpha = positive(cfg.require(a.alpha, "alpha")?, "alpha")?;
            let samples = cfg.pick(a.samples, "samples")?.unwrap_or(201);
            params.insert("alpha".into(), json!(alpha));
            params.insert("samples".into(), json!(samples));
            rc(&mut sink, format, alpha, samples)?;
            "rc"
        }
        Command::Oscillation(a) => {
            let ac: f64 = cfg.require(a.a_coef, "A")?;
            let bc: f64 = cfg.require(a.b_coef, "B")?;
            let rate = positive(cfg.require(a.rate, "a")?, "a")?;
            let x_max = positive(cfg.pick(a.x_max, "x_max")?.unwrap_or(1.0), "x_max")?;
            params.extend([
                ("A".into(), json!(ac)),
                ("B".into(), json!(bc)),
                ("a".into(), json!(rate)),
                ("x_max".into(), json!(x_max)),
            ]);
            let rep = oscillation_extrema(ac, bc, rate, x_max)?;
            match format {
                Format::Json => sink.emit_json("oscillation.json", &rep)?,
                Format::Csv => {
                    let mut t = Table::new(&["x", "h"]);
                    for &(x, h) in &rep.extrema {
                        t.row(&[num(x), num(h)]);
                    }
                    sink.emit("oscillation.csv", &t.into_string())?;
                }
            }
            "oscillation"
        }
        Command::Verify(a) => {
            let input: std::path::PathBuf = cfg.require(a.input, "input")?;
            let eps = cfg.pick(a.epsilon, "epsilon")?;
            params.insert("input".into(), json!(input));
            let mismatch = verify(&mut sink, format, &input, eps)?;
            sink.finish("verify", params)?;
            return match mismatch {
                Some(m) => Err(CliError::Mismatch(m)),
                None => Ok(()),
            };
        }
    };
    sink.finish(name, params)
}

fn positive(x: f64, name: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {x}")))
    }
}

fn nonnegative(x: f64, name: &str) -> Result<f64, CliError> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be nonnegative, got {x}")))
    }
}

/// Evenly spaced values; a single step gives the lower end.
fn axis(
    cfg: &ConfigFile,
    range: [Option<f64>; 2],
    steps: Option<usize>,
    name: &str,
    params: &mut Params,
) -> Result<Vec<f64>, CliError> {
    let lo: f64 = cfg.require(range[0], &format!("{name}_min"))?;
    let hi: f64 = cfg.require(range[1], &format!("{name}_max"))?;
    let n = cfg.pick(steps, &format!("{name}_steps"))?.unwrap_or(1);
    if n == 0 || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::Usage(format!("invalid {name} range [{lo}, {hi}] with {n} steps")));
    }
    params.insert(format!("{name}_min"), json!(lo));
    params.insert(format!("{name}_max"), json!(hi));
    params.insert(format!("{name}_steps"), json!(n));
    Ok((0..n)
        .map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect())
}

fn solver_config(a: &SolverArgs, cfg: &ConfigFile, params: &mut Params) -> Result<SolverConfig, CliError> {
    let mut c = SolverConfig::default();
    let n = cfg.pick(a.elements, "elements")?.unwrap_or(c.grid.n_elements());
    let q = cfg.pick(a.quadrature_order, "quadrature_order")?.unwrap_or(c.grid.quadrature_order());
    c.grid = Grid::uniform(n, q)?;
    if let Some(v) = cfg.pick(a.max_iterations, "max_iterations")? {
        c.max_iterations = v;
    }
    if let Some(v) = cfg.pick(a.tolerance, "tolerance")? {
        c.gradient_tolerance = v;
    }
    let seed_name = cfg.pick(a.seed_profile.clone(), "seed_profile")?;
    c.seed_profile = match seed_name.as_deref() {
        None | Some("cylinder") => SeedProfile::Cylinder,
        Some("catenary") => SeedProfile::Catenary,
        Some("comparison") => SeedProfile::ComparisonSurface,
        Some(other) => return Err(CliError::Usage(format!("unknown seed profile {other}"))),
    };
    if let Some(v) = cfg.pick(a.seed, "seed")? {
        c.random_seed = v;
    }
    if let Some(v) = cfg.pick(a.noise, "noise")? {
        c.seed_noise = v;
    }
    if let Some(v) = cfg.pick(a.multistart, "multistart")? {
        c.multistart = v;
    }
    c.gluing_enabled = !cfg.flag(a.no_gluing, "no_gluing")?;
    c.validate()?;
    params.extend([
        ("elements".into(), json!(n)),
        ("quadrature_order".into(), json!(q)),
        ("max_iterations".into(), json!(c.max_iterations)),
        ("tolerance".into(), json!(c.gradient_tolerance)),
        ("seed_profile".into(), json!(seed_name.unwrap_or_else(|| "cylinder".into()))),
        ("seed".into(), json!(c.random_seed)),
        ("noise".into(), json!(c.seed_noise)),
        ("multistart".into(), json!(c.multistart)),
        ("gluing".into(), json!(c.gluing_enabled)),
    ]);
    Ok(c)
}

fn constants(sink: &mut Sink, format: Format) -> Result<(), CliError> {
    let k = compute_constants();
    match format {
        Format::Json => sink.emit_json("constants.json", &k),
        Format::Csv => {
            let mut t = Table::new(&["name", "value", "residual"]);
            let r = k.residuals;
            for (name, v, res) in [
                ("c0", k.c0, r.c0),
                ("alpha0", k.alpha0, f64::NAN),
                ("cm", k.cm, r.cm),
                ("alpham", k.alpham, f64::NAN),
                ("ac", k.ac, r.ac),
                ("alphacrit", k.alphacrit, f64::NAN),
            ] {
                t.row(&[name.into(), num(v), if res.is_nan() { String::new() } else { num(res) }]);
            }
            sink.emit("constants.csv", &t.into_string())
        }
    }
}

const SUMMARY_HEADER: [&str; 12] = [
    "alpha",
    "epsilon",
    "energy",
    "willmore",
    "area",
    "gradient_norm",
    "el_residual",
    "first_integral_drift",
    "first_integral_mean",
    "iterations",
    "gluing_moves",
    "converged",
];

fn summary_row(r: &SolveResult) -> Vec<String> {
    vec![
        num(r.alpha),
        num(r.epsilon),
        num(r.energy.helfrich),
        num(r.energy.willmore),
        num(r.energy.area),
        num(r.gradient_norm),
        num(r.el_residual),
        num(r.first_integral_drift),
        num(r.first_integral_mean),
        r.iterations.to_string(),
        r.gluing_moves_applied.to_string(),
        r.converged.to_string(),
    ]
}

fn solve(sink: &mut Sink, format: Format, alpha: f64, eps: f64, config: &SolverConfig) -> Result<(), CliError> {
    let r = minimise(alpha, eps, config)?;
    match format {
        Format::Json => sink.emit_json("solution.json", &r),
        Format::Csv => {
            let mut s = Table::new(&SUMMARY_HEADER);
            s.row(&summary_row(&r));
            sink.emit("summary.csv", &s.into_string())?;
            let mut p = Table::new(&["x", "u", "du"]);
            let c = &r.profile;
            for ((x, u), du) in c.grid().nodes().iter().zip(c.values()).zip(c.derivatives()) {
                p.row(&[num(*x), num(*u), num(*du)]);
            }
            sink.emit("profile.csv", &p.into_string())?;
            // the full-precision profile, for `verify`
            sink.emit_json("solution.json", &r)
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    alpha: f64,
    epsilon: f64,
    via_cylinder: bool,
    via_comparison: bool,
    via_gluing: bool,
    on_cylinder_curve: bool,
    cylinder_energy: f64,
    comparison_bound: f64,
    energy: Option<f64>,
    willmore: Option<f64>,
    area: Option<f64>,
    converged: bool,
    iterations: Option<usize>,
    gradient_norm: Option<f64>,
    error: Option<String>,
}

fn sweep_point(alpha: f64, eps: f64, config: &SolverConfig) -> SweepRow {
    let label = classify_regime(alpha, eps, ConstantsTable::shared());
    let (result, error) = match minimise(alpha, eps, config) {
        Ok(r) => (Some(r), None),
        Err(helfrich::Error::DidNotConverge(r)) => (Some(*r), Some("did_not_converge".to_string())),
        Err(e) => (None, Some(e.kind().to_string())),
    };
    SweepRow {
        alpha,
        epsilon: eps,
        via_cylinder: label.via_cylinder,
        via_comparison: label.via_comparison,
        via_gluing: label.via_gluing,
        on_cylinder_curve: label.on_cylinder_curve,
        cylinder_energy: cylinder_energy(alpha, eps),
        comparison_bound: comparison_bound(alpha, eps),
        energy: result.as_ref().map(|r| r.energy.helfrich),
        willmore: result.as_ref().map(|r| r.energy.willmore),
        area: result.as_ref().map(|r| r.energy.area),
        converged: result.as_ref().is_some_and(|r| r.converged),
        iterations: result.as_ref().map(|r| r.iterations),
        gradient_norm: result.as_ref().map(|r| r.gradient_norm),
        error,
    }
}

fn sweep(
    sink: &mut Sink,
    format: Format,
    alphas: &[f64],
    eps: &[f64],
    config: &SolverConfig,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let points: Vec<(f64, f64)> =
        alphas.iter().flat_map(|&a| eps.iter().map(move |&e| (a, e))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let mut rows: Vec<SweepRow> =
        pool.install(|| points.par_iter().map(|&(a, e)| sweep_point(a, e, config)).collect());
    rows.sort_by(|p, q| p.alpha.total_cmp(&q.alpha).then(p.epsilon.total_cmp(&q.epsilon)));
    match format {
        Format::Json => sink.emit_json("sweep.json", &rows),
        Format::Csv => {
            let mut t = Table::new(&[
                "alpha",
                "epsilon",
                "via_cylinder",
                "via_comparison",
                "via_gluing",
                "on_cylinder_curve",
                "cylinder_energy",
                "comparison_bound",
                "energy",
                "willmore",
                "area",
                "converged",
                "iterations",
                "gradient_norm",
                "error",
            ]);
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            for r in &rows {
                t.row(&[
                    num(r.alpha),
                    num(r.epsilon),
                    r.via_cylinder.to_string(),
                    r.via_comparison.to_string(),
                    r.via_gluing.to_string(),
                    r.on_cylinder_curve.to_string(),
                    num(r.cylinder_energy),
                    num(r.comparison_bound),
                    opt(r.energy),
                    opt(r.willmore),
                    opt(r.area),
                    r.converged.to_string(),
                    r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                    opt(r.gradient_norm),
                    r.error.clone().unwrap_or_default(),
                ]);
            }
            sink.emit("sweep.csv", &t.into_string())
        }
    }
}

fn rc(sink: &mut Sink, format: Format, alpha: f64, samples: usize) -> Result<(), CliError> {
    let profile = rc_profile(alpha, samples);
    match format {
        Format::Json => {
            let verdict = rc_monotonicity_verdict(alpha);
            sink.emit_json("rc.json", &json!({ "profile": profile, "monotonicity": verdict }))
        }
        Format::Csv => {
            let mut t = Table::new(&["x", "rc", "drc"]);
            for &(x, v, d) in &profile.samples {
                t.row(&[num(x), num(v), num(d)]);
            }
            sink.emit("rc.csv", &t.into_string())
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    epsilon: f64,
    admissible: bool,
    energy: helfrich::EnergyReport,
    recorded_energy: Option<f64>,
    relative_difference: Option<f64>,
    el_residual: Option<f64>,
    first_integral_drift: Option<f64>,
    bounds_satisfied: bool,
}

/// Tolerance for re-evaluated energies against recorded ones.
const ROUND_TRIP_TOLERANCE: f64 = 1e-12;

/// Returns a message when the recomputed energy disagrees with the stored one.
fn verify(
    sink: &mut Sink,
    format: Format,
    input: &std::path::Path,
    eps: Option<f64>,
) -> Result<Option<String>, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let (profile_doc, stored_eps, recorded) = match doc.get("profile") {
        Some(p) => (
            p.clone(),
            doc.get("epsilon").and_then(Value::as_f64),
            doc.pointer("/energy/helfrich").and_then(Value::as_f64),
        ),
        None => (doc.clone(), None, None),
    };
    let curve: ProfileCurve = serde_json::from_value(profile_doc)
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    let eps = eps
        .or(stored_eps)
        .ok_or_else(|| CliError::Usage("missing --epsilon".into()))?;
    let eps = nonnegative(eps, "epsilon")?;
    let energy = helfrich(&curve, eps);
    // a recorded energy only applies at the recorded weight
    let recorded = recorded.filter(|_| stored_eps == Some(eps));
    let relative = recorded.map(|r| (energy.helfrich - r).abs() / r.abs().max(f64::MIN_POSITIVE));
    let report = VerifyReport {
        epsilon: eps,
        admissible: curve.is_admissible(),
        energy,
        recorded_energy: recorded,
        relative_difference: relative,
        el_residual: el_residual(&curve, eps).ok(),
        first_integral_drift: first_integral(&curve, eps).ok().map(|f| f.drift),
        bounds_satisfied: bound_suite(&curve, eps).all_satisfied(),
    };
    match format {
        Format::Json => sink.emit_json("verify.json", &report)?,
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
            let mut t = Table::new(&[
                "epsilon",
                "admissible",
                "energy",
                "recorded_energy",
                "relative_difference",
                "el_residual",
                "first_integral_drift",
                "bounds_satisfied",
            ]);
            t.row(&[
                num(eps),
                report.admissible.to_string(),
                num(report.energy.helfrich),
                opt(report.recorded_energy),
                opt(report.relative_difference),
                opt(report.el_residual),
                opt(report.first_integral_drift),
                report.bounds_satisfied.to_string(),
            ]);
            sink.emit("verify.csv", &t.into_string())?;
        }
    }
    Ok(relative.filter(|&d| d > ROUND_TRIP_TOLERANCE).map(|d| {
        format!("recomputed energy differs from the recorded one by {d:.3e} relative")
    }))
}
