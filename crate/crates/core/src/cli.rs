//! The `kpp` command-line front end.
//!
//! Every command writes its artifacts under `--out` together with the resolved
//! inputs, prints the main JSON result on stdout and exits with 0 on success,
//! 2 on usage or validation errors and 3 on numerical failures.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bifurcation::{
    first_lyapunov_coefficient, hopf_analysis, lambda_omega_params, positive_steady_states, sherratt_threshold,
    spreading_speeds,
};
use crate::dynamics::{
    cycle_family, find_limit_cycle, floquet, hausdorff_distance, localization_band_violation, reference_cycle_c0,
    scalar_front_profile, CycleSettings, LimitCycleRecord,
};
use crate::error::{KppError, Result};
use crate::model::{sign_structure, ModelParams, StateVec, MU_H};
use crate::pde::{simulate, summarize, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kpp", version, about = "Oscillatory three-phenotype Fisher-KPP toolkit")]
pub struct Cli {
    /// Output directory for all artifacts of this run.
    #[arg(long, global = true, default_value = "kpp-out")]
    pub out: PathBuf,
    /// Seed for randomised inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hopf, Lyapunov, steady-state, speed and sign-structure report at one mu.
    Analyze {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        mu: f64,
    },
    /// Limit cycle at one mu, or a continued family toward the heteroclinic cycle.
    Cycle {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true, required_unless_present = "family")]
        mu: Option<f64>,
        /// Comma-separated decreasing mu values.
        #[arg(long, value_delimiter = ',', value_parser = parse_rational, conflicts_with = "mu")]
        family: Option<Vec<f64>>,
    },
    /// Run the reaction-diffusion solver and measure fronts and wave trains.
    Simulate(SimulateArgs),
    /// Monotone scalar travelling wave at speed c.
    Front {
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        c: f64,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Base configuration: paper (L = 2000, tEnd = 1200) or desk (L = 400, tEnd = 300).
    #[arg(long, default_value = "paper")]
    pub preset: String,
    /// JSON configuration; unset fields take the preset values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub dx: Option<f64>,
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Half-length of the domain [-L, L].
    #[arg(long = "L", value_parser = parse_rational, allow_hyphen_values = true)]
    pub half_length: Option<f64>,
    #[arg(long = "tEnd", value_parser = parse_rational, allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    /// Level of the tracked u1 level set.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub level: Option<f64>,
    /// Threshold of the oscillation-envelope detector.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub eps: Option<f64>,
}

/// Parses `p/q` with integer `p`, `q` (divided once, so correctly rounded) or a
/// plain decimal literal.
pub fn parse_rational(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        const EXACT: i64 = 1 << 53;
        if n.abs() > EXACT || d.abs() > EXACT {
            return Err(format!("{s:?} exceeds the exactly representable integer range"));
        }
        n as f64 / d as f64
    } else {
        s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

/// Runs the CLI on `args` (program name first), writing to the given streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(value) => {
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&value).unwrap_or_default());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

/// Entry point of the binary.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cli: &Cli) -> Result<Value> {
    fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Analyze { mu } => cmd_analyze(*mu, &cli.out, cli.seed),
        Command::Cycle { mu, family } => match (mu, family) {
            (Some(mu), _) => cmd_cycle(*mu, &cli.out, cli.seed),
            (None, Some(list)) => cmd_family(list, &cli.out, cli.seed),
            (None, None) => Err(KppError::InvalidParameter("give --mu or --family".into())),
        },
        Command::Simulate(args) => cmd_simulate(args, &cli.out, cli.seed),
        Command::Front { c } => cmd_front(*c, &cli.out, cli.seed),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn cmd_analyze(mu: f64, out: &Path, seed: u64) -> Result<Value> {
    let params = ModelParams::new(mu)?;
    let hopf = hopf_analysis(mu)?;
    let lambda_omega = lambda_omega_params(mu)?;
    let below_hopf = mu < MU_H;
    let speeds = if below_hopf { Some(spreading_speeds(mu)?) } else { None };
    let threshold = if below_hopf { Some(sherratt_threshold(mu)?) } else { None };
    let l1 = first_lyapunov_coefficient()?;
    let steady = positive_steady_states(mu)?;
    let signs = sign_structure(&StateVec::ONES, &params)?;
    let report = json!({
        "command": "analyze",
        "seed": seed,
        "mu": mu,
        "stable": hopf.stable,
        "cLin": speeds.map(|s| s.c_lin),
        "cZeroInvasion": 2.0,
        "sherrattThreshold": threshold,
        "l1": l1,
        "hopf": hopf,
        "lambdaOmega": lambda_omega,
        "spreadingSpeeds": speeds,
        "steadyStates": steady,
        "signStructureAtOne": signs,
    });
    write_json(&out.join("analysis.json"), &report)?;
    Ok(report)
}

fn cycle_summary(cycle: &LimitCycleRecord) -> Value {
    json!({
        "mu": cycle.mu,
        "period": cycle.period,
        "betaMax": cycle.beta_max,
        "alphaRange": cycle.alpha_range,
        "rotation": cycle.rotation,
        "strictlyMonotone": cycle.strictly_monotone,
        "minComponent": cycle.min_component,
        "vertexDistances": cycle.vertex_distances(10.0),
        "localizationBandViolation": localization_band_violation(cycle),
        "samples": cycle.samples.len(),
    })
}

pub fn cmd_cycle(mu: f64, out: &Path, seed: u64) -> Result<Value> {
    let cycle = find_limit_cycle(mu)?;
    let params = ModelParams::new(mu)?;
    let fl = floquet(&cycle, &params, 0.0)?;
    let shifted: Vec<_> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&w| floquet(&cycle, &params, w))
        .collect::<Result<_>>()?;
    let reference = reference_cycle_c0();
    let hausdorff = hausdorff_distance(&cycle.samples, &reference.points);
    cycle.write_csv(create(&out.join("cycle.csv"))?)?;
    let mut report = cycle_summary(&cycle);
    report["command"] = json!("cycle");
    report["seed"] = json!(seed);
    report["floquet"] = json!(fl);
    report["floquetShifted"] = json!(shifted);
    report["hausdorffToC0"] = json!(hausdorff);
    write_json(&out.join("cycle.json"), &report)?;
    Ok(report)
}

pub fn cmd_family(mu_values: &[f64], out: &Path, seed: u64) -> Result<Value> {
    let reference = reference_cycle_c0();
    let family = cycle_family(mu_values, &reference, &CycleSettings::default())?;
    let mut members = Vec::new();
    for (i, m) in family.members.iter().enumerate() {
        m.cycle.write_csv(create(&out.join(format!("cycle_{i}.csv")))?)?;
        let mut s = cycle_summary(&m.cycle);
        s["hausdorffToC0"] = json!(m.hausdorff_to_c0);
        members.push(s);
    }
    let report = json!({
        "command": "cycle",
        "seed": seed,
        "family": mu_values,
        "members": members,
        "monotoneTowardC0": family.monotone_toward_c0,
        "error": family.error,
        "failedMu": family.failed_mu,
    });
    write_json(&out.join("family.json"), &report)?;
    if let Some(e) = &family.error {
        return Err(KppError::NoConvergence(format!("continuation stopped: {e}")));
    }
    Ok(report)
}

pub fn resolve_sim_config(args: &SimulateArgs, seed: u64) -> Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| KppError::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
            let base = serde_json::to_value(SimConfig::preset(&args.preset)?)?;
            let overrides: Value = serde_json::from_str(&text)?;
            let Value::Object(map) = overrides else {
                return Err(KppError::InvalidParameter("config must be a JSON object".into()));
            };
            let mut merged = base;
            for (k, v) in map {
                merged[k] = v;
            }
            serde_json::from_value(merged)?
        }
        None => SimConfig::preset(&args.preset)?,
    };
    if let Some(v) = args.mu {
        cfg.mu = v;
    }
    if let Some(v) = args.dx {
        cfg.dx = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.half_length {
        cfg.half_length = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.level {
        cfg.level_value = v;
    }
    if let Some(v) = args.eps {
        cfg.envelope_eps = v;
    }
    cfg.seed = seed;
    cfg.validate()?;
    Ok(cfg)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &Path, seed: u64) -> Result<Value> {
    let cfg = resolve_sim_config(args, seed)?;
    write_json(&out.join("config.json"), &cfg)?;
    let result = simulate(&cfg)?;
    result.write_snapshots_csv(create(&out.join("snapshots.csv"))?)?;
    result.write_traces_csv(create(&out.join("fronts.csv"))?)?;
    let summary = summarize(&result)?;
    write_json(&out.join("wave_train.json"), &summary.wave_train)?;
    let report = json!({
        "command": "simulate",
        "seed": seed,
        "outerSpeed": summary.outer_speed,
        "envelopeSpeed": summary.envelope_speed,
        "waveTrain": summary.wave_train,
        "notes": summary.notes,
        "snapshotTimes": result.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(),
    });
    write_json(&out.join("speeds.json"), &report)?;
    Ok(report)
}

pub fn cmd_front(c: f64, out: &Path, seed: u64) -> Result<Value> {
    let profile = scalar_front_profile(c)?;
    profile.write_csv(create(&out.join("front.csv"))?)?;
    let expected = 0.5 * (-c + (c * c - 4.0).max(0.0).sqrt());
    let report = json!({
        "command": "front",
        "seed": seed,
        "speed": c,
        "residual": profile.residual,
        "monotone": profile.monotone,
        "points": profile.p.len(),
        "tailDecayRate": profile.tail_decay_rate,
        "linearDecayRate": expected,
    });
    write_json(&out.join("front.json"), &report)?;
    Ok(report)
}
