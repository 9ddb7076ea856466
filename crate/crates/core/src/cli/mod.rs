//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 validation failure,
//! 3 infeasible under `--require-feasible`.

mod format;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analytic::{
    self, AnalyticError, BoundPair, GeoConstants, TauMethod, TauWindow, DEFAULT_EXCLUSION_RADIUS,
};
use crate::montecarlo::{self, Experiment, Layout, MonteCarloError, PositionMode, RelaySelection};
use crate::scenario::{ConfigError, ConfigOptions, Protocol, ScenarioConfig, ScenarioError};

pub use format::{csv_row, g9, Empirical, CSV_HEADER, VALIDATE_COLUMNS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const WORKERS_ENV: &str = "RELAYSEC_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "relaysec", version, about = "Outage bounds and Monte Carlo validation for two-hop relay cooperative jamming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission and secrecy outage bounds.
    Bounds(Common),
    /// Admissible range of the noise threshold tau.
    TauWindow(Common),
    /// Largest tolerable eavesdropper count.
    MMax(Common),
    /// Monte Carlo outage estimates.
    Simulate(Common),
    /// Compare bounds with simulation across a parameter sweep.
    Validate(SweepArgs),
    /// Bounds (and optionally estimates) across a parameter sweep.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, or `auto`.
    #[arg(long)]
    workers: Option<String>,
    /// Write CSV to this path, or `-` for stdout.
    #[arg(long)]
    csv: Option<String>,
    #[arg(long, default_value_t = DEFAULT_EXCLUSION_RADIUS)]
    exclusion_radius: f64,
    /// Solve the reliability constraint by bisection instead of the closed form.
    #[arg(long)]
    exact_tau: bool,
    /// Keep one node layout for every trial (geometric protocol).
    #[arg(long)]
    freeze_positions: bool,
    /// Read gamma_r and gamma_e in dB.
    #[arg(long)]
    db: bool,
    /// Exit with status 3 when the answer is "infeasible".
    #[arg(long)]
    require_feasible: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    param: String,
    #[arg(long, allow_negative_numbers = true)]
    start: f64,
    #[arg(long, allow_negative_numbers = true)]
    stop: f64,
    #[arg(long)]
    steps: usize,
    /// Also run the simulation at every point (`sweep` only).
    #[arg(long)]
    simulate: bool,
    #[arg(long, hide = true, default_value_t = 1.0)]
    bound_scale: f64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    MonteCarlo(#[from] MonteCarloError),
    #[error("{0}")]
    Usage(String),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Bounds(c) => cmd_bounds(&c, stdout, stderr),
        Command::TauWindow(c) => cmd_tau_window(&c, stdout),
        Command::MMax(c) => cmd_m_max(&c, stdout),
        Command::Simulate(c) => cmd_simulate(&c, stdout),
        Command::Validate(s) => cmd_sweep(&s, true, stdout),
        Command::Sweep(s) => cmd_sweep(&s, false, stdout),
    }
}

fn load(c: &Common) -> Result<ScenarioConfig, CliError> {
    let path = c.config.display().to_string();
    let text = fs::read_to_string(&c.config).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    ScenarioConfig::parse_with(&text, ConfigOptions { gamma_in_db: c.db })
        .map_err(|source| CliError::Config { path, source })
}

fn method(c: &Common) -> TauMethod {
    if c.exact_tau {
        TauMethod::Exact
    } else {
        TauMethod::Taylor
    }
}

fn workers(c: &Common) -> Result<usize, CliError> {
    let spec = match &c.workers {
        Some(w) => w.clone(),
        None => std::env::var(WORKERS_ENV).unwrap_or_else(|_| "auto".into()),
    };
    montecarlo::parse_workers(spec.trim()).map_err(CliError::Usage)
}

fn geo_constants(cfg: &ScenarioConfig, delta: f64) -> Result<Option<GeoConstants>, CliError> {
    if !cfg.protocol.is_geometric() {
        return Ok(None);
    }
    let g = cfg.scenario_geo()?.expect("protocol 3 configs carry geometry");
    Ok(Some(analytic::geo_constants(g.base.n, g.a, g.b, g.alpha, delta)?))
}

/// Closed-form bounds for the configured protocol.
struct Bounds {
    tx: BoundPair,
    sec: BoundPair,
    consts: Option<GeoConstants>,
}

fn bounds(cfg: &ScenarioConfig, delta: f64) -> Result<Bounds, CliError> {
    let s = cfg.scenario_equal()?;
    let (n, m) = (s.n, s.m);
    Ok(match cfg.protocol {
        Protocol::Optimal => Bounds {
            tx: analytic::lemma1_transmission_bound(n, s.gamma_r, s.tau),
            sec: analytic::lemma1_secrecy_bound(n, m, s.gamma_e, s.tau),
            consts: None,
        },
        Protocol::Random => Bounds {
            tx: analytic::lemma3_transmission_bound(n, s.gamma_r, s.tau),
            sec: analytic::lemma3_secrecy_bound(n, m, s.gamma_e, s.tau),
            consts: None,
        },
        Protocol::Region => {
            let consts = geo_constants(cfg, delta)?.expect("geometric protocol");
            let g = cfg.scenario_geo()?.expect("geometric protocol");
            Bounds {
                tx: analytic::lemma5_transmission_bound(&g, &consts)?,
                sec: analytic::lemma5_secrecy_bound(&g, &consts)?,
                consts: Some(consts),
            }
        }
    })
}

fn experiment(cfg: &ScenarioConfig, c: &Common, seed: u64) -> Result<Experiment, CliError> {
    let s = cfg.scenario_equal()?.into_inner();
    Ok(match RelaySelection::try_from(cfg.protocol) {
        Ok(selection) => Experiment::Equal { selection, scenario: s },
        Err(_) => {
            let g = cfg.scenario_geo()?.expect("geometric protocol").into_inner();
            let positions = if c.freeze_positions {
                PositionMode::Frozen(Layout::frozen(seed, s.n as usize, s.m as usize))
            } else {
                PositionMode::Resample
            };
            Experiment::Geo { scenario: g, positions }
        }
    })
}

fn simulate(cfg: &ScenarioConfig, c: &Common) -> Result<Empirical, CliError> {
    let trials = c.trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = c.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let exp = experiment(cfg, c, seed)?;
    let (tx, sec) = montecarlo::estimate(&exp, trials, seed, workers(c)?)?;
    Ok(Empirical { trials, seed, tx, sec })
}

/// Where CSV goes: a file, or stdout for `-`.
fn with_csv<F>(target: &str, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    if target == "-" {
        f(stdout)?;
    } else {
        let mut file = io::BufWriter::new(fs::File::create(target)?);
        f(&mut file)?;
        file.flush()?;
    }
    Ok(())
}

fn cmd_bounds(c: &Common, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load(c)?;
    if cfg.equal.n0 != 0.0 {
        writeln!(stderr, "warning: the bounds assume n0 = 0")?;
    }
    let b = bounds(&cfg, c.exclusion_radius)?;
    writeln!(stdout, "protocol = {}", cfg.protocol.id())?;
    writeln!(stdout, "tx_bound_raw = {}", g9(b.tx.raw))?;
    writeln!(stdout, "tx_bound = {}", g9(b.tx.clamped))?;
    writeln!(stdout, "sec_bound_raw = {}", g9(b.sec.raw))?;
    writeln!(stdout, "sec_bound = {}", g9(b.sec.clamped))?;
    if let Some(k) = &b.consts {
        for (name, v) in [
            ("theta", k.theta),
            ("varphi1", k.varphi1),
            ("varphi2", k.varphi2),
            ("phi", k.phi),
            ("psi", k.psi),
            ("exclusion_radius", k.exclusion_radius),
        ] {
            writeln!(stdout, "{name} = {}", g9(v))?;
        }
    }
    if let Some(target) = &c.csv {
        let row = csv_row(&cfg, b.tx, b.sec, None);
        with_csv(target, stdout, |w| writeln!(w, "{CSV_HEADER}\n{row}"))?;
    }
    Ok(EXIT_OK)
}

fn requirements(cfg: &ScenarioConfig, what: &str) -> Result<(f64, f64), CliError> {
    match cfg.requirements()? {
        Some(r) => Ok((r.eps_t, r.eps_s)),
        None => Err(CliError::Usage(format!("{what} needs eps_t and eps_s in the config"))),
    }
}

fn infeasible_code(c: &Common) -> i32 {
    if c.require_feasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}

fn tau_window(cfg: &ScenarioConfig, c: &Common) -> Result<TauWindow, CliError> {
    let (eps_t, eps_s) = requirements(cfg, "tau-window")?;
    let s = cfg.scenario_equal()?;
    Ok(match cfg.protocol {
        Protocol::Region => {
            let consts = geo_constants(cfg, c.exclusion_radius)?.expect("geometric protocol");
            let g = cfg.scenario_geo()?.expect("geometric protocol");
            analytic::lemma6_window(&g, eps_t, eps_s, &consts, method(c))?
        }
        p => analytic::tau_window_protocol(p, s.n, s.gamma_r, s.gamma_e, eps_t, eps_s, s.m, method(c))?,
    })
}

fn cmd_tau_window(c: &Common, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load(c)?;
    let w = tau_window(&cfg, c)?;
    writeln!(stdout, "tau_min = {}", format::g9_or(w.tau_min, "none"))?;
    let tau_max = if w.tau_max == f64::NEG_INFINITY {
        "none".to_string()
    } else {
        format::g9_or(w.tau_max, "unbounded")
    };
    writeln!(stdout, "tau_max = {tau_max}")?;
    match w.cause {
        None => {
            writeln!(stdout, "feasible = yes")?;
            writeln!(stdout, "binding = {}", w.binding())?;
            Ok(EXIT_OK)
        }
        Some(cause) => {
            writeln!(stdout, "feasible = no")?;
            match cause {
                analytic::Infeasibility::Empty => writeln!(
                    stdout,
                    "infeasible: tau_max={} < tau_min={}",
                    g9(w.tau_max),
                    g9(w.tau_min)
                )?,
                other => writeln!(stdout, "infeasible: {other}")?,
            }
            Ok(infeasible_code(c))
        }
    }
}

fn cmd_m_max(c: &Common, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load(c)?;
    let (eps_t, eps_s) = requirements(&cfg, "m-max")?;
    let s = cfg.scenario_equal()?;
    let m = match cfg.protocol {
        Protocol::Optimal => analytic::theorem1_m_max_with(s.n, s.gamma_r, s.gamma_e, eps_t, eps_s, method(c)),
        Protocol::Random => analytic::theorem2_m_max_with(s.n, s.gamma_r, s.gamma_e, eps_t, eps_s, method(c)),
        Protocol::Region => {
            let consts = geo_constants(&cfg, c.exclusion_radius)?.expect("geometric protocol");
            let g = cfg.scenario_geo()?.expect("geometric protocol");
            analytic::theorem3_m_max(&g, eps_t, eps_s, &consts, method(c))
        }
    };
    match m {
        Ok(m) => {
            writeln!(stdout, "m_max = {}", format::g9_or(m, "unbounded"))?;
            writeln!(stdout, "m_max_floor = {}", format::g9_or(m.floor(), "unbounded"))?;
            Ok(EXIT_OK)
        }
        Err(AnalyticError::ReliabilityInfeasible { theta, .. }) => {
            writeln!(stdout, "theta = {}", g9(theta))?;
            writeln!(stdout, "infeasible: {}", analytic::Infeasibility::Reliability)?;
            Ok(infeasible_code(c))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_simulate(c: &Common, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = load(c)?;
    let b = bounds(&cfg, c.exclusion_radius)?;
    let emp = simulate(&cfg, c)?;
    let row = csv_row(&cfg, b.tx, b.sec, Some(&emp));
    with_csv(c.csv.as_deref().unwrap_or("-"), stdout, |w| writeln!(w, "{CSV_HEADER}\n{row}"))?;
    Ok(EXIT_OK)
}

/// Evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                stop
            } else {
                start + (stop - start) * (i as f64 / last)
            }
        })
        .collect()
}

/// `(pass, slack)`: passes when the bound is not below the CI lower edge.
pub fn ci_check(bound: BoundPair, est: &montecarlo::OutageEstimate) -> (bool, f64) {
    let slack = bound.clamped - est.ci_low;
    (slack >= 0.0, slack)
}

fn cmd_sweep(a: &SweepArgs, validate: bool, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let c = &a.common;
    if a.steps < 2 {
        return Err(CliError::Usage(format!("--steps must be at least 2, got {}", a.steps)));
    }
    if !(a.start < a.stop) {
        return Err(CliError::Usage(format!(
            "--start must be below --stop, got {} and {}",
            a.start, a.stop
        )));
    }
    let base = load(c)?;
    let simulate_each = validate || a.simulate;
    let mut rows = Vec::with_capacity(a.steps);
    let mut failed = false;
    for value in linspace(a.start, a.stop, a.steps) {
        let mut cfg = base.clone();
        cfg.set_param(&a.param, value).map_err(CliError::Usage)?;
        cfg.check()?;
        if a.param == "alpha" || a.param == "a" || a.param == "b" || a.param == "r0" {
            if !cfg.protocol.is_geometric() {
                return Err(CliError::Usage(format!("`{}` only applies to protocol 3", a.param)));
            }
        }
        let b = bounds(&cfg, c.exclusion_radius)?;
        let (tx, sec) = (
            BoundPair::new(b.tx.raw * a.bound_scale),
            BoundPair::new(b.sec.raw * a.bound_scale),
        );
        let emp = if simulate_each { Some(simulate(&cfg, c)?) } else { None };
        let mut row = csv_row(&cfg, tx, sec, emp.as_ref());
        if validate {
            let e = emp.expect("validate always simulates");
            let (tx_pass, tx_slack) = ci_check(tx, &e.tx);
            let (sec_pass, sec_slack) = ci_check(sec, &e.sec);
            failed |= !(tx_pass && sec_pass);
            row.push_str(&format!(",{},{},{},{}", tx_pass, g9(tx_slack), sec_pass, g9(sec_slack)));
        }
        rows.push(row);
    }
    let header = if validate {
        format!("{CSV_HEADER},{VALIDATE_COLUMNS}")
    } else {
        CSV_HEADER.to_string()
    };
    with_csv(c.csv.as_deref().unwrap_or("-"), stdout, |w| {
        writeln!(w, "{header}")?;
        for r in &rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    })?;
    Ok(if failed { EXIT_VALIDATION } else { EXIT_OK })
}
