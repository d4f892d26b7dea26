//! Command-line surface. Every subcommand is a thin wrapper over the
//! library with CSV/JSON output and a reproducibility manifest.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure.

mod manifest;
mod output;

pub use manifest::{sha256_hex, OutputDigest, RunManifest};

use crate::analysis::{
    classify_empirical, classify_multi, find_endemic_orbit, lyapunov_max,
    sweep_bifurcation_plane, ClassifySettings, LyapunovPolicy, LyapunovSettings, OmegaLimitReport,
    SweepGrid,
};
use crate::closedform::{
    floquet_analytic, p2_seasonal, threshold_summary, FloquetPair, OrbitKind, ThresholdCurves,
    ThresholdSummary,
};
use crate::error::Error;
use crate::integrator::{integrate, integrate_suspended, monodromy_numeric, IntegratorConfig};
use crate::model::{ModelParams, SeasonalForcing, State, TabulatedPsi};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Pulse-vaccinated SIR dynamics: simulation, thresholds, sweeps, Floquet
/// checks, Lyapunov estimation and regime classification.
#[derive(Debug, Parser)]
#[command(name = "pulse-sir", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the impulsive flow and write the time series.
    Simulate(SimulateArgs),
    /// Threshold curves p1(T), p2(T) (and p2seas with forcing) on a T grid.
    Curves(CurvesArgs),
    /// Classify a (T, p) grid empirically and compare with the analytic map.
    Sweep(SweepArgs),
    /// Analytic vs numeric Floquet multipliers of a disease-free orbit.
    Floquet(FloquetArgs),
    /// Largest Lyapunov exponent along a trajectory.
    Lyapunov(LyapunovArgs),
    /// Empirical ω-limit classification of one parameter set.
    Classify(ClassifyArgs),
    /// Locate the endemic periodic orbit (region 4).
    EndemicOrbit(EndemicOrbitArgs),
    /// Re-run a recorded command and verify the output digests.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Carrying capacity of the susceptibles, in (0, 1].
    #[arg(long = "A", default_value_t = 1.0)]
    a: f64,
    /// Baseline transmission rate.
    #[arg(long, default_value_t = 0.9)]
    beta0: f64,
    /// Combined removal rate of the infectious (mu + d). Default 0.2.
    #[arg(long)]
    sigma: Option<f64>,
    /// Cure rate.
    #[arg(long, default_value_t = 0.5)]
    g: f64,
    /// Natural death rate (enters only the R equation; defaults to sigma).
    #[arg(long)]
    mu: Option<f64>,
    /// Disease-induced death rate; together with --mu defines sigma.
    #[arg(long)]
    d: Option<f64>,
    /// Pulse vaccination proportion in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    /// Pulse period.
    #[arg(long = "T", default_value_t = 4.0)]
    period: f64,
    /// Seasonal amplitude (0 switches forcing off).
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Seasonal frequency.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Forcing profile: "cos1" (1 + cos) or "file:PATH" with CSV rows "u,psi".
    #[arg(long, default_value = "cos1")]
    psi: String,
}

impl ModelArgs {
    fn build(&self) -> Result<ModelParams, CliError> {
        const DEFAULT_SIGMA: f64 = 0.2;
        let (sigma, mu) = match (self.sigma, self.mu, self.d) {
            (Some(s), None, None) => (s, s),
            (Some(s), Some(m), None) => (s, m),
            (Some(s), None, Some(d)) => {
                let m = s - d;
                if m < 0.0 {
                    return Err(CliError::Usage(format!(
                        "--d {d} exceeds --sigma {s}; implied mu would be negative"
                    )));
                }
                (s, m)
            }
            (Some(s), Some(m), Some(d)) => {
                if ((m + d) - s).abs() > 1e-12 {
                    return Err(CliError::Usage(format!(
                        "--sigma {s} conflicts with --mu {m} + --d {d} = {}",
                        m + d
                    )));
                }
                (s, m)
            }
            (None, Some(m), Some(d)) => (m + d, m),
            (None, Some(m), None) => (DEFAULT_SIGMA, m),
            (None, None, None) => (DEFAULT_SIGMA, DEFAULT_SIGMA),
            (None, None, Some(_)) => {
                return Err(CliError::Usage(
                    "--d needs --mu (or --sigma) to pin the split".into(),
                ))
            }
        };
        let psi = parse_psi(&self.psi)?;
        let params = ModelParams {
            a: self.a,
            beta0: self.beta0,
            sigma,
            g: self.g,
            mu,
            p: self.p,
            period: self.period,
            gamma: self.gamma,
            omega: self.omega,
            psi,
        };
        params.validate().map_err(CliError::usage)?;
        Ok(params)
    }
}

fn parse_psi(spec: &str) -> Result<SeasonalForcing, CliError> {
    if spec == "cos1" {
        return Ok(SeasonalForcing::CosineRaised);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read psi file {path}: {e}")))?;
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |field: Option<&str>| -> Result<f64, CliError> {
                field
                    .map(str::trim)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        CliError::Usage(format!("{path}:{}: expected \"u,psi\"", lineno + 1))
                    })
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            knots.push((u, v));
        }
        let table = TabulatedPsi::new(knots).map_err(CliError::usage)?;
        return Ok(SeasonalForcing::Tabulated(table));
    }
    Err(CliError::Usage(format!(
        "--psi must be \"cos1\" or \"file:PATH\", got {spec:?}"
    )))
}

#[derive(Debug, Clone, Args)]
struct InitialArgs {
    #[arg(long, default_value_t = 0.5)]
    s0: f64,
    #[arg(long, default_value_t = 0.4)]
    i0: f64,
    #[arg(long, default_value_t = 0.0)]
    r0: f64,
    /// Initial seasonal phase; selects the suspended system.
    #[arg(long)]
    theta0: Option<f64>,
}

impl InitialArgs {
    fn state(&self) -> State {
        State::new(self.s0, self.i0, self.r0, 0.0)
    }
}

#[derive(Debug, Clone, Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-11)]
    abs_tol: f64,
    /// Step-size cap (further clamped to T/4 internally).
    #[arg(long)]
    max_step: Option<f64>,
    /// Sampling interval of stored trajectory rows.
    #[arg(long, default_value_t = 0.05)]
    dense_dt: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<IntegratorConfig, CliError> {
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
            dense_output_dt: self.dense_dt,
        };
        cfg.validate().map_err(CliError::usage)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted (manifests need --out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for sampled-initial-condition suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel cells.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    initial: InitialArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Integration horizon.
    #[arg(long, default_value_t = 400.0)]
    t_end: f64,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 0.1)]
    t_min: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 100)]
    t_steps: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    initial: InitialArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 0.5)]
    t_min: f64,
    #[arg(long, default_value_t = 8.0)]
    t_max: f64,
    #[arg(long, default_value_t = 20)]
    t_steps: usize,
    #[arg(long, default_value_t = 0.02)]
    p_min: f64,
    #[arg(long, default_value_t = 0.98)]
    p_max: f64,
    #[arg(long, default_value_t = 20)]
    p_steps: usize,
    /// Per-cell horizon in pulses.
    #[arg(long, default_value_t = 600)]
    max_pulses: usize,
    /// Stroboscopic residual tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Half-width of the boundary exclusion band in p.
    #[arg(long, default_value_t = 0.02)]
    boundary_band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrbitArg {
    Origin,
    DiseaseFree,
}

#[derive(Debug, Args)]
struct FloquetArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, value_enum, default_value_t = OrbitArg::DiseaseFree)]
    orbit: OrbitArg,
}

#[derive(Debug, Args)]
struct LyapunovArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    initial: InitialArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Total horizon; defaults to 500 pulse periods.
    #[arg(long)]
    horizon: Option<f64>,
    /// Renormalization interval; defaults to the pulse period.
    #[arg(long)]
    renorm_every: Option<f64>,
    /// Leading fraction of the horizon discarded.
    #[arg(long, default_value_t = 0.2)]
    transient: f64,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    initial: InitialArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 600)]
    max_pulses: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Extra random initial conditions (seeded by --seed).
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Debug, Args)]
struct EndemicOrbitArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RerunArgs {
    /// Manifest written by a previous run.
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn usage(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Domain(_) | Error::Io(_) => {
                CliError::Usage(e.to_string())
            }
            Error::Existence(_)
            | Error::Integration { .. }
            | Error::Convergence { .. }
            | Error::Quadrature(_) => CliError::Numeric(e.to_string()),
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    run_with_args(&argv)
}

fn run_with_args(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command, &argv[1..]) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

struct Emitter<'a> {
    manifest: RunManifest,
    out: Option<&'a Path>,
    started: Instant,
}

impl<'a> Emitter<'a> {
    fn new(command: &str, argv: &[String], out: Option<&'a Path>) -> Self {
        Self {
            manifest: RunManifest::new(command, argv, 0.0),
            out,
            started: Instant::now(),
        }
    }

    fn derived_path(&self, suffix: &str) -> Option<PathBuf> {
        self.out.map(|p| {
            let mut name = p.as_os_str().to_os_string();
            name.push(suffix);
            PathBuf::from(name)
        })
    }

    /// Writes the primary payload to `--out` or stdout.
    fn emit(&mut self, payload: &str) -> Result<(), CliError> {
        match self.out {
            None => {
                print!("{payload}");
                Ok(())
            }
            Some(path) => {
                std::fs::write(path, payload)
                    .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
                self.manifest.record(path, payload.as_bytes());
                Ok(())
            }
        }
    }

    /// Writes a secondary payload to `<out><suffix>`.
    fn emit_sidecar(&mut self, suffix: &str, payload: &str) -> Result<(), CliError> {
        if let Some(path) = self.derived_path(suffix) {
            std::fs::write(&path, payload)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            self.manifest.record(&path, payload.as_bytes());
        }
        Ok(())
    }

    /// Finalizes the manifest next to the primary output.
    fn finish(mut self) -> Result<(), CliError> {
        if let Some(path) = self.derived_path(".manifest.json") {
            self.manifest.duration_seconds = self.started.elapsed().as_secs_f64();
            let text = serde_json::to_string_pretty(&self.manifest)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            std::fs::write(&path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Numeric(e.to_string()))
}

fn want_json(args: &OutputArgs, default_json: bool) -> Result<bool, CliError> {
    Ok(match args.format {
        None => default_json,
        Some(OutputFormat::Json) => true,
        Some(OutputFormat::Csv) => false,
    })
}

fn require_json(args: &OutputArgs, command: &str) -> Result<(), CliError> {
    if matches!(args.format, Some(OutputFormat::Csv)) {
        return Err(CliError::Usage(format!(
            "{command} emits a JSON report; --format csv is not available here"
        )));
    }
    Ok(())
}

fn configure_jobs(output: &OutputArgs) {
    if let Some(jobs) = output.jobs {
        // Ignored if a global pool already exists (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
}

fn dispatch(command: Command, argv: &[String]) -> Result<(), CliError> {
    match command {
        Command::Simulate(args) => cmd_simulate(args, argv),
        Command::Curves(args) => cmd_curves(args, argv),
        Command::Sweep(args) => cmd_sweep(args, argv),
        Command::Floquet(args) => cmd_floquet(args, argv),
        Command::Lyapunov(args) => cmd_lyapunov(args, argv),
        Command::Classify(args) => cmd_classify(args, argv),
        Command::EndemicOrbit(args) => cmd_endemic_orbit(args, argv),
        Command::Rerun(args) => cmd_rerun(args),
    }
}

fn cmd_simulate(args: SimulateArgs, argv: &[String]) -> Result<(), CliError> {
    let params = args.model.build()?;
    let config = args.solver.config()?;
    let initial = args.initial.state();
    let mut emitter = Emitter::new("simulate", argv, args.output.out.as_deref());

    let suspended = args.initial.theta0.is_some() || params.gamma > 0.0;
    let traj = if suspended {
        integrate_suspended(
            &params,
            &config,
            initial,
            args.initial.theta0.unwrap_or(0.0),
            args.t_end,
        )?
    } else {
        integrate(&params, &config, initial, args.t_end)?
    };
    if traj.started_outside_region {
        eprintln!("warning: initial condition lies outside the trapping region");
    }

    if want_json(&args.output, false)? {
        emitter.emit(&to_json(&traj)?)?;
    } else {
        emitter.emit(&output::trajectory_csv(&traj))?;
    }
    emitter.finish()
}

fn cmd_curves(args: CurvesArgs, argv: &[String]) -> Result<(), CliError> {
    let params = args.model.build()?;
    if args.t_steps < 1 || !(args.t_min > 0.0) || !(args.t_max > args.t_min) {
        return Err(CliError::Usage(
            "curves needs 0 < t-min < t-max and t-steps >= 1".into(),
        ));
    }
    let curves = ThresholdCurves::from_params(&params);
    let seasonal = params.gamma > 0.0;
    let mut rows = Vec::with_capacity(args.t_steps);
    for k in 0..args.t_steps {
        let t = if args.t_steps == 1 {
            args.t_min
        } else {
            args.t_min + (args.t_max - args.t_min) * k as f64 / (args.t_steps - 1) as f64
        };
        let p1 = curves.p1(t);
        let p2 = curves.p2(t)?;
        let p2seas = if seasonal {
            // Evaluated along the disease-free orbit of the given --p; the
            // orbit may not exist for small T (p >= p1), left empty there.
            let stage = params.clone().with_pulse(params.p, t);
            p2_seasonal(&stage).ok()
        } else {
            None
        };
        rows.push((t, p1, p2, p2seas));
    }

    let mut emitter = Emitter::new("curves", argv, args.output.out.as_deref());
    if want_json(&args.output, false)? {
        #[derive(Serialize)]
        struct Row {
            t: f64,
            p1: f64,
            p2: f64,
            #[serde(skip_serializing_if = "Option::is_none")]
            p2seas: Option<f64>,
        }
        let json_rows: Vec<Row> = rows
            .iter()
            .map(|&(t, p1, p2, p2seas)| Row { t, p1, p2, p2seas })
            .collect();
        emitter.emit(&to_json(&json_rows)?)?;
    } else {
        emitter.emit(&output::curves_csv(&rows, seasonal))?;
    }
    emitter.finish()
}

fn cmd_sweep(args: SweepArgs, argv: &[String]) -> Result<(), CliError> {
    let params = args.model.build()?;
    configure_jobs(&args.output);
    let mut grid = SweepGrid::linspace(
        args.t_min,
        args.t_max,
        args.t_steps,
        args.p_min,
        args.p_max,
        args.p_steps,
    )?;
    grid.initial = args.initial.state();
    grid.config = args.solver.config()?;
    grid.settings.max_pulses = args.max_pulses;
    grid.settings.tol = args.tol;
    grid.boundary_band = args.boundary_band;

    let report = sweep_bifurcation_plane(&params, &grid)?;

    #[derive(Serialize)]
    struct Discrepancy {
        t: f64,
        p: f64,
        analytic: String,
        empirical: String,
    }
    #[derive(Serialize)]
    struct Failure {
        t: f64,
        p: f64,
        error: String,
    }
    #[derive(Serialize)]
    struct Summary {
        comparable: usize,
        matched: usize,
        agreement_fraction: f64,
        discrepancies: Vec<Discrepancy>,
        failures: Vec<Failure>,
    }
    let summary = Summary {
        comparable: report.comparable,
        matched: report.matched,
        agreement_fraction: report.agreement_fraction(),
        discrepancies: report
            .discrepancies
            .iter()
            .map(|&i| {
                let c = &report.cells[i];
                Discrepancy {
                    t: c.t,
                    p: c.p,
                    analytic: c.analytic.map(|l| l.to_string()).unwrap_or_default(),
                    empirical: c.empirical.map(|l| l.to_string()).unwrap_or_default(),
                }
            })
            .collect(),
        failures: report
            .cells
            .iter()
            .filter_map(|c| {
                c.error.as_ref().map(|e| Failure {
                    t: c.t,
                    p: c.p,
                    error: e.clone(),
                })
            })
            .collect(),
    };

    let mut emitter = Emitter::new("sweep", argv, args.output.out.as_deref());
    if want_json(&args.output, false)? {
        #[derive(Serialize)]
        struct Full<'a> {
            summary: &'a Summary,
            cells: &'a [crate::analysis::SweepCell],
        }
        emitter.emit(&to_json(&Full {
            summary: &summary,
            cells: &report.cells,
        })?)?;
    } else {
        emitter.emit(&output::sweep_csv(&report))?;
        emitter.emit_sidecar(".discrepancies.json", &to_json(&summary)?)?;
    }
    emitter.finish()
}

#[derive(Serialize)]
struct FloquetReport {
    orbit: OrbitKind,
    analytic: FloquetPair,
    numeric: FloquetPair,
    rel_err_lambda1: f64,
    rel_err_lambda2: f64,
    thresholds: ThresholdSummary,
}

fn cmd_floquet(args: FloquetArgs, argv: &[String]) -> Result<(), CliError> {
    require_json(&args.output, "floquet")?;
    let params = args.model.build()?;
    let config = args.solver.config()?;
    let orbit = match args.orbit {
        OrbitArg::Origin => OrbitKind::Origin,
        OrbitArg::DiseaseFree => OrbitKind::DiseaseFreePeriodic,
    };
    let analytic = floquet_analytic(&params, orbit)?;
    let numeric = monodromy_numeric(&params, &config, orbit)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    let report = FloquetReport {
        orbit,
        analytic,
        numeric,
        rel_err_lambda1: rel(numeric.lambda1, analytic.lambda1),
        rel_err_lambda2: rel(numeric.lambda2, analytic.lambda2),
        thresholds: threshold_summary(&params),
    };
    let mut emitter = Emitter::new("floquet", argv, args.output.out.as_deref());
    emitter.emit(&to_json(&report)?)?;
    emitter.finish()
}

fn cmd_lyapunov(args: LyapunovArgs, argv: &[String]) -> Result<(), CliError> {
    require_json(&args.output, "lyapunov")?;
    let params = args.model.build()?;
    let config = args.solver.config()?;
    let settings = LyapunovSettings {
        horizon: args.horizon.unwrap_or(500.0 * params.period),
        renorm_every: args.renorm_every.unwrap_or(params.period),
        transient_fraction: args.transient,
    };
    let report = lyapunov_max(
        &params,
        &config,
        args.initial.state(),
        args.initial.theta0,
        &settings,
    )?;

    #[derive(Serialize)]
    struct LyapunovOut {
        lambda: f64,
        horizon: f64,
        renorm_every: f64,
        transient_fraction: f64,
        averaged_span: f64,
        reseeds: usize,
        /// Running-average series, decimated to at most 200 points.
        series: Vec<(f64, f64)>,
    }
    let stride = (report.series.len() / 200).max(1);
    let series = report
        .series
        .iter()
        .step_by(stride)
        .copied()
        .collect::<Vec<_>>();
    let out = LyapunovOut {
        lambda: report.lambda,
        horizon: settings.horizon,
        renorm_every: settings.renorm_every,
        transient_fraction: settings.transient_fraction,
        averaged_span: report.averaged_span,
        reseeds: report.reseeds,
        series,
    };
    let mut emitter = Emitter::new("lyapunov", argv, args.output.out.as_deref());
    emitter.emit(&to_json(&out)?)?;
    emitter.finish()
}

fn cmd_classify(args: ClassifyArgs, argv: &[String]) -> Result<(), CliError> {
    require_json(&args.output, "classify")?;
    let params = args.model.build()?;
    let config = args.solver.config()?;
    let settings = ClassifySettings {
        max_pulses: args.max_pulses,
        tol: args.tol,
        lyapunov: LyapunovPolicy::OnNonConvergence,
        ..Default::default()
    };
    let report = classify_empirical(
        &params,
        &config,
        args.initial.state(),
        args.initial.theta0,
        &settings,
    )?;

    #[derive(Serialize)]
    struct SampledRun {
        initial: State,
        label: String,
        residual: f64,
        converged: bool,
    }
    #[derive(Serialize)]
    struct ClassifyOut {
        label: String,
        report: OmegaLimitReport,
        thresholds: ThresholdSummary,
        analytic: Option<String>,
        sampled: Vec<SampledRun>,
    }
    let sampled = if args.samples > 0 {
        classify_multi(
            &params,
            &config,
            args.samples,
            args.output.seed,
            args.initial.theta0,
            &settings,
        )?
        .into_iter()
        .map(|(initial, r)| SampledRun {
            initial,
            label: r.label.to_string(),
            residual: r.residual,
            converged: r.converged,
        })
        .collect()
    } else {
        Vec::new()
    };
    let out = ClassifyOut {
        label: report.label.to_string(),
        analytic: crate::closedform::classify_analytic(&params)
            .ok()
            .map(|l| l.to_string()),
        thresholds: threshold_summary(&params),
        report,
        sampled,
    };
    let mut emitter = Emitter::new("classify", argv, args.output.out.as_deref());
    emitter.emit(&to_json(&out)?)?;
    emitter.finish()
}

fn cmd_endemic_orbit(args: EndemicOrbitArgs, argv: &[String]) -> Result<(), CliError> {
    let params = args.model.build()?;
    let config = args.solver.config()?;
    let orbit = find_endemic_orbit(&params, &config)?;
    let mut emitter = Emitter::new("endemic-orbit", argv, args.output.out.as_deref());
    if want_json(&args.output, true)? {
        #[derive(Serialize)]
        struct OrbitOut {
            s_star: f64,
            i_star: f64,
            residual: f64,
            mean_s: f64,
            s_c: f64,
            iterations: usize,
        }
        emitter.emit(&to_json(&OrbitOut {
            s_star: orbit.s_star,
            i_star: orbit.i_star,
            residual: orbit.residual,
            mean_s: orbit.mean_s,
            s_c: params.s_c(),
            iterations: orbit.iterations,
        })?)?;
    } else {
        // One period of the orbit as a trajectory table.
        let mut csv = String::from("t,S,I,R\n");
        for st in &orbit.samples {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                output::fmt_f64(st.t),
                output::fmt_f64(st.s),
                output::fmt_f64(st.i),
                output::fmt_f64(st.r)
            ));
        }
        emitter.emit(&csv)?;
    }
    emitter.finish()
}

fn cmd_rerun(args: RerunArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad manifest: {e}")))?;
    if manifest.command == "rerun" {
        return Err(CliError::Usage("refusing to re-run a rerun".into()));
    }

    let mut argv = vec!["pulse-sir".to_string()];
    argv.extend(manifest.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv)
        .map_err(|e| CliError::Usage(format!("manifest argv does not parse: {e}")))?;
    dispatch(cli.command, &manifest.argv)?;

    let mut mismatches = 0;
    for output in &manifest.outputs {
        let data = std::fs::read(&output.path)
            .map_err(|e| CliError::Numeric(format!("missing output {}: {e}", output.path)))?;
        let digest = sha256_hex(&data);
        if digest == output.sha256 {
            println!("ok       {}", output.path);
        } else {
            println!("MISMATCH {}", output.path);
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        return Err(CliError::Numeric(format!(
            "{mismatches} output file(s) did not reproduce"
        )));
    }
    Ok(())
}
