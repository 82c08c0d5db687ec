//! `fsilab` — command-line driver for the modal stability laboratory.
//!
//! Subcommands compose the library into report files: truncated interface
//! spectra, characteristic-quartic roots, single-mode trajectories,
//! instability thresholds, (α, Δt, mesh) stability maps, critical-step
//! bisection, and accuracy scans against the implicit reference.
//!
//! Parameters resolve in three layers: library defaults, then a flat
//! `key = value` configuration file (`--config`), then the individual
//! override flags (`--rho-f`, `--dt`, …). Tabular subcommands emit CSV by
//! default and JSON on request; object-shaped subcommands (`roots`,
//! `thresholds`, `critical-dt`) are JSON-only. Exit codes: 0 on success —
//! numerical findings such as instability or blow-up are data, not errors
//! — 1 for usage errors, 2 for I/O errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fsilab::{
    best_alpha, build_spectrum, characteristic_chi, critical_dt, monotonicity_warnings,
    quartic_roots, render_report, run_accuracy_scan, run_stability_map, simulate, thresholds,
    truncation_from_h, CriticalDtOutcome, Discretization, EvalMode, InitialData, ModalTrajectory,
    Mode, RangeSpec, ReportFormat, ResolvedConfig, RunConfig, Scheme, SweepSpec,
};

/// Coupling value used when neither the configuration file nor `--alpha`
/// provides one: mid-range for the bundled hemodynamic fixture.
const DEFAULT_ALPHA: f64 = 1.0e3;

#[derive(Parser)]
#[command(
    name = "fsilab",
    version,
    about = "Stability laboratory for a loosely coupled Robin-Neumann wall model",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Flat `key = value` configuration file (same keys as the override
    /// flags below).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format; tabular subcommands default to csv, while `roots`,
    /// `thresholds` and `critical-dt` are json-only.
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<FormatOpt>,

    /// Worker threads for grid sweeps (0 = one per core). Ignored in
    /// builds without the `parallel` feature.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(flatten)]
    over: Overrides,
}

/// Individual parameter overrides. Each mirrors a configuration-file key
/// (underscore spellings are accepted as aliases) and wins over the file.
#[derive(Args)]
struct Overrides {
    /// Fluid density ρ_f (g·cm⁻³).
    #[arg(long, alias = "rho_f", global = true, value_name = "VAL")]
    rho_f: Option<f64>,

    /// Wall density ρ_s (g·cm⁻³).
    #[arg(long, alias = "rho_s", global = true, value_name = "VAL")]
    rho_s: Option<f64>,

    /// Wall thickness H_s (cm).
    #[arg(long, alias = "h_s", global = true, value_name = "VAL")]
    h_s: Option<f64>,

    /// Zeroth-order wall stiffness β (dyne·cm⁻³).
    #[arg(long, global = true, value_name = "VAL")]
    beta: Option<f64>,

    /// Wall tension coefficient ψ (dyne·cm⁻¹).
    #[arg(long, global = true, value_name = "VAL")]
    psi: Option<f64>,

    /// Tube radius R (cm).
    #[arg(long, global = true, value_name = "VAL")]
    radius: Option<f64>,

    /// Tube length L (cm).
    #[arg(long, global = true, value_name = "VAL")]
    length: Option<f64>,

    /// Time step Δt (s).
    #[arg(long, global = true, value_name = "VAL")]
    dt: Option<f64>,

    /// Number of interface modes kept in the truncation.
    #[arg(long, alias = "n_modes", global = true, value_name = "N")]
    n_modes: Option<usize>,

    /// Default number of time steps for marching subcommands.
    #[arg(long, alias = "n_steps", global = true, value_name = "N")]
    n_steps: Option<usize>,

    /// Robin coupling parameter α (g·cm⁻²·s⁻¹).
    #[arg(long, global = true, value_name = "VAL")]
    alpha: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the truncated interface spectrum: mode index, added-mass
    /// eigenvalue, Laplace eigenvalue.
    Spectrum(SpectrumArgs),

    /// Roots of one mode's characteristic quartic with moduli and
    /// simplicity flags, plus the spectral radius (JSON).
    Roots(RootsArgs),

    /// March one interface mode and emit its trajectory.
    Simulate(SimulateArgs),

    /// Instability thresholds of the truncated spectrum at the configured
    /// coupling and step size (JSON).
    Thresholds,

    /// Classify every (alpha, dt, mesh) grid point into a stability map.
    StabilityMap(StabilityMapArgs),

    /// Bisect the stable-to-unstable step-size boundary at fixed coupling.
    CriticalDt(CriticalDtArgs),

    /// Relative error of the explicit scheme against the implicit
    /// reference over a coupling grid.
    AccuracyScan(AccuracyScanArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    /// Derive the truncation from a mesh spacing h instead of --n-modes.
    #[arg(long, value_name = "H")]
    mesh_h: Option<f64>,
}

#[derive(Args)]
struct RootsArgs {
    /// Interface mode to analyze (1-based).
    #[arg(long, default_value_t = 1, value_name = "I")]
    mode_index: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Time-marching scheme.
    #[arg(long, value_enum, default_value_t = SchemeOpt::ExplicitRn)]
    scheme: SchemeOpt,

    /// Interface mode to march (1-based).
    #[arg(long, default_value_t = 1, value_name = "I")]
    mode_index: usize,

    /// Number of steps (default: the configured n_steps).
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Initial data as three comma-separated values (default 1,1,0).
    #[arg(long, value_parser = parse_init, value_name = "ETA1,ETA0,U0")]
    init: Option<InitTriple>,
}

#[derive(Args)]
struct StabilityMapArgs {
    /// Coupling grid (default: the single configured alpha).
    #[arg(long, value_parser = parse_range, value_name = "MIN:MAX:COUNT[:log|lin]")]
    alpha_range: Option<RangeSpec>,

    /// Step-size grid (default: the single configured dt).
    #[arg(long, value_parser = parse_range, value_name = "MIN:MAX:COUNT[:log|lin]")]
    dt_range: Option<RangeSpec>,

    /// Mesh axis as mode counts (default: the configured n_modes).
    #[arg(long, value_delimiter = ',', value_name = "N1,N2,…")]
    mesh: Option<Vec<usize>>,

    /// Mesh axis as spacings h, converted through the truncation rule.
    #[arg(
        long,
        value_delimiter = ',',
        conflicts_with = "mesh",
        value_name = "H1,H2,…"
    )]
    mesh_h: Option<Vec<f64>>,

    /// Per-point evaluation route.
    #[arg(long, value_enum, default_value_t = EvalOpt::Analytic)]
    eval: EvalOpt,

    /// Step budget for empirical evaluation (default: configured n_steps).
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
}

#[derive(Args)]
struct CriticalDtArgs {
    /// Step-size bracket to bisect.
    #[arg(long, value_parser = parse_bracket, default_value = "1e-6:1e-2", value_name = "LO:HI")]
    bracket: Bracket,

    /// Relative tolerance on the bracketed step size.
    #[arg(long, default_value_t = 1.0e-5, value_name = "TOL")]
    tol: f64,
}

#[derive(Args)]
struct AccuracyScanArgs {
    /// Coupling grid to scan.
    #[arg(long, required = true, value_parser = parse_range, value_name = "MIN:MAX:COUNT[:log|lin]")]
    alpha_range: Option<RangeSpec>,

    /// Time horizon in steps (default: the configured n_steps).
    #[arg(long, value_name = "N")]
    steps: Option<usize>,

    /// Initial data as three comma-separated values (default 1,1,0).
    #[arg(long, value_parser = parse_init, value_name = "ETA1,ETA0,U0")]
    init: Option<InitTriple>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatOpt {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeOpt {
    ExplicitRn,
    Recurrence,
    Implicit,
}

impl From<SchemeOpt> for Scheme {
    fn from(s: SchemeOpt) -> Self {
        match s {
            SchemeOpt::ExplicitRn => Scheme::ExplicitRn,
            SchemeOpt::Recurrence => Scheme::Recurrence,
            SchemeOpt::Implicit => Scheme::ImplicitRef,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalOpt {
    Analytic,
    Empirical,
    Both,
}

impl From<EvalOpt> for EvalMode {
    fn from(e: EvalOpt) -> Self {
        match e {
            EvalOpt::Analytic => EvalMode::AnalyticRoots,
            EvalOpt::Empirical => EvalMode::EmpiricalSimulation,
            EvalOpt::Both => EvalMode::Both,
        }
    }
}

#[derive(Clone, Copy)]
struct Bracket(f64, f64);

fn parse_bracket(s: &str) -> Result<Bracket, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err("expected LO:HI".into());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|e| format!("HI: {e}"))?;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo {
        return Err("need finite 0 < LO < HI".into());
    }
    Ok(Bracket(lo, hi))
}

#[derive(Clone, Copy)]
struct InitTriple(f64, f64, f64);

fn parse_init(s: &str) -> Result<InitTriple, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected ETA1,ETA0,U0".into());
    }
    let mut v = [0.0f64; 3];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("`{}`: {e}", part.trim()))?;
        if !slot.is_finite() {
            return Err(format!("`{}` is not finite", part.trim()));
        }
    }
    Ok(InitTriple(v[0], v[1], v[2]))
}

impl From<InitTriple> for InitialData {
    fn from(t: InitTriple) -> Self {
        InitialData {
            eta1: t.0,
            eta0: t.1,
            u0: t.2,
            eta_m1: None,
            eta_m2: None,
        }
    }
}

fn parse_range(s: &str) -> Result<RangeSpec, String> {
    RangeSpec::parse(s).map_err(|e| e.to_string())
}

/// Failures split by exit code: bad input (1) versus filesystem (2).
enum CliError {
    Usage(String),
    Io(String),
}

impl From<fsilab::Error> for CliError {
    fn from(e: fsilab::Error) -> Self {
        match e {
            fsilab::Error::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("fsilab: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("fsilab: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let resolved = resolve_config(&cli.global)?;
    configure_jobs(cli.global.jobs);
    let text = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(&cli.global, &resolved, a)?,
        Command::Roots(a) => cmd_roots(&cli.global, &resolved, a)?,
        Command::Simulate(a) => cmd_simulate(&cli.global, &resolved, a)?,
        Command::Thresholds => cmd_thresholds(&cli.global, &resolved)?,
        Command::StabilityMap(a) => cmd_stability_map(&cli.global, &resolved, a)?,
        Command::CriticalDt(a) => cmd_critical_dt(&cli.global, &resolved, a)?,
        Command::AccuracyScan(a) => cmd_accuracy_scan(&cli.global, &resolved, a)?,
    };
    write_out(&cli.global, &text)
}

/// Defaults ← configuration file ← override flags, then validate.
fn resolve_config(g: &GlobalOpts) -> Result<ResolvedConfig, CliError> {
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let o = &g.over;
    if let Some(v) = o.rho_f {
        cfg.rho_f = Some(v);
    }
    if let Some(v) = o.rho_s {
        cfg.rho_s = Some(v);
    }
    if let Some(v) = o.h_s {
        cfg.h_s = Some(v);
    }
    if let Some(v) = o.beta {
        cfg.beta = Some(v);
    }
    if let Some(v) = o.psi {
        cfg.psi = Some(v);
    }
    if let Some(v) = o.radius {
        cfg.radius = Some(v);
    }
    if let Some(v) = o.length {
        cfg.length = Some(v);
    }
    if let Some(v) = o.dt {
        cfg.dt = Some(v);
    }
    if let Some(v) = o.n_modes {
        cfg.n_modes = Some(v);
    }
    if let Some(v) = o.n_steps {
        cfg.n_steps = Some(v);
    }
    if let Some(v) = o.alpha {
        cfg.alpha = Some(v);
    }
    Ok(cfg.resolve(DEFAULT_ALPHA)?)
}

#[cfg(feature = "parallel")]
fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // Configured once, before any sweep touches the global pool.
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("fsilab: thread pool: {e}");
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_jobs(jobs: Option<usize>) {
    if jobs.is_some() {
        eprintln!("fsilab: built without the parallel feature; --jobs has no effect");
    }
}

fn tabular_format(g: &GlobalOpts) -> ReportFormat {
    match g.format {
        Some(FormatOpt::Json) => ReportFormat::Json,
        _ => ReportFormat::Csv,
    }
}

fn json_only(g: &GlobalOpts, what: &str) -> Result<(), CliError> {
    if g.format == Some(FormatOpt::Csv) {
        return Err(CliError::Usage(format!(
            "`{what}` emits JSON only; drop `--format csv`"
        )));
    }
    Ok(())
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn mode_at(r: &ResolvedConfig, index: usize) -> Result<Mode, CliError> {
    if index == 0 {
        return Err(CliError::Usage("mode index is 1-based".into()));
    }
    let modes = build_spectrum(&r.params, r.disc.n_modes)?;
    modes.get(index - 1).copied().ok_or_else(|| {
        CliError::Usage(format!(
            "mode index {index} exceeds the {}-mode truncation",
            r.disc.n_modes
        ))
    })
}

fn cmd_spectrum(g: &GlobalOpts, r: &ResolvedConfig, a: &SpectrumArgs) -> Result<String, CliError> {
    let n = match a.mesh_h {
        Some(h) => truncation_from_h(r.params.length, h)?,
        None => r.disc.n_modes,
    };
    let modes = build_spectrum(&r.params, n)?;
    match tabular_format(g) {
        ReportFormat::Csv => {
            let mut out = String::from("i,mu,lambda\n");
            for m in &modes {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    m.index,
                    fmt_float(m.mu),
                    fmt_float(m.lambda)
                );
            }
            Ok(out)
        }
        ReportFormat::Json => pretty(&modes),
    }
}

fn cmd_roots(g: &GlobalOpts, r: &ResolvedConfig, a: &RootsArgs) -> Result<String, CliError> {
    json_only(g, "roots")?;
    let mode = mode_at(r, a.mode_index)?;
    let chi = characteristic_chi(&r.params, &mode, r.alpha, r.disc.dt)?;
    let set = quartic_roots(&chi)?;
    pretty(&set)
}

fn cmd_simulate(g: &GlobalOpts, r: &ResolvedConfig, a: &SimulateArgs) -> Result<String, CliError> {
    let mode = mode_at(r, a.mode_index)?;
    let d = Discretization {
        n_steps: a.steps.unwrap_or(r.disc.n_steps),
        ..r.disc
    };
    let init = a
        .init
        .map(InitialData::from)
        .unwrap_or_else(|| InitialData::flat(1.0));
    let traj = simulate(a.scheme.into(), &r.params, &d, &mode, r.alpha, &init)?;
    match tabular_format(g) {
        ReportFormat::Csv => Ok(trajectory_csv(&traj)),
        ReportFormat::Json => pretty(&traj),
    }
}

/// One row for the given level 0, one per recorded step, and one for the
/// one-past-the-end level — the only level that can cross the blow-up
/// guard, so `blown_up` is true at most on the final row.
fn trajectory_csv(traj: &ModalTrajectory) -> String {
    let opt = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
    let mut out = String::from("step,time,eta,u,p,blown_up\n");
    let _ = writeln!(
        out,
        "0,{},{},{},,false",
        fmt_float(0.0),
        fmt_float(traj.init.eta0),
        fmt_float(traj.init.u0)
    );
    for rec in &traj.series {
        let _ = writeln!(
            out,
            "{},{},{},{},{},false",
            rec.step,
            fmt_float(rec.step as f64 * traj.dt),
            fmt_float(rec.eta),
            opt(rec.u),
            opt(rec.p)
        );
    }
    let last = traj.series.len() + 1;
    let _ = writeln!(
        out,
        "{},{},{},,,{}",
        last,
        fmt_float(last as f64 * traj.dt),
        fmt_float(traj.final_eta),
        traj.blow_up.is_some()
    );
    out
}

fn cmd_thresholds(g: &GlobalOpts, r: &ResolvedConfig) -> Result<String, CliError> {
    json_only(g, "thresholds")?;
    let modes = build_spectrum(&r.params, r.disc.n_modes)?;
    let t = thresholds(&r.params, &modes, r.alpha, r.disc.dt)?;
    pretty(&serde_json::json!({
        "eta_bar": t.eta_bar,
        "eta_1": t.eta_1,
        "alpha_1": t.alpha_1,
        "alpha_1_applicable": t.alpha_1.is_some(),
        "eta_2": t.eta_2,
        "alpha_2": t.alpha_2,
        "alpha_2_applicable": t.alpha_2.is_some(),
    }))
}

fn cmd_stability_map(
    g: &GlobalOpts,
    r: &ResolvedConfig,
    a: &StabilityMapArgs,
) -> Result<String, CliError> {
    let mesh_grid = if let Some(hs) = &a.mesh_h {
        hs.iter()
            .map(|&h| truncation_from_h(r.params.length, h))
            .collect::<fsilab::Result<Vec<_>>>()?
    } else if let Some(m) = &a.mesh {
        m.clone()
    } else {
        vec![r.disc.n_modes]
    };
    let spec = SweepSpec {
        alpha_grid: a.alpha_range.unwrap_or_else(|| RangeSpec::single(r.alpha)),
        dt_grid: a.dt_range.unwrap_or_else(|| RangeSpec::single(r.disc.dt)),
        mesh_grid,
        params: r.params,
        eval: a.eval.into(),
        n_steps: a.steps.unwrap_or(r.disc.n_steps),
    };
    let records = run_stability_map(&spec)?;
    for w in monotonicity_warnings(&records) {
        eprintln!("fsilab: warning: {w}");
    }
    Ok(render_report(&records, tabular_format(g))?)
}

fn cmd_critical_dt(
    g: &GlobalOpts,
    r: &ResolvedConfig,
    a: &CriticalDtArgs,
) -> Result<String, CliError> {
    json_only(g, "critical-dt")?;
    let modes = build_spectrum(&r.params, r.disc.n_modes)?;
    let outcome = critical_dt(
        &r.params,
        &modes,
        r.alpha,
        (a.bracket.0, a.bracket.1),
        a.tol,
    )?;
    eprintln!("fsilab: {outcome}");
    let v = match outcome {
        CriticalDtOutcome::Found {
            dt_star,
            bracket,
            iterations,
        } => serde_json::json!({
            "found": true,
            "dt_star": dt_star,
            "bracket": [bracket.0, bracket.1],
            "iterations": iterations,
        }),
        CriticalDtOutcome::NoSignChange { lo, hi } => serde_json::json!({
            "found": false,
            "lo": lo.name(),
            "hi": hi.name(),
        }),
    };
    pretty(&v)
}

fn cmd_accuracy_scan(
    g: &GlobalOpts,
    r: &ResolvedConfig,
    a: &AccuracyScanArgs,
) -> Result<String, CliError> {
    let range = a
        .alpha_range
        .expect("clap enforces --alpha-range as required");
    let alphas = range.values()?;
    let d = Discretization {
        n_steps: a.steps.unwrap_or(r.disc.n_steps),
        ..r.disc
    };
    let init = a
        .init
        .map(InitialData::from)
        .unwrap_or_else(|| InitialData::flat(1.0));
    let records = run_accuracy_scan(&r.params, &d, &alphas, &init)?;
    if let Some(b) = best_alpha(&records) {
        eprintln!("fsilab: smallest error at alpha = {b:e}");
    }
    Ok(render_report(&records, tabular_format(g))?)
}

fn write_out(g: &GlobalOpts, text: &str) -> Result<(), CliError> {
    match &g.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}
