//! Parameter-space sweeps and reproducible reports.
//!
//! A sweep walks a grid in (α, Δt, mesh), classifies every point with the
//! root analysis, optionally simulates the dominant mode as an empirical
//! cross-check, and collects flat records that render bit-identically to
//! CSV or JSON. Everything is deterministic: grid order is fixed
//! (α-major, then Δt, then mesh), concurrent evaluation preserves that
//! order, and floats are printed with 17 significant digits so equal
//! inputs give equal bytes.
//!
//! Per-point trouble (a failed simulation, an analytic/empirical
//! disagreement) is recorded in the row's note and never aborts the sweep:
//! a stability map with a hole in it is still a map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_points, map_points_seq};
use crate::params::{Discretization, PhysicalParams};
use crate::simulate::{growth_rate, simulate, InitialData, ModalTrajectory, Scheme};
use crate::spectrum::{build_spectrum, Mode};
use crate::stability::{classify, Classification};

/// Linear or logarithmic spacing of a [`RangeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// A one-dimensional grid given as `min:max:count[:log]`.
///
/// `count = 1` degenerates to the single value `min` and requires
/// `min = max` so the intent is unambiguous. Log spacing interpolates in
/// ln and therefore needs `min > 0`; sweeps are over positive quantities,
/// so that is enforced for linear spacing too.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl RangeSpec {
    /// Single-point range.
    pub fn single(value: f64) -> Self {
        RangeSpec {
            min: value,
            max: value,
            count: 1,
            spacing: Spacing::Linear,
        }
    }

    /// Parse the `min:max:count[:log]` grammar (`lin` is accepted as the
    /// explicit form of the default).
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadRange {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad("expected min:max:count[:log]"));
        }
        let min: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad("min is not a number"))?;
        let max: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad("max is not a number"))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count is not an integer"))?;
        let spacing = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => {
                return Err(Error::BadRange {
                    spec: spec.to_string(),
                    reason: format!("unknown spacing `{other}` (expected lin or log)"),
                })
            }
        };
        let out = RangeSpec {
            min,
            max,
            count,
            spacing,
        };
        out.values()?; // validate eagerly so the error names the flag text
        Ok(out)
    }

    /// Materialize the grid, endpoints exact.
    pub fn values(&self) -> Result<Vec<f64>> {
        let bad = |reason: String| Error::BadRange {
            spec: format!("{}:{}:{}", self.min, self.max, self.count),
            reason,
        };
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(bad("endpoints must be finite".into()));
        }
        if self.min <= 0.0 {
            return Err(bad("endpoints must be positive".into()));
        }
        if self.max < self.min {
            return Err(bad("max must be ≥ min".into()));
        }
        match self.count {
            0 => Err(bad("count must be ≥ 1".into())),
            1 => {
                if self.min == self.max {
                    Ok(vec![self.min])
                } else {
                    Err(bad("count 1 requires min = max".into()))
                }
            }
            n => {
                let mut out = Vec::with_capacity(n);
                out.push(self.min);
                for k in 1..n - 1 {
                    let t = k as f64 / (n - 1) as f64;
                    let v = match self.spacing {
                        Spacing::Linear => self.min + t * (self.max - self.min),
                        Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                    };
                    out.push(v);
                }
                out.push(self.max);
                Ok(out)
            }
        }
    }
}

/// What a sweep evaluates at each grid point. The analytic columns are
/// always filled (the record format is fixed); the empirical modes
/// additionally simulate the dominant mode, and `Both` cross-checks the
/// two and writes a note when they visibly contradict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    AnalyticRoots,
    EmpiricalSimulation,
    Both,
}

impl EvalMode {
    pub fn name(self) -> &'static str {
        match self {
            EvalMode::AnalyticRoots => "analytic_roots",
            EvalMode::EmpiricalSimulation => "empirical_simulation",
            EvalMode::Both => "both",
        }
    }

    fn simulates(self) -> bool {
        !matches!(self, EvalMode::AnalyticRoots)
    }
}

/// A full sweep request: the two continuous grids, the list of spectrum
/// truncations, the shared physics, the evaluation mode, and the horizon
/// (in steps) of the empirical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub alpha_grid: RangeSpec,
    pub dt_grid: RangeSpec,
    pub mesh_grid: Vec<usize>,
    pub params: PhysicalParams,
    pub eval: EvalMode,
    pub n_steps: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.alpha_grid.values()?;
        self.dt_grid.values()?;
        if self.mesh_grid.is_empty() {
            return Err(Error::EmptyGrid { what: "mesh grid" });
        }
        if self.mesh_grid.contains(&0) {
            return Err(Error::ZeroModes);
        }
        if self.n_steps == 0 {
            return Err(Error::ZeroSteps);
        }
        Ok(())
    }
}

/// One row of a stability map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub dt: f64,
    pub n_modes: usize,
    /// Max over modes of the per-mode spectral radius.
    pub spectral_radius: f64,
    /// Mode index attaining the max radius.
    pub worst_mode: usize,
    /// `None` only when the point itself failed (see `note`).
    pub classification: Option<Classification>,
    pub gamma_max: f64,
    pub instability_sufficient: bool,
    /// Per-step growth factor measured on the dominant mode's simulated
    /// trajectory; absent in analytic-only sweeps and when the run is too
    /// short to estimate.
    pub empirical_growth: Option<f64>,
    /// Step at which the simulated dominant mode crossed the blow-up
    /// threshold, if it did.
    pub blow_up_step: Option<usize>,
    /// Per-point diagnostics: evaluation failures or analytic/empirical
    /// contradictions. Never set on clean rows; JSON only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// A record type that knows its flat rendering.
pub trait ReportRecord: Serialize {
    /// The fixed CSV header line (no newline).
    const CSV_HEADER: &'static str;

    /// One CSV row (no newline), columns exactly as in `CSV_HEADER`.
    fn csv_row(&self) -> String;
}

impl ReportRecord for SweepRecord {
    const CSV_HEADER: &'static str = "alpha,dt,n_modes,spectral_radius,worst_mode,classification,gamma_max,instability_sufficient,empirical_growth,blow_up_step";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(self.alpha),
            fmt_float(self.dt),
            self.n_modes,
            fmt_float(self.spectral_radius),
            self.worst_mode,
            self.classification.map(|c| c.name()).unwrap_or(""),
            fmt_float(self.gamma_max),
            self.instability_sufficient,
            fmt_opt_float(self.empirical_growth),
            self.blow_up_step.map(|s| s.to_string()).unwrap_or_default(),
        )
    }
}

fn evaluate_point(
    params: &PhysicalParams,
    spectrum: &[Mode],
    alpha: f64,
    dt: f64,
    n_modes: usize,
    eval: EvalMode,
    n_steps: usize,
) -> SweepRecord {
    let mut record = SweepRecord {
        alpha,
        dt,
        n_modes,
        spectral_radius: f64::NAN,
        worst_mode: 0,
        classification: None,
        gamma_max: f64::NAN,
        instability_sufficient: false,
        empirical_growth: None,
        blow_up_step: None,
        note: None,
    };
    let verdict = match classify(params, spectrum, alpha, dt) {
        Ok(v) => v,
        Err(e) => {
            record.note = Some(format!("analysis failed: {e}"));
            return record;
        }
    };
    record.spectral_radius = verdict.spectral_radius();
    record.worst_mode = verdict.worst_mode;
    record.classification = Some(verdict.classification);
    record.gamma_max = verdict.gamma_max;
    record.instability_sufficient = verdict.instability_sufficient;

    if !eval.simulates() {
        return record;
    }

    let disc = Discretization {
        dt,
        n_modes,
        n_steps,
    };
    let mode = &spectrum[verdict.worst_mode - spectrum[0].index];
    let traj = match simulate(
        Scheme::ExplicitRn,
        params,
        &disc,
        mode,
        alpha,
        &InitialData::flat(1.0),
    ) {
        Ok(t) => t,
        Err(e) => {
            record.note = Some(format!("simulation failed: {e}"));
            return record;
        }
    };
    record.blow_up_step = traj.blow_up;
    if traj.len() >= 22 {
        record.empirical_growth = growth_rate(&traj, traj.len() / 2).ok();
    }

    if eval == EvalMode::Both {
        // Only unambiguous contradictions are worth a note: a blow-up on a
        // point classified stable, or a clear order-of-magnitude decay on
        // a point classified unstable. Growth estimates near 1 are too
        // phase-noisy to arbitrate marginal cases.
        match verdict.classification {
            Classification::Stable => {
                if let Some(step) = traj.blow_up {
                    record.note = Some(format!(
                        "classified stable but simulation blew up at step {step}"
                    ));
                }
            }
            Classification::Unstable => {
                if traj.blow_up.is_none() {
                    let quarter = (traj.len() / 4).max(1);
                    let head = traj.series[..quarter]
                        .iter()
                        .map(|r| r.eta.abs())
                        .fold(0.0, f64::max);
                    let tail = traj.series[traj.len() - quarter..]
                        .iter()
                        .map(|r| r.eta.abs())
                        .fold(0.0, f64::max);
                    if tail < 0.1 * head {
                        record.note = Some(
                            "classified unstable but simulation decayed by over 10x".to_string(),
                        );
                    }
                }
            }
            Classification::Marginal => {}
        }
    }
    record
}

/// One grid point of a sweep: (α, Δt, mode count).
type GridPoint = (f64, f64, usize);

/// Spectra keyed by mode count, computed once per mesh and shared across the grid.
type SpectraByMesh = BTreeMap<usize, Vec<Mode>>;

fn sweep_points(spec: &SweepSpec) -> Result<(Vec<GridPoint>, SpectraByMesh)> {
    spec.validate()?;
    let alphas = spec.alpha_grid.values()?;
    let dts = spec.dt_grid.values()?;
    let mut spectra = BTreeMap::new();
    for &n in &spec.mesh_grid {
        spectra.entry(n).or_insert(build_spectrum(&spec.params, n)?);
    }
    let mut points = Vec::with_capacity(alphas.len() * dts.len() * spec.mesh_grid.len());
    for &alpha in &alphas {
        for &dt in &dts {
            for &n in &spec.mesh_grid {
                points.push((alpha, dt, n));
            }
        }
    }
    Ok((points, spectra))
}

/// Evaluate the whole grid, concurrently when the crate is built with the
/// `parallel` feature. Records come back in grid order — α-major, then Δt,
/// then mesh — regardless of scheduling.
pub fn run_stability_map(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    let (points, spectra) = sweep_points(spec)?;
    Ok(map_points(&points, |&(alpha, dt, n)| {
        evaluate_point(
            &spec.params,
            &spectra[&n],
            alpha,
            dt,
            n,
            spec.eval,
            spec.n_steps,
        )
    }))
}

/// [`run_stability_map`] forced single-threaded; same records, same order.
pub fn run_stability_map_seq(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    let (points, spectra) = sweep_points(spec)?;
    Ok(map_points_seq(&points, |&(alpha, dt, n)| {
        evaluate_point(
            &spec.params,
            &spectra[&n],
            alpha,
            dt,
            n,
            spec.eval,
            spec.n_steps,
        )
    }))
}

/// Scan a finished map for stable points sitting above an unstable one on
/// the same (α, mesh) line — the trend the fixture obeys but no theorem
/// guarantees. Returns human-readable warnings, empty when the trend
/// holds.
pub fn monotonicity_warnings(records: &[SweepRecord]) -> Vec<String> {
    let mut first_unstable: BTreeMap<(u64, usize), f64> = BTreeMap::new();
    let mut warnings = Vec::new();
    for r in records {
        let key = (r.alpha.to_bits(), r.n_modes);
        match r.classification {
            Some(Classification::Unstable) => {
                let entry = first_unstable.entry(key).or_insert(r.dt);
                if r.dt < *entry {
                    *entry = r.dt;
                }
            }
            Some(Classification::Stable) => {
                if let Some(&dt_u) = first_unstable.get(&key) {
                    if r.dt > dt_u {
                        warnings.push(format!(
                            "alpha {:.6e}, {} modes: stable at dt {:.6e} above unstable dt {:.6e}",
                            r.alpha, r.n_modes, r.dt, dt_u
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    warnings
}

/// One row of an accuracy scan: the coupling value, the relative discrete
/// L² distance of the explicit displacement from the implicit reference
/// (aggregated over modes by root-sum-square), and whether the explicit
/// run survived. Blown-up runs carry no error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRecord {
    pub alpha: f64,
    pub error: Option<f64>,
    pub stable: bool,
    /// The same relative error per mode, spectrum order; empty when the
    /// run blew up. JSON only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_mode_error: Vec<f64>,
}

impl ReportRecord for AccuracyRecord {
    const CSV_HEADER: &'static str = "alpha,error,stable";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{}",
            fmt_float(self.alpha),
            fmt_opt_float(self.error),
            self.stable
        )
    }
}

/// Squared discrete L² distance and reference mass of one mode pair,
/// over every computed level (the shared initial level is skipped).
fn mode_l2(explicit: &ModalTrajectory, implicit: &ModalTrajectory) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    let steps = explicit.len().min(implicit.len());
    for k in 1..steps {
        let d = explicit.series[k].eta - implicit.series[k].eta;
        num += d * d;
        den += implicit.series[k].eta * implicit.series[k].eta;
    }
    let d = explicit.final_eta - implicit.final_eta;
    num += d * d;
    den += implicit.final_eta * implicit.final_eta;
    (num, den)
}

/// Compare the explicit scheme against the implicit reference over a list
/// of coupling values, mode by mode, with identical initial data.
///
/// The reference does not depend on α, so it is integrated once per mode
/// and shared. An explicit run that blows up on any mode yields
/// `stable: false` and no error for that α.
pub fn run_accuracy_scan(
    params: &PhysicalParams,
    disc: &Discretization,
    alphas: &[f64],
    init: &InitialData,
) -> Result<Vec<AccuracyRecord>> {
    params.validate()?;
    disc.validate()?;
    init.validate()?;
    if alphas.is_empty() {
        return Err(Error::EmptyGrid { what: "alpha list" });
    }
    for &alpha in alphas {
        if !alpha.is_finite() {
            return Err(Error::NonFiniteField {
                name: "alpha",
                value: alpha,
            });
        }
        if alpha < 0.0 {
            return Err(Error::NegativeAlpha { value: alpha });
        }
    }
    let spectrum = build_spectrum(params, disc.n_modes)?;
    let reference: Vec<_> = spectrum
        .iter()
        .map(|mode| simulate(Scheme::ImplicitRef, params, disc, mode, 0.0, init))
        .collect::<Result<_>>()?;

    let records = map_points(alphas, |&alpha| -> Result<AccuracyRecord> {
        let mut num_total = 0.0;
        let mut den_total = 0.0;
        let mut per_mode = Vec::with_capacity(spectrum.len());
        for (mode, implicit) in spectrum.iter().zip(&reference) {
            let explicit = simulate(Scheme::ExplicitRn, params, disc, mode, alpha, init)?;
            if explicit.blow_up.is_some() {
                return Ok(AccuracyRecord {
                    alpha,
                    error: None,
                    stable: false,
                    per_mode_error: Vec::new(),
                });
            }
            let (num, den) = mode_l2(&explicit, implicit);
            per_mode.push(if den > 0.0 { (num / den).sqrt() } else { 0.0 });
            num_total += num;
            den_total += den;
        }
        if den_total <= 0.0 {
            return Err(Error::DegenerateTrajectory);
        }
        Ok(AccuracyRecord {
            alpha,
            error: Some((num_total / den_total).sqrt()),
            stable: true,
            per_mode_error: per_mode,
        })
    });
    records.into_iter().collect()
}

/// The α of the smallest reported error (first on ties); `None` when every
/// run blew up.
pub fn best_alpha(records: &[AccuracyRecord]) -> Option<f64> {
    records
        .iter()
        .filter_map(|r| r.error.map(|e| (r.alpha, e)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(alpha, _)| alpha)
}

/// Output format of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// Render records to the requested format. Equal inputs give equal bytes:
/// fixed header, fixed field order, 17-significant-digit floats, `\n`
/// newlines, trailing newline.
pub fn render_report<R: ReportRecord>(records: &[R], format: ReportFormat) -> Result<String> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(R::CSV_HEADER);
            out.push('\n');
            for r in records {
                let _ = writeln!(out, "{}", r.csv_row());
            }
            Ok(out)
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(records).map_err(|e| Error::Config {
                path: "<report>".into(),
                message: e.to_string(),
            })?;
            out.push('\n');
            Ok(out)
        }
    }
}

/// Render and write a report file.
pub fn emit_report<R: ReportRecord>(
    records: &[R],
    format: ReportFormat,
    path: &Path,
) -> Result<()> {
    let text = render_report(records, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table_spec(eval: EvalMode, n_steps: usize) -> SweepSpec {
        SweepSpec {
            alpha_grid: RangeSpec {
                min: 2.0e3,
                max: 4689.0,
                count: 2,
                spacing: Spacing::Linear,
            },
            dt_grid: RangeSpec {
                min: 6.25e-5,
                max: 1.0e-4,
                count: 2,
                spacing: Spacing::Linear,
            },
            mesh_grid: vec![25, 50, 100],
            params: PhysicalParams::default(),
            eval,
            n_steps,
        }
    }

    fn find(records: &[SweepRecord], alpha: f64, dt: f64, n: usize) -> &SweepRecord {
        records
            .iter()
            .find(|r| r.alpha == alpha && r.dt == dt && r.n_modes == n)
            .expect("grid point missing")
    }

    #[test]
    fn range_parse_round_trips() {
        let r = RangeSpec::parse("1e-5:1e-2:4:log").unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.spacing, Spacing::Log);
        let v = r.values().unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[0], 1.0e-5);
        assert_eq!(v[3], 1.0e-2);
        // log spacing: successive ratios equal
        assert_relative_eq!(v[1] / v[0], v[2] / v[1], max_relative = 1e-12);
        assert_relative_eq!(v[1] / v[0], 10.0, max_relative = 1e-12);

        let lin = RangeSpec::parse("1:3:3").unwrap().values().unwrap();
        assert_eq!(lin, vec![1.0, 2.0, 3.0]);

        assert_eq!(
            RangeSpec::parse("5:5:1").unwrap().values().unwrap(),
            vec![5.0]
        );
    }

    #[test]
    fn range_parse_rejects_malformed_specs() {
        for bad in [
            "1:2",
            "1:2:3:4:5",
            "a:2:3",
            "1:b:3",
            "1:2:c",
            "1:2:3:geo",
            "2:1:3",
            "0:1:3",
            "-1:1:3",
            "1:2:0",
            "1:2:1",
        ] {
            assert!(RangeSpec::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn single_point_sweep_matches_classify() {
        let params = PhysicalParams::default();
        let spec = SweepSpec {
            alpha_grid: RangeSpec::single(1.0e3),
            dt_grid: RangeSpec::single(5.0e-4),
            mesh_grid: vec![50],
            params,
            eval: EvalMode::AnalyticRoots,
            n_steps: 200,
        };
        let records = run_stability_map(&spec).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        let spectrum = build_spectrum(&params, 50).unwrap();
        let v = classify(&params, &spectrum, 1.0e3, 5.0e-4).unwrap();
        assert_eq!(r.spectral_radius, v.spectral_radius());
        assert_eq!(r.worst_mode, v.worst_mode);
        assert_eq!(r.classification, Some(v.classification));
        assert_eq!(r.gamma_max, v.gamma_max);
        assert_eq!(r.instability_sufficient, v.instability_sufficient);
        assert_eq!(r.empirical_growth, None);
        assert_eq!(r.blow_up_step, None);
        assert_eq!(r.note, None);
    }

    #[test]
    fn grid_order_is_alpha_major_then_dt_then_mesh() {
        let spec = table_spec(EvalMode::AnalyticRoots, 200);
        let records = run_stability_map(&spec).unwrap();
        assert_eq!(records.len(), 12);
        let keys: Vec<_> = records.iter().map(|r| (r.alpha, r.dt, r.n_modes)).collect();
        assert_eq!(keys[0], (2.0e3, 6.25e-5, 25));
        assert_eq!(keys[1], (2.0e3, 6.25e-5, 50));
        assert_eq!(keys[2], (2.0e3, 6.25e-5, 100));
        assert_eq!(keys[3], (2.0e3, 1.0e-4, 25));
        assert_eq!(keys[6], (4689.0, 6.25e-5, 25));
        assert_eq!(keys[11], (4689.0, 1.0e-4, 100));
    }

    // The three orderings the fixture grid exhibits: larger Δt at fixed α
    // destabilizes, larger α at fixed Δt destabilizes, finer mesh at fixed
    // (α, Δt) destabilizes.
    #[test]
    fn table_patterns_appear_on_the_fixture_grid() {
        let spec = table_spec(EvalMode::AnalyticRoots, 200);
        let records = run_stability_map(&spec).unwrap();
        let class = |alpha, dt, n| find(&records, alpha, dt, n).classification.unwrap();

        assert_eq!(class(4689.0, 6.25e-5, 50), Classification::Stable);
        assert_eq!(class(4689.0, 1.0e-4, 50), Classification::Unstable);

        assert_eq!(class(2.0e3, 1.0e-4, 25), Classification::Stable);
        assert_eq!(class(4689.0, 1.0e-4, 25), Classification::Unstable);

        assert_eq!(class(4689.0, 6.25e-5, 100), Classification::Unstable);
    }

    #[test]
    fn empirical_cross_check_agrees_on_clear_points() {
        let spec = table_spec(EvalMode::Both, 3000);
        let records = run_stability_map(&spec).unwrap();
        for r in &records {
            assert!(
                r.note.is_none(),
                "note on ({}, {}, {}): {:?}",
                r.alpha,
                r.dt,
                r.n_modes,
                r.note
            );
            match r.classification.unwrap() {
                Classification::Unstable => {
                    assert!(
                        r.blow_up_step.is_some(),
                        "unstable ({}, {}, {}) did not blow up",
                        r.alpha,
                        r.dt,
                        r.n_modes
                    );
                }
                Classification::Stable => {
                    assert!(r.blow_up_step.is_none());
                    if let Some(g) = r.empirical_growth {
                        assert!(g < 1.0 + 1.0e-3, "stable point grew at {g}");
                    }
                }
                Classification::Marginal => {}
            }
        }
    }

    #[test]
    fn parallel_and_sequential_maps_render_identically() {
        let spec = table_spec(EvalMode::EmpiricalSimulation, 500);
        let a = run_stability_map(&spec).unwrap();
        let b = run_stability_map_seq(&spec).unwrap();
        assert_eq!(a, b);
        let ra = render_report(&a, ReportFormat::Csv).unwrap();
        let rb = render_report(&b, ReportFormat::Csv).unwrap();
        assert_eq!(ra, rb);
        // and re-running is byte-stable
        let again = render_report(&run_stability_map(&spec).unwrap(), ReportFormat::Csv).unwrap();
        assert_eq!(ra, again);
    }

    #[test]
    fn sufficient_instability_implies_unstable_classification() {
        let spec = SweepSpec {
            alpha_grid: RangeSpec {
                min: 1.0e2,
                max: 1.0e4,
                count: 5,
                spacing: Spacing::Log,
            },
            dt_grid: RangeSpec {
                min: 1.0e-5,
                max: 1.0e-3,
                count: 5,
                spacing: Spacing::Log,
            },
            mesh_grid: vec![25, 50],
            params: PhysicalParams::default(),
            eval: EvalMode::AnalyticRoots,
            n_steps: 200,
        };
        let records = run_stability_map(&spec).unwrap();
        for r in &records {
            if r.instability_sufficient {
                assert_eq!(
                    r.classification,
                    Some(Classification::Unstable),
                    "certificate without instability at ({}, {}, {})",
                    r.alpha,
                    r.dt,
                    r.n_modes
                );
                assert!(r.spectral_radius > 1.0);
            }
        }
    }

    #[test]
    fn fixture_grid_has_no_monotonicity_warnings() {
        let spec = table_spec(EvalMode::AnalyticRoots, 200);
        let records = run_stability_map(&spec).unwrap();
        assert!(monotonicity_warnings(&records).is_empty());
    }

    #[test]
    fn inverted_stability_line_is_warned_about() {
        let template = run_stability_map(&table_spec(EvalMode::AnalyticRoots, 200)).unwrap();
        let mut doctored: Vec<SweepRecord> = Vec::new();
        let mut a = template[0].clone();
        a.classification = Some(Classification::Unstable);
        a.dt = 1.0e-5;
        let mut b = template[0].clone();
        b.classification = Some(Classification::Stable);
        b.dt = 2.0e-5;
        doctored.push(a);
        doctored.push(b);
        let warnings = monotonicity_warnings(&doctored);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("stable at dt"));
    }

    #[test]
    fn csv_report_round_trips_through_the_documented_header() {
        let spec = table_spec(EvalMode::EmpiricalSimulation, 300);
        let records = run_stability_map(&spec).unwrap();
        let text = render_report(&records, ReportFormat::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SweepRecord::CSV_HEADER);
        let mut parsed = 0;
        for (line, original) in lines.zip(&records) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 10);
            assert_eq!(cells[0].parse::<f64>().unwrap(), original.alpha);
            assert_eq!(cells[1].parse::<f64>().unwrap(), original.dt);
            assert_eq!(cells[2].parse::<usize>().unwrap(), original.n_modes);
            assert_eq!(cells[3].parse::<f64>().unwrap(), original.spectral_radius);
            assert_eq!(cells[4].parse::<usize>().unwrap(), original.worst_mode);
            assert_eq!(cells[5], original.classification.unwrap().name());
            assert_eq!(cells[6].parse::<f64>().unwrap(), original.gamma_max);
            assert_eq!(
                cells[7].parse::<bool>().unwrap(),
                original.instability_sufficient
            );
            match original.empirical_growth {
                Some(g) => assert_eq!(cells[8].parse::<f64>().unwrap(), g),
                None => assert!(cells[8].is_empty()),
            }
            match original.blow_up_step {
                Some(s) => assert_eq!(cells[9].parse::<usize>().unwrap(), s),
                None => assert!(cells[9].is_empty()),
            }
            parsed += 1;
        }
        assert_eq!(parsed, records.len());
    }

    #[test]
    fn json_report_carries_the_same_fields() {
        let spec = table_spec(EvalMode::AnalyticRoots, 200);
        let records = run_stability_map(&spec).unwrap();
        let text = render_report(&records, ReportFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let arr = parsed.as_array().unwrap();
        assert_eq!(arr.len(), records.len());
        assert_eq!(arr[0]["alpha"].as_f64().unwrap(), records[0].alpha);
        assert_eq!(
            arr[0]["classification"].as_str().unwrap(),
            records[0].classification.unwrap().name()
        );
        assert!(arr[0]["empirical_growth"].is_null());
        assert!(arr[0].get("note").is_none());
    }

    #[test]
    fn empty_reports_are_rejected() {
        let none: Vec<SweepRecord> = Vec::new();
        let err = render_report(&none, ReportFormat::Csv).unwrap_err();
        assert_eq!(err.to_string(), "no records");
    }

    #[test]
    fn emit_report_writes_the_rendered_bytes() {
        let spec = table_spec(EvalMode::AnalyticRoots, 200);
        let records = run_stability_map(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.csv");
        emit_report(&records, ReportFormat::Csv, &path).unwrap();
        let on_disk = std::fs::read_to_string(&path).unwrap();
        assert_eq!(on_disk, render_report(&records, ReportFormat::Csv).unwrap());

        let missing = dir.path().join("no/such/dir/map.csv");
        assert!(emit_report(&records, ReportFormat::Csv, &missing).is_err());
    }

    #[test]
    fn accuracy_scan_reports_errors_and_argmin() {
        let params = PhysicalParams::default();
        let disc = Discretization {
            dt: 6.25e-6,
            n_modes: 3,
            n_steps: 400,
        };
        let alphas = [0.0, 5.0e2, 1.0e3, 2.0e3];
        let records = run_accuracy_scan(&params, &disc, &alphas, &InitialData::flat(1.0)).unwrap();
        assert_eq!(records.len(), 4);
        for r in &records {
            assert!(r.stable, "alpha {} blew up", r.alpha);
            let e = r.error.unwrap();
            assert!(e.is_finite() && e >= 0.0);
            assert_eq!(r.per_mode_error.len(), 3);
        }
        // the uncoupled α = 0 run drifts furthest from the reference
        let e0 = records[0].error.unwrap();
        for r in &records[1..] {
            assert!(e0 > r.error.unwrap(), "alpha 0 error {e0} not maximal");
        }
        let best = best_alpha(&records).unwrap();
        let min = records
            .iter()
            .min_by(|a, b| a.error.unwrap().total_cmp(&b.error.unwrap()))
            .unwrap();
        assert_eq!(best, min.alpha);
    }

    #[test]
    fn accuracy_scan_flags_blow_ups_without_error_values() {
        let params = PhysicalParams::default();
        let disc = Discretization {
            dt: 5.0e-4,
            n_modes: 50,
            n_steps: 400,
        };
        // fixture instability: α = 10³ at the default step blows up
        let records = run_accuracy_scan(&params, &disc, &[1.0e3], &InitialData::flat(1.0)).unwrap();
        assert!(!records[0].stable);
        assert_eq!(records[0].error, None);
        assert!(records[0].per_mode_error.is_empty());
        assert_eq!(best_alpha(&records), None);
    }

    #[test]
    fn accuracy_record_csv_uses_its_own_header() {
        let r = AccuracyRecord {
            alpha: 2.0e3,
            error: Some(0.125),
            stable: true,
            per_mode_error: vec![0.125],
        };
        let text = render_report(&[r], ReportFormat::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,error,stable");
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[0].parse::<f64>().unwrap(), 2.0e3);
        assert_eq!(cells[1].parse::<f64>().unwrap(), 0.125);
        assert_eq!(cells[2], "true");
    }

    #[test]
    fn invalid_specs_are_rejected_up_front() {
        let mut spec = table_spec(EvalMode::AnalyticRoots, 200);
        spec.mesh_grid.clear();
        assert!(run_stability_map(&spec).is_err());

        let mut spec = table_spec(EvalMode::AnalyticRoots, 200);
        spec.mesh_grid = vec![0];
        assert!(run_stability_map(&spec).is_err());

        let mut spec = table_spec(EvalMode::AnalyticRoots, 0);
        spec.n_steps = 0;
        assert!(run_stability_map(&spec).is_err());

        let params = PhysicalParams::default();
        let disc = Discretization::default();
        assert!(run_accuracy_scan(&params, &disc, &[], &InitialData::flat(1.0)).is_err());
        assert!(run_accuracy_scan(&params, &disc, &[-1.0], &InitialData::flat(1.0)).is_err());
    }
}
