//! Time-steppers for one interface mode, under three schemes.
//!
//! The modal unknowns are the displacement coefficient η, the interface
//! normal velocity u, and the interface pressure p. Per step, the loosely
//! coupled scheme solves the fluid with a Robin condition −αu + p = g
//! (g assembled from the displacement history), recovers the pressure from
//! the added-mass relation p = −ρ_f μᵢ (uⁿ − uⁿ⁻¹)/Δt, and then advances
//! the wall by a leap-frog step driven by that pressure:
//!
//!   gⁿ   = −α(ηⁿ−ηⁿ⁻¹)/Δt + ρ_sH_s(ηⁿ−2ηⁿ⁻¹+ηⁿ⁻²)/Δt² + (β+ψλᵢ)ηⁿ
//!   uⁿ   = (ρ_f μᵢ uⁿ⁻¹/Δt − gⁿ) / (α + ρ_f μᵢ/Δt)
//!   pⁿ   = −ρ_f μᵢ (uⁿ − uⁿ⁻¹)/Δt
//!   ηⁿ⁺¹ = 2ηⁿ − ηⁿ⁻¹ + (Δt²/ρ_sH_s)(pⁿ − (β+ψλᵢ)ηⁿ)
//!
//! Eliminating u and p yields an equivalent five-term recurrence in η
//! alone ([`step_recurrence`]); the elimination is exact, and the
//! agreement of the two is this module's central correctness oracle. A
//! monolithic implicit update ([`step_implicit_reference`]) serves as the
//! unconditionally stable reference for accuracy scans.
//!
//! Blow-up is data, not an error: a trajectory stops early when |η| crosses
//! 10⁸ × its initial magnitude and records the crossing step.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{Discretization, PhysicalParams};
use crate::spectrum::Mode;
use crate::stability::characteristic_chi;

/// Magnitude factor over the initial data at which a run is declared blown
/// up.
pub const BLOW_UP_FACTOR: f64 = 1.0e8;

/// Floor for the blow-up reference magnitude, so identically zero initial
/// data never trips the detector.
pub const BLOW_UP_FLOOR: f64 = 1.0e-30;

/// Which time-stepper produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// The loosely coupled two-field scheme (fluid with Robin condition,
    /// then wall by leap-frog).
    ExplicitRn,
    /// The eliminated five-term displacement recurrence (η only).
    Recurrence,
    /// The monolithic implicit reference.
    ImplicitRef,
}

impl Scheme {
    /// Stable lowercase name used in reports and error messages.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ExplicitRn => "explicit_rn",
            Scheme::Recurrence => "recurrence",
            Scheme::ImplicitRef => "implicit_ref",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Initial data for one mode: the two seed displacements, the initial
/// fluid velocity, and optional overrides for the pre-history.
///
/// The steppers start at level n = 1 and need η⁻¹ (and the recurrence also
/// η⁻²) to assemble their first right-hand sides. When not supplied,
/// η⁻¹ = η⁰ (wall initially at rest), and η⁻² is chosen per scheme — see
/// [`InitialData::resolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialData {
    /// η¹ (cm).
    pub eta1: f64,
    /// η⁰ (cm).
    pub eta0: f64,
    /// u⁰ (cm·s⁻¹).
    pub u0: f64,
    /// Optional η⁻¹ override.
    pub eta_m1: Option<f64>,
    /// Optional η⁻² override (only the recurrence consumes it).
    pub eta_m2: Option<f64>,
}

impl InitialData {
    /// Seed from the three values every scheme needs.
    pub fn new(eta1: f64, eta0: f64, u0: f64) -> Self {
        InitialData {
            eta1,
            eta0,
            u0,
            eta_m1: None,
            eta_m2: None,
        }
    }

    /// A constant-displacement, zero-velocity seed.
    pub fn flat(eta: f64) -> Self {
        Self::new(eta, eta, 0.0)
    }

    /// Reject non-finite seed values.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eta1", self.eta1),
            ("eta0", self.eta0),
            ("u0", self.u0),
            ("eta_m1", self.eta_m1.unwrap_or(0.0)),
            ("eta_m2", self.eta_m2.unwrap_or(0.0)),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFiniteField { name, value });
            }
        }
        Ok(())
    }

    /// Fill in the pre-history.
    ///
    /// η⁻¹ defaults to η⁰. η⁻² defaults to the value that makes the
    /// eliminated recurrence reproduce the two-field scheme started from
    /// the same (η¹, η⁰, u⁰):
    ///
    ///   η⁻² = η¹ − 3η⁰ + 3η⁻¹ − (αΔt²/ρ_sH_s)(u⁰ − (η⁰−η⁻¹)/Δt),
    ///
    /// which is the discrete kinematic identity read at the seed level.
    /// The two-field scheme itself never touches η⁻².
    pub fn resolve(&self, p: &PhysicalParams, alpha: f64, dt: f64) -> ResolvedInit {
        let eta_m1 = self.eta_m1.unwrap_or(self.eta0);
        let eta_m2 = self.eta_m2.unwrap_or_else(|| {
            let defect_scale = alpha * dt * dt / p.structure_mass();
            self.eta1 - 3.0 * self.eta0 + 3.0 * eta_m1
                - defect_scale * (self.u0 - (self.eta0 - eta_m1) / dt)
        });
        ResolvedInit {
            eta1: self.eta1,
            eta0: self.eta0,
            u0: self.u0,
            eta_m1,
            eta_m2,
        }
    }
}

impl Default for InitialData {
    /// Unit flat displacement at rest.
    fn default() -> Self {
        InitialData::flat(1.0)
    }
}

/// Initial data with the pre-history made explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedInit {
    pub eta1: f64,
    pub eta0: f64,
    pub u0: f64,
    pub eta_m1: f64,
    pub eta_m2: f64,
}

/// Marching state of one mode between steps.
///
/// At level n the state holds the displacement history
/// [ηⁿ, ηⁿ⁻¹, ηⁿ⁻², ηⁿ⁻³] together with uⁿ⁻¹ and pⁿ⁻¹; stepping produces
/// the level-(n+1) state and, along the way, the new interface pair
/// (uⁿ, pⁿ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalState {
    /// [ηⁿ, ηⁿ⁻¹, ηⁿ⁻², ηⁿ⁻³] (cm).
    pub eta_hist: [f64; 4],
    /// uⁿ⁻¹ (cm·s⁻¹).
    pub u: f64,
    /// pⁿ⁻¹ (dyne·cm⁻²); zero placeholder before the first step.
    pub p: f64,
    /// Current level n.
    pub step: usize,
}

impl ModalState {
    /// State entering the first step (n = 1).
    pub fn from_init(init: &ResolvedInit) -> Self {
        ModalState {
            eta_hist: [init.eta1, init.eta0, init.eta_m1, init.eta_m2],
            u: init.u0,
            p: 0.0,
            step: 1,
        }
    }
}

/// One recorded step: the triple at level n. The recurrence scheme tracks
/// only η, so u and p are absent from its records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub eta: f64,
    pub u: Option<f64>,
    pub p: Option<f64>,
}

/// A complete per-mode run: the recorded series, the blow-up step if the
/// magnitude threshold was crossed, and the one-past-the-end displacement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalTrajectory {
    pub scheme: Scheme,
    pub dt: f64,
    pub init: ResolvedInit,
    /// Records for steps 1, 2, … in order; at most n_steps of them, fewer
    /// when the run blew up.
    pub series: Vec<StepRecord>,
    /// First step index whose displacement crossed the blow-up threshold.
    pub blow_up: Option<usize>,
    /// η at level (last recorded step + 1): the final leap-frog output,
    /// or the threshold-crossing value itself when blown up.
    pub final_eta: f64,
}

impl ModalTrajectory {
    /// Number of recorded steps.
    pub fn len(&self) -> usize {
        self.series.len()
    }

    /// True when nothing was recorded (cannot happen for n_steps ≥ 1).
    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Displacement at any level the trajectory covers, from η⁻² through
    /// one past the last recorded step.
    pub fn eta_level(&self, level: i64) -> Option<f64> {
        match level {
            -2 => Some(self.init.eta_m2),
            -1 => Some(self.init.eta_m1),
            0 => Some(self.init.eta0),
            n if n >= 1 => {
                let idx = (n - 1) as usize;
                if idx < self.series.len() {
                    Some(self.series[idx].eta)
                } else if idx == self.series.len() {
                    Some(self.final_eta)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

fn check_step_args(p: &PhysicalParams, alpha: f64, dt: f64) -> Result<()> {
    p.validate()?;
    if !alpha.is_finite() {
        return Err(Error::NonFiniteField {
            name: "alpha",
            value: alpha,
        });
    }
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha { value: alpha });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "dt",
            value: dt,
        });
    }
    Ok(())
}

/// Advance the two-field loosely coupled scheme by one step.
///
/// Accepts α = 0: the Robin condition then degenerates to a pure stress
/// condition, the pressure equals the structural load gⁿ, and the
/// displacement update closes on itself as ηⁿ⁺¹ = 3ηⁿ − 3ηⁿ⁻¹ + ηⁿ⁻²
/// (the velocity keeps integrating the transferred load but no longer
/// feeds back).
pub fn step_explicit_rn(
    state: &ModalState,
    p: &PhysicalParams,
    mode: &Mode,
    alpha: f64,
    dt: f64,
) -> Result<ModalState> {
    check_step_args(p, alpha, dt)?;
    let m = p.added_mass(mode);
    let k = p.modal_stiffness(mode);
    let sh = p.structure_mass();
    let [e0, e1, e2, _] = state.eta_hist;

    let g = -alpha * (e0 - e1) / dt + sh * (e0 - 2.0 * e1 + e2) / (dt * dt) + k * e0;
    let u_new = (m * state.u / dt - g) / (alpha + m / dt);
    let (p_new, eta_next) = if alpha == 0.0 {
        // The Robin condition −αu + p = g now reads p = g directly, and
        // substituting g into the leap-frog update cancels the loads:
        // ηⁿ⁺¹ = 3ηⁿ − 3ηⁿ⁻¹ + ηⁿ⁻², evaluated on differences so a flat
        // history stays exactly flat while u integrates the load.
        let d1 = e0 - e1;
        let d2 = e1 - e2;
        (g, e0 + d1 + (d1 - d2))
    } else {
        let p_new = -m * (u_new - state.u) / dt;
        (p_new, 2.0 * e0 - e1 + dt * dt / sh * (p_new - k * e0))
    };

    Ok(ModalState {
        eta_hist: [eta_next, e0, e1, e2],
        u: u_new,
        p: p_new,
        step: state.step + 1,
    })
}

/// Advance the eliminated five-term displacement recurrence by one step:
/// given [ηⁿ, ηⁿ⁻¹, ηⁿ⁻², ηⁿ⁻³], return ηⁿ⁺¹.
///
/// For α > 0 the recurrence divides by α during elimination; its
/// coefficients are
///
///   c₄ = (ρ_sH_s/Δt²)(1 + αΔt/(ρ_fμᵢ))
///   c₃ = −2αρ_sH_s/(ρ_fμᵢΔt) + (αΔt/(ρ_fμᵢ))(β+ψλᵢ) + α/Δt − 4ρ_sH_s/Δt²
///   c₂ = αρ_sH_s/(ρ_fμᵢΔt) − 2α/Δt + 6ρ_sH_s/Δt²
///   c₁ = α/Δt − 4ρ_sH_s/Δt²
///   c₀ = ρ_sH_s/Δt²
///
/// and the step solves c₄ηⁿ⁺¹ + c₃ηⁿ + c₂ηⁿ⁻¹ + c₁ηⁿ⁻² + c₀ηⁿ⁻³ = 0;
/// the coefficients come from [`characteristic_chi`], the single place
/// that assembles them. At α = 0 the eliminated form degenerates; the
/// characteristic polynomial collapses to a quadruple root at 1 and the
/// dedicated branch applies ηⁿ⁺¹ = 4ηⁿ − 6ηⁿ⁻¹ + 4ηⁿ⁻² − ηⁿ⁻³, written
/// in nested-difference form so a flat history continues exactly flat in
/// floating point.
pub fn step_recurrence(
    eta_hist: [f64; 4],
    p: &PhysicalParams,
    mode: &Mode,
    alpha: f64,
    dt: f64,
) -> Result<f64> {
    check_step_args(p, alpha, dt)?;
    for (i, v) in eta_hist.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteField {
                name: ["eta_n", "eta_nm1", "eta_nm2", "eta_nm3"][i],
                value: *v,
            });
        }
    }
    let [h0, h1, h2, h3] = eta_hist;
    if alpha == 0.0 {
        let d1 = h0 - h1;
        let d2 = h1 - h2;
        let d3 = h2 - h3;
        let dd1 = d1 - d2;
        let ddd = dd1 - (d2 - d3);
        return Ok(h0 + d1 + dd1 + ddd);
    }
    let chi = characteristic_chi(p, mode, alpha, dt)?;
    let [c4, c3, c2, c1, c0] = chi.c;
    Ok(-(c3 * h0 + c2 * h1 + c1 * h2 + c0 * h3) / c4)
}

/// Advance the monolithic implicit reference by one step: with the
/// kinematic condition enforced exactly, the coupled system reduces to a
/// single wall equation with the added mass lumped into the inertia,
///
///   (ρ_sH_s + ρ_fμᵢ)(ηⁿ⁺¹ − 2ηⁿ + ηⁿ⁻¹)/Δt² + (β+ψλᵢ)ηⁿ⁺¹ = 0,
///
/// solved for ηⁿ⁺¹. The update contracts for every admissible parameter
/// set (its two-step companion matrix has spectral radius below 1), which
/// the test suite checks rather than assumes.
pub fn step_implicit_reference(
    eta_hist: [f64; 4],
    p: &PhysicalParams,
    mode: &Mode,
    dt: f64,
) -> Result<f64> {
    check_step_args(p, 0.0, dt)?;
    let [h0, h1, _, _] = eta_hist;
    let m_total = p.structure_mass() + p.added_mass(mode);
    let k = p.modal_stiffness(mode);
    Ok(m_total * (2.0 * h0 - h1) / (m_total + k * dt * dt))
}

/// Run one mode for `d.n_steps` steps under the chosen scheme, recording
/// each level and stopping early at blow-up.
pub fn simulate(
    scheme: Scheme,
    p: &PhysicalParams,
    d: &Discretization,
    mode: &Mode,
    alpha: f64,
    init: &InitialData,
) -> Result<ModalTrajectory> {
    p.validate()?;
    d.validate()?;
    init.validate()?;
    check_step_args(p, alpha, d.dt)?;

    let dt = d.dt;
    let resolved = init.resolve(p, alpha, dt);
    let threshold = BLOW_UP_FACTOR
        * resolved
            .eta1
            .abs()
            .max(resolved.eta0.abs())
            .max(BLOW_UP_FLOOR);

    let mut series = Vec::with_capacity(d.n_steps);
    let mut blow_up = None;

    let record_up = |series: &mut Vec<StepRecord>, step, eta, u, p| {
        series.push(StepRecord { step, eta, u, p });
    };

    let mut final_eta;
    match scheme {
        Scheme::ExplicitRn => {
            let mut state = ModalState::from_init(&resolved);
            final_eta = state.eta_hist[0];
            for n in 1..=d.n_steps {
                let next = step_explicit_rn(&state, p, mode, alpha, dt)?;
                record_up(
                    &mut series,
                    n,
                    state.eta_hist[0],
                    Some(next.u),
                    Some(next.p),
                );
                final_eta = next.eta_hist[0];
                if !final_eta.is_finite()
                    || !next.u.is_finite()
                    || !next.p.is_finite()
                    || final_eta.abs() > threshold
                {
                    blow_up = Some(n + 1);
                    break;
                }
                state = next;
            }
        }
        Scheme::Recurrence => {
            let mut hist = [
                resolved.eta1,
                resolved.eta0,
                resolved.eta_m1,
                resolved.eta_m2,
            ];
            final_eta = hist[0];
            for n in 1..=d.n_steps {
                let eta_next = step_recurrence(hist, p, mode, alpha, dt)?;
                record_up(&mut series, n, hist[0], None, None);
                final_eta = eta_next;
                if !eta_next.is_finite() || eta_next.abs() > threshold {
                    blow_up = Some(n + 1);
                    break;
                }
                hist = [eta_next, hist[0], hist[1], hist[2]];
            }
        }
        Scheme::ImplicitRef => {
            let mut hist = [
                resolved.eta1,
                resolved.eta0,
                resolved.eta_m1,
                resolved.eta_m2,
            ];
            let m = p.added_mass(mode);
            final_eta = hist[0];
            for n in 1..=d.n_steps {
                let eta_next = step_implicit_reference(hist, p, mode, dt)?;
                // The kinematic condition holds exactly here, so the
                // recorded velocity is the backward difference and the
                // pressure is the added-mass load for the centered
                // acceleration.
                let u_n = (hist[0] - hist[1]) / dt;
                let p_n = -m * (eta_next - 2.0 * hist[0] + hist[1]) / (dt * dt);
                record_up(&mut series, n, hist[0], Some(u_n), Some(p_n));
                final_eta = eta_next;
                if !eta_next.is_finite() || eta_next.abs() > threshold {
                    blow_up = Some(n + 1);
                    break;
                }
                hist = [eta_next, hist[0], hist[1], hist[2]];
            }
        }
    }

    Ok(ModalTrajectory {
        scheme,
        dt,
        init: resolved,
        series,
        blow_up,
        final_eta,
    })
}

/// Residual of the discrete kinematic condition at an interior step of a
/// trajectory that carries velocities:
///
///   rⁿ = uⁿ − (ηⁿ−ηⁿ⁻¹)/Δt − (ρ_sH_s/(αΔt²))(ηⁿ⁺¹ − 3ηⁿ + 3ηⁿ⁻¹ − ηⁿ⁻²).
///
/// For two-field trajectories this vanishes to roundoff at every interior
/// step — the scheme satisfies the kinematic condition only up to that
/// third-difference correction, and rⁿ measures how exactly. For the
/// implicit reference the first two terms cancel instead, leaving minus
/// the correction term.
///
/// At α = 0 the correction is undefined; the branch returns the plain
/// kinematic residual when the third difference vanishes identically
/// (which α = 0 two-field trajectories satisfy) and rejects otherwise.
pub fn kinematic_defect(
    traj: &ModalTrajectory,
    n: usize,
    p: &PhysicalParams,
    alpha: f64,
    dt: f64,
) -> Result<f64> {
    if traj.scheme == Scheme::Recurrence {
        return Err(Error::WrongScheme {
            expected: "explicit_rn",
            got: "recurrence",
        });
    }
    let last = traj.len();
    if n < 2 || n + 1 > last {
        return Err(Error::StepOutOfRange {
            step: n,
            lo: 2,
            hi: last.saturating_sub(1),
        });
    }
    let eta = |level: i64| traj.eta_level(level).expect("range checked above");
    let li = n as i64;
    let u_n = traj.series[n - 1].u.ok_or(Error::WrongScheme {
        expected: "explicit_rn",
        got: traj.scheme.name(),
    })?;
    let third = eta(li + 1) - 3.0 * eta(li) + 3.0 * eta(li - 1) - eta(li - 2);
    let kinematic = u_n - (eta(li) - eta(li - 1)) / dt;
    if alpha == 0.0 {
        if third == 0.0 {
            return Ok(kinematic);
        }
        return Err(Error::NonPositiveAlpha { value: alpha });
    }
    Ok(kinematic - p.structure_mass() / (alpha * dt * dt) * third)
}

/// Empirical per-step growth factor of a recorded series.
///
/// Oscillatory dominant roots make raw step-to-step ratios useless, so the
/// estimator compares 4-wide sliding-window maxima of |η|: with w(m) the
/// window ending at step m, it returns the telescoped geometric mean
/// (w(last)/w(start))^(1/(last−start)) with the start window placed after
/// `burn_in` steps. For a linear recurrence with a unique dominant root
/// this converges to the root's modulus.
pub fn growth_rate(traj: &ModalTrajectory, burn_in: usize) -> Result<f64> {
    let len = traj.len();
    if len <= burn_in + 10 {
        return Err(Error::TrajectoryTooShort {
            len,
            needed: burn_in + 10,
        });
    }
    let window = |end: usize| -> f64 {
        // window covering steps end-3 ..= end (1-based), all recorded
        traj.series[end - 4..end]
            .iter()
            .map(|r| r.eta.abs())
            .fold(0.0, f64::max)
    };
    let start = burn_in.max(4);
    let w_start = window(start);
    let w_last = window(len);
    if w_start == 0.0 {
        return Err(Error::DegenerateTrajectory);
    }
    let span = (len - start) as f64;
    Ok((w_last / w_start).powf(1.0 / span))
}
