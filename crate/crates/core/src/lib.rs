//! Modal stability laboratory for a loosely coupled Robin-Neumann
//! fluid-structure scheme.
//!
//! The model is a potential-flow channel of radius R and length L coupled
//! to a thin elastic wall (independent-rings law
//! ρ_sH_s η_tt + βη − ψη_xx = p). In the interface sine basis the coupled
//! problem decouples into scalar modes: mode i feels the added-mass
//! eigenvalue μᵢ = L/(iπ·tanh(iπR/L)) and the stiffness β + ψλᵢ with
//! λᵢ = (iπ/L)². The scheme under study advances each mode by one fluid
//! solve with a Robin interface condition (−αu + p = g) followed by one
//! leap-frog structure solve with the fluid pressure as a Neumann load —
//! fully explicit coupling, one solve of each field per step.
//!
//! What the crate offers, module by module:
//!
//! * [`params`] — the physical and discretization parameter sets, their
//!   validation, and the reduced groups A = α/(ρ_sH_s), B = α/(ρ_fμᵢ),
//!   C = (β+ψλᵢ)/(ρ_fμᵢ) that the stability theory is written in.
//! * [`spectrum`] — the modal eigenvalues μᵢ, λᵢ and spectrum truncation.
//! * [`simulate`] — time-steppers: the explicit two-field scheme, the
//!   equivalent five-term displacement recurrence, and a monolithic
//!   implicit reference; blow-up detection; the kinematic-defect and
//!   growth-rate diagnostics.
//! * [`stability`] — the characteristic quartic χ(y) of each mode, its
//!   roots (companion matrix + Newton polish, with a cancellation-free
//!   shifted route near the unit circle), the closed-form χ(−1)
//!   instability certificate and its thresholds, small-step root
//!   asymptotics, and the critical-step bisection.
//! * [`sweep`] — deterministic (α, Δt, mesh) stability maps, accuracy
//!   scans against the implicit reference, and byte-stable CSV/JSON
//!   reports.
//! * [`config`] — flat key-value run configuration files.
//! * [`exec`] — the parallel/sequential execution switch the sweeps run
//!   on.
//!
//! Grid evaluation is data-parallel (rayon) when the default `parallel`
//! feature is on; disabling it leaves the same API running sequentially.
//!
//! ```
//! use fsilab::{build_spectrum, classify, Classification, PhysicalParams};
//!
//! let p = PhysicalParams::default();
//! let spectrum = build_spectrum(&p, 50).unwrap();
//! // the default operating point is unstable...
//! let v = classify(&p, &spectrum, 1.0e3, 5.0e-4).unwrap();
//! assert_eq!(v.classification, Classification::Unstable);
//! // ...and shrinking the step stabilizes it
//! let v = classify(&p, &spectrum, 1.0e3, 6.25e-6).unwrap();
//! assert_eq!(v.classification, Classification::Stable);
//! ```

pub mod config;
pub mod error;
pub mod exec;
pub mod params;
pub mod simulate;
pub mod spectrum;
pub mod stability;
pub mod sweep;

pub use config::{ResolvedConfig, RunConfig};
pub use error::{Error, Result};
pub use params::{reduced_groups, validate_params, Discretization, PhysicalParams, ReducedGroups};
pub use simulate::{
    growth_rate, kinematic_defect, simulate, InitialData, ModalTrajectory, Scheme, StepRecord,
};
pub use spectrum::{
    added_mass_eigenvalue, build_spectrum, laplace_eigenvalue, truncation_from_h, Mode,
};
pub use stability::{
    characteristic_chi, chi_at_minus_one, classify, critical_dt, gamma_mode,
    instability_sufficient, mode_spectral_radius, normalized_q, p_shifted_roots, q_from_groups,
    quartic_roots, reciprocal_p, root_asymptotics, sextic_coefficients, thresholds,
    unit_disc_margins, v_squared, AsymptoticExpansion, Classification, ComplexRoot,
    CriticalDtOutcome, InstabilityCheck, PolyForm, QuarticCoefficients, RootSet,
    SexticCoefficients, StabilityVerdict, Thresholds,
};
pub use sweep::{
    best_alpha, emit_report, monotonicity_warnings, render_report, run_accuracy_scan,
    run_stability_map, run_stability_map_seq, AccuracyRecord, EvalMode, RangeSpec, ReportFormat,
    ReportRecord, Spacing, SweepRecord, SweepSpec,
};
