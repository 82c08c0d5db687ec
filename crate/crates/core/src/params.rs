//! Physical and discretization parameters of the coupled model.
//!
//! The model couples a thin elastic membrane to an incompressible inviscid
//! fluid filling a rectangular channel of height `radius` and length
//! `length`. The membrane obeys an independent-rings law
//! ρ_s H_s ∂²η/∂t² + β η − ψ ∂²η/∂x² = p, and the fluid enters only through
//! its added-mass response to interface acceleration. All quantities are
//! in CGS units and no internal rescaling is performed.
//!
//! Everything here is an immutable value type; the operations are pure and
//! safe to share across threads.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::Mode;

/// Material and geometry constants of the coupled problem.
///
/// Invariant: every field is strictly positive and finite (checked by
/// [`PhysicalParams::validate`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Fluid density ρ_f (g·cm⁻³).
    pub rho_f: f64,
    /// Structure density ρ_s (g·cm⁻³).
    pub rho_s: f64,
    /// Structure thickness H_s (cm).
    pub h_s: f64,
    /// Zeroth-order elasticity coefficient β (dyne·cm⁻³).
    pub beta: f64,
    /// Second-order elasticity coefficient ψ (dyne·cm⁻¹).
    pub psi: f64,
    /// Channel height R (cm).
    pub radius: f64,
    /// Channel length L (cm).
    pub length: f64,
}

impl Default for PhysicalParams {
    /// The hemodynamic test fixture: densities near 1 g·cm⁻³, a thin wall,
    /// and elasticity coefficients of the magnitude implied by arterial
    /// moduli. This is the regime where the added-mass effect bites.
    fn default() -> Self {
        PhysicalParams {
            rho_f: 1.0,
            rho_s: 1.1,
            h_s: 0.1,
            beta: 4.0e4,
            psi: 4.0e4,
            radius: 0.5,
            length: 5.0,
        }
    }
}

impl PhysicalParams {
    /// Check the positivity invariant on every field, naming the first
    /// violation.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho_f", self.rho_f),
            ("rho_s", self.rho_s),
            ("h_s", self.h_s),
            ("beta", self.beta),
            ("psi", self.psi),
            ("radius", self.radius),
            ("length", self.length),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::NonFiniteField { name, value });
            }
            if value <= 0.0 {
                return Err(Error::NonPositiveField { name, value });
            }
        }
        Ok(())
    }

    /// Surface mass density of the wall, ρ_s H_s (g·cm⁻²). This is the
    /// quantity every stability threshold is compared against.
    pub fn structure_mass(&self) -> f64 {
        self.rho_s * self.h_s
    }

    /// Modal elastic stiffness β + ψ λᵢ (dyne·cm⁻³) of interface mode `i`.
    pub fn modal_stiffness(&self, mode: &Mode) -> f64 {
        self.beta + self.psi * mode.lambda
    }

    /// Modal added mass ρ_f μᵢ (g·cm⁻²): the inertia the fluid column
    /// opposes to an acceleration of interface mode `i`.
    pub fn added_mass(&self, mode: &Mode) -> f64 {
        self.rho_f * mode.mu
    }
}

/// Time-discretization choices: step size, number of retained interface
/// modes, and horizon length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discretization {
    /// Time step Δt (s).
    pub dt: f64,
    /// Number of retained interface modes (the truncation surrogate for a
    /// spatial mesh; see [`crate::spectrum::truncation_from_h`]).
    pub n_modes: usize,
    /// Number of time steps to simulate.
    pub n_steps: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            dt: 5.0e-4,
            n_modes: 50,
            n_steps: 200,
        }
    }
}

impl Discretization {
    /// Check dt > 0 (finite), n_modes ≥ 1, n_steps ≥ 1.
    pub fn validate(&self) -> Result<()> {
        if !self.dt.is_finite() {
            return Err(Error::NonFiniteField {
                name: "dt",
                value: self.dt,
            });
        }
        if self.dt <= 0.0 {
            return Err(Error::NonPositiveField {
                name: "dt",
                value: self.dt,
            });
        }
        if self.n_modes == 0 {
            return Err(Error::ZeroModes);
        }
        if self.n_steps == 0 {
            return Err(Error::ZeroSteps);
        }
        Ok(())
    }
}

/// Validate a parameter pair as a unit, returning it unchanged on success.
pub fn validate_params(
    p: PhysicalParams,
    d: Discretization,
) -> Result<(PhysicalParams, Discretization)> {
    p.validate()?;
    d.validate()?;
    Ok((p, d))
}

/// The three rate groups the per-mode analysis runs on:
/// A = α/(ρ_s H_s), Bᵢ = α/(ρ_f μᵢ), Cᵢ = (β + ψλᵢ)/(ρ_f μᵢ).
///
/// A and B are inverse relaxation times (s⁻¹) of the wall and the fluid
/// column against the Robin coupling; C is the squared elastic frequency
/// (s⁻²) seen through the added mass. Together with z = Δt they determine
/// the characteristic polynomial of a mode completely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedGroups {
    /// A = α/(ρ_s H_s) (s⁻¹).
    pub a_structure: f64,
    /// Bᵢ = α/(ρ_f μᵢ) (s⁻¹).
    pub b_fluid: f64,
    /// Cᵢ = (β + ψλᵢ)/(ρ_f μᵢ) (s⁻²).
    pub c_stiffness: f64,
}

/// Compute the reduced groups for one mode.
///
/// Rejects α ≤ 0: the α = 0 scheme exists (see the simulator and the
/// classifier) but its analysis does not factor through these ratios,
/// whose normalization divides by α downstream.
pub fn reduced_groups(p: &PhysicalParams, alpha: f64, mode: &Mode) -> Result<ReducedGroups> {
    p.validate()?;
    if !alpha.is_finite() {
        return Err(Error::NonFiniteField {
            name: "alpha",
            value: alpha,
        });
    }
    if alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha { value: alpha });
    }
    Ok(ReducedGroups {
        a_structure: alpha / p.structure_mass(),
        b_fluid: alpha / p.added_mass(mode),
        c_stiffness: p.modal_stiffness(mode) / p.added_mass(mode),
    })
}
