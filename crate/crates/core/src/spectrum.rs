//! Analytic spectra of the two interface operators.
//!
//! On the channel interface, both the added-mass operator (mapping normal
//! acceleration to pressure) and the one-dimensional Laplacian diagonalize
//! in the sine basis gᵢ(x) = √(2/L)·sin(iπx/L). Their eigenvalues have
//! closed forms:
//!
//!   μᵢ = L / (iπ · tanh(iπR/L))   (cm)    — added mass, decreasing in i,
//!   λᵢ = (iπ/L)²                  (cm⁻²)  — Laplace, increasing in i.
//!
//! A spatial mesh of spacing h is modelled by truncating the spectrum at
//! n = round(L/h) modes. The truncated extremes then scale like a discrete
//! mesh's: μ_min ∼ h, λ_max ∼ h⁻², μ_max independent of h.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// One interface sine mode and its two eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    /// Mode number i ≥ 1.
    pub index: usize,
    /// Added-mass eigenvalue μᵢ (cm).
    pub mu: f64,
    /// Laplace eigenvalue λᵢ (cm⁻²).
    pub lambda: f64,
}

fn check_geometry(length: f64, radius: f64) -> Result<()> {
    for (name, value) in [("length", length), ("radius", radius)] {
        if !value.is_finite() {
            return Err(Error::NonFiniteField { name, value });
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveField { name, value });
        }
    }
    Ok(())
}

/// Added-mass eigenvalue μᵢ = L / (iπ · tanh(iπR/L)).
pub fn added_mass_eigenvalue(index: usize, length: f64, radius: f64) -> Result<f64> {
    if index == 0 {
        return Err(Error::ModeIndexZero);
    }
    check_geometry(length, radius)?;
    let k = index as f64 * std::f64::consts::PI;
    Ok(length / (k * (k * radius / length).tanh()))
}

/// Laplace eigenvalue λᵢ = (iπ/L)².
pub fn laplace_eigenvalue(index: usize, length: f64) -> Result<f64> {
    if index == 0 {
        return Err(Error::ModeIndexZero);
    }
    check_geometry(length, 1.0)?;
    let w = index as f64 * std::f64::consts::PI / length;
    Ok(w * w)
}

/// Number of modes representing a mesh of spacing h on a channel of length
/// L: round-half-up of L/h, at least 1. Requires 0 < h < L.
pub fn truncation_from_h(length: f64, h: f64) -> Result<usize> {
    check_geometry(length, 1.0)?;
    if !h.is_finite() || h <= 0.0 || h >= length {
        return Err(Error::SpacingOutOfRange { h, length });
    }
    // f64::round ties away from zero, which is round-half-up for the
    // positive ratio here; determinism across platforms is the point.
    Ok(((length / h).round() as usize).max(1))
}

/// Modes 1..=n_modes of the channel described by `p`, in index order.
pub fn build_spectrum(p: &PhysicalParams, n_modes: usize) -> Result<Vec<Mode>> {
    p.validate()?;
    if n_modes == 0 {
        return Err(Error::ZeroModes);
    }
    (1..=n_modes)
        .map(|i| {
            Ok(Mode {
                index: i,
                mu: added_mass_eigenvalue(i, p.length, p.radius)?,
                lambda: laplace_eigenvalue(i, p.length)?,
            })
        })
        .collect()
}
