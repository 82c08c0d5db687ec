//! Flat key-value run configuration.
//!
//! A config file is a flat TOML document — `key = value` lines, comments
//! allowed, no tables — naming any subset of the eleven run parameters:
//!
//! ```toml
//! rho_s   = 1.1
//! h_s     = 0.1
//! dt      = 2.5e-4
//! n_modes = 100
//! alpha   = 2000.0
//! ```
//!
//! Unset keys fall back to the defaults of [`PhysicalParams`] and
//! [`Discretization`]; unknown keys are rejected rather than ignored, so a
//! typo cannot silently run the defaults. Values given on the command line
//! override file values; that merge lives in the CLI, which just calls
//! [`RunConfig::resolve`] and patches the result.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{validate_params, Discretization, PhysicalParams};

/// The optional keys a configuration file may set. `None` means "use the
/// default".
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub rho_f: Option<f64>,
    pub rho_s: Option<f64>,
    pub h_s: Option<f64>,
    pub beta: Option<f64>,
    pub psi: Option<f64>,
    pub radius: Option<f64>,
    pub length: Option<f64>,
    pub dt: Option<f64>,
    pub n_modes: Option<usize>,
    pub n_steps: Option<usize>,
    pub alpha: Option<f64>,
}

/// A fully resolved run setup: physics, discretization, and the Robin
/// coupling parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedConfig {
    pub params: PhysicalParams,
    pub disc: Discretization,
    pub alpha: f64,
}

impl RunConfig {
    /// Parse a configuration from TOML text. `origin` names the source in
    /// error messages (a path, or e.g. "<inline>").
    pub fn from_str(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: origin.into(),
            message: e.message().to_string(),
        })
    }

    /// Read and parse a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str(&text, &path.display().to_string())
    }

    /// Fill unset keys from the defaults and validate the result.
    ///
    /// `default_alpha` supplies the coupling parameter when the file does
    /// not; there is no universal default α, so the caller (the CLI flag's
    /// own default, or a test fixture) must have one.
    pub fn resolve(&self, default_alpha: f64) -> Result<ResolvedConfig> {
        let base_p = PhysicalParams::default();
        let base_d = Discretization::default();
        let params = PhysicalParams {
            rho_f: self.rho_f.unwrap_or(base_p.rho_f),
            rho_s: self.rho_s.unwrap_or(base_p.rho_s),
            h_s: self.h_s.unwrap_or(base_p.h_s),
            beta: self.beta.unwrap_or(base_p.beta),
            psi: self.psi.unwrap_or(base_p.psi),
            radius: self.radius.unwrap_or(base_p.radius),
            length: self.length.unwrap_or(base_p.length),
        };
        let disc = Discretization {
            dt: self.dt.unwrap_or(base_d.dt),
            n_modes: self.n_modes.unwrap_or(base_d.n_modes),
            n_steps: self.n_steps.unwrap_or(base_d.n_steps),
        };
        let (params, disc) = validate_params(params, disc)?;
        let alpha = self.alpha.unwrap_or(default_alpha);
        if !alpha.is_finite() {
            return Err(Error::NonFiniteField {
                name: "alpha",
                value: alpha,
            });
        }
        if alpha < 0.0 {
            return Err(Error::NegativeAlpha { value: alpha });
        }
        Ok(ResolvedConfig {
            params,
            disc,
            alpha,
        })
    }
}
