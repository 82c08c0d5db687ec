//! Error type shared by the whole crate.
//!
//! Numerical findings — instability, blow-up, an inapplicable threshold —
//! are *data* and never surface here. Errors are reserved for invalid
//! inputs, ill-posed requests, and I/O failures.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating inputs, stepping the
/// model, analyzing the characteristic polynomial, or writing reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quantity that must be strictly positive is zero or negative.
    #[error("non-positive field `{name}` = {value}")]
    NonPositiveField { name: &'static str, value: f64 },

    /// A quantity that must be finite is NaN or infinite.
    #[error("non-finite field `{name}` = {value}")]
    NonFiniteField { name: &'static str, value: f64 },

    /// A spectrum or simulation was requested with no modes.
    #[error("zero modes requested")]
    ZeroModes,

    /// A simulation was requested with no steps.
    #[error("zero steps requested")]
    ZeroSteps,

    /// Mode indices are 1-based; index 0 has no eigenvalue.
    #[error("mode index must be at least 1")]
    ModeIndexZero,

    /// The coupling parameter must be positive for this operation
    /// (the α = 0 scheme is handled by dedicated branches elsewhere).
    #[error("coupling parameter alpha = {value} must be positive here")]
    NonPositiveAlpha { value: f64 },

    /// The coupling parameter may be zero but never negative.
    #[error("coupling parameter alpha = {value} must be non-negative")]
    NegativeAlpha { value: f64 },

    /// Mesh spacing must satisfy 0 < h < L to define a truncation.
    #[error("mesh spacing h = {h} must lie strictly between 0 and L = {length}")]
    SpacingOutOfRange { h: f64, length: f64 },

    /// A polynomial was passed in the wrong normalization.
    #[error("polynomial in form `{got}` where form `{expected}` is required")]
    WrongPolynomialForm {
        expected: &'static str,
        got: &'static str,
    },

    /// A leading coefficient vanished where a degree-4 polynomial is required.
    #[error("leading quartic coefficient is zero")]
    ZeroLeadingCoefficient,

    /// Trajectory too short for the requested diagnostic.
    #[error("trajectory of {len} steps is too short (need more than {needed})")]
    TrajectoryTooShort { len: usize, needed: usize },

    /// An all-zero trajectory has no growth rate.
    #[error("degenerate all-zero trajectory: growth rate undefined")]
    DegenerateTrajectory,

    /// A step index outside the range covered by a trajectory.
    #[error("step {step} outside valid range {lo}..={hi}")]
    StepOutOfRange { step: usize, lo: usize, hi: usize },

    /// The diagnostic only applies to a specific scheme's trajectories.
    #[error("operation requires a trajectory from scheme `{expected}`, got `{got}`")]
    WrongScheme {
        expected: &'static str,
        got: &'static str,
    },

    /// A sweep grid with no points.
    #[error("empty grid: {what}")]
    EmptyGrid { what: &'static str },

    /// A malformed range specification.
    #[error("bad range `{spec}`: {reason}")]
    BadRange { spec: String, reason: String },

    /// A report was requested for an empty record list.
    #[error("no records")]
    NoRecords,

    /// Configuration file could not be interpreted.
    #[error("config `{path}`: {message}")]
    Config { path: PathBuf, message: String },

    /// Filesystem failure, with the offending path attached.
    #[error("i/o on `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach a path to a raw I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
