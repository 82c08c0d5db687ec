//! Stability analysis of the loosely coupled scheme, mode by mode.
//!
//! Eliminating velocity and pressure turns one mode of the two-field
//! scheme into a five-term displacement recurrence; its characteristic
//! quartic χ(y) decides everything. The scheme is stable exactly when all
//! four roots lie in the open unit disc, and the analysis here follows
//! three complementary routes:
//!
//! * **Roots.** χ (or its normalization Q, or the reciprocal polynomial
//!   P(x) = x⁴Q(1/x)) is solved by balanced companion-matrix eigenvalues
//!   plus Newton polish. Near the stability boundary the four roots
//!   cluster at 1, so the root-based classifier works on the shifted
//!   variable U = x − 1, whose quartic has exact closed-form coefficients
//!   and no catastrophic cancellation; the per-root quantity
//!   2u + u² + v² = |x|² − 1 is then an accurate signed margin.
//! * **A sufficient instability test.** χ(−1) has a closed form; it is
//!   negative — forcing a real root below −1 — exactly when the wall mass
//!   ρ_sH_s falls below a per-mode threshold γᵢ. Scanning modes gives a
//!   cheap, root-free instability certificate.
//! * **Small-step asymptotics.** For α > 0 the four shifted roots split
//!   into two conjugate pairs with expansions u₁ ≈ Az/2,
//!   v₁² ≈ (A+B)z/3 and u₂ ≈ −ACB z²/(2(A+B)²), v₂² ≈ CA z²/(A+B); both
//!   have |x|² > 1, i.e. the scheme is stable for Δt small enough. The
//!   expansions, the sextic every real part must satisfy, and the v²(u)
//!   relation are all exposed for cross-checking.
//!
//! Everything is pure; parameter grids can be evaluated concurrently.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{reduced_groups, PhysicalParams, ReducedGroups};
use crate::spectrum::{added_mass_eigenvalue, Mode};

/// Half-width of the marginal band around spectral radius 1.
pub const TOL_MARGIN: f64 = 1.0e-9;

/// Two roots closer than this fraction of the max modulus are non-simple.
pub const SIMPLE_SEPARATION: f64 = 1.0e-8;

/// Which polynomial a coefficient set represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyForm {
    /// The characteristic quartic of the displacement recurrence.
    Chi,
    /// Q(y) = (Δt²/ρ_sH_s)·χ(y), the monic-at-z=0 normalization.
    Q,
    /// P(x) = x⁴·Q(1/x), whose roots are reciprocals of Q's.
    P,
}

impl PolyForm {
    pub fn name(self) -> &'static str {
        match self {
            PolyForm::Chi => "chi",
            PolyForm::Q => "Q",
            PolyForm::P => "P",
        }
    }
}

/// A real degree-4 polynomial, leading coefficient first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarticCoefficients {
    /// c[0]·y⁴ + c[1]·y³ + c[2]·y² + c[3]·y + c[4].
    pub c: [f64; 5],
    pub form: PolyForm,
    /// Set when the polynomial is a known exact fourth power (the α = 0
    /// collapse (y−1)⁴ and the z = 0 limit), where "four simple roots"
    /// is structurally false.
    pub degenerate: bool,
}

impl QuarticCoefficients {
    /// Horner evaluation at a complex point.
    pub fn eval(&self, y: Complex64) -> Complex64 {
        self.c
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &ck| acc * y + ck)
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, y: f64) -> f64 {
        self.c.iter().fold(0.0, |acc, &ck| acc * y + ck)
    }
}

/// The four roots of a quartic with simplicity flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootSet {
    /// Roots sorted by (re, im) for deterministic output; complex roots of
    /// the real quartic come in conjugate pairs.
    pub roots: [ComplexRoot; 4],
    /// Max of the four moduli.
    pub spectral_radius: f64,
}

/// One root with its derived data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// True when this root is farther than `SIMPLE_SEPARATION` × max
    /// modulus from every other root.
    pub simple: bool,
}

impl ComplexRoot {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl RootSet {
    /// Iterator over the roots as complex numbers.
    pub fn values(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().map(|r| r.value())
    }

    /// True when all four roots are pairwise separated.
    pub fn all_simple(&self) -> bool {
        self.roots.iter().all(|r| r.simple)
    }
}

/// Stable / marginal / unstable, by spectral radius against the
/// `TOL_MARGIN` band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Stable,
    Marginal,
    Unstable,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Marginal => "marginal",
            Classification::Unstable => "unstable",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict over a whole truncated spectrum at one (α, Δt) point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    /// Spectral radius of each mode's quartic, in spectrum order.
    pub per_mode_radius: Vec<f64>,
    /// Index (1-based mode number) attaining the max radius.
    pub worst_mode: usize,
    pub classification: Classification,
    /// Max over modes of the instability threshold γᵢ (g·cm⁻²).
    pub gamma_max: f64,
    /// True when ρ_sH_s < γ_max: the certificate that forces a real
    /// characteristic root below −1 for some mode.
    pub instability_sufficient: bool,
}

impl StabilityVerdict {
    /// Max over per-mode spectral radii.
    pub fn spectral_radius(&self) -> f64 {
        self.per_mode_radius.iter().copied().fold(0.0, f64::max)
    }
}

/// Result of the root-free instability scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstabilityCheck {
    /// ρ_sH_s < γ_max?
    pub sufficient: bool,
    pub gamma_max: f64,
    /// Mode index attaining γ_max.
    pub worst_mode: usize,
}

/// The mass and coupling thresholds of the sufficient instability
/// conditions. An `alpha_*` of `None` means the corresponding wall-mass
/// precondition fails and that condition can never fire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Wall-mass bound η̄ pairing the extremes of the truncated spectrum
    /// (μ_min with λ_max) at the given α: instability whenever
    /// ρ_sH_s < η̄.
    pub eta_bar: f64,
    /// η₁ = ρ_fμ_min + Δt²(β+ψλ_max)/4.
    pub eta_1: f64,
    /// Coupling threshold α₁; instability for α > α₁ when ρ_sH_s < η₁.
    pub alpha_1: Option<f64>,
    /// η₂ = ρ_fμ₁.
    pub eta_2: f64,
    /// Coupling threshold α₂; instability for α > α₂ when ρ_sH_s < η₂.
    pub alpha_2: Option<f64>,
}

/// Leading-order description of the four shifted roots U = x − 1 of the
/// reciprocal quartic for small z = Δt: one conjugate pair per branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticExpansion {
    /// Re U of the wide branch (Im U = O(√z)): −Az/2, accurate to O(z²).
    pub u1: f64,
    /// (Im U)² of the wide branch: (A+B)z, accurate to O(z²).
    pub v1_sq: f64,
    /// Re U of the narrow branch (Im U = O(z)): −ACB z²/(2(A+B)²),
    /// accurate to O(z³).
    pub u2: f64,
    /// (Im U)² of the narrow branch: CA z²/(A+B), accurate to O(z³).
    pub v2_sq: f64,
    /// |1+U|² of the wide branch: 1 + Bz. Exceeding 1 means the
    /// corresponding amplification factor 1/(1+U) lies inside the unit
    /// disc.
    pub modulus1_sq: f64,
    /// |1+U|² of the narrow branch: 1 + CA²z²/(A+B)².
    pub modulus2_sq: f64,
}

/// The seven coefficients of the sextic every real part u of a complex
/// root of the reciprocal quartic must satisfy, T₆ through T₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SexticCoefficients {
    /// t[0]·u⁶ + … + t[6]; t[0] = −64 exactly.
    pub t: [f64; 7],
}

impl SexticCoefficients {
    /// Horner evaluation at a real point.
    pub fn eval(&self, u: f64) -> f64 {
        self.t.iter().fold(0.0, |acc, &tk| acc * u + tk)
    }

    /// Magnitude-sum at a real point: Σ |Tₖ||u|ᵏ, the natural scale for a
    /// relative residual of `eval`.
    pub fn eval_scale(&self, u: f64) -> f64 {
        self.t.iter().fold(0.0, |acc, &tk| acc * u.abs() + tk.abs())
    }
}

/// Outcome of the critical-step bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CriticalDtOutcome {
    /// A stable-to-unstable transition was bracketed down to the requested
    /// relative tolerance.
    Found {
        dt_star: f64,
        bracket: (f64, f64),
        iterations: usize,
    },
    /// Both bracket ends classified the same way; the assumed monotone
    /// transition is not there to bisect.
    NoSignChange {
        lo: Classification,
        hi: Classification,
    },
}

impl std::fmt::Display for CriticalDtOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriticalDtOutcome::Found {
                dt_star,
                bracket,
                iterations,
            } => write!(
                f,
                "dt* = {dt_star:.6e} in [{:.6e}, {:.6e}] after {iterations} bisections",
                bracket.0, bracket.1
            ),
            CriticalDtOutcome::NoSignChange { lo, hi } => write!(
                f,
                "monotonicity not found: classification is {lo} at the lower end and {hi} at the upper end"
            ),
        }
    }
}

fn check_alpha_dt(alpha: f64, dt: f64, allow_zero_alpha: bool) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::NonFiniteField {
            name: "alpha",
            value: alpha,
        });
    }
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha { value: alpha });
    }
    if alpha == 0.0 && !allow_zero_alpha {
        return Err(Error::NonPositiveAlpha { value: alpha });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "dt",
            value: dt,
        });
    }
    Ok(())
}

/// The characteristic quartic χ(y) of one mode's displacement recurrence:
///
///   χ(y) = (ρ_sH_s/Δt²)(1 + αΔt/(ρ_fμᵢ)) y⁴
///        + (−2αρ_sH_s/(ρ_fμᵢΔt) + (αΔt/(ρ_fμᵢ))(β+ψλᵢ) + α/Δt − 4ρ_sH_s/Δt²) y³
///        + (αρ_sH_s/(ρ_fμᵢΔt) − 2α/Δt + 6ρ_sH_s/Δt²) y²
///        + (α/Δt − 4ρ_sH_s/Δt²) y + ρ_sH_s/Δt².
///
/// At α = 0 this collapses to (ρ_sH_s/Δt²)(y−1)⁴, returned with the
/// degenerate flag set.
pub fn characteristic_chi(
    p: &PhysicalParams,
    mode: &Mode,
    alpha: f64,
    dt: f64,
) -> Result<QuarticCoefficients> {
    p.validate()?;
    check_alpha_dt(alpha, dt, true)?;
    let sh = p.structure_mass();
    let dt2 = dt * dt;
    if alpha == 0.0 {
        let s = sh / dt2;
        return Ok(QuarticCoefficients {
            c: [s, -4.0 * s, 6.0 * s, -4.0 * s, s],
            form: PolyForm::Chi,
            degenerate: true,
        });
    }
    let m = p.added_mass(mode);
    let k = p.modal_stiffness(mode);
    let c = [
        sh / dt2 * (1.0 + alpha * dt / m),
        -2.0 * alpha * sh / (m * dt) + alpha * dt / m * k + alpha / dt - 4.0 * sh / dt2,
        alpha * sh / (m * dt) - 2.0 * alpha / dt + 6.0 * sh / dt2,
        alpha / dt - 4.0 * sh / dt2,
        sh / dt2,
    ];
    Ok(QuarticCoefficients {
        c,
        form: PolyForm::Chi,
        degenerate: false,
    })
}

/// Q(y) = (Δt²/ρ_sH_s)·χ(y): the normalization whose z → 0 limit is
/// (y−1)⁴ with unit leading behavior.
pub fn normalized_q(
    chi: &QuarticCoefficients,
    p: &PhysicalParams,
    dt: f64,
) -> Result<QuarticCoefficients> {
    if chi.form != PolyForm::Chi {
        return Err(Error::WrongPolynomialForm {
            expected: "chi",
            got: chi.form.name(),
        });
    }
    p.validate()?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "dt",
            value: dt,
        });
    }
    let s = dt * dt / p.structure_mass();
    Ok(QuarticCoefficients {
        c: chi.c.map(|ck| ck * s),
        form: PolyForm::Q,
        degenerate: chi.degenerate,
    })
}

/// Q(y) assembled directly from the reduced groups:
///
///   Q(y) = (1+Bz)y⁴ − (4+(2B−A)z−ACz³)y³ + (6+(B−2A)z)y² − (4−Az)y + 1.
///
/// Admits z = 0, where Q = (y−1)⁴ exactly (flagged degenerate).
pub fn q_from_groups(g: &ReducedGroups, z: f64) -> Result<QuarticCoefficients> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::NonPositiveField {
            name: "z",
            value: z,
        });
    }
    let (a, b, c) = (g.a_structure, g.b_fluid, g.c_stiffness);
    let z3 = z * z * z;
    Ok(QuarticCoefficients {
        c: [
            1.0 + b * z,
            -(4.0 + (2.0 * b - a) * z - a * c * z3),
            6.0 + (b - 2.0 * a) * z,
            -(4.0 - a * z),
            1.0,
        ],
        form: PolyForm::Q,
        degenerate: z == 0.0,
    })
}

/// P(x) = x⁴·Q(1/x): coefficient reversal. Roots of P are the reciprocals
/// of the roots of Q, so "all roots of Q inside the unit disc" becomes
/// "all roots of P outside".
pub fn reciprocal_p(q: &QuarticCoefficients) -> Result<QuarticCoefficients> {
    if q.form != PolyForm::Q {
        return Err(Error::WrongPolynomialForm {
            expected: "Q",
            got: q.form.name(),
        });
    }
    if q.c[4] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    Ok(QuarticCoefficients {
        c: [q.c[4], q.c[3], q.c[2], q.c[1], q.c[0]],
        form: PolyForm::P,
        degenerate: q.degenerate,
    })
}

/// χ(−1) by the closed form
///
///   χ(−1) = (α/(ρ_fμᵢΔt))(4ρ_sH_s − 4ρ_fμᵢ − Δt²(β+ψλᵢ)) + 16ρ_sH_s/Δt².
///
/// Negative exactly when ρ_sH_s < γᵢ (see [`gamma_mode`]); since
/// χ(y) → +∞ as y → −∞, a negative value certifies a real root below −1.
pub fn chi_at_minus_one(p: &PhysicalParams, mode: &Mode, alpha: f64, dt: f64) -> Result<f64> {
    p.validate()?;
    check_alpha_dt(alpha, dt, true)?;
    let sh = p.structure_mass();
    let m = p.added_mass(mode);
    let k = p.modal_stiffness(mode);
    Ok(alpha / (m * dt) * (4.0 * sh - 4.0 * m - dt * dt * k) + 16.0 * sh / (dt * dt))
}

/// Per-mode instability threshold
///
///   γᵢ = αΔt(4ρ_fμᵢ + Δt²(β+ψλᵢ)) / (16ρ_fμᵢ + 4αΔt)  (g·cm⁻²):
///
/// the scheme is unstable whenever ρ_sH_s < γᵢ for some retained mode.
pub fn gamma_mode(p: &PhysicalParams, mode: &Mode, alpha: f64, dt: f64) -> Result<f64> {
    p.validate()?;
    check_alpha_dt(alpha, dt, true)?;
    let m = p.added_mass(mode);
    let k = p.modal_stiffness(mode);
    Ok(alpha * dt * (4.0 * m + dt * dt * k) / (16.0 * m + 4.0 * alpha * dt))
}

/// Scan γᵢ over the spectrum: the sufficient-instability flag, the max,
/// and the mode attaining it.
pub fn instability_sufficient(
    p: &PhysicalParams,
    spectrum: &[Mode],
    alpha: f64,
    dt: f64,
) -> Result<InstabilityCheck> {
    if spectrum.is_empty() {
        return Err(Error::ZeroModes);
    }
    let mut gamma_max = f64::NEG_INFINITY;
    let mut worst_mode = spectrum[0].index;
    for mode in spectrum {
        let g = gamma_mode(p, mode, alpha, dt)?;
        if g > gamma_max {
            gamma_max = g;
            worst_mode = mode.index;
        }
    }
    Ok(InstabilityCheck {
        sufficient: p.structure_mass() < gamma_max,
        gamma_max,
        worst_mode,
    })
}

/// The wall-mass and coupling thresholds derived from γᵢ, evaluated on the
/// truncated spectrum's extremes (μ_min paired with λ_max) and on the
/// channel's first mode.
pub fn thresholds(
    p: &PhysicalParams,
    spectrum: &[Mode],
    alpha: f64,
    dt: f64,
) -> Result<Thresholds> {
    if spectrum.is_empty() {
        return Err(Error::ZeroModes);
    }
    p.validate()?;
    check_alpha_dt(alpha, dt, true)?;
    let mu_min = spectrum.iter().map(|m| m.mu).fold(f64::INFINITY, f64::min);
    let lam_max = spectrum
        .iter()
        .map(|m| m.lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    let sh = p.structure_mass();
    let k_max = p.beta + p.psi * lam_max;
    let m_min = p.rho_f * mu_min;

    let eta_bar = alpha * dt * (4.0 * m_min + dt * dt * k_max) / (16.0 * m_min + 4.0 * alpha * dt);
    let eta_1 = m_min + dt * dt * k_max / 4.0;
    let alpha_1 =
        (sh < eta_1).then(|| 16.0 * m_min * sh / (dt * (4.0 * m_min + dt * dt * k_max - 4.0 * sh)));
    let mu_1 = added_mass_eigenvalue(1, p.length, p.radius)?;
    let eta_2 = p.rho_f * mu_1;
    let alpha_2 = (sh < eta_2).then(|| 4.0 * eta_2 * sh / (dt * (eta_2 - sh)));

    Ok(Thresholds {
        eta_bar,
        eta_1,
        alpha_1,
        eta_2,
        alpha_2,
    })
}

// ---------------------------------------------------------------------------
// Root extraction
// ---------------------------------------------------------------------------

/// Detect an exact binomial fourth power c₄(y−a)⁴ (within 1e-12 of each
/// coefficient). Repeated-root quartics defeat double-precision root
/// finders — the eigenvalue scatter of a quadruple root is O(ε^¼) — so the
/// known degenerate shapes are answered exactly instead.
fn binomial_quadruple_root(c: &[f64; 5]) -> Option<f64> {
    let a = -c[1] / (4.0 * c[0]);
    let expect = [
        c[0],
        -4.0 * a * c[0],
        6.0 * a * a * c[0],
        -4.0 * a * a * a * c[0],
        a * a * a * a * c[0],
    ];
    let tol = 1.0e-12;
    for k in 0..5 {
        let scale = c[k].abs().max(expect[k].abs()).max(c[0].abs());
        if (c[k] - expect[k]).abs() > tol * scale {
            return None;
        }
    }
    Some(a)
}

/// In-place Parlett-Reinsch balancing (power-of-two scaling, so the
/// eigenvalues are untouched by rounding) of a 4×4 companion matrix.
fn balance(m: &mut Matrix4<f64>) {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..4 {
            let mut col: f64 = (0..4).filter(|&j| j != i).map(|j| m[(j, i)].abs()).sum();
            let row: f64 = (0..4).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            while col < row / RADIX {
                f *= RADIX;
                col *= RADIX2;
            }
            while col > row * RADIX {
                f /= RADIX;
                col /= RADIX2;
            }
            if (col + row) / f < 0.95 * s {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..4 {
                    m[(i, j)] *= inv;
                }
                for j in 0..4 {
                    m[(j, i)] *= f;
                }
            }
        }
        if converged {
            return;
        }
    }
}

/// Value and derivative of the monic polynomial at a complex point.
fn horner_with_derivative(b: &[f64; 5], y: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &bk in b {
        dp = dp * y + p;
        p = p * y + bk;
    }
    (p, dp)
}

/// Roots of a monic real quartic by balanced companion eigenvalues plus a
/// few guarded Newton corrections.
fn monic_quartic_roots(b: [f64; 5]) -> [Complex64; 4] {
    let mut companion = Matrix4::new(
        -b[1], -b[2], -b[3], -b[4], //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0,
    );
    balance(&mut companion);
    let eig = companion.complex_eigenvalues();
    let mut roots = [Complex64::new(0.0, 0.0); 4];
    for (k, e) in eig.iter().enumerate() {
        let mut y = Complex64::new(e.re, e.im);
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(&b, y);
            if dp.norm() == 0.0 {
                break;
            }
            let candidate = y - p / dp;
            let (p_new, _) = horner_with_derivative(&b, candidate);
            if p_new.norm() <= p.norm() {
                y = candidate;
            } else {
                break;
            }
        }
        roots[k] = y;
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn root_set_from_values(values: [Complex64; 4]) -> RootSet {
    let moduli = values.map(|v| v.norm());
    let max_modulus = moduli.iter().copied().fold(0.0, f64::max);
    let sep = SIMPLE_SEPARATION * max_modulus;
    let mut roots = [ComplexRoot {
        re: 0.0,
        im: 0.0,
        modulus: 0.0,
        simple: false,
    }; 4];
    for i in 0..4 {
        let simple = (0..4).all(|j| j == i || (values[i] - values[j]).norm() > sep);
        roots[i] = ComplexRoot {
            re: values[i].re,
            im: values[i].im,
            modulus: moduli[i],
            simple,
        };
    }
    RootSet {
        roots,
        spectral_radius: max_modulus,
    }
}

/// All four roots of a quartic in any form, with simplicity flags
/// (pairwise separation > `SIMPLE_SEPARATION` × max modulus) and the
/// spectral radius. Exact fourth powers are answered directly and flagged
/// non-simple rather than rejected.
pub fn quartic_roots(q: &QuarticCoefficients) -> Result<RootSet> {
    if q.c[0] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    for &ck in &q.c {
        if !ck.is_finite() {
            return Err(Error::NonFiniteField {
                name: "quartic coefficient",
                value: ck,
            });
        }
    }
    if let Some(a) = binomial_quadruple_root(&q.c) {
        let v = Complex64::new(a, 0.0);
        return Ok(root_set_from_values([v, v, v, v]));
    }
    let b = q.c.map(|ck| ck / q.c[0]);
    Ok(root_set_from_values(monic_quartic_roots(b)))
}

// ---------------------------------------------------------------------------
// Shifted-variable route: U = x − 1
// ---------------------------------------------------------------------------

/// Coefficients of the reciprocal quartic in the shifted variable
/// U = x − 1 (monic, exact closed forms, no cancellation near the root
/// cluster):
///
///   P(1+U) = U⁴ + Az·U³ + (A+B)z·U² + ACz³·U + ACz³.
pub fn p_shifted_coefficients(g: &ReducedGroups, z: f64) -> Result<[f64; 5]> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::NonPositiveField {
            name: "z",
            value: z,
        });
    }
    let (a, b, c) = (g.a_structure, g.b_fluid, g.c_stiffness);
    let z3 = z * z * z;
    Ok([1.0, a * z, (a + b) * z, a * c * z3, a * c * z3])
}

/// The four shifted roots U (sorted by (re, im)). x = 1 + U recovers the
/// reciprocal roots; y = 1/(1+U) the characteristic ones.
pub fn p_shifted_roots(g: &ReducedGroups, z: f64) -> Result<[Complex64; 4]> {
    let b = p_shifted_coefficients(g, z)?;
    if z == 0.0 {
        return Ok([Complex64::new(0.0, 0.0); 4]);
    }
    Ok(monic_quartic_roots(b))
}

/// Signed unit-disc margins |x|² − 1 = 2u + u² + v² of the four shifted
/// roots, same order as [`p_shifted_roots`]. A positive margin means the
/// corresponding characteristic root lies strictly inside the unit disc.
pub fn unit_disc_margins(g: &ReducedGroups, z: f64) -> Result<[f64; 4]> {
    let roots = p_shifted_roots(g, z)?;
    Ok(roots.map(|u| 2.0 * u.re + u.re * u.re + u.im * u.im))
}

/// Spectral radius of one mode's characteristic quartic, computed through
/// the shifted margins: max |y| = (1 + min margin)^(−1/2).
pub fn mode_spectral_radius(g: &ReducedGroups, z: f64) -> Result<f64> {
    let margins = unit_disc_margins(g, z)?;
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let denom = 1.0 + min_margin;
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / denom.sqrt())
}

/// Classify one (α, Δt) point over a truncated spectrum.
///
/// α = 0 short-circuits to marginal: every mode's quartic collapses to a
/// quadruple root at 1, the solution neither decays nor blows up.
pub fn classify(
    p: &PhysicalParams,
    spectrum: &[Mode],
    alpha: f64,
    dt: f64,
) -> Result<StabilityVerdict> {
    if spectrum.is_empty() {
        return Err(Error::ZeroModes);
    }
    p.validate()?;
    check_alpha_dt(alpha, dt, true)?;

    if alpha == 0.0 {
        return Ok(StabilityVerdict {
            per_mode_radius: vec![1.0; spectrum.len()],
            worst_mode: spectrum[0].index,
            classification: Classification::Marginal,
            gamma_max: 0.0,
            instability_sufficient: false,
        });
    }

    let mut per_mode_radius = Vec::with_capacity(spectrum.len());
    let mut worst_mode = spectrum[0].index;
    let mut max_radius = f64::NEG_INFINITY;
    let mut gamma_max = f64::NEG_INFINITY;
    for mode in spectrum {
        let g = reduced_groups(p, alpha, mode)?;
        let radius = mode_spectral_radius(&g, dt)?;
        per_mode_radius.push(radius);
        if radius > max_radius {
            max_radius = radius;
            worst_mode = mode.index;
        }
        gamma_max = gamma_max.max(gamma_mode(p, mode, alpha, dt)?);
    }
    let classification = if max_radius < 1.0 - TOL_MARGIN {
        Classification::Stable
    } else if max_radius > 1.0 + TOL_MARGIN {
        Classification::Unstable
    } else {
        Classification::Marginal
    };
    Ok(StabilityVerdict {
        per_mode_radius,
        worst_mode,
        classification,
        gamma_max,
        instability_sufficient: p.structure_mass() < gamma_max,
    })
}

/// Leading-order predictions for the shifted roots at small z.
///
/// The four roots of U⁴ + AzU³ + (A+B)zU² + ACz³U + ACz³ form two
/// conjugate pairs. Balancing U⁴ + AzU³ + (A+B)zU² ≈ 0 gives the wide
/// pair U² ≈ −(A+B)z, whose real part follows from the root sum
/// ΣU = −Az once the narrow pair is known to be O(z²); balancing
/// (A+B)zU² + ACz³U + ACz³ ≈ 0 gives the narrow pair with
/// v² ≈ ACz²/(A+B), and its real part comes from the imaginary-part
/// equation v²(4u + Az) = 4u³ + 3Azu² + 2(A+B)zu + ACz³ at that v².
/// Richardson runs against computed roots confirm the stated orders.
pub fn root_asymptotics(g: &ReducedGroups, z: f64) -> Result<AsymptoticExpansion> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "z",
            value: z,
        });
    }
    let (a, b, c) = (g.a_structure, g.b_fluid, g.c_stiffness);
    let ab = a + b;
    let u1 = -a * z / 2.0;
    let v1_sq = ab * z;
    let u2 = -a * c * b * z * z / (2.0 * ab * ab);
    let v2_sq = c * a * z * z / ab;
    Ok(AsymptoticExpansion {
        u1,
        v1_sq,
        u2,
        v2_sq,
        modulus1_sq: 1.0 + b * z,
        modulus2_sq: 1.0 + c * a * a * z * z / (ab * ab),
    })
}

/// The sextic satisfied by the real part u of every complex shifted root,
/// obtained by substituting the v² branch into the real-part equation and
/// clearing the denominator (4u + Az)²:
///
///   T₆ = −64,
///   T₅ = −96Az,
///   T₄ = −32(A+B)z − 48A²z²,
///   T₃ = −32A(A+B)z² − 8A³z³,
///   T₂ = −4(A+B)²z² − 8A(A² + BA − 2C)z³ − 4A²Cz⁴,
///   T₁ = −2A(A+B)²z³ + 8A²Cz⁴ − 2A³Cz⁵,
///   T₀ = −A²C(B − zC)z⁵.
pub fn sextic_coefficients(g: &ReducedGroups, z: f64) -> Result<SexticCoefficients> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "z",
            value: z,
        });
    }
    let (a, b, c) = (g.a_structure, g.b_fluid, g.c_stiffness);
    let ab = a + b;
    let z2 = z * z;
    let z3 = z2 * z;
    let z4 = z2 * z2;
    let z5 = z4 * z;
    Ok(SexticCoefficients {
        t: [
            -64.0,
            -96.0 * a * z,
            -32.0 * ab * z - 48.0 * a * a * z2,
            -32.0 * a * ab * z2 - 8.0 * a * a * a * z3,
            -4.0 * ab * ab * z2 - 8.0 * a * (a * a + b * a - 2.0 * c) * z3 - 4.0 * a * a * c * z4,
            -2.0 * a * ab * ab * z3 + 8.0 * a * a * c * z4 - 2.0 * a * a * a * c * z5,
            -a * a * c * (b - z * c) * z5,
        ],
    })
}

/// The squared imaginary part forced by a given real part u of a complex
/// shifted root:
///
///   v² = (4u³ + 3Au²z + 2uz(A+B) + ACz³) / (4u + Az).
pub fn v_squared(g: &ReducedGroups, z: f64, u: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonPositiveField {
            name: "z",
            value: z,
        });
    }
    let (a, b, c) = (g.a_structure, g.b_fluid, g.c_stiffness);
    let denom = 4.0 * u + a * z;
    if denom == 0.0 {
        return Err(Error::NonPositiveField {
            name: "4u + Az",
            value: denom,
        });
    }
    Ok((4.0 * u * u * u + 3.0 * a * u * u * z + 2.0 * u * z * (a + b) + a * c * z * z * z) / denom)
}

/// Bisect Δt for the stable/unstable transition of `classify` on a
/// bracket, to relative tolerance `tol`. Marginal counts as "not yet
/// unstable". When both ends classify the same way there is no monotone
/// transition to find and the outcome reports exactly that.
pub fn critical_dt(
    p: &PhysicalParams,
    spectrum: &[Mode],
    alpha: f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<CriticalDtOutcome> {
    if spectrum.is_empty() {
        return Err(Error::ZeroModes);
    }
    p.validate()?;
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::NonPositiveAlpha { value: alpha });
    }
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
        return Err(Error::BadRange {
            spec: format!("{lo}:{hi}"),
            reason: "need 0 < lo < hi".into(),
        });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::NonPositiveField {
            name: "tol",
            value: tol,
        });
    }
    let unstable = |dt: f64| -> Result<bool> {
        Ok(classify(p, spectrum, alpha, dt)?.classification == Classification::Unstable)
    };
    let lo_unstable = unstable(lo)?;
    let hi_unstable = unstable(hi)?;
    if lo_unstable == hi_unstable {
        return Ok(CriticalDtOutcome::NoSignChange {
            lo: classify(p, spectrum, alpha, lo)?.classification,
            hi: classify(p, spectrum, alpha, hi)?.classification,
        });
    }
    let mut iterations = 0;
    while hi / lo - 1.0 > tol {
        // geometric midpoint: the bracket often spans decades
        let mid = (lo * hi).sqrt();
        if unstable(mid)? == hi_unstable {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > 200 {
            break;
        }
    }
    Ok(CriticalDtOutcome::Found {
        dt_star: (lo * hi).sqrt(),
        bracket: (lo, hi),
        iterations,
    })
}
