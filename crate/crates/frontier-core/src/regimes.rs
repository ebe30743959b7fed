//! Interval-independent spectral constants of the model and the
//! pulled / semi-pushed / fully-pushed phase classification.
//!
//! Everything here depends only on the branching strength `ρ > 1`. The
//! central quantity is the generalized principal eigenvalue `λ∞(ρ)` of the
//! half-line operator `½∂² + r(x)`, from which the drift and the front
//! constants follow:
//!
//! ```text
//! μ = √(1 + 2λ∞)        drift that exactly balances growth
//! β = √(2λ∞)  = √(μ²−1)
//! γ = √(ρ−1−2λ∞)        interior oscillation frequency, γ ∈ (π/2, π)
//! α = (μ+β)/(μ−β)       heavy-tail exponent of the descendant count
//! ```
//!
//! For `ρ` above `ρ₁ = 1 + π²/4`, `λ∞` is the unique positive root of the
//! boundary equation `−tan(γ)/γ = 1/β`; below `ρ₁` it is `0` (pulled
//! phase). Two independent routes to `λ∞` are provided — the boundary
//! equation ([`lambda_inf`]) and a closed form via the inverse of
//! `g(x) = x/sin²(√x)` ([`lambda_c_closed`]) — and are cross-checked in the
//! tests to 1e-10.

use crate::numerics::{bisect, sinc};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Absolute tolerance for the root bisections in this module (on the
/// bracketed variable, i.e. `γ` or `g`'s argument).
const ROOT_XTOL: f64 = 1e-13;

/// Half-width of the guard band around the excluded branching strengths
/// `ρ = 1 + k²π²/4` and around the phase thresholds `ρ₁`, `ρ₂`.
pub const RHO_GUARD: f64 = 1e-9;

/// Errors for constant computation and classification.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegimeError {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// `ρ` within [`RHO_GUARD`] of the excluded set `{1 + k²π²/4}`, where
    /// the boundary equation degenerates and the theory gives no value.
    #[error("rho = {rho} is within {RHO_GUARD:e} of the excluded point 1 + {k}²π²/4")]
    ForbiddenRho { rho: f64, k: u32 },
}

/// Phase of the front for a given branching strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `ρ < ρ₁`: the front is driven by the linearized tip; `λ∞ = 0`, `μ = 1`.
    Pulled,
    /// `ρ₁ < ρ < ρ₂`: interior growth pushes the front, but fluctuations
    /// remain heavy-tailed (`α ∈ (1, 2)`).
    SemiPushed,
    /// `ρ > ρ₂`: fully pushed; `α > 2`, Gaussian-scale fluctuations.
    FullyPushed,
    /// Within [`RHO_GUARD`] of `ρ₁` or `ρ₂`; constants are returned but the
    /// label warns that the phase is not resolved at this precision.
    Boundary,
}

/// The interval-independent constants of one model instance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeParams {
    /// Branching strength (`> 1`).
    pub rho: f64,
    /// Generalized principal eigenvalue `λ∞ ≥ 0`.
    pub lambda_inf: f64,
    /// Drift magnitude `μ = √(1 + 2λ∞) ≥ 1`.
    pub mu: f64,
    /// `β = √(2λ∞)`; the spatial decay rate `e^{−βx}` of the front profile.
    pub beta: f64,
    /// `γ = √(ρ−1−2λ∞)`; interior oscillation frequency.
    pub gamma: f64,
    /// Tail exponent `α = (μ+β)/(μ−β)`; `None` in the pulled phase where
    /// `μ = 1` makes it undefined.
    pub alpha: Option<f64>,
    /// Phase label.
    pub regime: Regime,
}

/// The two critical branching strengths and the critical drift.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// `ρ₁ = 1 + π²/4`, the pulled/pushed threshold (closed form).
    pub rho1: f64,
    /// `ρ₂`, the semi-pushed/fully-pushed threshold (root of `α(ρ) = 2`).
    pub rho2: f64,
    /// `μ_c = (3/4)√2`, the drift at `ρ₂`.
    pub mu_c: f64,
}

impl RegimeThresholds {
    /// Computes (and caches) the thresholds.
    pub fn get() -> Self {
        static CACHE: OnceLock<RegimeThresholds> = OnceLock::new();
        *CACHE.get_or_init(|| RegimeThresholds {
            rho1: rho1(),
            rho2: compute_rho2(),
            mu_c: MU_C,
        })
    }
}

/// `ρ₁ = 1 + π²/4` (closed form).
pub fn rho1() -> f64 {
    1.0 + PI * PI / 4.0
}

/// Critical drift `μ_c = (3/4)√2`.
pub const MU_C: f64 = 1.060660171779821286601266543157;

/// Rejects non-finite or `≤ 1` branching strengths and the excluded set
/// `{1 + k²π²/4 : k ≥ 1}` (within [`RHO_GUARD`]).
pub fn validate_rho(rho: f64) -> Result<(), RegimeError> {
    if !rho.is_finite() || rho <= 1.0 {
        return Err(RegimeError::Domain(format!(
            "rho must be a finite number > 1, got {rho}"
        )));
    }
    // k ranges far enough that 1 + k²π²/4 overshoots rho by a full guard.
    let k_max = (2.0 * (rho - 1.0).sqrt() / PI).ceil() as u32 + 1;
    for k in 1..=k_max {
        let excluded = 1.0 + (k as f64 * PI / 2.0).powi(2);
        if (rho - excluded).abs() <= RHO_GUARD {
            return Err(RegimeError::ForbiddenRho { rho, k });
        }
    }
    Ok(())
}

/// Generalized principal eigenvalue `λ∞(ρ)`.
///
/// Returns `0` for `ρ ≤ ρ₁`. Above `ρ₁`, solves the boundary equation
/// `−tan(γ)/γ = 1/β`, where `β = √(2λ)` and `γ = √(ρ−1−2λ)` (so that
/// `β = √(ρ−1−γ²)` along the search). Bisection runs on the pole-free
/// rearrangement `G(γ) = −sin(γ)·√(ρ−1−γ²) − γ·cos(γ) = 0` over
/// `γ ∈ (π/2, min(π, √(ρ−1)))`, then maps back through
/// `λ = (ρ−1−γ²)/2 > 0`.
pub fn lambda_inf(rho: f64) -> Result<f64, RegimeError> {
    validate_rho(rho)?;
    if rho <= rho1() {
        return Ok(0.0);
    }
    let gamma = lambda_inf_gamma(rho)?;
    Ok(0.5 * (rho - 1.0 - gamma * gamma))
}

/// The `γ`-root behind [`lambda_inf`] (exposed for reuse by the spectrum
/// module's limit formulas).
pub fn lambda_inf_gamma(rho: f64) -> Result<f64, RegimeError> {
    let hi = PI.min((rho - 1.0).sqrt());
    let g = |gamma: f64| {
        let beta = (rho - 1.0 - gamma * gamma).max(0.0).sqrt();
        -gamma.sin() * beta - gamma * gamma.cos()
    };
    bisect(g, PI / 2.0, hi, ROOT_XTOL)
        .map_err(|e| RegimeError::Domain(format!("boundary equation lost its bracket: {e}")))
}

/// Closed-form route to the principal eigenvalue, as a function of the
/// perturbation strength (`ρ − 1` in this model's convention).
///
/// For `p > π²/4`, `λ_c = ½(p − g⁻¹(p))` where `g(x) = x/sin²(√x)` is
/// increasing on `[π²/4, π²)`; `g⁻¹` is found by bisection. Returns `0`
/// for `p ≤ π²/4`. This route shares no code with [`lambda_inf`] and is
/// used as its independent cross-check.
pub fn lambda_c_closed(rho_pert: f64) -> f64 {
    let quarter_pi_sq = PI * PI / 4.0;
    if rho_pert <= quarter_pi_sq {
        return 0.0;
    }
    // Roots of x − p·sin²(√x): same zero set as g(x) = p on (π²/4, π²),
    // where g is strictly increasing, so the root is unique.
    let f = |x: f64| {
        let s = sinc(x.sqrt()) * x.sqrt();
        x - rho_pert * s * s
    };
    let x = bisect(f, quarter_pi_sq, PI * PI, ROOT_XTOL)
        .expect("g(x) = p always brackets on [pi^2/4, pi^2) for p > pi^2/4");
    0.5 * (rho_pert - x)
}

/// Drift `μ(ρ)`: `1` in the pulled phase, `√(1 + 2λ∞)` above `ρ₁`.
pub fn mu_of_rho(rho: f64) -> Result<f64, RegimeError> {
    Ok((1.0 + 2.0 * lambda_inf(rho)?).sqrt())
}

/// Tail exponent `α = (μ+β)/(μ−β)` as a function of the drift `μ > 1`
/// (`β = √(μ²−1)`).
pub fn alpha_from_mu(mu: f64) -> f64 {
    let beta = (mu * mu - 1.0).sqrt();
    (mu + beta) / (mu - beta)
}

/// Tail exponent `α(ρ)` for pushed `ρ`; strictly increasing over the
/// pushed region, `α(ρ₂) = 2`.
pub fn alpha_of_rho(rho: f64) -> Result<f64, RegimeError> {
    let mu = mu_of_rho(rho)?;
    if mu <= 1.0 {
        return Err(RegimeError::Domain(format!(
            "alpha is undefined in the pulled phase (rho = {rho} <= rho1 = {})",
            rho1()
        )));
    }
    Ok(alpha_from_mu(mu))
}

/// Upper critical branching strength `ρ₂`: the unique `ρ` with
/// `μ(ρ) = μ_c`, i.e. `tan(s)/s = −1/β_c` with `s = √(ρ−μ_c²) ∈ (π/2, π)`
/// and `β_c = √(μ_c²−1)`. Solved in the pole-free form
/// `β_c·sin(s) + s·cos(s) = 0` by bisection to 1e-12.
pub fn compute_rho2() -> f64 {
    let beta_c = (MU_C * MU_C - 1.0).sqrt();
    let h = |s: f64| beta_c * s.sin() + s * s.cos();
    let s = bisect(h, PI / 2.0, PI, 1e-13).expect("rho2 bracket is (pi/2, pi)");
    MU_C * MU_C + s * s
}

/// Residual of the drift characterization `tan(γ)/γ + 1/√(μ²−1)` at
/// `γ = √(ρ−μ²)`; vanishes at the true `μ(ρ)` for pushed `ρ`. Exposed so
/// tests can substitute computed constants back into the defining equation.
pub fn murho_residual(mu: f64, rho: f64) -> f64 {
    let gamma = (rho - mu * mu).sqrt();
    gamma.tan() / gamma + 1.0 / (mu * mu - 1.0).sqrt()
}

/// Classifies `ρ` into a phase. `Boundary` (within [`RHO_GUARD`] of `ρ₁`
/// or `ρ₂`) is reported after the excluded-set check, so `ρ₁` itself —
/// which is also the first excluded point — reports `ForbiddenRho`.
pub fn classify(rho: f64) -> Result<Regime, RegimeError> {
    validate_rho(rho)?;
    let th = RegimeThresholds::get();
    if (rho - th.rho1).abs() <= RHO_GUARD || (rho - th.rho2).abs() <= RHO_GUARD {
        return Ok(Regime::Boundary);
    }
    Ok(if rho < th.rho1 {
        Regime::Pulled
    } else if rho < th.rho2 {
        Regime::SemiPushed
    } else {
        Regime::FullyPushed
    })
}

/// Assembles the full constant set for one `ρ`.
pub fn derive(rho: f64) -> Result<RegimeParams, RegimeError> {
    let regime = classify(rho)?;
    let lambda_inf = lambda_inf(rho)?;
    let mu = (1.0 + 2.0 * lambda_inf).sqrt();
    let beta = (2.0 * lambda_inf).sqrt();
    let gamma = (rho - 1.0 - 2.0 * lambda_inf).max(0.0).sqrt();
    let alpha = if mu > 1.0 { Some(alpha_from_mu(mu)) } else { None };
    Ok(RegimeParams {
        rho,
        lambda_inf,
        mu,
        beta,
        gamma,
        alpha,
        regime,
    })
}
