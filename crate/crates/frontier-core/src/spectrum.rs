//! Finite-interval spectrum of the model operator on `[0, L]`.
//!
//! The operator `½∂² − r(x)`-conjugated problem reduces, after removing the
//! drift tilt, to a Sturm–Liouville problem whose eigenvalues `λ₁ > λ₂ > …`
//! solve the matching equation
//!
//! ```text
//! 𝒯(1, 2λ+1−ρ) + 𝒯(L−1, 2λ) = 0
//! ```
//!
//! with the sign-generalized tangent `𝒯` of [`crate::numerics::tfun`]. The
//! first `K` eigenvalues are positive, where `K` is the largest integer with
//! `(K−½)²π² < ρ−1`; each positive eigenvalue has the analytic bracket
//! `γₖ = √(ρ−1−2λₖ) ∈ ((k−½)π, min(kπ, √(ρ−1)))`. The infinitely many
//! negative eigenvalues interlace the poles of the matching equation: the
//! poles form two descending ladders,
//!
//! ```text
//! λ = ((ρ−1) − (m−½)²π²)/2          m ≥ K+1   (interior tangent poles)
//! λ = −(j−½)²π² / (2(L−1)²)          j ≥ 1     (outer tangent poles)
//! ```
//!
//! and between every two consecutive poles of the merged ladder lies exactly
//! one eigenvalue, with no eigenvalue between the largest pole and `0`
//! (guaranteed for `L ≥ L_min(ρ)`). Bisection on these brackets is therefore
//! exhaustive: no eigenvalue can be skipped.
//!
//! Eigenfunctions are `vₖ(x) = sin(γₖx)/sin(γₖ)` on `[0,1]`, continued by
//! `𝒮(L−x, 2λₖ)/𝒮(L−1, 2λₖ)` on `[1,L]`, normalized so `vₖ(1) = 1`. The
//! module also provides their closed-form `L²` norms, the principal-weight
//! functions `w₁` and `z(x) = e^{μ(x−L)}w₁(x)` in overflow-safe form, and
//! the front constants `g(L)`, `a`, `C₀`, `σ(ρ)` built from them.

use crate::numerics::{bisect, cfun, ln_sinh, sfun, tfun};
use crate::regimes::{self, RegimeError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Errors from spectrum construction and evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    /// Invalid `ρ` (forwarded from the constants module).
    #[error(transparent)]
    Regime(#[from] RegimeError),
    /// Input outside the operation's domain (`L < L_min`, `x ∉ [0,L]`, …).
    #[error("domain error: {0}")]
    Domain(String),
    /// An analytic bracket unexpectedly contained no sign change; this
    /// signals a violated precondition (e.g. a near-degenerate pole
    /// collision), never a silently skipped eigenvalue.
    #[error("bracket for eigenvalue {k} on [{lo}, {hi}] lost its sign change: {detail}")]
    Bracket {
        k: usize,
        lo: f64,
        hi: f64,
        detail: String,
    },
}

/// Residual of the eigenvalue matching equation at `λ`, in pole-free
/// normalized form: the raw equation `𝒯(1,σ) + 𝒯(L−1,2λ) = 0`
/// (σ = 2λ+1−ρ) is multiplied by its cosine factors, which never vanish at
/// an eigenvalue. This keeps the residual bounded on every pole gap and,
/// crucially, well conditioned: the raw tangent form amplifies rounding by
/// `sec²` near pole-adjacent eigenvalues and cannot certify roots to
/// `1e-10` in double precision, while this form can.
pub fn eigenvalue_residual(rho: f64, length: f64, lambda: f64) -> f64 {
    let sigma = 2.0 * lambda + 1.0 - rho;
    if lambda < 0.0 {
        // × cos(γ)cos(B(L−1)): sin(γ)cos(u)/γ + cos(γ)sin(u)/B.
        sfun(1.0, sigma) * cfun(length - 1.0, 2.0 * lambda)
            + cfun(1.0, sigma) * sfun(length - 1.0, 2.0 * lambda)
    } else {
        // × cos(γ): sin(γ)/γ + cos(γ)tanh(A(L−1))/A stays O(L) even where
        // cosh(A(L−1)) alone would overflow.
        sfun(1.0, sigma) + cfun(1.0, sigma) * tfun(length - 1.0, 2.0 * lambda)
    }
}

/// Number of positive eigenvalues: the largest `K ≥ 0` with
/// `(K−½)²π² < ρ−1`.
pub fn count_positive(rho: f64) -> Result<usize, RegimeError> {
    regimes::validate_rho(rho)?;
    Ok(((rho - 1.0).sqrt() / PI + 0.5).floor() as usize)
}

/// Smallest interval length the eigenvalue theory is proved for:
/// `max(2, 1 − tan(√(ρ−1))/√(ρ−1)) + 1`. The `+1` is a deliberate safety
/// margin beyond the proof's bound.
pub fn l_min(rho: f64) -> f64 {
    let s = (rho - 1.0).sqrt();
    (1.0 - s.tan() / s).max(2.0) + 1.0
}

/// The first `n` eigenvalues of the interval operator, with their brackets
/// and closed-form norms. Immutable after construction; all evaluation
/// methods are pure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteSpectrum {
    rho: f64,
    length: f64,
    lambda_inf: f64,
    mu: f64,
    beta: f64,
    k_positive: usize,
    lambdas: Vec<f64>,
    brackets: Vec<(f64, f64)>,
    norms: Vec<f64>,
}

/// Lightweight copy of one eigenpair's data, sufficient to evaluate `vₖ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EigenfunctionHandle {
    /// 1-based eigenvalue index.
    pub k: usize,
    /// Eigenvalue `λₖ`.
    pub lambda: f64,
    /// Branching strength of the parent spectrum.
    pub rho: f64,
    /// Interval length of the parent spectrum.
    pub length: f64,
    /// Closed-form `‖vₖ‖²`.
    pub norm_sq: f64,
    /// `γₖ = √(ρ−1−2λₖ)` (always real: `2λₖ < ρ−1`).
    pub gamma: f64,
}

/// Descending merged ladder of matching-equation poles below zero.
struct PoleLadder {
    rho: f64,
    l1: f64,
    next_m: usize,
    next_j: usize,
}

impl PoleLadder {
    fn new(rho: f64, length: f64, k_positive: usize) -> Self {
        PoleLadder {
            rho,
            l1: length - 1.0,
            next_m: k_positive + 1,
            next_j: 1,
        }
    }

    /// Next pole, strictly decreasing across calls.
    fn next_pole(&mut self) -> f64 {
        let pa = 0.5 * (self.rho - 1.0 - ((self.next_m as f64 - 0.5) * PI).powi(2));
        let pj = -0.5 * ((self.next_j as f64 - 0.5) * PI / self.l1).powi(2);
        if pa == pj {
            // Exactly coincident poles merge into one ladder entry.
            self.next_m += 1;
            self.next_j += 1;
            pa
        } else if pa > pj {
            self.next_m += 1;
            pa
        } else {
            self.next_j += 1;
            pj
        }
    }
}

impl FiniteSpectrum {
    /// Solves for the first `n` eigenvalues at the given branching strength
    /// and interval length.
    ///
    /// Positive eigenvalues come from bisection in `γ` on their analytic
    /// brackets; negative ones from bisection of the matching residual on
    /// the gaps of the merged pole ladder. Construction is the only cost:
    /// `n = 5·10⁵` solves in about a second.
    pub fn compute(rho: f64, length: f64, n: usize) -> Result<Self, SpectrumError> {
        regimes::validate_rho(rho)?;
        if !length.is_finite() || length < l_min(rho) {
            return Err(SpectrumError::Domain(format!(
                "length {length} below the validity bound L_min({rho}) = {}",
                l_min(rho)
            )));
        }
        if n == 0 {
            return Err(SpectrumError::Domain("need at least one eigenvalue".into()));
        }
        let lambda_inf = regimes::lambda_inf(rho)?;
        let mu = (1.0 + 2.0 * lambda_inf).sqrt();
        let beta = (2.0 * lambda_inf).sqrt();
        let k_positive = count_positive(rho)?;

        let mut lambdas = Vec::with_capacity(n);
        let mut brackets = Vec::with_capacity(n);
        let l1 = length - 1.0;

        // Positive eigenvalues: R(γ) = sin(γ) + γ(L−1)cos(γ)·tanh(u)/u
        // with u = √(ρ−1−γ²)(L−1); same zero set as the matching equation,
        // pole-free and overflow-free on each bracket.
        let sqrt_rho1 = (rho - 1.0).sqrt();
        let resid_gamma = |gamma: f64| {
            let u = (rho - 1.0 - gamma * gamma).max(0.0).sqrt() * l1;
            let tanhc = if u < 1e-4 {
                1.0 - u * u / 3.0
            } else {
                u.tanh() / u
            };
            gamma.sin() + gamma * l1 * gamma.cos() * tanhc
        };
        for k in 1..=k_positive.min(n) {
            let lo = (k as f64 - 0.5) * PI;
            let hi = (k as f64 * PI).min(sqrt_rho1);
            let gamma = bisect(resid_gamma, lo, hi, 1e-14).map_err(|e| SpectrumError::Bracket {
                k,
                lo,
                hi,
                detail: format!("positive-eigenvalue bracket in gamma: {e}"),
            })?;
            lambdas.push(0.5 * (rho - 1.0 - gamma * gamma));
            // The γ-interval maps to a decreasing λ-interval.
            brackets.push((
                0.5 * (rho - 1.0 - hi * hi),
                0.5 * (rho - 1.0 - lo * lo),
            ));
        }

        // Negative eigenvalues: one per gap between consecutive merged
        // poles, starting below the largest pole.
        let mut ladder = PoleLadder::new(rho, length, k_positive);
        let mut upper = ladder.next_pole();
        while lambdas.len() < n {
            let lower = ladder.next_pole();
            let width = upper - lower;
            // Nudge strictly inside the gap. A purely relative nudge
            // underflows for deep eigenvalues (|λ| ~ 10⁹ has ULP far above
            // width·1e-12), so each endpoint's own magnitude sets a floor.
            let e_lo = (width * 1e-12).max(lower.abs() * 1e-13).min(0.25 * width);
            let e_hi = (width * 1e-12).max(upper.abs() * 1e-13).min(0.25 * width);
            let k = lambdas.len() + 1;
            let root = bisect(
                |lam| eigenvalue_residual(rho, length, lam),
                lower + e_lo,
                upper - e_hi,
                width * 1e-15,
            )
            .map_err(|e| SpectrumError::Bracket {
                k,
                lo: lower,
                hi: upper,
                detail: format!("pole-gap bracket: {e}"),
            })?;
            lambdas.push(root);
            brackets.push((lower, upper));
            upper = lower;
        }

        let norms = lambdas
            .iter()
            .map(|&lam| norm_sq_closed(rho, length, lam))
            .collect();

        Ok(FiniteSpectrum {
            rho,
            length,
            lambda_inf,
            mu,
            beta,
            k_positive,
            lambdas,
            brackets,
            norms,
        })
    }

    /// Branching strength `ρ`.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Interval length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Limit eigenvalue `λ∞(ρ)` (upper bound for every `λₖ`).
    pub fn lambda_inf(&self) -> f64 {
        self.lambda_inf
    }

    /// Drift `μ = √(1+2λ∞)`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `β = √(2λ∞)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Number of positive eigenvalues `K`.
    pub fn k_positive(&self) -> usize {
        self.k_positive
    }

    /// Number of eigenvalues held.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    /// True when no eigenvalues are held (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// All eigenvalues, descending.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Eigenvalue `λₖ` (1-based `k`).
    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas[k - 1]
    }

    /// Analytic bracket that isolated `λₖ` (1-based `k`).
    pub fn bracket(&self, k: usize) -> (f64, f64) {
        self.brackets[k - 1]
    }

    /// Closed-form `‖vₖ‖²` (1-based `k`).
    pub fn norm_sq(&self, k: usize) -> f64 {
        self.norms[k - 1]
    }

    /// Copies the data needed to evaluate the `k`-th eigenfunction.
    pub fn handle(&self, k: usize) -> EigenfunctionHandle {
        let lambda = self.lambda(k);
        EigenfunctionHandle {
            k,
            lambda,
            rho: self.rho,
            length: self.length,
            norm_sq: self.norm_sq(k),
            gamma: (self.rho - 1.0 - 2.0 * lambda).max(0.0).sqrt(),
        }
    }

    /// Evaluates `vₖ(x)` (1-based `k`).
    pub fn eval_v(&self, k: usize, x: f64) -> Result<f64, SpectrumError> {
        eval_v_raw(self.rho, self.length, self.lambda(k), x)
    }

    /// Evaluates the principal weight `w₁(x) = sinh(√(2λ₁)(L−1))·v₁(x)`.
    /// Requires a pushed spectrum (`λ₁ > 0`).
    pub fn eval_w1(&self, x: f64) -> Result<f64, SpectrumError> {
        let lambda1 = self.lambdas[0];
        if lambda1 <= 0.0 {
            return Err(SpectrumError::Domain(format!(
                "w1 requires a positive principal eigenvalue, got lambda_1 = {lambda1}"
            )));
        }
        let a = (2.0 * lambda1).sqrt();
        Ok(((a * (self.length - 1.0)).sinh()) * self.eval_v(1, x)?)
    }

    /// Evaluates `z(x) = e^{μ(x−L)}·w₁(x)` with every exponential argument
    /// non-positive, so it never overflows for any valid `(ρ, L)` (valid
    /// because `μ > √(2λ₁)`). Requires a pushed spectrum.
    pub fn eval_z(&self, x: f64) -> Result<f64, SpectrumError> {
        let lambda1 = self.lambdas[0];
        if lambda1 <= 0.0 {
            return Err(SpectrumError::Domain(format!(
                "z requires a positive principal eigenvalue, got lambda_1 = {lambda1}"
            )));
        }
        let (l, mu) = (self.length, self.mu);
        check_x(x, l)?;
        let a = (2.0 * lambda1).sqrt();
        if x >= 1.0 {
            // e^{μ(x−L)}·sinh(A(L−x)) with both exponents ≤ 0.
            Ok(0.5 * ((-(mu - a) * (l - x)).exp() - (-(mu + a) * (l - x)).exp()))
        } else {
            // sin-prefactor times ½(e^{A(L−1)−μ(L−x)} − e^{−A(L−1)−μ(L−x)});
            // A(L−1) ≤ μ(L−1) ≤ μ(L−x) keeps the first exponent ≤ 0.
            let gamma = (self.rho - 1.0 - 2.0 * lambda1).sqrt();
            let pre = (gamma * x).sin() / gamma.sin();
            Ok(pre
                * 0.5
                * ((a * (l - 1.0) - mu * (l - x)).exp() - (-a * (l - 1.0) - mu * (l - x)).exp()))
        }
    }
}

impl EigenfunctionHandle {
    /// Evaluates `vₖ(x)`.
    pub fn eval(&self, x: f64) -> Result<f64, SpectrumError> {
        eval_v_raw(self.rho, self.length, self.lambda, x)
    }
}

fn check_x(x: f64, length: f64) -> Result<(), SpectrumError> {
    if !(0.0..=length).contains(&x) {
        return Err(SpectrumError::Domain(format!(
            "x = {x} outside the interval [0, {length}]"
        )));
    }
    Ok(())
}

/// Eigenfunction evaluation from raw parameters; normalized so `v(1) = 1`.
fn eval_v_raw(rho: f64, length: f64, lambda: f64, x: f64) -> Result<f64, SpectrumError> {
    check_x(x, length)?;
    if x <= 1.0 {
        // sin(γx)/sin(γ) in sign-generalized form.
        Ok(sfun(x, 2.0 * lambda + 1.0 - rho) / sfun(1.0, 2.0 * lambda + 1.0 - rho))
    } else {
        let arg = 2.0 * lambda;
        if arg > 0.0 {
            let a = arg.sqrt();
            if a * (length - 1.0) > 500.0 {
                // Ratio of huge sinh values via logs; decays like e^{−A(x−1)}.
                if x >= length {
                    return Ok(0.0);
                }
                return Ok((ln_sinh(a * (length - x)) - ln_sinh(a * (length - 1.0))).exp());
            }
        }
        Ok(sfun(length - x, arg) / sfun(length - 1.0, arg))
    }
}

/// Closed-form `‖vₖ‖²`: the `[0,1]` piece `[1 − sin(2γ)/(2γ)]/(2sin²γ)`
/// plus the `[1,L]` piece, which is `coth(u)/(2A) − (L−1)/(2sinh²u)` for
/// `λ > 0` (`u = A(L−1)`, `A = √(2λ)`) and `[(L−1) − sin(2u)/(2B)]/(2sin²u)`
/// for `λ < 0` (`u = B(L−1)`, `B = √(−2λ)`).
fn norm_sq_closed(rho: f64, length: f64, lambda: f64) -> f64 {
    let gamma = (rho - 1.0 - 2.0 * lambda).sqrt();
    let sg = gamma.sin();
    let piece1 = (1.0 - (2.0 * gamma).sin() / (2.0 * gamma)) / (2.0 * sg * sg);
    let l1 = length - 1.0;
    let piece2 = if lambda > 0.0 {
        let a = (2.0 * lambda).sqrt();
        let u = a * l1;
        let tail = if u > 350.0 {
            2.0 * l1 * (-2.0 * u).exp()
        } else {
            let sh = u.sinh();
            l1 / (2.0 * sh * sh)
        };
        1.0 / (u.tanh() * 2.0 * a) - tail
    } else if lambda < 0.0 {
        let b = (-2.0 * lambda).sqrt();
        let u = b * l1;
        let su = u.sin();
        (l1 - (2.0 * u).sin() / (2.0 * b)) / (2.0 * su * su)
    } else {
        // λ = 0 is never an eigenvalue; the continuous limit of both
        // branches is (L−1)³-flavored and only reachable through rounding.
        l1 * l1 * l1 / 3.0 / (l1 * l1)
    };
    piece1 + piece2
}

/// Limit `lim_{L→∞} ‖v₁‖²` for pushed `ρ`:
/// `½[(ρ−1)cos²γ + (2λ∞)^{3/2}] / [√(2λ∞)(ρ−1−2λ∞)cos²γ]`,
/// with `γ = γ(λ∞) ∈ (π/2, π)`. The `cos²γ` form is the one consistent
/// with the finite-`L` norms (verified against quadrature in the tests).
pub fn l2_norm_limit(rho: f64) -> Result<f64, SpectrumError> {
    let lambda_inf = regimes::lambda_inf(rho)?;
    if lambda_inf <= 0.0 {
        return Err(SpectrumError::Domain(format!(
            "norm limit requires pushed rho, got rho = {rho}"
        )));
    }
    let two_l = 2.0 * lambda_inf;
    let gamma = (rho - 1.0 - two_l).sqrt();
    let c2 = gamma.cos() * gamma.cos();
    Ok(0.5 * ((rho - 1.0) * c2 + two_l.powf(1.5)) / (two_l.sqrt() * (rho - 1.0 - two_l) * c2))
}

/// Expected boundary-hit rate constant
/// `g(L) = ½√(2λ₁) / (‖v₁‖²·sinh²(√(2λ₁)(L−1)))`, evaluated through logs
/// so the `sinh²` in the denominator cannot overflow.
pub fn g_of_l(rho: f64, length: f64) -> Result<f64, SpectrumError> {
    let spec = FiniteSpectrum::compute(rho, length, 1)?;
    let lambda1 = spec.lambda(1);
    if lambda1 <= 0.0 {
        return Err(SpectrumError::Domain(format!(
            "g(L) requires a positive principal eigenvalue, got {lambda1}"
        )));
    }
    let a = (2.0 * lambda1).sqrt();
    Ok(((0.5 * a).ln() - spec.norm_sq(1).ln() - 2.0 * ln_sinh(a * (length - 1.0))).exp())
}

/// Decay constant `a = β / lim‖v₁‖²` of the principal-eigenvalue gap
/// `λ∞ − λ₁(L) ≈ a·e^{−2β(L−1)}`.
pub fn decay_const_a(rho: f64) -> Result<f64, SpectrumError> {
    let params = regimes::derive(rho)?;
    Ok(params.beta / l2_norm_limit(rho)?)
}

/// Principal-eigenvalue gap `λ∞ − λ₁(L)` for pushed `ρ`, evaluated
/// without catastrophic cancellation.
///
/// Beyond `L ≈ 45` (at ρ = 4) the gap falls below one ulp of `λ∞`
/// itself, so subtracting the two computed eigenvalues returns pure
/// rounding noise. This routine instead expands the matching equation
/// around the `L = ∞` root: with `f(λ) = √(2λ)·𝒮(1,σ) + 𝒞(1,σ)`
/// (σ = 2λ+1−ρ), which vanishes exactly at `λ∞`, the finite-`L`
/// eigenvalue satisfies
///
/// ```text
/// f(λ₁) = −√(2λ₁)·𝒮(1,σ₁)·(coth(√(2λ₁)(L−1)) − 1)
/// ```
///
/// and first-order expansion of `f` gives
///
/// ```text
/// λ∞ − λ₁ = β·𝒮(1,σ∞)·(coth(β(L−1)) − 1) / f′(λ∞),
/// f′(λ∞)  = 𝒮(1,γ)/β + β·(sin γ − γ·cos γ)/γ³ + sin(γ)/γ,
/// ```
///
/// with `γ = √(ρ−1−2λ∞) ∈ (π/2, π)` and `𝒮(1,σ∞) = sin(γ)/γ`. The
/// neglected terms are `O((L−1)·e^{−2β(L−1)})` *relative* (the right-hand
/// side is evaluated at `λ∞` rather than `λ₁`) — about `1e-3` at `L = 20`,
/// `1e-7` at `L = 40`, and `6e-16` at `L = 80` for ρ = 4 — so the formula
/// is the more accurate route everywhere the direct difference is at all
/// delicate. Validated against direct subtraction at moderate `L` in
/// the tests.
pub fn principal_gap(rho: f64, length: f64) -> Result<f64, SpectrumError> {
    let params = regimes::derive(rho)?;
    if params.lambda_inf <= 0.0 {
        return Err(SpectrumError::Domain(format!(
            "principal gap requires pushed rho, got rho = {rho}"
        )));
    }
    if !(length > 1.0) || !length.is_finite() {
        return Err(SpectrumError::Domain(format!(
            "interval length {length} must be finite and above 1"
        )));
    }
    let beta = params.beta;
    let gamma = params.gamma;
    let (sin_g, cos_g) = gamma.sin_cos();
    let s1 = sin_g / gamma;
    let f_prime = s1 / beta + beta * (sin_g - gamma * cos_g) / gamma.powi(3) + s1;
    // coth(u) − 1 = 2/(e^{2u} − 1), overflow-safe through exp_m1.
    let coth_m1 = 2.0 / (2.0 * beta * (length - 1.0)).exp_m1();
    Ok(beta * s1 * coth_m1 / f_prime)
}

/// The same constant assembled from the independent rearrangement
/// `2·(2λ∞)(ρ−1−2λ∞)cos²γ / [(ρ−1)cos²γ + (2λ∞)^{3/2}]`; used as a
/// consistency cross-check on [`decay_const_a`].
pub fn decay_const_a_alt(rho: f64) -> Result<f64, SpectrumError> {
    let lambda_inf = regimes::lambda_inf(rho)?;
    if lambda_inf <= 0.0 {
        return Err(SpectrumError::Domain("pushed rho required".into()));
    }
    let two_l = 2.0 * lambda_inf;
    let gamma = (rho - 1.0 - two_l).sqrt();
    let c2 = gamma.cos() * gamma.cos();
    Ok(2.0 * two_l * (rho - 1.0 - two_l) * c2 / ((rho - 1.0) * c2 + two_l.powf(1.5)))
}

/// Closed-form `∫₀ᴸ e^{−μy}v₁(y)dy` at finite `L` (exact antiderivatives,
/// arranged with non-positive exponents throughout).
pub fn weighted_v1_integral(rho: f64, length: f64) -> Result<f64, SpectrumError> {
    let spec = FiniteSpectrum::compute(rho, length, 1)?;
    let lambda1 = spec.lambda(1);
    if lambda1 <= 0.0 {
        return Err(SpectrumError::Domain("pushed rho required".into()));
    }
    let mu = spec.mu();
    let gamma = (rho - 1.0 - 2.0 * lambda1).sqrt();
    // ∫₀¹ e^{−μy} sin(γy)/sin(γ) dy via the standard antiderivative.
    let anti = |y: f64| {
        (-mu * y).exp() * (-mu * (gamma * y).sin() - gamma * (gamma * y).cos())
            / (mu * mu + gamma * gamma)
    };
    let piece1 = (anti(1.0) - anti(0.0)) / gamma.sin();
    // ∫₁ᴸ e^{−μy} sinh(A(L−y))/sinh(A(L−1)) dy, rearranged so every
    // exponent is ≤ 0 (divide numerator and denominator by e^{A(L−1)}).
    let a = (2.0 * lambda1).sqrt();
    let t1 = ((-mu).exp() - (a - (mu + a) * length).exp()) / (mu + a);
    let t2 = ((-2.0 * a * (length - 1.0) - mu).exp() - (a - (mu + a) * length).exp()) / (mu - a);
    let piece2 = (t1 - t2) / (1.0 - (-2.0 * a * (length - 1.0)).exp());
    Ok(piece1 + piece2)
}

/// Limit constant `C₀ = ½·(lim‖v₁‖²)⁻¹·lim_{L→∞}∫₀ᴸ e^{−μy}v₁(y)dy`.
///
/// The integral limit is taken at `L = 80` and certified by a Richardson
/// check against `L = 40` (the difference must be below 1e-8, far smaller
/// than anything downstream consumes).
pub fn c0_of_rho(rho: f64) -> Result<f64, SpectrumError> {
    let at80 = weighted_v1_integral(rho, 80.0)?;
    let at40 = weighted_v1_integral(rho, 40.0)?;
    if (at80 - at40).abs() > 1e-8 {
        return Err(SpectrumError::Domain(format!(
            "weighted v1 integral has not converged by L = 80 (delta {:e}); rho = {rho} too \
             close to a phase threshold",
            at80 - at40
        )));
    }
    Ok(0.5 * at80 / l2_norm_limit(rho)?)
}

/// Population-scale conversion constant `σ(ρ) = 2/(C₀·e^{μ−β})`.
pub fn sigma_of_rho(rho: f64) -> Result<f64, SpectrumError> {
    let params = regimes::derive(rho)?;
    Ok(2.0 / (c0_of_rho(rho)? * (params.mu - params.beta).exp()))
}
