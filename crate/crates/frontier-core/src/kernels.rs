//! Heat kernel, Green function, and boundary-flux integrals built on the
//! interval spectrum.
//!
//! Everything here is a pure function of an immutable [`KernelConfig`]
//! (an attached [`FiniteSpectrum`] plus a truncation policy), so concurrent
//! callers are safe. Three families of quantities are provided:
//!
//! * the heat kernel `q_t(x,y) = Σₖ ‖vₖ‖⁻² e^{λₖt} vₖ(x)vₖ(y)` and its
//!   drift-tilted companion `p_t = e^{μ(x−y)−λ∞t} q_t`, which is the
//!   expected particle density of the branching diffusion;
//! * the resolvent (Green function) `G_ξ` at shift `λ∞+ξ`, in a closed
//!   product form from two explicit solutions and as a spectral series
//!   (the two must agree — a strong cross-check used by the tests);
//! * the boundary-flux integral `I(x,S)` whose drift-tilted value
//!   `e^{μ(x−L)} I(x,S)` is the expected number of right-boundary hits
//!   during `S`, and the time weight `ℓ(S)`.
//!
//! Oscillatory spectral sums stop once five consecutive terms are each
//! below the configured relative tolerance; the slowly-converging Green
//! series additionally estimates the `1/k²` tail coefficient from the last
//! window of retained terms and adds the analytically summed remainder
//! (a cheap form of series acceleration that buys ~100× accuracy).

use crate::numerics::{adaptive_simpson, cfun, sfun};
use crate::regimes;
use crate::spectrum::{FiniteSpectrum, SpectrumError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Errors from kernel evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    /// Forwarded spectrum/constants failure.
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    /// Input outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The attached spectrum ran out of eigenvalues before the tail rule
    /// certified convergence.
    #[error("spectral sum not converged: {0}")]
    Truncation(String),
    /// The resolvent shift collided with an eigenvalue. Impossible for
    /// shifts above `λ∞` except within rounding of the principal gap.
    #[error("shift {shift} collides with eigenvalue {k} (distance {distance:e})")]
    SingularShift { shift: f64, k: usize, distance: f64 },
}

/// Truncation policy for spectral sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Use exactly this many leading terms (error if the attached spectrum
    /// is shorter).
    Terms(usize),
    /// Keep summing until five consecutive terms are each below this
    /// fraction of the running sum; a run of small terms certifies the
    /// exponentially-decaying tails because eigenvalues interlace with
    /// near-uniform spacing.
    RelativeTail(f64),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::RelativeTail(1e-12)
    }
}

/// An immutable spectrum plus truncation policy; the input to every kernel
/// evaluation.
#[derive(Debug, Clone)]
pub struct KernelConfig {
    spectrum: FiniteSpectrum,
    truncation: Truncation,
}

impl KernelConfig {
    /// Attaches a spectrum with the default relative-tail truncation.
    pub fn new(spectrum: FiniteSpectrum) -> Self {
        KernelConfig {
            spectrum,
            truncation: Truncation::default(),
        }
    }

    /// Attaches a spectrum with an explicit truncation policy.
    pub fn with_truncation(spectrum: FiniteSpectrum, truncation: Truncation) -> Self {
        KernelConfig {
            spectrum,
            truncation,
        }
    }

    /// The attached spectrum.
    pub fn spectrum(&self) -> &FiniteSpectrum {
        &self.spectrum
    }

    /// Branching strength `ρ`.
    pub fn rho(&self) -> f64 {
        self.spectrum.rho()
    }

    /// Interval length `L`.
    pub fn length(&self) -> f64 {
        self.spectrum.length()
    }

    /// Truncation policy in force.
    pub fn truncation(&self) -> Truncation {
        self.truncation
    }
}

/// How many consecutive sub-tolerance terms certify a converged tail.
const TAIL_RUN: usize = 5;

/// Sums `term(k)` for `k = 1..` under the truncation policy. Returns the
/// sum and the number of terms actually used.
fn spectral_sum(
    truncation: Truncation,
    available: usize,
    mut term: impl FnMut(usize) -> f64,
) -> Result<(f64, usize), KernelError> {
    match truncation {
        Truncation::Terms(n) => {
            if n == 0 || n > available {
                return Err(KernelError::Truncation(format!(
                    "fixed term count {n} outside the attached spectrum of {available} eigenvalues"
                )));
            }
            let mut sum = 0.0;
            for k in 1..=n {
                sum += term(k);
            }
            Ok((sum, n))
        }
        Truncation::RelativeTail(tol) => {
            let mut sum = 0.0;
            let mut small_run = 0usize;
            for k in 1..=available {
                let t = term(k);
                sum += t;
                if t.abs() <= tol * sum.abs() {
                    small_run += 1;
                    if small_run >= TAIL_RUN {
                        return Ok((sum, k));
                    }
                } else {
                    small_run = 0;
                }
            }
            Err(KernelError::Truncation(format!(
                "tail tolerance {tol:e} not certified within {available} eigenvalues"
            )))
        }
    }
}

fn check_xy(config: &KernelConfig, x: f64, y: f64) -> Result<(), KernelError> {
    let l = config.length();
    if !(0.0..=l).contains(&x) || !(0.0..=l).contains(&y) {
        return Err(KernelError::Domain(format!(
            "evaluation point ({x}, {y}) outside [0, {l}]²"
        )));
    }
    Ok(())
}

/// Smallest time the truncated spectral sums are certified for; below it
/// the tail bound cannot be met with realistic spectra.
pub const MIN_KERNEL_TIME: f64 = 0.05;

/// Heat kernel `q_t(x,y)`: truncated spectral sum, symmetric in `(x,y)`
/// by construction (identical summands).
///
/// Rejects `t < 0.05`: short times need so many modes that the fixed tail
/// rule loses meaning.
pub fn q_t(config: &KernelConfig, x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    let (scaled, _) = q_t_scaled(config, x, y, t)?;
    Ok(scaled * (config.spectrum.lambda(1) * t).exp())
}

/// Shared core: returns `(Σₖ e^{(λₖ−λ₁)t} vₖ(x)vₖ(y)/‖vₖ‖², terms_used)`.
/// Factoring out `e^{λ₁t}` keeps every summand ≤ O(1) regardless of `t`,
/// so the tilted kernel can be assembled in log space without overflow.
fn q_t_scaled(config: &KernelConfig, x: f64, y: f64, t: f64) -> Result<(f64, usize), KernelError> {
    check_xy(config, x, y)?;
    if !(t >= MIN_KERNEL_TIME) {
        return Err(KernelError::Domain(format!(
            "t = {t} below the minimum kernel time {MIN_KERNEL_TIME}"
        )));
    }
    let spec = &config.spectrum;
    let lambda1 = spec.lambda(1);
    spectral_sum(config.truncation, spec.len(), |k| {
        // The v(x)·v(y) product is grouped first so that swapping x and y
        // yields bitwise-identical terms (multiplication commutes but does
        // not associate in floating point).
        let vv = spec.eval_v(k, x).unwrap() * spec.eval_v(k, y).unwrap();
        ((spec.lambda(k) - lambda1) * t).exp() * vv / spec.norm_sq(k)
    })
}

/// Tilted kernel `p_t(x,y) = e^{μ(x−y)−λ∞t} q_t(x,y)`: the expected
/// density at `y` of branching-diffusion particles started at `x`, with
/// killing at `0` and `L`. Assembled in log space: the only exponent is
/// `μ(x−y) + (λ₁−λ∞)t ≤ μL`, finite for every `L ≤ 100`.
pub fn p_t(config: &KernelConfig, x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    let (scaled, _) = q_t_scaled(config, x, y, t)?;
    let spec = &config.spectrum;
    let exponent = spec.mu() * (x - y) + (spec.lambda(1) - spec.lambda_inf()) * t;
    Ok(scaled * exponent.exp())
}

/// Leading spectral term `u_t(x,y) = ‖v₁‖⁻² e^{λ₁t} v₁(x)v₁(y)`, the
/// large-time approximation to `q_t`. Requires `t > 1`, where the higher
/// modes are already strongly suppressed.
pub fn leading_term(config: &KernelConfig, x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    check_xy(config, x, y)?;
    if !(t > 1.0) {
        return Err(KernelError::Domain(format!(
            "leading term requested at t = {t}; only meaningful for t > 1"
        )));
    }
    let spec = &config.spectrum;
    Ok((spec.lambda(1) * t).exp() * spec.eval_v(1, x)? * spec.eval_v(1, y)? / spec.norm_sq(1))
}

/// Structural error-bound factor
/// `M(t,L) = C·(e^{2βL−(5/8)π²t} + L·e^{2βL−½λ∞t})` controlling
/// `|q_t − u_t| ≤ M·u_t`. The multiplicative constant is not pinned by the
/// theory; pass `1.0` unless a sharper value is known, and prefer direct
/// `q_t`-vs-`u_t` ratios for quantitative work.
pub fn error_bound_m(rho: f64, length: f64, t: f64, constant: f64) -> Result<f64, KernelError> {
    if !(t > 0.0) {
        return Err(KernelError::Domain(format!("t = {t} must be positive")));
    }
    let params = regimes::derive(rho).map_err(SpectrumError::from)?;
    let e1 = 2.0 * params.beta * length - 0.625 * PI * PI * t;
    let e2 = 2.0 * params.beta * length - 0.5 * params.lambda_inf * t;
    Ok(constant * (e1.exp() + length * e2.exp()))
}

/// The two explicit solutions and the Wronskian of the resolvent problem
/// at shift `s = λ∞ + ξ`, from which the Green function is a product.
///
/// `φ(x)` solves from the left boundary (`φ(0) = 0`), `ψ(x)` from the
/// right (`ψ(L) = 0`); both are assembled from the sign-generalized
/// trigonometric pair on `[0,1]` and plain exponentials/sinh on `[1,L]`.
#[derive(Debug, Clone, Copy)]
pub struct GreenComponents {
    /// Spectral shift `ξ > 0` above `λ∞`.
    pub xi: f64,
    /// Coefficient `f(ξ) = √(2s)𝒮(1,σ) + 𝒞(1,σ)`; vanishes at `ξ = 0`.
    pub f_val: f64,
    /// Coefficient `g(ξ) = √(2s)𝒮(1,σ) − 𝒞(1,σ)`; positive at `ξ = 0`.
    pub g_val: f64,
    /// The constant Wronskian `ψφ′ − ψ′φ = ½(f e^{√(2s)(L−1)} + g e^{−√(2s)(L−1)})`.
    pub w: f64,
    length: f64,
    mu: f64,
    /// `σ = 2s + 1 − ρ`, the argument of the trigonometric pair on `[0,1]`.
    sigma: f64,
    /// `√(2s)`.
    rt: f64,
}

impl GreenComponents {
    /// Builds the solution pair at shift `ξ > 0` above `λ∞(ρ)`.
    pub fn new(rho: f64, length: f64, xi: f64) -> Result<Self, KernelError> {
        if !(xi > 0.0) {
            return Err(KernelError::Domain(format!(
                "spectral shift xi = {xi} must be positive"
            )));
        }
        let params = regimes::derive(rho).map_err(SpectrumError::from)?;
        if !(length > 1.0) || !length.is_finite() {
            return Err(KernelError::Domain(format!(
                "interval length {length} must be finite and above 1"
            )));
        }
        let s = params.lambda_inf + xi;
        let sigma = 2.0 * s + 1.0 - rho;
        let rt = (2.0 * s).sqrt();
        let f_val = rt * sfun(1.0, sigma) + cfun(1.0, sigma);
        let g_val = rt * sfun(1.0, sigma) - cfun(1.0, sigma);
        let w = 0.5 * (f_val * (rt * (length - 1.0)).exp() + g_val * (-rt * (length - 1.0)).exp());
        Ok(GreenComponents {
            xi,
            f_val,
            g_val,
            w,
            length,
            mu: params.mu,
            sigma,
            rt,
        })
    }

    /// Left solution `φ(x)`: `𝒮(x,σ)` on `[0,1]`, continued by
    /// `(f e^{√(2s)(x−1)} + g e^{−√(2s)(x−1)})/(2√(2s))` on `[1,L]`.
    pub fn phi(&self, x: f64) -> f64 {
        if x <= 1.0 {
            sfun(x, self.sigma)
        } else {
            (self.f_val * (self.rt * (x - 1.0)).exp()
                + self.g_val * (-self.rt * (x - 1.0)).exp())
                / (2.0 * self.rt)
        }
    }

    /// Right solution `ψ(x)`: `sinh(√(2s)(L−x))` on `[1,L]`, continued by
    /// `sinh(√(2s)(L−1))𝒞(x−1,σ) − √(2s)cosh(√(2s)(L−1))𝒮(x−1,σ)` on
    /// `[0,1]` (the signed argument `x−1 ≤ 0` rides on the parity of
    /// `𝒮`/`𝒞`).
    pub fn psi(&self, x: f64) -> f64 {
        if x >= 1.0 {
            (self.rt * (self.length - x)).sinh()
        } else {
            let u = self.rt * (self.length - 1.0);
            u.sinh() * cfun(x - 1.0, self.sigma) - self.rt * u.cosh() * sfun(x - 1.0, self.sigma)
        }
    }

    /// Green function `G_ξ(x,y) = e^{μ(x−y)}·2·ψ(x∨y)φ(x∧y)/w`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64, KernelError> {
        if !(0.0 < x && x < self.length && 0.0 < y && y < self.length) {
            return Err(KernelError::Domain(format!(
                "Green function evaluated at ({x}, {y}) outside (0, {})²",
                self.length
            )));
        }
        let hi = x.max(y);
        let lo = x.min(y);
        Ok((self.mu * (x - y)).exp() * 2.0 * self.psi(hi) * self.phi(lo) / self.w)
    }
}

/// Green function in closed product form; see [`GreenComponents::eval`].
pub fn green_closed(components: &GreenComponents, x: f64, y: f64) -> Result<f64, KernelError> {
    components.eval(x, y)
}

/// Green function as the spectral series
/// `e^{μ(x−y)} Σₖ vₖ(x)vₖ(y) / (‖vₖ‖²(λ∞+ξ−λₖ))`.
///
/// The series converges only like `1/k²`, so after the tail rule stops at
/// `N` terms the `1/k²` coefficient is estimated as the mean of `k²·termₖ`
/// over `k ∈ [N/2, N]` and the analytically summed remainder
/// `Σ_{k>N} 1/k² = 1/N − 1/(2N²) + O(N⁻³)` is added back.
pub fn green_series(
    config: &KernelConfig,
    x: f64,
    y: f64,
    xi: f64,
) -> Result<f64, KernelError> {
    let spec = &config.spectrum;
    let l = config.length();
    if !(0.0 < x && x < l && 0.0 < y && y < l) {
        return Err(KernelError::Domain(format!(
            "Green function evaluated at ({x}, {y}) outside (0, {l})²"
        )));
    }
    if !(xi > 0.0) {
        return Err(KernelError::Domain(format!(
            "spectral shift xi = {xi} must be positive"
        )));
    }
    let s = spec.lambda_inf() + xi;
    // The shift must clear every eigenvalue; for ξ > 0 this can only fail
    // when ξ is within rounding of the (exponentially small) principal gap.
    for k in 1..=spec.len().min(4) {
        let distance = (s - spec.lambda(k)).abs();
        if distance <= 1e-12 {
            return Err(KernelError::SingularShift {
                shift: s,
                k,
                distance,
            });
        }
    }
    let term = |k: usize| {
        spec.eval_v(k, x).unwrap() * spec.eval_v(k, y).unwrap()
            / (spec.norm_sq(k) * (s - spec.lambda(k)))
    };
    let (sum, n) = spectral_sum(config.truncation, spec.len(), term)?;
    // Tail completion from the measured 1/k² coefficient.
    let window = (n / 2).max(1);
    let mut dc = 0.0;
    for k in window..=n {
        dc += (k as f64) * (k as f64) * term(k);
    }
    dc /= (n - window + 1) as f64;
    let nf = n as f64;
    let completed = sum + dc * (1.0 / nf - 1.0 / (2.0 * nf * nf));
    Ok((spec.mu() * (x - y)).exp() * completed)
}

/// Time weight `ℓ(S) = ∫_S e^{(λ₁−λ∞)s} ds`, in closed form per interval.
/// `S` is a finite union of intervals `[a, b]` with `0 ≤ a < b ≤ ∞`;
/// always at most the Lebesgue measure of `S`.
pub fn ell(spectrum: &FiniteSpectrum, s_set: &[(f64, f64)]) -> Result<f64, KernelError> {
    let rate = spectrum.lambda_inf() - spectrum.lambda(1);
    let mut total = 0.0;
    for &(a, b) in s_set {
        if !(a >= 0.0) || !(b > a) {
            return Err(KernelError::Domain(format!(
                "interval [{a}, {b}] is not an ordered subset of [0, ∞)"
            )));
        }
        total += if rate == 0.0 {
            b - a
        } else if b.is_infinite() {
            (-rate * a).exp() / rate
        } else {
            ((-rate * a).exp() - (-rate * b).exp()) / rate
        };
    }
    Ok(total)
}

/// Boundary-flux integral `I(x,S) = −½ ∫_S e^{−λ∞s} ∂_y q_s(x,y)|_{y=L} ds`.
///
/// `e^{μ(x−L)}·I(x,S)` is the expected number of particles absorbed at the
/// right boundary during `S`. Each interval `[a,b]` is integrated exactly
/// per spectral term; interval endpoints must be `0` or at least `0.05`
/// (the differentiated series is not certified closer to `0`, where the
/// exact `a = 0` closed form takes over).
pub fn flux_i(config: &KernelConfig, x: f64, s_set: &[(f64, f64)]) -> Result<f64, KernelError> {
    let l = config.length();
    if !(0.0..=l).contains(&x) {
        return Err(KernelError::Domain(format!(
            "flux evaluated at x = {x} outside [0, {l}]"
        )));
    }
    let mut total = 0.0;
    for &(a, b) in s_set {
        if !(a >= 0.0) || !(b > a) {
            return Err(KernelError::Domain(format!(
                "interval [{a}, {b}] is not an ordered subset of [0, ∞)"
            )));
        }
        let ok = |e: f64| e == 0.0 || e >= MIN_KERNEL_TIME;
        if !ok(a) || !(b.is_infinite() || b >= MIN_KERNEL_TIME) {
            return Err(KernelError::Domain(format!(
                "interval [{a}, {b}]: endpoints must be 0 or ≥ {MIN_KERNEL_TIME}"
            )));
        }
        total += flux_from(config, x, a)? - flux_from(config, x, b)?;
    }
    Ok(total)
}

/// `J(x,T) = I(x,[T,∞))`: series for `T ≥ 0.05`, exact resolvent closed
/// form at `T = 0`, zero at `T = ∞`.
fn flux_from(config: &KernelConfig, x: f64, t: f64) -> Result<f64, KernelError> {
    if t.is_infinite() {
        return Ok(0.0);
    }
    let spec = &config.spectrum;
    if t == 0.0 {
        // At T = 0 the time integral is the resolvent at shift exactly λ∞,
        // where f(λ∞) = 0 collapses the closed form: J(x,0) = e^{β(L−x)}
        // for x ≥ 1 and 𝒮(x,σ∞)/𝒮(1,σ∞)·e^{β(L−1)} below the step.
        let beta = spec.beta();
        let l = spec.length();
        return Ok(if x >= 1.0 {
            (beta * (l - x)).exp()
        } else {
            let sigma_inf = 2.0 * spec.lambda_inf() + 1.0 - spec.rho();
            sfun(x, sigma_inf) / sfun(1.0, sigma_inf) * (beta * (l - 1.0)).exp()
        });
    }
    let lambda_inf = spec.lambda_inf();
    let l1 = spec.length() - 1.0;
    let (sum, _) = spectral_sum(config.truncation, spec.len(), |k| {
        let lam = spec.lambda(k);
        // −½vₖ′(L) = ½/𝒮(L−1, 2λₖ).
        let gk = 0.5 / sfun(l1, 2.0 * lam);
        gk * spec.eval_v(k, x).unwrap() * ((lam - lambda_inf) * t).exp()
            / (spec.norm_sq(k) * (lambda_inf - lam))
    })?;
    Ok(sum)
}

/// Conservative evaluation of `∫₀ᵗ p_s(x,y) ds` for comparison against the
/// Green function: adaptive quadrature on `[0.05, t]` plus a rigorous
/// upper bound for the short-time sliver `[0, 0.05]` (free Gaussian
/// density times the maximal branching growth `e^{ρs/2}`). Requires
/// `|x − y| ≥ 1` so the sliver bound stays tiny.
pub fn integrated_p(config: &KernelConfig, x: f64, y: f64, t: f64) -> Result<f64, KernelError> {
    check_xy(config, x, y)?;
    if !(t > MIN_KERNEL_TIME) {
        return Err(KernelError::Domain(format!(
            "integration horizon t = {t} must exceed {MIN_KERNEL_TIME}"
        )));
    }
    let d = (x - y).abs();
    if d < 1.0 {
        return Err(KernelError::Domain(format!(
            "|x − y| = {d} < 1: short-time sliver bound not available this close"
        )));
    }
    let rho = config.rho();
    let mu = config.spectrum.mu();
    let body = adaptive_simpson(
        &|s: f64| p_t(config, x, y, s).expect("p_t inside its certified domain"),
        MIN_KERNEL_TIME,
        t,
        1e-10,
        40,
    );
    // sup over s ≤ 0.05 of e^{ρs/2}(2πs)^{−1/2}e^{−(d−0.05μ)²/(2s)} is
    // attained at s = 0.05 because the exponent is increasing until
    // s = (d−0.05μ)² ≥ 0.9.
    let shifted = d - 0.05 * mu;
    let sup = (0.5 * rho * 0.05).exp() / (2.0 * PI * 0.05).sqrt()
        * (-shifted * shifted / (2.0 * 0.05)).exp();
    Ok(body + 0.05 * sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::FiniteSpectrum;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn config(rho: f64, l: f64, n: usize) -> KernelConfig {
        KernelConfig::new(FiniteSpectrum::compute(rho, l, n).unwrap())
    }

    #[test]
    fn heat_kernel_is_symmetric_and_vanishes_at_the_boundary() {
        let cfg = config(4.0, 15.0, 300);
        assert_eq!(q_t(&cfg, 3.0, 7.0, 1.0).unwrap(), q_t(&cfg, 7.0, 3.0, 1.0).unwrap());
        assert_eq!(q_t(&cfg, 3.0, 0.0, 1.0).unwrap(), 0.0);
        let at_l = q_t(&cfg, 3.0, 15.0, 1.0).unwrap();
        assert!(at_l.abs() < 1e-12, "q_t at the Dirichlet boundary: {at_l}");
        assert!(q_t(&cfg, 3.0, 7.0, 0.01).is_err(), "t below the certified floor");
        assert!(q_t(&cfg, -1.0, 7.0, 1.0).is_err(), "x outside the interval");
    }

    #[test]
    fn heat_kernel_satisfies_the_semigroup_identity() {
        let cfg = config(4.0, 15.0, 300);
        let (x, y, s, t) = (2.0, 2.0, 1.0, 1.0);
        let f = |z: f64| q_t(&cfg, x, z, s).unwrap() * q_t(&cfg, z, y, t).unwrap();
        let conv =
            adaptive_simpson(&f, 0.0, 1.0, 1e-11, 40) + adaptive_simpson(&f, 1.0, 15.0, 1e-11, 45);
        let direct = q_t(&cfg, x, y, s + t).unwrap();
        assert_relative_eq!(conv, direct, max_relative = 1e-6);
    }

    #[test]
    fn tilted_kernel_matches_its_definition_and_stays_positive() {
        let cfg = config(4.0, 10.0, 300);
        let spec = cfg.spectrum();
        for (x, y, t) in [(3.0, 7.0, 2.0), (0.5, 9.0, 1.0), (8.0, 1.0, 5.0)] {
            let direct = (spec.mu() * (x - y) - spec.lambda_inf() * t).exp()
                * q_t(&cfg, x, y, t).unwrap();
            assert_relative_eq!(p_t(&cfg, x, y, t).unwrap(), direct, max_relative = 1e-12);
        }
        for i in 0..=20 {
            for j in 0..=20 {
                let (x, y) = (10.0 * i as f64 / 20.0, 10.0 * j as f64 / 20.0);
                let p = p_t(&cfg, x, y, 2.0).unwrap();
                assert!(p >= -1e-12, "p_t({x},{y}) = {p} below the positivity floor");
            }
        }
    }

    #[test]
    fn leading_term_approximates_the_kernel_at_large_times() {
        let cfg = config(4.0, 12.0, 300);
        let (x, y) = (2.0, 2.0);
        let mut prev_gap = f64::INFINITY;
        for t in [50.0, 100.0, 200.0] {
            let q = q_t(&cfg, x, y, t).unwrap();
            let u = leading_term(&cfg, x, y, t).unwrap();
            let gap = ((q - u) / u).abs();
            assert!(gap <= 0.01, "relative gap {gap} at t = {t}");
            assert!(gap < prev_gap, "gap not shrinking at t = {t}");
            prev_gap = gap;
        }
        let q = q_t(&cfg, x, y, 200.0).unwrap();
        let u = leading_term(&cfg, x, y, 200.0).unwrap();
        assert!(
            ((q - u) / u).abs() < 1e-7,
            "second-mode remnant unexpectedly large: {:e}",
            (q - u) / u
        );
        assert_eq!(
            leading_term(&cfg, x, y, 200.0).unwrap(),
            leading_term(&cfg, y, x, 200.0).unwrap()
        );
        assert!(leading_term(&cfg, x, y, 0.5).is_err(), "t ≤ 1 rejected");
    }

    #[test]
    fn error_bound_shape_is_monotone() {
        let m = |l: f64, t: f64| error_bound_m(4.0, l, t, 1.0).unwrap();
        assert!(m(12.0, 10.0) > m(12.0, 20.0), "decreasing in t");
        assert!(m(12.0, 10.0) < m(15.0, 10.0), "increasing in L");
        assert!(m(12.0, 10.0) > 0.0);
        assert_relative_eq!(error_bound_m(4.0, 12.0, 10.0, 2.0).unwrap(), 2.0 * m(12.0, 10.0));
    }

    #[test]
    fn green_components_have_constant_wronskian_and_limit_coefficients() {
        let comps = GreenComponents::new(4.0, 15.0, 0.1).unwrap();
        let h = 1e-6;
        for x in [0.25, 0.5, 1.5, 7.5, 14.5] {
            let dphi = (comps.phi(x + h) - comps.phi(x - h)) / (2.0 * h);
            let dpsi = (comps.psi(x + h) - comps.psi(x - h)) / (2.0 * h);
            let w_num = comps.psi(x) * dphi - dpsi * comps.phi(x);
            assert_relative_eq!(w_num, comps.w, max_relative = 1e-8);
        }
        // At the bottom of the shift range the left coefficient vanishes
        // and the right one stays positive.
        let at_floor = GreenComponents::new(4.0, 15.0, 1e-15).unwrap();
        assert!(at_floor.f_val.abs() <= 1e-10, "f at the floor: {:e}", at_floor.f_val);
        assert!(at_floor.g_val > 0.0);
        // Boundary conditions of the two solutions.
        assert_eq!(comps.phi(0.0), 0.0);
        assert!(comps.psi(15.0).abs() < 1e-12);
        assert!(GreenComponents::new(4.0, 15.0, 0.0).is_err(), "xi must be positive");
    }

    #[test]
    fn green_closed_form_matches_the_spectral_series() {
        let spec = FiniteSpectrum::compute(4.0, 15.0, 520_000).unwrap();
        let cfg = KernelConfig::with_truncation(spec, Truncation::RelativeTail(1e-9));
        let comps = GreenComponents::new(4.0, 15.0, 0.1).unwrap();
        let closed = green_closed(&comps, 2.0, 7.0).unwrap();
        let series = green_series(&cfg, 2.0, 7.0, 0.1).unwrap();
        assert_relative_eq!(closed, series, max_relative = 1e-6);
    }

    #[test]
    fn green_function_is_symmetric_up_to_the_drift_tilt() {
        let comps = GreenComponents::new(4.0, 15.0, 0.1).unwrap();
        for (x, y) in [(2.0, 7.0), (0.3, 0.8), (1.0, 14.0), (11.0, 4.5)] {
            let mu = regimes::derive(4.0).unwrap().mu;
            let lhs = comps.eval(x, y).unwrap() * (-mu * (x - y)).exp();
            let rhs = comps.eval(y, x).unwrap() * (-mu * (y - x)).exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn singular_shift_is_reported_when_the_gap_closes() {
        // At L = 80 the principal gap λ∞ − λ₁ is ~1e-18, so a shift of
        // 5e-13 lands within 1e-12 of λ₁.
        let spec = FiniteSpectrum::compute(4.0, 80.0, 10).unwrap();
        let cfg = KernelConfig::new(spec);
        match green_series(&cfg, 2.0, 7.0, 5e-13) {
            Err(KernelError::SingularShift { k: 1, .. }) => {}
            other => panic!("expected SingularShift at k = 1, got {other:?}"),
        }
    }

    #[test]
    fn integrated_density_is_dominated_by_the_green_function() {
        // ∫₀ᵗ p_s(x,y) ds ≤ e·G_{1/t}(x,y).
        let cfg = config(4.0, 15.0, 10_000);
        for (x, y, t) in [(3.0, 7.0, 2.0), (7.0, 3.0, 1.0), (2.0, 10.0, 5.0), (9.0, 4.0, 0.5)] {
            let lhs = integrated_p(&cfg, x, y, t).unwrap();
            let comps = GreenComponents::new(4.0, 15.0, 1.0 / t).unwrap();
            let rhs = std::f64::consts::E * comps.eval(x, y).unwrap();
            assert!(
                lhs <= rhs,
                "∫p = {lhs} exceeds e·G = {rhs} at (x,y,t) = ({x},{y},{t})"
            );
        }
        assert!(integrated_p(&cfg, 3.0, 3.5, 2.0).is_err(), "|x−y| < 1 rejected");
    }

    #[test]
    fn flux_identities_hold() {
        let cfg = config(4.0, 12.0, 2_000);
        let spec = cfg.spectrum();
        // The all-time flux from the boundary itself is exactly one hit.
        assert_relative_eq!(
            flux_i(&cfg, 12.0, &[(0.0, f64::INFINITY)]).unwrap(),
            1.0,
            max_relative = 1e-10
        );
        // Exact exponential profile of the T = 0 flux right of the step.
        for x in [1.0, 3.0, 7.5, 12.0] {
            assert_relative_eq!(
                flux_i(&cfg, x, &[(0.0, f64::INFINITY)]).unwrap(),
                (spec.beta() * (12.0 - x)).exp(),
                max_relative = 1e-10
            );
        }
        // Additivity over disjoint time intervals.
        let whole = flux_i(&cfg, 5.0, &[(0.05, 3.0)]).unwrap();
        let split = flux_i(&cfg, 5.0, &[(0.05, 1.0), (1.0, 3.0)]).unwrap();
        assert_relative_eq!(whole, split, max_relative = 1e-12);
        // Expected hits are monotone in the horizon, and the tilted value
        // is a probability-scale quantity (≤ 1 per unit ancestor).
        let mut prev = 0.0;
        for t in [1.0, 2.0, 5.0, 20.0] {
            let i = flux_i(&cfg, 5.0, &[(0.0, t)]).unwrap();
            assert!(i > prev, "flux not increasing at horizon {t}");
            prev = i;
            let tilted = (spec.mu() * (5.0 - 12.0)).exp() * i;
            assert!(tilted < 1.0, "tilted flux {tilted} exceeds one hit");
        }
        // Interval endpoints inside (0, 0.05) are refused.
        assert!(flux_i(&cfg, 5.0, &[(0.01, 1.0)]).is_err());
    }

    #[test]
    fn flux_approaches_the_factorized_late_time_form() {
        // I(x,[T,T+Δ]) ≈ g(L)·ℓ([T,T+Δ])·w₁(x) for T ≫ L.
        let cfg = config(4.0, 12.0, 2_000);
        let spec = cfg.spectrum();
        let (x, t, dt) = (2.0, 300.0, 100.0);
        let i = flux_i(&cfg, x, &[(t, t + dt)]).unwrap();
        let g = crate::spectrum::g_of_l(4.0, 12.0).unwrap();
        let ell_s = ell(spec, &[(t, t + dt)]).unwrap();
        let w1 = spec.eval_w1(x).unwrap();
        assert_relative_eq!(i, g * ell_s * w1, max_relative = 0.01);
    }

    #[test]
    fn truncation_policies_behave() {
        // A five-mode spectrum cannot certify the tail at short times.
        let cfg = KernelConfig::new(FiniteSpectrum::compute(4.0, 15.0, 5).unwrap());
        match q_t(&cfg, 3.0, 7.0, 0.05) {
            Err(KernelError::Truncation(_)) => {}
            other => panic!("expected TruncationError, got {other:?}"),
        }
        // Fixed-count truncation uses exactly the requested terms.
        let spec = FiniteSpectrum::compute(4.0, 15.0, 300).unwrap();
        let fixed = KernelConfig::with_truncation(spec.clone(), Truncation::Terms(300));
        let adaptive = KernelConfig::new(spec);
        assert_relative_eq!(
            q_t(&fixed, 3.0, 7.0, 1.0).unwrap(),
            q_t(&adaptive, 3.0, 7.0, 1.0).unwrap(),
            max_relative = 1e-12
        );
        let overlong = KernelConfig::with_truncation(
            FiniteSpectrum::compute(4.0, 15.0, 5).unwrap(),
            Truncation::Terms(10),
        );
        assert!(matches!(
            q_t(&overlong, 3.0, 7.0, 1.0),
            Err(KernelError::Truncation(_))
        ));
    }

    #[test]
    fn kernel_values_stay_finite_on_extreme_grids() {
        // Overflow audit up to the maximal supported interval length. The
        // mode count covers the slowest case (L = 100 at t = 0.05, where
        // the tail certifies only after ~1050 modes).
        for l in [20.0, 60.0, 100.0] {
            let cfg = config(4.0, l, 2_000);
            for i in 1..10 {
                let x = l * (i as f64) / 10.0;
                for j in 1..10 {
                    let y = l * (j as f64) / 10.0;
                    for t in [0.05, 1.0, 100.0] {
                        let q = q_t(&cfg, x, y, t).unwrap();
                        let p = p_t(&cfg, x, y, t).unwrap();
                        assert!(q.is_finite(), "q_t overflow at (L={l}, x={x}, y={y}, t={t})");
                        assert!(p.is_finite(), "p_t overflow at (L={l}, x={x}, y={y}, t={t})");
                    }
                }
            }
            let comps = GreenComponents::new(4.0, l, 0.5).unwrap();
            for i in 1..10 {
                let x = l * (i as f64) / 10.0;
                let g = comps.eval(x, l / 2.0).unwrap();
                assert!(g.is_finite(), "Green overflow at (L={l}, x={x})");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn time_weight_never_exceeds_lebesgue_measure(
            a in 0.0..50.0f64,
            width in 1e-3..50.0f64,
        ) {
            let spec = FiniteSpectrum::compute(4.0, 12.0, 1).unwrap();
            let weight = ell(&spec, &[(a, a + width)]).unwrap();
            prop_assert!(weight <= width * (1.0 + 1e-12));
            prop_assert!(weight > 0.0);
        }

        #[test]
        fn heat_kernel_symmetry_holds_everywhere(
            x in 0.0..15.0f64,
            y in 0.0..15.0f64,
            t in 0.05..20.0f64,
        ) {
            // One shared spectrum per process would be nicer, but the
            // 300-mode build is cheap enough to repeat.
            let cfg = config(4.0, 15.0, 300);
            let a = q_t(&cfg, x, y, t).unwrap();
            let b = q_t(&cfg, y, x, t).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
