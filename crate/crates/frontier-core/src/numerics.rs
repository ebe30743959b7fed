//! Small numerical toolbox shared by the analytic modules: guaranteed-bracket
//! bisection, adaptive Simpson quadrature, the sign-generalized `sinh`/`cosh`
//! pair used throughout the spectral formulas, and overflow-safe exponential
//! helpers.

/// Error from [`bisect`] when the supplied interval does not bracket a root.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
pub struct NoSignChange {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Bisection on a bracketing interval, run to absolute width `xtol`.
///
/// Bisection is used everywhere in this crate in preference to Newton-type
/// iterations: every root we need lives in an analytically guaranteed
/// bracket, and bisection converges unconditionally there. Returns the
/// midpoint of the final interval.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<f64, NoSignChange> {
    assert!(lo < hi, "bisect: malformed interval [{lo}, {hi}]");
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() * f_hi.signum() > 0.0 {
        return Err(NoSignChange { lo, hi, f_lo, f_hi });
    }
    // 200 iterations cover any f64 interval down to adjacent floats; the
    // xtol test is what normally terminates.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol` (with the usual Richardson acceptance test per subinterval).
///
/// This is the fallback oracle for integrals that also have closed forms;
/// all integrands in this crate are smooth products of exponentials and
/// trigonometric functions, for which Simpson converges fast.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= 15.0 * tol {
            return left + right + err / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// `sinh(u)/u`, continuous through `u = 0`.
pub fn sinhc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 + u2 / 6.0 * (1.0 + u2 / 20.0)
    } else {
        u.sinh() / u
    }
}

/// `sin(u)/u`, continuous through `u = 0`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
    } else {
        u.sin() / u
    }
}

/// `ln(sinh(x))` for `x > 0` without overflow: `x + ln((1 − e^{−2x})/2)`.
pub fn ln_sinh(x: f64) -> f64 {
    assert!(x > 0.0, "ln_sinh requires x > 0, got {x}");
    x + (0.5 * (-(-2.0 * x).exp() + 1.0)).ln()
}

/// Sign-generalized `𝒮(x, λ)`: the solution of `u'' = λ·u` with
/// `u(0) = 0, u'(0) = 1`.
///
/// ```text
/// 𝒮(x, λ) = sinh(√λ · x)/√λ     λ > 0
///          = x                    λ = 0
///          = sin(√−λ · x)/√−λ    λ < 0
/// ```
///
/// The three branches join smoothly; near `λ = 0` the series
/// `x·(1 + λx²/6 + …)` is used so roundoff cannot split them.
pub fn sfun(x: f64, lam: f64) -> f64 {
    let q = lam * x * x;
    if q.abs() < 1e-8 {
        return x * (1.0 + q / 6.0 * (1.0 + q / 20.0));
    }
    if lam > 0.0 {
        let r = lam.sqrt();
        (r * x).sinh() / r
    } else {
        let r = (-lam).sqrt();
        (r * x).sin() / r
    }
}

/// Sign-generalized `𝒞(x, λ) = ∂ₓ𝒮(x, λ)`: the solution of `u'' = λ·u`
/// with `u(0) = 1, u'(0) = 0` (`cosh` for `λ > 0`, `cos` for `λ < 0`).
pub fn cfun(x: f64, lam: f64) -> f64 {
    let q = lam * x * x;
    if q.abs() < 1e-8 {
        return 1.0 + q / 2.0 * (1.0 + q / 12.0);
    }
    if lam > 0.0 {
        (lam.sqrt() * x).cosh()
    } else {
        ((-lam).sqrt() * x).cos()
    }
}

/// Sign-generalized `𝒯(x, λ) = 𝒮(x, λ)/𝒞(x, λ)` (`tanh`-like for `λ > 0`,
/// `tan`-like for `λ < 0`; has poles where `𝒞` vanishes).
pub fn tfun(x: f64, lam: f64) -> f64 {
    sfun(x, lam) / cfun(x, lam)
}

/// Relative difference `|a − b| / max(|a|, |b|)`, `0` when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// One step of the splitmix64 sequence; the standard 64-bit mixer used to
/// expand one master seed into independent per-replica RNG seeds.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_finds_simple_roots() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).expect("bracket holds");
        assert_relative_eq!(r, std::f64::consts::SQRT_2, max_relative = 1e-13);

        let r = bisect(|x| x.cos(), 1.0, 2.0, 1e-14).expect("bracket holds");
        assert_relative_eq!(r, std::f64::consts::FRAC_PI_2, max_relative = 1e-13);
    }

    #[test]
    fn bisect_rejects_non_bracketing_intervals() {
        let err = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert_eq!((err.lo, err.hi), (-1.0, 1.0), "interval echoed in the error");
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12, 40);
        assert_relative_eq!(v, std::f64::consts::E - 1.0, max_relative = 1e-11);

        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 40);
        assert_relative_eq!(v, 2.0, max_relative = 1e-11);
    }

    #[test]
    fn generalized_trig_matches_explicit_branches() {
        // λ > 0: sinh / cosh.
        assert_relative_eq!(sfun(2.0, 9.0), (3.0f64 * 2.0).sinh() / 3.0, max_relative = 1e-15);
        assert_relative_eq!(cfun(2.0, 9.0), (3.0f64 * 2.0).cosh(), max_relative = 1e-15);
        // λ < 0: sin / cos.
        assert_relative_eq!(sfun(2.0, -9.0), (3.0f64 * 2.0).sin() / 3.0, max_relative = 1e-15);
        assert_relative_eq!(cfun(2.0, -9.0), (3.0f64 * 2.0).cos(), max_relative = 1e-15);
        // λ = 0: the linear solution.
        assert_eq!(sfun(1.75, 0.0), 1.75);
        assert_eq!(cfun(1.75, 0.0), 1.0);
    }

    #[test]
    fn generalized_trig_is_continuous_through_zero() {
        // Series branch vs explicit branches just outside the cutoff.
        for x in [0.3, 1.0, 2.5] {
            let eps = 1e-9 / (x * x);
            assert_relative_eq!(sfun(x, eps), sfun(x, -eps), max_relative = 1e-8);
            assert_relative_eq!(cfun(x, eps), cfun(x, -eps), max_relative = 1e-8);
            assert_relative_eq!(sfun(x, eps), x, max_relative = 1e-8);
        }
    }

    #[test]
    fn ln_sinh_tracks_the_direct_formula_and_survives_large_arguments() {
        assert_relative_eq!(ln_sinh(3.0), 3.0f64.sinh().ln(), max_relative = 1e-14);
        // Direct sinh overflows near 710; the log form must not.
        let big = ln_sinh(5000.0);
        assert_relative_eq!(big, 5000.0 - std::f64::consts::LN_2, max_relative = 1e-14);
    }

    #[test]
    fn sinhc_and_sinc_handle_tiny_arguments() {
        assert_eq!(sinhc(0.0), 1.0);
        assert_eq!(sinc(0.0), 1.0);
        assert_relative_eq!(sinhc(1e-5), 1.0 + 1e-10 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(sinc(2.0), 2.0f64.sin() / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn splitmix_is_deterministic_and_spreads_bits() {
        let mut s1 = 42u64;
        let mut s2 = 42u64;
        let a = splitmix64(&mut s1);
        assert_eq!(a, splitmix64(&mut s2), "same state, same output");
        let b = splitmix64(&mut s1);
        assert_ne!(a, b, "sequence advances");
        assert_ne!(a.count_ones(), 0);
        assert_ne!(a.count_ones(), 64);
    }
}
