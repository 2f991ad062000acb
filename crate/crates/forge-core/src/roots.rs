//! Safeguarded scalar root finding.
//!
//! The constructions in this crate repeatedly need the *first* root of a
//! function along a ray (first zero of `y`, first orthogonal contact, first
//! sign change of the axis-crossing function). Uniqueness of those first
//! roots is part of the theory, so a fixed-step sign scan followed by
//! bisection/secant refinement locates them reliably.

use crate::error::{Error, Result};

/// Refine a bracketed root with alternating secant/bisection steps.
///
/// Requires `f(a) * f(b) <= 0`. Converges to `xtol` in the argument.
pub fn refine<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::RootNotFound(format!(
            "bracket [{a}, {b}] does not change sign ({fa:.3e}, {fb:.3e})"
        )));
    }
    for it in 0..200 {
        // secant candidate, fall back to midpoint when it leaves the bracket
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) || it % 3 == 2 {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 || (b - a).abs() <= xtol {
            return Ok(x);
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
        if (b - a).abs() <= xtol {
            return Ok(0.5 * (a + b));
        }
    }
    Ok(0.5 * (a + b))
}

/// First sign change of `f` on `(lo, hi]`, scanning with step `step`.
///
/// Returns the refined root. Points where `f` cannot be evaluated
/// (`None`) are skipped, which lets callers scan across regime holes.
pub fn first_root<F: FnMut(f64) -> Option<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    step: f64,
    xtol: f64,
) -> Result<f64> {
    assert!(step > 0.0 && hi > lo);
    let mut prev: Option<(f64, f64)> = None;
    let n = ((hi - lo) / step).ceil() as usize;
    for k in 0..=n {
        let x = (lo + k as f64 * step).min(hi);
        if let Some(fx) = f(x) {
            if fx == 0.0 {
                return Ok(x);
            }
            if let Some((xp, fp)) = prev {
                if fp * fx < 0.0 {
                    return refine(|t| f(t).unwrap_or(f64::NAN), xp, x, xtol);
                }
            }
            prev = Some((x, fx));
        }
        if x >= hi {
            break;
        }
    }
    Err(Error::RootNotFound(format!(
        "no sign change of scanned function in ({lo}, {hi}] at step {step}"
    )))
}

/// Expand a bracket around `x0` by multiplicative steps until `f` changes
/// sign, then refine. Used by the level-set solvers where only a seed on
/// the curve is known.
pub fn bracket_and_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    factor: f64,
    max_expand: usize,
    xtol: f64,
) -> Result<f64> {
    let f0 = f(x0);
    if f0 == 0.0 {
        return Ok(x0);
    }
    let mut lo = x0;
    let mut hi = x0;
    let mut flo = f0;
    let mut fhi = f0;
    for _ in 0..max_expand {
        lo /= factor;
        hi *= factor;
        flo = f(lo);
        if flo * f0 < 0.0 {
            return refine(f, lo, x0.min(hi), xtol);
        }
        fhi = f(hi);
        if fhi * f0 < 0.0 {
            return refine(f, x0.max(lo), hi, xtol);
        }
    }
    Err(Error::RootNotFound(format!(
        "no bracket around {x0} after {max_expand} expansions ({flo:.3e}..{fhi:.3e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_first_of_many_roots() {
        // sin has roots at k*pi; the first positive one must be returned
        let r = first_root(|x| Some(x.sin()), 0.5, 20.0, 0.01, 1e-13).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn refine_quadratic() {
        let r = refine(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bracket_expansion() {
        let r = bracket_and_refine(|x| x.ln(), 0.3, 1.3, 30, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
