//! Adaptive Gauss–Kronrod quadrature and endpoint desingularization.
//!
//! Period and turning-angle integrals in this crate have integrands of the
//! form `g(x)/sqrt((x - lo)(hi - x) * smooth)`. Plain adaptive quadrature
//! stalls on the inverse-square-root endpoints, so the callers substitute
//! `x = lo + t^2` (resp. `x = hi - t^2`) near each simple root, which makes
//! the integrand analytic; these helpers then converge quickly.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae and weights on [-1, 1] (positive half).
const XK: [f64; 8] = [
    0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const WK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
// Embedded 7-point Gauss weights (odd Kronrod nodes).
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let f0 = f(c);
    let mut kron = WK[0] * f0;
    let mut gauss = WG[0] * f0;
    for j in 1..8 {
        let fp = f(c + h * XK[j]);
        let fm = f(c - h * XK[j]);
        kron += WK[j] * (fp + fm);
        if j % 2 == 0 {
            gauss += WG[j / 2] * (fp + fm);
        }
    }
    (kron * h, (kron - gauss).abs() * h.abs())
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(a, b)];
    let mut total = 0.0;
    let mut evals = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        evals += 15;
        if evals > 2_000_000 {
            return Err(Error::Quadrature(format!(
                "interval budget exhausted on [{lo}, {hi}] (err {err:.3e})"
            )));
        }
        // per-interval share of the tolerance, proportional to length
        let share = tol * ((hi - lo) / (b - a)).abs().max(1e-3);
        if err <= share || (hi - lo).abs() < 1e-14 * (b - a).abs() {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid));
            stack.push((mid, hi));
        }
    }
    Ok(total)
}

/// Integral of `f(x) / sqrt(w(x))` over `[lo, hi]`, where `w` vanishes to
/// first order at both endpoints and `w_reduced(x, end)` evaluates
/// `w(x) / (x - lo)` (for `end = 0`) or `w(x) / (hi - x)` (for `end = 1`)
/// in a smooth, cancellation-free form.
///
/// Splits at the midpoint and substitutes `x = lo + t^2`, `x = hi - t^2`.
pub fn integrate_sqrt_endpoints<F, W>(f: F, w_reduced: W, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    W: Fn(f64, usize) -> f64,
{
    if hi <= lo {
        return Err(Error::Quadrature(format!("empty interval [{lo}, {hi}]")));
    }
    let mid = 0.5 * (lo + hi);
    let left = integrate(
        |t| {
            let x = lo + t * t;
            2.0 * f(x) / w_reduced(x, 0).max(1e-300).sqrt()
        },
        0.0,
        (mid - lo).sqrt(),
        tol / 2.0,
    )?;
    let right = integrate(
        |t| {
            let x = hi - t * t;
            2.0 * f(x) / w_reduced(x, 1).max(1e-300).sqrt()
        },
        0.0,
        (hi - mid).sqrt(),
        tol / 2.0,
    )?;
    Ok(left + right)
}
