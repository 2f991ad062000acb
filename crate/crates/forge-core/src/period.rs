//! The period map: the total turning (in units of pi) of the stereographic
//! image of the central curvature line over one half-period of the profile.
//!
//! Rational values close the annulus: at `theta = m/n` the central curve
//! closes after `2 n sigma` with rotation index `m`, and `n` equiangular
//! vertical mirrors appear. Double-root seeds (`a = 1`) admit a closed form,
//! which doubles as the oracle for the numeric path; away from `a = 1` only
//! the numeric evaluation exists, and the level-set solvers below walk it.

use crate::error::{Error, Result};
use crate::frame::{self, SurfacePatch};
use crate::roots;
use crate::sinh_system::{self, SeedParams};
use crate::spaceform::{Ambient, Vec4};

/// Result of a numeric period evaluation.
#[derive(Clone, Debug)]
pub struct PeriodEvaluation {
    pub theta: f64,
    /// Planar image of the central line, sampled over `[0, sigma]`.
    pub gamma: Vec<[f64; 2]>,
    /// Turning density `kappa * |gamma'|` at the samples.
    pub turning_density: Vec<f64>,
    /// False when the seed fails the non-degeneracy (spacelike span)
    /// predicate and the value is diagnostic only.
    pub certified: bool,
}

/// Closed-form period for a double-root seed `(1, b, c)`.
///
/// Requires the rotational-region inequality `(H - mu c^2)^2 + eps > 0`.
pub fn theta_closed(b: f64, c: f64, amb: &Ambient) -> Result<f64> {
    let mu = amb.mu;
    let k = amb.h - mu * c * c;
    let disc = k * k + amb.eps;
    if disc <= 0.0 {
        return Err(Error::Region(format!(
            "(1, {b}, {c}) outside the rotational region: (H - mu c^2)^2 + eps = {disc:.3e}"
        )));
    }
    let den = c * mu * ((1.0 / c + b * c) * (1.0 / c + c / b)).sqrt();
    Ok(-disc.sqrt() / den)
}

/// `theta^2` in the `(r1, r3)` coordinates (double-root seeds only):
/// `(mu (2 r3 - 1) - H) / (2 mu (r3 - r1))`.
pub fn theta_sq_r(r1: f64, r3: f64, amb: &Ambient) -> f64 {
    (amb.mu * (2.0 * r3 - 1.0) - amb.h) / (2.0 * amb.mu * (r3 - r1))
}

/// Point of the level line of `theta0` in the `(r1, r3)` plane:
/// `r -> (-r, theta0^2/(1 - theta0^2) r + (H + mu)/(2 mu (1 - theta0^2)))`.
pub fn upsilon_line(theta0: f64, r: f64, amb: &Ambient) -> (f64, f64) {
    let t2 = theta0 * theta0;
    let slope = t2 / (1.0 - t2);
    (
        -r,
        slope * r + (amb.h + amb.mu) / (2.0 * amb.mu * (1.0 - t2)),
    )
}

/// Turning of the tangent sequence, continuously unwrapped.
///
/// Consecutive samples must turn by less than pi for the unwrap to be
/// trustworthy; larger jumps are rejected.
fn unwrap_turning(tangents: &[[f64; 2]]) -> Result<f64> {
    let mut total = 0.0;
    let mut prev = f64::NAN;
    for t in tangents {
        let ang = t[1].atan2(t[0]);
        if prev.is_finite() {
            let mut d = ang - prev;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            if d.abs() > 0.9 * std::f64::consts::PI {
                return Err(Error::Quadrature(
                    "tangent turning per sample too large to unwrap".into(),
                ));
            }
            total += d;
        }
        prev = ang;
    }
    Ok(total)
}

fn stereo_tangent(psi: &Vec4, psi_v: &Vec4) -> ([f64; 2], [f64; 2]) {
    let den = 1.0 + psi.x4();
    let p = [psi.x1() / den, psi.x2() / den];
    let dp = [
        (psi_v.x1() * den - psi.x1() * psi_v.x4()) / (den * den),
        (psi_v.x2() * den - psi.x2() * psi_v.x4()) / (den * den),
    ];
    (p, dp)
}

/// Numeric period for an arbitrary seed: integrate the central `v`-line of
/// the rebased frame over `[0, sigma]` and accumulate the turning of the
/// tangent of its stereographic image.
///
/// The turning is evaluated at two sampling resolutions; disagreement
/// beyond `1e-6` (a failed unwrap) is an error.
pub fn theta_for_seed(sp: &SeedParams, amb: &Ambient) -> Result<f64> {
    let sigma = sinh_system::sigma(sp)?;
    let spine = frame::integrate_spine(sp, amb, 1e-6, true, 1e-12)?;
    let line = frame::integrate_vline(&spine, 0.0, sigma, 1e-12)?;
    let eval = |m: usize| -> Result<f64> {
        let tangents: Vec<[f64; 2]> = (0..=m)
            .map(|k| {
                let v = sigma * k as f64 / m as f64;
                let f = line.frame(v);
                stereo_tangent(&f.psi, &f.psi_v).1
            })
            .collect();
        Ok(unwrap_turning(&tangents)? / std::f64::consts::PI)
    };
    let coarse = eval(1024)?;
    let fine = eval(2048)?;
    if (coarse - fine).abs() > 1e-6 {
        return Err(Error::Quadrature(format!(
            "turning integral disagrees between resolutions: {coarse} vs {fine}"
        )));
    }
    Ok(fine)
}

/// Numeric period from a rebased patch covering `v` in `[0, sigma]`.
pub fn theta_numeric(patch: &SurfacePatch) -> Result<PeriodEvaluation> {
    if !patch.rebased {
        return Err(Error::Domain(
            "period evaluation requires a rebased patch".into(),
        ));
    }
    let sigma = patch.sigma;
    let hv = patch.vs[1] - patch.vs[0];
    let isg = (sigma / hv).round() as usize;
    if isg + 1 > patch.nv() || (patch.vs[isg] - sigma).abs() > 1e-9 {
        return Err(Error::Domain(
            "patch v grid must contain the half-period node".into(),
        ));
    }
    let iu0 = patch.iu_zero();
    let mut gamma = Vec::with_capacity(isg + 1);
    let mut tangents = Vec::with_capacity(isg + 1);
    for iv in 0..=isg {
        let f = patch.frame(iu0, iv);
        let (p, dp) = stereo_tangent(&f.psi, &f.psi_v);
        gamma.push(p);
        tangents.push(dp);
    }
    let full = unwrap_turning(&tangents)? / std::f64::consts::PI;
    let halved: Vec<[f64; 2]> = tangents.iter().step_by(2).copied().collect();
    let coarse = unwrap_turning(&halved)? / std::f64::consts::PI;
    if (full - coarse).abs() > 1e-6 {
        return Err(Error::Quadrature(format!(
            "turning integral disagrees between resolutions: {coarse} vs {full}"
        )));
    }
    // turning density by centered differences of the unwrapped angle
    let mut density = vec![0.0; tangents.len()];
    let angles: Vec<f64> = {
        let mut out = Vec::with_capacity(tangents.len());
        let mut acc = 0.0;
        let mut prev = f64::NAN;
        for t in &tangents {
            let a = t[1].atan2(t[0]);
            if prev.is_finite() {
                let mut d = a - prev;
                while d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                }
                while d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                acc += d;
            }
            out.push(acc);
            prev = a;
        }
        out
    };
    let last = density.len() - 1;
    for k in 1..last {
        density[k] = (angles[k + 1] - angles[k - 1]) / (2.0 * hv);
    }
    density[0] = (angles[1] - angles[0]) / hv;
    density[last] = (angles[last] - angles[last - 1]) / hv;
    let certified = frame::is_o_minus(&patch.sp, &patch.amb).unwrap_or(false);
    Ok(PeriodEvaluation {
        theta: full,
        gamma,
        turning_density: density,
        certified,
    })
}

/// Period of a seed, dispatching to the closed form at `a = 1`.
pub fn theta_of(a: f64, b: f64, c: f64, amb: &Ambient) -> Result<f64> {
    if a == 1.0 {
        theta_closed(b, c, amb)
    } else {
        theta_for_seed(&SeedParams::new(a, b, c)?, amb)
    }
}

/// Solve `theta(a, b, c) = theta0` for `c`, bracketing geometrically from
/// `c_hint` (multiplicative steps of 1.05).
pub fn level_c(a: f64, b: f64, theta0: f64, amb: &Ambient, c_hint: f64) -> Result<f64> {
    let f = |c: f64| theta_of(a, b, c, amb).map(|t| t - theta0).unwrap_or(f64::NAN);
    let c = roots::bracket_and_refine(f, c_hint.max(1.0 + 1e-9), 1.05, 60, 1e-12)?;
    let residual = theta_of(a, b, c, amb)? - theta0;
    if residual.abs() > 1e-8 {
        return Err(Error::RootNotFound(format!(
            "level solve for c left residual {residual:.3e}"
        )));
    }
    Ok(c)
}

/// Solve `theta(a, b, c) = theta0` for `b` (mirror of [`level_c`]).
pub fn level_b(a: f64, c: f64, theta0: f64, amb: &Ambient, b_hint: f64) -> Result<f64> {
    let f = |b: f64| theta_of(a, b, c, amb).map(|t| t - theta0).unwrap_or(f64::NAN);
    let b = roots::bracket_and_refine(f, b_hint.max(1.0 + 1e-9), 1.05, 60, 1e-12)?;
    let residual = theta_of(a, b, c, amb)? - theta0;
    if residual.abs() > 1e-8 {
        return Err(Error::RootNotFound(format!(
            "level solve for b left residual {residual:.3e}"
        )));
    }
    Ok(b)
}
