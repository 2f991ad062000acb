//! Search, assembly and certification of free-boundary and capillary
//! annuli.
//!
//! The pipeline: pick a rational target for the period map inside the
//! admissible interval, walk its level line through the double-root seeds
//! until the orthogonal-contact parameter crosses the rotational
//! free-boundary value (a sign change of `f = tau - u~`, hence of the
//! center height), then continue the zero curve of the center height into
//! non-rotational seeds at fixed period. Each produced annulus is closed
//! into a mesh and certified: boundary sphere fit, contact angle,
//! containment, symmetry group, embeddedness.

use crate::error::{Error, Result};
use crate::frame::{self, SurfacePatch};
use crate::mesh::TriMesh;
use crate::period;
use crate::roots;
use crate::rotational;
use crate::sinh_system::{self, SeedParams};
use crate::spaceform::{Ambient, Vec4};
use serde::{Deserialize, Serialize};

/// Admissible interval of period targets for the free-boundary search.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JInterval {
    pub lo: f64,
    pub hi: f64,
    /// True when the right endpoint was detected by a scan rather than a
    /// closed form (`eps = +1` with `8 H^2 <= 1`).
    pub empirical: bool,
}

impl JInterval {
    pub fn contains(&self, theta0: f64) -> bool {
        theta0 > self.lo && theta0 < self.hi
    }
}

/// Interval of period targets for which the level sweep is guaranteed to
/// find a critical rotational annulus.
pub fn interval_j(amb: &Ambient) -> JInterval {
    let third = -(1.0 / 3.0_f64).sqrt();
    if amb.eps < 0.0 {
        return JInterval {
            lo: third,
            hi: 0.0,
            empirical: false,
        };
    }
    let right = -((amb.mu - amb.h) / (2.0 * amb.mu)).sqrt();
    if 8.0 * amb.h * amb.h - 1.0 > 0.0 {
        return JInterval {
            lo: third,
            hi: right,
            empirical: false,
        };
    }
    // low-H spherical case: the closed-form interval is empty; scan for
    // the largest target passing the half-line entry conditions
    let lo = right;
    let mut hi = lo;
    let steps = 40;
    for k in 1..steps {
        let theta0 = lo + (0.0 - lo) * k as f64 / steps as f64;
        if half_line_entry_holds(theta0, amb).unwrap_or(false) {
            hi = theta0;
        } else {
            break;
        }
    }
    JInterval {
        lo,
        hi,
        empirical: true,
    }
}

/// Entry conditions for targets right of the closed-form interval: the
/// level line meets a shallow half-line `(-r, l r + 1)` inside the
/// admissible region with the contact parameter still above the
/// free-boundary value.
fn half_line_entry_holds(theta0: f64, amb: &Ambient) -> Result<bool> {
    let t2 = theta0 * theta0;
    let slope = t2 / (1.0 - t2);
    let l = 0.5 * slope.min((amb.mu - amb.h) / (amb.mu + amb.h));
    if l <= 0.0 || l >= slope {
        return Ok(false);
    }
    let (_, r30) = period::upsilon_line(theta0, 0.0, amb);
    let r_bar = (r30 - 1.0) / (l - slope);
    if r_bar <= 0.0 {
        return Ok(false);
    }
    let (r1, r3) = (-r_bar, l * r_bar + 1.0);
    if !sinh_system::in_w_hat(r1, r3, amb) {
        return Ok(false);
    }
    let sp = sinh_system::seed_from_r1_r3(r1, r3)?;
    let traj = sinh_system::integrate_hamiltonian(&sp, 14.0, 1e-12)?;
    let tau = sinh_system::find_tau(&traj, amb)?;
    Ok(tau > rotational::tilde_u(r3, amb)?)
}

/// One sweep along the level line of `theta0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSweep {
    pub theta0: f64,
    /// Scanned `(r, f(r))` values inside the admissible region.
    pub samples: Vec<(f64, f64)>,
    pub r_star: f64,
    pub bracket: (f64, f64),
    /// Where the line leaves the admissible region.
    pub r_exit: f64,
    /// Center heights just before/after the crossing (opposite signs).
    pub h_before: f64,
    pub h_after: f64,
    /// Double-root seed at the crossing.
    pub b_star: f64,
    pub c_star: f64,
}

fn f_of_r(theta0: f64, r: f64, amb: &Ambient) -> Result<f64> {
    let (r1, r3) = period::upsilon_line(theta0, r, amb);
    let sp = sinh_system::seed_from_r1_r3(r1, r3)?;
    let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12)?;
    let tau = sinh_system::find_tau(&traj, amb)?;
    Ok(tau - rotational::tilde_u(r3, amb)?)
}

/// Segment of the level line to scan, between its crossings of the
/// admissible-region boundary.
///
/// Shallow lines (slope < 1/2, the closed-form interval) start inside and
/// leave at the returned end; steep lines (the low-H spherical branch)
/// start outside, enter at the returned start, and are scanned up to
/// their intersection with the shallow half-line whose entry conditions
/// back the admissible interval.
fn scan_segment(theta0: f64, amb: &Ambient) -> Result<(f64, f64)> {
    let t2 = theta0 * theta0;
    let slope = t2 / (1.0 - t2);
    let (_, r30) = period::upsilon_line(theta0, 0.0, amb);
    // boundary crossings: (r + 1)^2 = (1 + 2 r)(r30 + slope r)
    let a = 1.0 - 2.0 * slope;
    let b = 2.0 - slope - 2.0 * r30;
    let c = 1.0 - r30;
    let disc = b * b - 4.0 * a * c;
    if slope < 0.5 {
        if disc <= 0.0 {
            return Err(Error::RootNotFound(
                "level line misses the region boundary".into(),
            ));
        }
        let r_exit = (-b + disc.sqrt()) / (2.0 * a);
        if r_exit <= 0.0 {
            return Err(Error::RootNotFound(format!(
                "boundary exit at r = {r_exit} <= 0"
            )));
        }
        // at the corner r30 = 1 the line starts on the boundary itself
        let r_lo = if r30 > 1.0 + 1e-9 { 0.0 } else { 1e-3 * r_exit };
        return Ok((r_lo, 0.995 * r_exit));
    }
    // steep line: single boundary crossing (entry) since c > 0 >= a here
    if disc <= 0.0 || c <= 0.0 {
        return Err(Error::RootNotFound(
            "steep level line does not enter the region".into(),
        ));
    }
    let r_entry = [(-b + disc.sqrt()) / (2.0 * a), (-b - disc.sqrt()) / (2.0 * a)]
        .into_iter()
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !r_entry.is_finite() {
        return Err(Error::RootNotFound("region entry not found".into()));
    }
    // end of the scan: intersection with the shallow half-line
    let l = 0.5 * slope.min((amb.mu - amb.h) / (amb.mu + amb.h));
    let r_bar = (r30 - 1.0) / (l - slope);
    if r_bar <= r_entry {
        return Err(Error::RootNotFound(format!(
            "half-line intersection r = {r_bar} inside the excluded strip (entry {r_entry})"
        )));
    }
    Ok((r_entry * (1.0 + 1e-6), r_bar))
}

/// Walk the level line of `theta0`, locate the first sign change of
/// `f(r) = tau - u~`, refine the crossing, and certify that the center
/// height changes sign across it.
pub fn sweep_upsilon(theta0: f64, amb: &Ambient) -> Result<LevelSweep> {
    let j = interval_j(amb);
    // the right endpoint of the spherical closed-form interval is the
    // corner where the level line starts exactly on the region boundary;
    // the walk handles it, so equality is admitted there
    let at_corner = amb.eps > 0.0 && !j.empirical && (theta0 - j.hi).abs() < 1e-12;
    if !(theta0 > -1.0 && theta0 < 0.0) || !(j.contains(theta0) || at_corner) {
        return Err(Error::Domain(format!(
            "target {theta0} outside the admissible interval ({}, {})",
            j.lo, j.hi
        )));
    }
    let (r_lo, r_hi) = scan_segment(theta0, amb)?;
    let r_exit = r_hi;

    let mut samples = Vec::new();
    let mut bracket: Option<(f64, f64, f64, f64)> = None;
    let coarse = 40;
    let mut r_prev: Option<(f64, f64)> = None;
    let mut k = 0usize;
    while k <= coarse {
        // refine the walk near the boundary where tau collapses
        let frac = k as f64 / coarse as f64;
        let r = r_lo + (r_hi - r_lo) * frac;
        k += 1;
        let fr = match f_of_r(theta0, r, amb) {
            Ok(v) => v,
            Err(_) => continue,
        };
        samples.push((r, fr));
        if let Some((rp, fp)) = r_prev {
            if fp * fr < 0.0 {
                bracket = Some((rp, r, fp, fr));
                break;
            }
        }
        r_prev = Some((r, fr));
    }
    let (blo, bhi, _, _) = bracket.ok_or_else(|| {
        Error::RootNotFound(format!(
            "no sign change of tau - u~ before the region exit at r = {r_exit:.6}"
        ))
    })?;
    let r_star = roots::refine(
        |r| f_of_r(theta0, r, amb).unwrap_or(f64::NAN),
        blo,
        bhi,
        1e-10,
    )?;
    let f_star = f_of_r(theta0, r_star, amb)?;
    if f_star.abs() > 1e-8 {
        return Err(Error::RootNotFound(format!(
            "crossing refinement left f(r*) = {f_star:.3e}"
        )));
    }
    // center height changes sign across the crossing
    let h_step = ((bhi - blo) * 0.5).max(1e-4);
    let h_at = |r: f64| -> Result<f64> {
        let (r1, r3) = period::upsilon_line(theta0, r, amb);
        let sp = sinh_system::seed_from_r1_r3(r1, r3)?;
        frame::h_frak(&sp, amb)
    };
    let h_before = h_at(r_star - h_step)?;
    let h_after = h_at(r_star + h_step)?;
    if h_before * h_after >= 0.0 {
        return Err(Error::RootNotFound(format!(
            "center height does not change sign across r* ({h_before:.3e}, {h_after:.3e})"
        )));
    }
    let (r1, r3) = period::upsilon_line(theta0, r_star, amb);
    let seed = sinh_system::seed_from_r1_r3(r1, r3)?;
    Ok(LevelSweep {
        theta0,
        samples,
        r_star,
        bracket: (blo, bhi),
        r_exit,
        h_before,
        h_after,
        b_star: seed.b,
        c_star: seed.c,
    })
}

/// One member of an annulus family.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FamilyMember {
    pub eta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub theta: f64,
    pub center_height: f64,
    pub tau: f64,
}

/// Zero curve of the center height inside a fixed period level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyCurve {
    pub theta0: f64,
    pub members: Vec<FamilyMember>,
}

/// Evaluate `(theta - theta0, center height)` at `(a, b, c)`.
fn corrector_residual(a: f64, b: f64, c: f64, theta0: f64, amb: &Ambient) -> Result<(f64, f64)> {
    let theta = period::theta_of(a, b, c, amb)?;
    let sp = SeedParams::new(a, b, c)?;
    let h = frame::h_frak(&sp, amb)?;
    Ok((theta - theta0, h))
}

/// Newton-correct `(b, c)` at fixed `a` onto the curve
/// `theta = theta0, center height = 0`.
fn correct_bc(a: f64, b0: f64, c0: f64, theta0: f64, amb: &Ambient) -> Result<(f64, f64)> {
    let (mut b, mut c) = (b0, c0);
    for _ in 0..16 {
        let (f1, f2) = corrector_residual(a, b, c, theta0, amb)?;
        if f1.abs() < 1e-10 && f2.abs() < 1e-9 {
            return Ok((b, c));
        }
        let db = 1e-6 * b.max(1.0);
        let dc = 1e-6 * c.max(1.0);
        let (f1b, f2b) = corrector_residual(a, b + db, c, theta0, amb)?;
        let (f1c, f2c) = corrector_residual(a, b, c + dc, theta0, amb)?;
        let j11 = (f1b - f1) / db;
        let j21 = (f2b - f2) / db;
        let j12 = (f1c - f1) / dc;
        let j22 = (f2c - f2) / dc;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-18 {
            return Err(Error::Degenerate("singular corrector Jacobian".into()));
        }
        let step_b = (f1 * j22 - f2 * j12) / det;
        let step_c = (j11 * f2 - j21 * f1) / det;
        b -= step_b;
        c -= step_c;
        if b < 1.0 {
            b = 1.0 + 1e-9;
        }
        if c < 1.0 {
            c = 1.0 + 1e-9;
        }
    }
    let (f1, f2) = corrector_residual(a, b, c, theta0, amb)?;
    if f1.abs() < 1e-8 && f2.abs() < 1e-6 {
        Ok((b, c))
    } else {
        Err(Error::RootNotFound(format!(
            "corrector stalled at residuals ({f1:.3e}, {f2:.3e})"
        )))
    }
}

/// Continue the zero curve of the center height from a double-root seed
/// into non-rotational parameters, holding the period at `theta0`.
///
/// `step` is the pseudo-arclength increment in the `(a, b)` plane; the
/// corrector re-solves `(b, c)` at fixed `a`.
pub fn continue_family(
    theta0: f64,
    seed_b: f64,
    seed_c: f64,
    eta_max: f64,
    step: f64,
    amb: &Ambient,
) -> Result<FamilyCurve> {
    let mut members = Vec::new();
    // seed member (must already satisfy both conditions)
    let (tres, h0) = corrector_residual(1.0, seed_b, seed_c, theta0, amb)?;
    if tres.abs() > 1e-8 || h0.abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "seed off the curve: theta residual {tres:.3e}, height {h0:.3e}"
        )));
    }
    let push =
        |members: &mut Vec<FamilyMember>, eta: f64, a: f64, b: f64, c: f64| -> Result<()> {
            let sp = SeedParams::new(a, b, c)?;
            let theta = period::theta_of(a, b, c, amb)?;
            let (h, tau) = frame::h_frak_with_tau(&sp, amb)?;
            if (theta - theta0).abs() > 1e-8 {
                return Err(Error::RootNotFound(format!(
                    "member drifted off the level: |theta - theta0| = {:.3e}",
                    (theta - theta0).abs()
                )));
            }
            if h.abs() > 1e-6 {
                return Err(Error::RootNotFound(format!(
                    "member drifted off the height zero: |h| = {h:.3e}"
                )));
            }
            members.push(FamilyMember {
                eta,
                a,
                b,
                c,
                theta,
                center_height: h,
                tau,
            });
            Ok(())
        };
    push(&mut members, 0.0, 1.0, seed_b, seed_c)?;

    // first step: arc search around the seed inside {a >= 1}
    let g_of = |a: f64, b: f64| -> Result<f64> {
        let c = period::level_c(a, b, theta0, amb, seed_c)?;
        let sp = SeedParams::new(a, b, c)?;
        frame::h_frak(&sp, amb)
    };
    let arc = |phi: f64| (1.0 + step * phi.sin(), seed_b + step * phi.cos());
    let mut phi_bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=24 {
        let phi = 0.05 + (std::f64::consts::PI - 0.1) * k as f64 / 24.0;
        let (a, b) = arc(phi);
        let g = match g_of(a, b) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if let Some((pp, gp)) = prev {
            if gp * g < 0.0 {
                phi_bracket = Some((pp, phi));
                break;
            }
        }
        prev = Some((phi, g));
    }
    let (plo, phi_hi) =
        phi_bracket.ok_or_else(|| Error::RootNotFound("no curve direction into a > 1".into()))?;
    let phi_star = roots::refine(
        |phi| {
            let (a, b) = arc(phi);
            g_of(a, b).unwrap_or(f64::NAN)
        },
        plo,
        phi_hi,
        1e-10,
    )?;
    let (mut a_cur, b_pred) = arc(phi_star);
    let (mut b_cur, mut c_cur) = correct_bc(a_cur, b_pred, seed_c, theta0, amb)?;
    let mut eta = step;
    push(&mut members, eta, a_cur, b_cur, c_cur)?;

    // secant continuation
    let (mut a_prev, mut b_prev) = (1.0, seed_b);
    while eta < eta_max - 1e-12 {
        let da = a_cur - a_prev;
        let db = b_cur - b_prev;
        let norm = (da * da + db * db).sqrt();
        if norm < 1e-14 {
            return Err(Error::Degenerate("continuation tangent collapsed".into()));
        }
        let a_next = a_cur + step * da / norm;
        let b_seed = b_cur + step * db / norm;
        if a_next <= 1.0 {
            return Err(Error::Degenerate(format!(
                "continuation folded back to a = {a_next}; last good point a = {a_cur}"
            )));
        }
        let (b_next, c_next) = correct_bc(a_next, b_seed, c_cur, theta0, amb)?;
        a_prev = a_cur;
        b_prev = b_cur;
        a_cur = a_next;
        b_cur = b_next;
        c_cur = c_next;
        eta += ((a_cur - a_prev).powi(2) + (b_cur - b_prev).powi(2)).sqrt();
        push(&mut members, eta, a_cur, b_cur, c_cur)?;
    }
    Ok(FamilyCurve {
        theta0,
        members,
    })
}

/// Assemble the closed annulus of a seed whose period is the rational
/// `m/n` (within `1e-8`), over `[-u0, u0] x [0, 2 n sigma]`.
///
/// `nu` is the number of grid cells per `u` half; the `v` resolution is
/// rounded up to a multiple of `2 n` cells so every mirror plane lies on
/// a grid node.
pub fn build_annulus(
    sp: &SeedParams,
    u0: f64,
    m: i64,
    n: i64,
    amb: &Ambient,
    nu: usize,
    nv_hint: usize,
) -> Result<(SurfacePatch, TriMesh)> {
    if n <= 0 || m >= 0 || gcd(-m, n) != 1 {
        return Err(Error::Domain(format!(
            "period target {m}/{n} must be negative and irreducible"
        )));
    }
    let target = m as f64 / n as f64;
    let theta = period::theta_of(sp.a, sp.b, sp.c, amb)?;
    if (theta - target).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "period {theta} is not the rational target {m}/{n} (gap {:.3e})",
            (theta - target).abs()
        )));
    }
    let sigma = sinh_system::sigma(sp)?;
    let per_sector = (nv_hint as f64 / (2 * n) as f64).ceil() as usize;
    let nv = (2 * n as usize) * per_sector.max(8);
    let patch = frame::build_patch(sp, amb, u0, 2.0 * n as f64 * sigma, nu, nv, true, 1e-11)?;
    let mesh = TriMesh::from_patch(&patch, amb, true, 1e-6)?;
    Ok((patch, mesh))
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Contact regime a certificate is judged against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactMode {
    /// Both boundary angles must be right angles.
    FreeBoundary,
    /// Both boundary angles must agree (but may differ from pi/2).
    Capillary,
}

/// Verification record for one assembled annulus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnulusCertificate {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u0: f64,
    pub mode: ContactMode,
    pub rotation_index: i64,
    pub n_planes: i64,
    /// Ball the annulus is checked against.
    pub ball_center: Vec4,
    pub ball_d: f64,
    pub max_cmc_residual: f64,
    /// Both boundary circles against the single boundary sphere.
    pub max_boundary_sphere_residual: f64,
    /// Per-line sphericity of the curvature-line foliation.
    pub max_sphericity_residual: f64,
    pub contact_angle_low: f64,
    pub contact_angle_high: f64,
    pub contact_angle_deviation: f64,
    pub containment_margin: f64,
    pub mirror_residual: f64,
    pub max_plane_residual: f64,
    /// Reflection axes of the central curve found by the angular scan.
    pub reflection_axes_found: i64,
    pub rotational_orbit: bool,
    /// Transversal self-crossings of the mesh at full / half resolution.
    pub self_crossing: bool,
    pub self_crossing_coarse: bool,
    /// Embedding verdict: crossing-free at both resolutions and a simple
    /// cover (higher covers are immersions by construction; coincident
    /// sheets produce no transversal crossing).
    pub embedded: bool,
    pub closure_gap: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Tolerances for [`certify`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CertTolerances {
    pub angle: f64,
    pub residual: f64,
    pub containment: f64,
}

impl Default for CertTolerances {
    fn default() -> Self {
        CertTolerances {
            angle: 1e-6,
            residual: 1e-6,
            containment: 1e-8,
        }
    }
}

/// Run every verification item on an assembled annulus.
///
/// Records failures instead of aborting; `passed` is the conjunction.
pub fn certify(
    patch: &SurfacePatch,
    mesh: &TriMesh,
    m: i64,
    n: i64,
    mode: ContactMode,
    amb: &Ambient,
    tol: &CertTolerances,
) -> Result<AnnulusCertificate> {
    let mut failures = Vec::new();
    let traj = sinh_system::integrate_hamiltonian(&patch.sp, patch.us.last().unwrap() + 1.0, 1e-12)?;
    let centers = frame::center_curve(patch, &traj)?;
    let (nu, nv) = (patch.nu(), patch.nv());
    let iu_hi = nu - 1;
    let u0 = *patch.us.last().unwrap();

    // --- boundary sphere and ball ---
    if !centers.sphere_like[iu_hi] {
        failures.push("boundary circle center is not sphere-like".into());
    }
    let m_raw = centers.m[iu_hi];
    let d_raw = centers.d[iu_hi];
    // containing-side representative: the surface midline must sit inside
    let iu0 = patch.iu_zero();
    let psi_mid = patch.frame(iu0, 0).psi;
    let (ball_m, ball_d) = if amb.inner(&psi_mid, &m_raw) - d_raw >= 0.0 {
        (m_raw, d_raw)
    } else {
        (-m_raw, -d_raw)
    };
    if amb.eps < 0.0 && ball_m.x4() <= 0.0 {
        failures.push("ball center on the wrong sheet".into());
    }

    // --- boundary circles on one sphere ---
    let mut sphere_res = 0.0_f64;
    for iv in 0..nv {
        for iu in [0usize, iu_hi] {
            let r = (amb.inner(&patch.frame(iu, iv).psi, &ball_m) - ball_d).abs();
            sphere_res = sphere_res.max(r);
        }
    }
    if sphere_res > tol.residual {
        failures.push(format!("boundary sphere residual {sphere_res:.3e}"));
    }

    // --- per-line sphericity ---
    let mut sph_res = 0.0_f64;
    for iu in 0..nu {
        if !centers.sphere_like[iu] {
            continue;
        }
        let (mm, dd) = (centers.m[iu], centers.d[iu]);
        for iv in 0..nv {
            sph_res = sph_res.max((amb.inner(&patch.frame(iu, iv).psi, &mm) - dd).abs());
        }
    }
    if sph_res > 10.0 * tol.residual {
        failures.push(format!("curvature-line sphericity residual {sph_res:.3e}"));
    }

    // --- contact angles ---
    let angle_stats = |iu: usize| -> (f64, f64) {
        let mut mean = 0.0;
        let mut dev = 0.0_f64;
        let mut angles = Vec::with_capacity(nv);
        for iv in 0..nv {
            let f = patch.frame(iu, iv);
            let nhat = ball_m - f.psi * (amb.eps * ball_d);
            let nn = amb.inner(&nhat, &nhat).max(1e-300).sqrt();
            let cos_t = (amb.inner(&f.n, &nhat) / nn).clamp(-1.0, 1.0);
            angles.push(cos_t.acos());
        }
        for &a in &angles {
            mean += a;
        }
        mean /= nv as f64;
        for &a in &angles {
            dev = dev.max((a - mean).abs());
        }
        (mean, dev)
    };
    let (ang_lo, dev_lo) = angle_stats(0);
    let (ang_hi, dev_hi) = angle_stats(iu_hi);
    let angle_dev = dev_lo.max(dev_hi);
    if angle_dev > tol.angle {
        failures.push(format!("contact angle not constant: deviation {angle_dev:.3e}"));
    }
    // mirror symmetry can flip the measured orientation; compare unsigned
    let pair_gap = (ang_lo - ang_hi)
        .abs()
        .min((ang_lo - (std::f64::consts::PI - ang_hi)).abs());
    match mode {
        ContactMode::FreeBoundary => {
            let worst = (ang_lo - std::f64::consts::FRAC_PI_2)
                .abs()
                .max((ang_hi - std::f64::consts::FRAC_PI_2).abs());
            if worst > tol.angle {
                failures.push(format!("free-boundary angle off pi/2 by {worst:.3e}"));
            }
        }
        ContactMode::Capillary => {
            if pair_gap > tol.angle {
                failures.push(format!("boundary angles differ by {pair_gap:.3e}"));
            }
        }
    }

    // --- containment ---
    let mut margin = f64::INFINITY;
    for f in &patch.frames {
        margin = margin.min(amb.inner(&f.psi, &ball_m) - ball_d);
    }
    if margin < -tol.containment {
        failures.push(format!("containment violated by {:.3e}", -margin));
    }

    // --- CMC residual (finite-difference Weingarten trace) ---
    // The residual is dominated by the second-order truncation of the
    // differences, so the certificate is a convergence statement: halving
    // the grid must cut it by about 4, or it is already at rounding level.
    let cmc_of = |p: &SurfacePatch| {
        let (pnu, pnv) = (p.nu(), p.nv());
        let hu = p.us[1] - p.us[0];
        let hv = p.vs[1] - p.vs[0];
        let mut worst = 0.0_f64;
        for iu in 1..pnu - 1 {
            for iv in 1..pnv - 1 {
                let f = p.frame(iu, iv);
                let nu_fd = (p.frame(iu + 1, iv).n - p.frame(iu - 1, iv).n) * (0.5 / hu);
                let nv_fd = (p.frame(iu, iv + 1).n - p.frame(iu, iv - 1).n) * (0.5 / hv);
                let e = amb.inner(&f.psi_u, &f.psi_u);
                let g = amb.inner(&f.psi_v, &f.psi_v);
                let k1 = -amb.inner(&nu_fd, &f.psi_u) / e;
                let k2 = -amb.inner(&nv_fd, &f.psi_v) / g;
                worst = worst.max((0.5 * (k1 + k2) - amb.h).abs());
            }
        }
        worst
    };
    let cmc_res = cmc_of(patch);
    let coarse_for_cmc = decimate(patch);
    let cmc_coarse = cmc_of(&coarse_for_cmc);
    let cmc_rate_ok = cmc_res < 1e-9 || (cmc_coarse / cmc_res > 2.0 && cmc_res < 1e-2);
    if !cmc_rate_ok {
        failures.push(format!(
            "mean curvature residual {cmc_res:.3e} not consistent with grid truncation (coarse {cmc_coarse:.3e})"
        ));
    }

    // --- mirror symmetry in u ---
    let mut mirror = 0.0_f64;
    for iu in 0..nu {
        for iv in 0..nv {
            let p = patch.frame(iu, iv).psi;
            let q = patch.frame(nu - 1 - iu, iv).psi;
            let refl = Vec4::new(q.x1(), q.x2(), -q.x3(), q.x4());
            mirror = mirror.max((p - refl).norm_euclid());
        }
    }
    if mirror > 10.0 * tol.residual {
        failures.push(format!("mirror symmetry residual {mirror:.3e}"));
    }

    // --- vertical plane reflections ---
    let sigma = patch.sigma;
    let hv = patch.vs[1] - patch.vs[0];
    let per_sigma = (sigma / hv).round() as usize;
    let mut plane_res = 0.0_f64;
    for k in 0..n as usize {
        let base = k * per_sigma;
        let nu_k = patch.frame(iu0, base).psi_v;
        let nn = amb.inner(&nu_k, &nu_k);
        for iu in (0..nu).step_by((nu / 8).max(1)) {
            for dv in 1..per_sigma {
                let (ip, im) = (base + dv, (base + nv - 1 - dv) % (nv - 1));
                let p_plus = patch.frame(iu, ip).psi;
                let p_minus = patch.frame(iu, im).psi;
                let refl = p_plus - nu_k * (2.0 * amb.inner(&p_plus, &nu_k) / nn);
                plane_res = plane_res.max((p_minus - refl).norm_euclid());
            }
        }
    }
    if plane_res > 10.0 * tol.residual {
        failures.push(format!("vertical plane residual {plane_res:.3e}"));
    }

    // --- rotation index of the central curve ---
    let rotation_index = {
        let iu_mid = iu0;
        let mut tangents = Vec::with_capacity(nv);
        for iv in 0..nv {
            let f = patch.frame(iu_mid, iv);
            let den = 1.0 + f.psi.x4();
            tangents.push([
                (f.psi_v.x1() * den - f.psi.x1() * f.psi_v.x4()) / (den * den),
                (f.psi_v.x2() * den - f.psi.x2() * f.psi_v.x4()) / (den * den),
            ]);
        }
        let mut total = 0.0;
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
                total += d;
            }
            prev = a;
        }
        (total / (2.0 * std::f64::consts::PI)).round() as i64
    };
    if rotation_index != m {
        failures.push(format!("rotation index {rotation_index} != {m}"));
    }

    // --- reflection axes of the central curve (angular scan) ---
    let (axes, rotational_orbit) = reflection_axes(patch, iu0);
    if !rotational_orbit && axes != n {
        failures.push(format!("found {axes} reflection axes, expected {n}"));
    }

    // --- closure gap ---
    let mut closure = 0.0_f64;
    for iu in 0..nu {
        closure = closure.max((patch.frame(iu, nv - 1).psi - patch.frame(iu, 0).psi).norm_euclid());
    }

    // --- embeddedness at two resolutions ---
    // crossing tests plus cover multiplicity: covers with |m| >= 2 are
    // immersions by construction (the rotational ones have coincident
    // sheets, which cross nowhere transversally), while simple covers
    // (m = -1) must come out crossing-free
    let self_crossing = mesh.self_intersects();
    let coarse_patch = decimate(patch);
    let coarse_mesh = TriMesh::from_patch(&coarse_patch, amb, true, 1e-5)?;
    let self_crossing_coarse = coarse_mesh.self_intersects();
    let embedded = m == -1 && !self_crossing && !self_crossing_coarse;
    if m == -1 && !embedded {
        failures.push("simple cover failed the embeddedness test".into());
    }

    let passed = failures.is_empty();
    Ok(AnnulusCertificate {
        a: patch.sp.a,
        b: patch.sp.b,
        c: patch.sp.c,
        u0,
        mode,
        rotation_index,
        n_planes: n,
        ball_center: ball_m,
        ball_d,
        max_cmc_residual: cmc_res,
        max_boundary_sphere_residual: sphere_res,
        max_sphericity_residual: sph_res,
        contact_angle_low: ang_lo,
        contact_angle_high: ang_hi,
        contact_angle_deviation: angle_dev,
        containment_margin: margin,
        mirror_residual: mirror,
        max_plane_residual: plane_res,
        reflection_axes_found: axes,
        rotational_orbit,
        self_crossing,
        self_crossing_coarse,
        embedded,
        closure_gap: closure,
        passed,
        failures,
    })
}

/// Reflection axes of the stereographic central curve: scan line angles
/// through the origin, count clustered passes. A rotational orbit (round
/// circle) passes at every angle and is reported separately.
///
/// Residuals are measured from reflected points to the closed polyline
/// (not to the sample set), with the tolerance floored at the chordal sag
/// of the discretization so the verdict is resolution-independent.
fn reflection_axes(patch: &SurfacePatch, iu0: usize) -> (i64, bool) {
    let nv = patch.nv() - 1; // closed curve: drop the duplicate column
    let pts: Vec<[f64; 2]> = (0..nv)
        .map(|iv| {
            let p = patch.frame(iu0, iv).psi;
            let den = 1.0 + p.x4();
            [p.x1() / den, p.x2() / den]
        })
        .collect();
    let scale = pts
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let seg_angle = 2.0 * std::f64::consts::PI / nv as f64;
    let tol = scale * (2e-4_f64).max(seg_angle * seg_angle);
    let dist_to_polyline = |q: [f64; 2]| -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..nv {
            let a = pts[i];
            let b = pts[(i + 1) % nv];
            let e = [b[0] - a[0], b[1] - a[1]];
            let w = [q[0] - a[0], q[1] - a[1]];
            let ee = e[0] * e[0] + e[1] * e[1];
            let t = if ee > 0.0 {
                ((w[0] * e[0] + w[1] * e[1]) / ee).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = (w[0] - t * e[0]).hypot(w[1] - t * e[1]);
            if d < best {
                best = d;
            }
        }
        best
    };
    let n_angles = 720;
    let mut pass = vec![false; n_angles];
    for (k, slot) in pass.iter_mut().enumerate() {
        let phi = std::f64::consts::PI * k as f64 / n_angles as f64;
        let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
        let mut worst = 0.0_f64;
        for p in pts.iter().step_by((nv / 96).max(1)) {
            let q = [c2 * p[0] + s2 * p[1], s2 * p[0] - c2 * p[1]];
            worst = worst.max(dist_to_polyline(q));
            if worst > tol {
                break;
            }
        }
        *slot = worst <= tol;
    }
    let n_pass = pass.iter().filter(|&&p| p).count();
    if n_pass > n_angles / 2 {
        return (n_pass as i64, true);
    }
    // cluster contiguous passes (wrap-around)
    let mut clusters = 0i64;
    for k in 0..n_angles {
        if pass[k] && !pass[(k + n_angles - 1) % n_angles] {
            clusters += 1;
        }
    }
    (clusters, false)
}

/// Half-resolution copy of a patch (every other grid node; the grid is
/// built with even cell counts so the symmetry nodes survive).
fn decimate(patch: &SurfacePatch) -> SurfacePatch {
    let (nu, nv) = (patch.nu(), patch.nv());
    let us: Vec<f64> = patch.us.iter().copied().step_by(2).collect();
    let vs: Vec<f64> = patch.vs.iter().copied().step_by(2).collect();
    let mut frames = Vec::with_capacity(us.len() * vs.len());
    let mut rho = Vec::with_capacity(us.len() * vs.len());
    for iu in (0..nu).step_by(2) {
        for iv in (0..nv).step_by(2) {
            frames.push(*patch.frame(iu, iv));
            rho.push(patch.rho_at(iu, iv));
        }
    }
    SurfacePatch {
        sp: patch.sp,
        amb: patch.amb,
        sigma: patch.sigma,
        us,
        vs,
        frames,
        rho,
        rebased: patch.rebased,
    }
}

/// Capillary family: seeds on the period level `-1/n` with the boundary
/// sphere condition `m3(u*) = 0` at a constant (non-right) contact angle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapillaryMember {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u_star: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapillaryFamily {
    pub n: i64,
    pub theta0: f64,
    /// True when the seed comes from the flat-torus corner rather than a
    /// free-boundary sweep.
    pub flat_torus_branch: bool,
    pub members: Vec<CapillaryMember>,
}

/// Construct capillary annulus seeds for the target `-1/n` in the sphere.
///
/// When `(mu - H)/(2 mu) <= 1/n^2` the free-boundary sweep provides the
/// seed; otherwise the level line is intersected with `{r3 = 1}` and the
/// seed is the flat torus there, with `u*` the first zero of the center
/// height below one profile turn.
pub fn capillary_family(
    n: i64,
    amb: &Ambient,
    perturbations: &[(f64, f64)],
) -> Result<CapillaryFamily> {
    if amb.eps < 0.0 {
        return Err(Error::Domain("capillary construction lives in the sphere".into()));
    }
    if n < 2 {
        return Err(Error::Domain("need n >= 2".into()));
    }
    let theta0 = -1.0 / n as f64;
    let fb_reachable = (amb.mu - amb.h) / (2.0 * amb.mu) <= 1.0 / (n * n) as f64 + 1e-14;
    let mut members = Vec::new();
    let (seed, flat) = if fb_reachable {
        let sweep = sweep_upsilon(theta0, amb)?;
        (SeedParams::new(1.0, sweep.b_star, sweep.c_star)?, false)
    } else {
        // intersect the level line with r3 = 1
        let t2 = theta0 * theta0;
        let slope = t2 / (1.0 - t2);
        let (_, r30) = period::upsilon_line(theta0, 0.0, amb);
        let r_alpha = (1.0 - r30) / slope;
        if r_alpha <= 0.0 {
            return Err(Error::RootNotFound(
                "level line does not reach the flat-torus edge".into(),
            ));
        }
        (sinh_system::seed_from_r1_r3(-r_alpha, 1.0)?, true)
    };
    // u* bracket: one turn of the profile in the flat case, tau-centered else
    let u_bar = if flat {
        (2.0 * amb.mu / (amb.mu + amb.h)).sqrt() * std::f64::consts::PI
    } else {
        let traj = sinh_system::integrate_hamiltonian(&seed, 16.0, 1e-12)?;
        2.0 * sinh_system::find_tau(&traj, amb)?
    };
    let u_star = frame::find_ustar(&seed, amb, (0.0, u_bar))?;
    let theta_seed = period::theta_of(seed.a, seed.b, seed.c, amb)?;
    if (theta_seed - theta0).abs() > 1e-8 {
        return Err(Error::RootNotFound(format!(
            "seed period {theta_seed} misses {theta0}"
        )));
    }
    members.push(CapillaryMember {
        a: seed.a,
        b: seed.b,
        c: seed.c,
        u_star,
        theta: theta_seed,
    });
    // two-parameter perturbations: (a, c) moves, b re-solved on the level
    for &(da, dc) in perturbations {
        let a = seed.a + da;
        let c = seed.c + dc;
        if a < 1.0 || c < 1.0 {
            return Err(Error::Domain(format!("perturbed seed ({a}, {c}) leaves the domain")));
        }
        let b = period::level_b(a, c, theta0, amb, seed.b)?;
        let sp = SeedParams::new(a, b, c)?;
        let u_star_k = frame::find_ustar(&sp, amb, (0.6 * u_star, 1.6 * u_star))?;
        members.push(CapillaryMember {
            a,
            b,
            c,
            u_star: u_star_k,
            theta: period::theta_of(a, b, c, amb)?,
        });
    }
    Ok(CapillaryFamily {
        n,
        theta0,
        flat_torus_branch: flat,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_intervals() {
        let amb = Ambient::new(-1, 2.0).unwrap();
        let j = interval_j(&amb);
        assert!((j.lo + (1.0 / 3.0_f64).sqrt()).abs() < 1e-15);
        assert_eq!(j.hi, 0.0);
        assert!(!j.empirical);
        // every -1/n with n >= 2 is admissible in the hyperbolic case
        for n in 2..=6 {
            assert!(j.contains(-1.0 / n as f64));
        }

        let amb = Ambient::new(1, 1.0).unwrap();
        let j = interval_j(&amb);
        assert!((j.lo + (1.0 / 3.0_f64).sqrt()).abs() < 1e-15);
        let expect = -((amb.mu - 1.0) / (2.0 * amb.mu)).sqrt();
        assert!((j.hi - expect).abs() < 1e-15);
        assert!(!j.empirical);

        // boundary case 8 H^2 = eps: interval right end meets -1/2
        let amb = Ambient::new(1, 1.0 / 3.0_f64.sqrt()).unwrap();
        let right = -((amb.mu - amb.h) / (2.0 * amb.mu)).sqrt();
        assert!((right + 0.5) < 1e-12, "equality case end {right}");

        // low-H sphere: empirical interval
        let amb = Ambient::new(1, 0.0).unwrap();
        let j = interval_j(&amb);
        assert!(j.empirical);
        assert!(j.hi > j.lo, "empirical interval must be nonempty: {j:?}");
    }

    #[test]
    fn sweep_rejects_targets_outside_interval() {
        let amb = Ambient::new(-1, 1.5).unwrap();
        assert!(sweep_upsilon(-0.9, &amb).is_err());
        assert!(sweep_upsilon(0.2, &amb).is_err());
    }

    #[test]
    fn sweep_succeeds_for_small_denominators() {
        // hyperbolic case: every -1/n with n in {2, 3, 4} admits a crossing
        let amb = Ambient::new(-1, 1.5).unwrap();
        for n in [2i64, 3, 4] {
            let sweep = sweep_upsilon(-1.0 / n as f64, &amb)
                .unwrap_or_else(|e| panic!("n = {n}: {e}"));
            // the walk starts with tau above the free-boundary value
            assert!(sweep.samples[0].1 > 0.0, "f(r_lo) must be positive");
            assert!(sweep.h_before * sweep.h_after < 0.0);
            // the height itself vanishes at the crossing
            let (r1, r3) = period::upsilon_line(-1.0 / n as f64, sweep.r_star, &amb);
            let sp = sinh_system::seed_from_r1_r3(r1, r3).unwrap();
            let h = frame::h_frak(&sp, &amb).unwrap();
            assert!(h.abs() < 1e-6, "height at the crossing = {h:.3e}");
        }
    }

    #[test]
    fn center_height_agrees_with_axis_point() {
        // two independent routes to the same number: the frame pipeline's
        // normalized center height at tau, and the rotational pipeline's
        // axis point of the tangent geodesic at the matching arclength.
        // The continuity-normalized center is the antipodal representative
        // of the geometric ball center, hence the sign flip.
        for (amb, b, c) in [
            (Ambient::new(-1, 1.5).unwrap(), 9.0, 2.55),
            (Ambient::new(1, 1.0).unwrap(), 3.0, 1.6),
        ] {
            let sp = SeedParams::new(1.0, b, c).unwrap();
            assert!(sinh_system::region_flags(&sp, &amb).in_w_hat);
            let h = frame::h_frak(&sp, &amb).unwrap();
            let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12).unwrap();
            let tau = sinh_system::find_tau(&traj, &amb).unwrap();
            let delta = rotational::delta_for_neck(c, &amb).unwrap();
            let p = rotational::RotationalParams::new(amb.eps, amb.h, delta).unwrap();
            let profile = rotational::integrate_profile(&p, 10.0).unwrap();
            let map = rotational::arclength_map(&SeedParams::new(1.0, 1.0, c).unwrap(), &amb, tau + 1.0)
                .unwrap();
            let axis_pt = rotational::hat_p(&profile, map.s_of_u(tau)).unwrap();
            assert!(
                (h + axis_pt.x3()).abs() < 1e-9,
                "height {h:.3e} vs axis point {:.3e} (eps = {})",
                axis_pt.x3(),
                amb.eps
            );
        }
    }

    #[test]
    fn sweep_at_the_interval_corner() {
        // H = 1/sqrt(3): the target -1/2 sits exactly on the interval's
        // right endpoint and the level line starts on the region corner
        // r3 = 1; the walk enters just inside and the limit of tau - u~
        // near the corner is positive
        let h = 1.0 / 3.0_f64.sqrt();
        let amb = Ambient::new(1, h).unwrap();
        let (_, r30) = period::upsilon_line(-0.5, 0.0, &amb);
        assert!((r30 - 1.0).abs() < 1e-12, "corner case must have r30 = 1");
        let sweep = sweep_upsilon(-0.5, &amb).unwrap();
        assert!(sweep.samples[0].1 > 0.0);
        assert!(sweep.h_before * sweep.h_after < 0.0);
    }

    #[test]
    fn sweep_in_the_empirical_interval() {
        // low-H sphere: the admissible interval is detected by scan and the
        // level lines are steep (entering the region from below); the
        // crossing search must still bracket and certify a sign change
        let amb = Ambient::new(1, 0.0).unwrap();
        let j = interval_j(&amb);
        assert!(j.empirical && j.hi > j.lo);
        let theta0 = 0.5 * (j.lo + j.hi);
        let sweep = sweep_upsilon(theta0, &amb).unwrap();
        assert!(sweep.r_star > 0.0);
        assert!(sweep.h_before * sweep.h_after < 0.0);
        // crossing is a genuine zero of tau - u~
        let (r1, r3) = period::upsilon_line(theta0, sweep.r_star, &amb);
        let sp = sinh_system::seed_from_r1_r3(r1, r3).unwrap();
        let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12).unwrap();
        let tau = sinh_system::find_tau(&traj, &amb).unwrap();
        let f = tau - rotational::tilde_u(r3, &amb).unwrap();
        assert!(f.abs() < 1e-8, "f(r*) = {f:.3e}");
    }

    #[test]
    fn seed_annulus_is_rotational_cover() {
        // at the crossing itself (eta = 0) the assembled annulus is the
        // trivial cover of an embedded rotational annulus, with the
        // right-angle contact encoded by y = z at tau
        let amb = Ambient::new(-1, 1.5).unwrap();
        let sweep = sweep_upsilon(-0.5, &amb).unwrap();
        let sp = SeedParams::new(1.0, sweep.b_star, sweep.c_star).unwrap();
        let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12).unwrap();
        let tau = sinh_system::find_tau(&traj, &amb).unwrap();
        let beta_tau = (traj.y(tau) - traj.z(tau)) / (2.0 * amb.mu);
        assert!(beta_tau.abs() < 1e-8, "beta(tau) = {beta_tau:.3e}");
        let (patch, mesh) = build_annulus(&sp, tau, -1, 2, &amb, 32, 128).unwrap();
        let cert = certify(
            &patch,
            &mesh,
            -1,
            2,
            ContactMode::FreeBoundary,
            &amb,
            &CertTolerances::default(),
        )
        .unwrap();
        assert!(cert.passed, "failures: {:?}", cert.failures);
        assert!(cert.rotational_orbit, "seed cover must look rotational");
        assert!(cert.embedded);
        assert_eq!(cert.rotation_index, -1);
    }

    #[test]
    fn double_cover_is_immersed_not_embedded() {
        // target -2/5: the critical rotational annulus is a double cover of a
        // nodoid; the central curve has rotation index -2 and the mesh must
        // self-intersect, while every residual check still passes
        let amb = Ambient::new(-1, 1.5).unwrap();
        let sweep = sweep_upsilon(-0.4, &amb).unwrap();
        let sp = SeedParams::new(1.0, sweep.b_star, sweep.c_star).unwrap();
        let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12).unwrap();
        let tau = sinh_system::find_tau(&traj, &amb).unwrap();
        let (patch, mesh) = build_annulus(&sp, tau, -2, 5, &amb, 24, 200).unwrap();
        let cert = certify(
            &patch,
            &mesh,
            -2,
            5,
            ContactMode::FreeBoundary,
            &amb,
            &CertTolerances::default(),
        )
        .unwrap();
        assert_eq!(cert.rotation_index, -2);
        assert!(!cert.embedded, "double cover cannot be embedded");
        // coincident sheets: no transversal crossing exists to detect
        assert!(!cert.self_crossing);
        assert!(cert.passed, "residual checks must still pass: {:?}", cert.failures);
        assert!((cert.contact_angle_low - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn capillary_seed_from_sweep_when_reachable() {
        // H >= 1/sqrt(3): the free-boundary sweep provides the capillary
        // seed, and u* coincides with the orthogonal-contact parameter
        let amb = Ambient::new(1, 1.0).unwrap();
        assert!((amb.mu - amb.h) / (2.0 * amb.mu) <= 0.25);
        let fam = capillary_family(2, &amb, &[]).unwrap();
        assert!(!fam.flat_torus_branch);
        let seed = &fam.members[0];
        assert!((seed.a - 1.0).abs() < 1e-14);
        let sp = SeedParams::new(seed.a, seed.b, seed.c).unwrap();
        let traj = sinh_system::integrate_hamiltonian(&sp, 16.0, 1e-12).unwrap();
        let tau = sinh_system::find_tau(&traj, &amb).unwrap();
        assert!(
            (seed.u_star - tau).abs() < 1e-8,
            "u* = {} vs tau = {tau}",
            seed.u_star
        );
    }

    #[test]
    fn build_annulus_refuses_irrational_period() {
        let amb = Ambient::new(1, 0.0).unwrap();
        // theta(1, 1, 2) = -sqrt(17)/5, not -1/2
        let sp = SeedParams::new(1.0, 1.0, 2.0).unwrap();
        let err = build_annulus(&sp, 0.5, -1, 2, &amb, 8, 32);
        assert!(err.is_err());
        // reducible target rejected
        let err = build_annulus(&sp, 0.5, -2, 4, &amb, 8, 32);
        assert!(err.is_err());
    }
}
