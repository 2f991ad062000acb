//! Gauss–Weingarten frame integration: realizing the immersion
//! `psi(u, v)` in `M^3(eps)` from a seed, together with the center curve of
//! the spherical curvature lines, the vertical symmetry planes, and the
//! rebasing isometry that moves the center plane onto `{x1 = x2 = 0}`.
//!
//! Integration is organized around the symmetric line `v = 0`: the "spine"
//! ODE advances the full frame in `u` along `v = 0` (where `rho_v = 0` by
//! symmetry), then each grid value of `u` fans out along its `v`-curvature
//! line. On a `v`-line the oscillator values `(y, z, y', z')` are constants,
//! so both sweeps are autonomous ODE systems with closed-form coefficients;
//! no interpolated field data enters the frame equations.

use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution};
use crate::roots;
use crate::sinh_system::{HamiltonianTrajectory, RhoField, SeedParams, find_tau, integrate_hamiltonian};
use crate::spaceform::{Ambient, Vec4};

/// Orthogonal frame at one grid node.
#[derive(Clone, Copy, Debug)]
pub struct MovingFrame {
    pub psi: Vec4,
    pub psi_u: Vec4,
    pub psi_v: Vec4,
    pub n: Vec4,
}

impl MovingFrame {
    /// Largest residual among the six Gram conditions
    /// (`|psi|^2 = eps`, `|N|^2 = 1`, `|psi_u|^2 = |psi_v|^2 = e^{2 rho}/(4 mu^2)`,
    /// all products zero).
    pub fn gram_residual(&self, rho: f64, amb: &Ambient) -> f64 {
        let g = (2.0 * rho).exp() / (4.0 * amb.mu * amb.mu);
        let ip = |x: &Vec4, y: &Vec4| amb.inner(x, y);
        [
            ip(&self.psi, &self.psi) - amb.eps,
            ip(&self.n, &self.n) - 1.0,
            ip(&self.psi_u, &self.psi_u) - g,
            ip(&self.psi_v, &self.psi_v) - g,
            ip(&self.psi, &self.n),
            ip(&self.psi, &self.psi_u),
            ip(&self.psi, &self.psi_v),
            ip(&self.n, &self.psi_u),
            ip(&self.n, &self.psi_v),
            ip(&self.psi_u, &self.psi_v),
        ]
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

/// Isometry of `R^4_eps` acting on the `(x1, x4)` plane (rotation for
/// `eps = +1`, boost for `eps = -1`), fixing `e2` and `e3`.
#[derive(Clone, Copy, Debug)]
pub struct RebaseMap {
    eps: f64,
    c: f64,
    s: f64,
}

impl RebaseMap {
    pub fn identity(eps: f64) -> Self {
        RebaseMap { eps, c: 1.0, s: 0.0 }
    }

    /// Map sending the unit vector with `(x1, x4)` components `(w1, w4)`
    /// to `e4` (after flipping to the `w4 > 0` representative).
    fn sending_to_e4(eps: f64, mut w1: f64, mut w4: f64) -> Result<Self> {
        if w4 < 0.0 {
            w1 = -w1;
            w4 = -w4;
        }
        if eps > 0.0 {
            let n = w1.hypot(w4);
            Ok(RebaseMap {
                eps,
                c: w4 / n,
                s: w1 / n,
            })
        } else {
            let q = w4 * w4 - w1 * w1;
            if q <= 0.0 {
                return Err(Error::Degenerate(
                    "center direction not timelike: seed outside the two-plane region".into(),
                ));
            }
            let n = q.sqrt();
            Ok(RebaseMap {
                eps,
                c: w4 / n,
                s: w1 / n,
            })
        }
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let [x1, x2, x3, x4] = v.0;
        if self.eps > 0.0 {
            Vec4([self.c * x1 - self.s * x4, x2, x3, self.s * x1 + self.c * x4])
        } else {
            Vec4([self.c * x1 - self.s * x4, x2, x3, -self.s * x1 + self.c * x4])
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.c - 1.0).abs() <= tol && self.s.abs() <= tol
    }
}

// ---------------------------------------------------------------------------
// spine: the u-line at v = 0
// ---------------------------------------------------------------------------

// State layout: [y, z, y', z', rho, psi, psi_u, psi_v, N, arclen] (22 slots).
const SP_RHO: usize = 4;
const SP_PSI: usize = 5;
const SP_PSIU: usize = 9;
const SP_PSIV: usize = 13;
const SP_N: usize = 17;
const SP_ARC: usize = 21;

fn vec4_at(s: &[f64; 22], k: usize) -> Vec4 {
    Vec4([s[k], s[k + 1], s[k + 2], s[k + 3]])
}

fn spine_rhs(amb: Ambient, a_hat: f64) -> impl Fn(f64, &[f64; 22]) -> [f64; 22] {
    move |_u, s| {
        let (y, z, yp, zp, rho) = (s[0], s[1], s[2], s[3], s[SP_RHO]);
        let w = y * y - z * z;
        let rho_u = y * rho.cosh() + z * rho.sinh();
        let e2r = (2.0 * rho).exp();
        let mu = amb.mu;
        let cn = (amb.h * e2r + mu) / (4.0 * mu * mu);
        let cp = amb.eps * e2r / (4.0 * mu * mu);
        let k1 = amb.h + mu * (-2.0 * rho).exp();
        let mut d = [0.0; 22];
        d[0] = yp;
        d[1] = zp;
        d[2] = (a_hat - 1.0) * y - 2.0 * y * w;
        d[3] = a_hat * z - 2.0 * z * w;
        d[SP_RHO] = rho_u;
        // psi_uu = rho_u psi_u + cn N - cp psi   (rho_v = 0 on this line)
        for i in 0..4 {
            let psi = s[SP_PSI + i];
            let psiu = s[SP_PSIU + i];
            let psiv = s[SP_PSIV + i];
            let n = s[SP_N + i];
            d[SP_PSI + i] = psiu;
            d[SP_PSIU + i] = rho_u * psiu + cn * n - cp * psi;
            d[SP_PSIV + i] = rho_u * psiv; // psi_uv with rho_v = 0
            d[SP_N + i] = -k1 * psiu;
        }
        d[SP_ARC] = rho.exp() / (2.0 * mu);
        d
    }
}

/// Dense frame data along the symmetric line `v = 0`, both `u` directions.
#[derive(Clone, Debug)]
pub struct Spine {
    pub sp: SeedParams,
    pub amb: Ambient,
    pub rebased: bool,
    fwd: DenseSolution<22>,
    bwd: DenseSolution<22>,
    pub u_max: f64,
}

impl Spine {
    pub fn state(&self, u: f64) -> [f64; 22] {
        if u >= 0.0 {
            self.fwd.eval(u)
        } else {
            self.bwd.eval(u)
        }
    }

    pub fn frame(&self, u: f64) -> MovingFrame {
        let s = self.state(u);
        MovingFrame {
            psi: vec4_at(&s, SP_PSI),
            psi_u: vec4_at(&s, SP_PSIU),
            psi_v: vec4_at(&s, SP_PSIV),
            n: vec4_at(&s, SP_N),
        }
    }

    pub fn rho(&self, u: f64) -> f64 {
        self.state(u)[SP_RHO]
    }

    /// Arclength of the profile curve from `0` to `u` (odd in `u`).
    pub fn arclength(&self, u: f64) -> f64 {
        self.state(u)[SP_ARC]
    }

    /// Invert the (strictly increasing) arclength map on `[0, u_max]`.
    pub fn u_of_arclength(&self, s: f64) -> Result<f64> {
        if s < 0.0 || s > self.arclength(self.u_max) {
            return Err(Error::Domain(format!(
                "arclength {s} outside [0, {}]",
                self.arclength(self.u_max)
            )));
        }
        roots::refine(|u| self.arclength(u) - s, 0.0, self.u_max, 1e-13)
    }

    /// Center direction `m~(u)` of the spherical curvature line through
    /// `(u, 0)`: constant along the line, analytic in `u`.
    pub fn m_tilde(&self, u: f64) -> Vec4 {
        let s = self.state(u);
        let (y, z, rho) = (s[0], s[1], s[SP_RHO]);
        let mu = self.amb.mu;
        let psi = vec4_at(&s, SP_PSI);
        let psi_u = vec4_at(&s, SP_PSIU);
        let n = vec4_at(&s, SP_N);
        psi_u * (-rho).exp()
            + n * (-(y - z) / (2.0 * mu))
            + psi * (-(mu * (y + z) + self.amb.h * (y - z)) / (2.0 * mu))
    }

    /// Height `m3(u)` of the normalized center; the sign follows the
    /// analytic continuation of `m~` with `m3(0) = +1`.
    ///
    /// Errors when `eps <m~, m~>` is not positive (hyperbolic case with a
    /// non-compact umbilic leaf: no sphere normalization exists there).
    pub fn center_height(&self, u: f64) -> Result<f64> {
        let mt = self.m_tilde(u);
        let q = self.amb.eps * self.amb.inner(&mt, &mt);
        if q <= 0.0 {
            return Err(Error::Degenerate(format!(
                "center at u = {u} is not sphere-like (eps <m~, m~> = {q:.3e})"
            )));
        }
        Ok(mt.x3() / q.sqrt())
    }
}

/// Initial frame at `(0, 0)`: `psi = e4`, `psi_u = (e^rho00 / 2 mu) e3`,
/// `psi_v = -(e^rho00 / 2 mu) e2`, `N = e1`, optionally pushed through the
/// rebasing isometry.
pub fn initial_frame(sp: &SeedParams, amb: &Ambient, rebased: bool) -> Result<(MovingFrame, RebaseMap)> {
    let r0 = sp.rho00.exp();
    let scale = r0 / (2.0 * amb.mu);
    let base = MovingFrame {
        psi: Vec4::E4,
        psi_u: Vec4::E3 * scale,
        psi_v: -(Vec4::E2 * scale),
        n: Vec4::E1,
    };
    if !rebased {
        return Ok((base, RebaseMap::identity(amb.eps)));
    }
    let map = rebase_map_for(&base, sp, amb)?;
    Ok((
        MovingFrame {
            psi: map.apply(&base.psi),
            psi_u: map.apply(&base.psi_u),
            psi_v: map.apply(&base.psi_v),
            n: map.apply(&base.n),
        },
        map,
    ))
}

/// Rebasing map for a patch whose frame at `(0, 0)` is `f0`: sends the
/// direction of `m~'(0)` (a combination of `N(0,0)` and `psi(0,0)` only)
/// to `e4`, fixing `e2, e3`.
fn rebase_map_for(f0: &MovingFrame, sp: &SeedParams, amb: &Ambient) -> Result<RebaseMap> {
    let r0 = sp.rho00.exp();
    let mu = amb.mu;
    // m~'(0) = cn * N(0,0) + cp * psi(0,0)
    let cn = (amb.h * r0 + mu / r0) / (4.0 * mu * mu) - (sp.yp0 - sp.zp0) / (2.0 * mu);
    let cp = -amb.eps * r0 / (4.0 * mu * mu)
        - (mu * (sp.yp0 + sp.zp0) + amb.h * (sp.yp0 - sp.zp0)) / (2.0 * mu);
    let w = f0.n * cn + f0.psi * cp;
    if w.x2().abs() > 1e-9 || w.x3().abs() > 1e-9 {
        return Err(Error::Degenerate(
            "frame at the origin has drifted out of the (x1, x4) plane".into(),
        ));
    }
    RebaseMap::sending_to_e4(amb.eps, w.x1(), w.x4())
}

/// Integrate the spine over `[-u_max, u_max]`.
pub fn integrate_spine(
    sp: &SeedParams,
    amb: &Ambient,
    u_max: f64,
    rebased: bool,
    tol: f64,
) -> Result<Spine> {
    let (f0, _) = initial_frame(sp, amb, rebased)?;
    let mut y0 = [0.0; 22];
    y0[0] = 0.0;
    y0[1] = 0.0;
    y0[2] = sp.yp0;
    y0[3] = sp.zp0;
    y0[SP_RHO] = sp.rho00;
    y0[SP_PSI..SP_PSI + 4].copy_from_slice(&f0.psi.0);
    y0[SP_PSIU..SP_PSIU + 4].copy_from_slice(&f0.psi_u.0);
    y0[SP_PSIV..SP_PSIV + 4].copy_from_slice(&f0.psi_v.0);
    y0[SP_N..SP_N + 4].copy_from_slice(&f0.n.0);
    let rhs = spine_rhs(*amb, sp.a_hat);
    let fwd = ode::integrate(&rhs, 0.0, u_max, y0, tol, tol)?;
    let bwd = ode::integrate(&rhs, 0.0, -u_max, y0, tol, tol)?;
    Ok(Spine {
        sp: *sp,
        amb: *amb,
        rebased,
        fwd,
        bwd,
        u_max,
    })
}

// ---------------------------------------------------------------------------
// v-lines
// ---------------------------------------------------------------------------

// State layout: [psi, psi_u, psi_v, N, rho, rho_v] (18 slots).
const VL_PSI: usize = 0;
const VL_PSIU: usize = 4;
const VL_PSIV: usize = 8;
const VL_N: usize = 12;
const VL_RHO: usize = 16;
const VL_RHOV: usize = 17;

fn vline_rhs(amb: Ambient, yz: [f64; 4]) -> impl Fn(f64, &[f64; 18]) -> [f64; 18] {
    move |_v, s| {
        let [y, z, yp, zp] = yz;
        let rho = s[VL_RHO];
        let rho_v = s[VL_RHOV];
        let rho_u = y * rho.cosh() + z * rho.sinh();
        // rho_uu along the line, then the sinh-Gordon equation gives rho_vv
        let rho_uu = yp * rho.cosh()
            + zp * rho.sinh()
            + (y * rho.sinh() + z * rho.cosh()) * rho_u;
        let rho_vv = -rho_uu - rho.cosh() * rho.sinh();
        let e2r = (2.0 * rho).exp();
        let mu = amb.mu;
        let cn = (amb.h * e2r - mu) / (4.0 * mu * mu);
        let cp = amb.eps * e2r / (4.0 * mu * mu);
        let k2 = amb.h - mu * (-2.0 * rho).exp();
        let mut d = [0.0; 18];
        for i in 0..4 {
            let psi = s[VL_PSI + i];
            let psiu = s[VL_PSIU + i];
            let psiv = s[VL_PSIV + i];
            let n = s[VL_N + i];
            d[VL_PSI + i] = psiv;
            d[VL_PSIU + i] = rho_v * psiu + rho_u * psiv; // psi_uv
            d[VL_PSIV + i] = -rho_u * psiu + rho_v * psiv + cn * n - cp * psi;
            d[VL_N + i] = -k2 * psiv;
        }
        d[VL_RHO] = rho_v;
        d[VL_RHOV] = rho_vv;
        d
    }
}

/// Dense frame data along one `v`-curvature line.
#[derive(Clone, Debug)]
pub struct VLine {
    sol: DenseSolution<18>,
    pub u: f64,
    pub v_max: f64,
}

impl VLine {
    pub fn frame(&self, v: f64) -> MovingFrame {
        let s = self.sol.eval(v);
        MovingFrame {
            psi: vec4_at18(&s, VL_PSI),
            psi_u: vec4_at18(&s, VL_PSIU),
            psi_v: vec4_at18(&s, VL_PSIV),
            n: vec4_at18(&s, VL_N),
        }
    }

    pub fn rho(&self, v: f64) -> f64 {
        self.sol.eval(v)[VL_RHO]
    }
}

fn vec4_at18(s: &[f64; 18], k: usize) -> Vec4 {
    Vec4([s[k], s[k + 1], s[k + 2], s[k + 3]])
}

/// Fan out a `v`-line from the spine state at `u`, after restoring the
/// frame Gram matrix there (long sweeps drift; the frame is exactly
/// orthogonal-conformal, so the correction is a projection).
pub fn integrate_vline(spine: &Spine, u: f64, v_max: f64, tol: f64) -> Result<VLine> {
    let st = spine.state(u);
    let amb = spine.amb;
    let mut frame = MovingFrame {
        psi: vec4_at(&st, SP_PSI),
        psi_u: vec4_at(&st, SP_PSIU),
        psi_v: vec4_at(&st, SP_PSIV),
        n: vec4_at(&st, SP_N),
    };
    let rho = st[SP_RHO];
    gram_restore(&mut frame, rho, &amb);
    let mut y0 = [0.0; 18];
    y0[VL_PSI..VL_PSI + 4].copy_from_slice(&frame.psi.0);
    y0[VL_PSIU..VL_PSIU + 4].copy_from_slice(&frame.psi_u.0);
    y0[VL_PSIV..VL_PSIV + 4].copy_from_slice(&frame.psi_v.0);
    y0[VL_N..VL_N + 4].copy_from_slice(&frame.n.0);
    y0[VL_RHO] = rho;
    y0[VL_RHOV] = 0.0; // v = 0 is a symmetry line of rho
    let yz = [st[0], st[1], st[2], st[3]];
    let sol = ode::integrate(vline_rhs(amb, yz), 0.0, v_max, y0, tol, tol)?;
    Ok(VLine { sol, u, v_max })
}

/// Project the frame back onto its exact Gram matrix (signed
/// Gram–Schmidt, normalizing `psi` to `eps`, `N` to `1`, the tangents to
/// `e^rho / (2 mu)`).
fn gram_restore(f: &mut MovingFrame, rho: f64, amb: &Ambient) {
    let ip = |x: &Vec4, y: &Vec4| amb.inner(x, y);
    let scale = rho.exp() / (2.0 * amb.mu);
    let psi_n = ip(&f.psi, &f.psi) / amb.eps;
    f.psi = f.psi * (1.0 / psi_n.sqrt());
    let proj = |v: Vec4, w: &Vec4, amb: &Ambient| {
        let ww = amb.inner(w, w);
        v - *w * (amb.inner(&v, w) / ww)
    };
    f.n = proj(f.n, &f.psi, amb);
    f.n = f.n * (1.0 / ip(&f.n, &f.n).sqrt());
    f.psi_u = proj(proj(f.psi_u, &f.psi, amb), &f.n, amb);
    f.psi_u = f.psi_u * (scale / ip(&f.psi_u, &f.psi_u).sqrt());
    f.psi_v = proj(proj(proj(f.psi_v, &f.psi, amb), &f.n, amb), &f.psi_u, amb);
    f.psi_v = f.psi_v * (scale / ip(&f.psi_v, &f.psi_v).sqrt());
}

// ---------------------------------------------------------------------------
// patches
// ---------------------------------------------------------------------------

/// Grid of frames over `[-u0, u0] x [0, v_max]`, row-major in `u`.
#[derive(Clone, Debug)]
pub struct SurfacePatch {
    pub sp: SeedParams,
    pub amb: Ambient,
    pub sigma: f64,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub frames: Vec<MovingFrame>,
    pub rho: Vec<f64>,
    pub rebased: bool,
}

impl SurfacePatch {
    pub fn frame(&self, iu: usize, iv: usize) -> &MovingFrame {
        &self.frames[iu * self.vs.len() + iv]
    }

    pub fn rho_at(&self, iu: usize, iv: usize) -> f64 {
        self.rho[iu * self.vs.len() + iv]
    }

    pub fn nu(&self) -> usize {
        self.us.len()
    }

    pub fn nv(&self) -> usize {
        self.vs.len()
    }

    /// Worst frame Gram residual over the grid.
    pub fn max_gram_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for iu in 0..self.nu() {
            for iv in 0..self.nv() {
                worst = worst.max(self.frame(iu, iv).gram_residual(self.rho_at(iu, iv), &self.amb));
            }
        }
        worst
    }

    /// Index of the grid row at `u = 0`.
    pub fn iu_zero(&self) -> usize {
        self.us
            .iter()
            .position(|&u| u.abs() < 1e-12)
            .expect("u grid contains 0")
    }
}

/// Shared patch builder: spine + one v-line per `u` node.
pub fn build_patch(
    sp: &SeedParams,
    amb: &Ambient,
    u0: f64,
    v_max: f64,
    nu: usize,
    nv: usize,
    rebased: bool,
    tol: f64,
) -> Result<SurfacePatch> {
    if nu < 2 || nv < 2 {
        return Err(Error::Domain("patch grid needs at least 2x2 nodes".into()));
    }
    let sigma = crate::sinh_system::sigma(sp)?;
    let spine = integrate_spine(sp, amb, u0.max(1e-9), rebased, tol)?;
    // symmetric u grid including 0 (nu cells per half)
    let us: Vec<f64> = (0..=2 * nu)
        .map(|i| -u0 + i as f64 * u0 / nu as f64)
        .collect();
    let vs: Vec<f64> = (0..=nv).map(|j| j as f64 * v_max / nv as f64).collect();
    let mut frames = Vec::with_capacity(us.len() * vs.len());
    let mut rho = Vec::with_capacity(us.len() * vs.len());
    for &u in &us {
        let line = integrate_vline(&spine, u, v_max, tol)?;
        for &v in &vs {
            frames.push(line.frame(v));
            rho.push(line.rho(v));
        }
    }
    let patch = SurfacePatch {
        sp: *sp,
        amb: *amb,
        sigma,
        us,
        vs,
        frames,
        rho,
        rebased,
    };
    let drift = patch.max_gram_residual();
    if drift > 1e-5 {
        return Err(Error::Integration {
            at: u0,
            what: format!("frame drift {drift:.3e} exceeds abort threshold"),
        });
    }
    Ok(patch)
}

/// Realize the immersion over the grid of a precomputed `rho` field.
///
/// The patch covers the same `[-u_max, u_max] x [0, 2 sigma]` rectangle as
/// the field, in the un-rebased frame position.
pub fn integrate_frame(
    rho_field: &RhoField,
    _traj: &HamiltonianTrajectory,
    amb: &Ambient,
) -> Result<SurfacePatch> {
    let u_max = *rho_field.us.last().unwrap();
    let nu = (rho_field.us.len() - 1) / 2;
    let nv = rho_field.vs.len() - 1;
    build_patch(
        &rho_field.sp,
        amb,
        u_max,
        *rho_field.vs.last().unwrap(),
        nu.max(1),
        nv,
        false,
        1e-11,
    )
}

/// Apply the rebasing isometry to a whole patch, chosen so that the plane
/// of the center curve becomes `{x1 = x2 = 0}`. Idempotent on an already
/// rebased patch.
pub fn rebase(patch: &SurfacePatch) -> Result<SurfacePatch> {
    let iu0 = patch.iu_zero();
    let f0 = patch.frame(iu0, 0);
    let map = rebase_map_for(f0, &patch.sp, &patch.amb)?;
    let mut out = patch.clone();
    for f in &mut out.frames {
        *f = MovingFrame {
            psi: map.apply(&f.psi),
            psi_u: map.apply(&f.psi_u),
            psi_v: map.apply(&f.psi_v),
            n: map.apply(&f.n),
        };
    }
    out.rebased = true;
    Ok(out)
}

// ---------------------------------------------------------------------------
// center curve
// ---------------------------------------------------------------------------

/// Sampled center data of the curvature-line foliation along `v = 0`.
#[derive(Clone, Debug)]
pub struct CenterCurve {
    pub us: Vec<f64>,
    pub m_tilde: Vec<Vec4>,
    /// Normalized centers (`<m, m> in {-1, +1}`), sign continued from
    /// `m3(0) = +1`.
    pub m: Vec<Vec4>,
    pub d: Vec<f64>,
    /// Contact angle of the surface against `S[m, d]` along each line.
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// False where `eps <m~, m~> <= 0` (non-compact leaf, hyperbolic only);
    /// such entries carry `m` normalized by `|<m~, m~>|` instead.
    pub sphere_like: Vec<bool>,
}

/// Evaluate the center curve on the patch's `u` grid.
///
/// The centers are computed from the spine formula for `m~` and normalized
/// against the ambient metric; `d(u)` is fixed by `<psi(u, 0), m(u)>`.
pub fn center_curve(patch: &SurfacePatch, traj: &HamiltonianTrajectory) -> Result<CenterCurve> {
    let amb = patch.amb;
    let mu = amb.mu;
    let mut out = CenterCurve {
        us: patch.us.clone(),
        m_tilde: Vec::new(),
        m: Vec::new(),
        d: Vec::new(),
        theta: Vec::new(),
        alpha: Vec::new(),
        beta: Vec::new(),
        sphere_like: Vec::new(),
    };
    for (iu, &u) in patch.us.iter().enumerate() {
        let f = patch.frame(iu, 0);
        let rho = patch.rho_at(iu, 0);
        let [y, z, _, _] = traj.state(u);
        let mt = f.psi_u * (-rho).exp()
            + f.n * (-(y - z) / (2.0 * mu))
            + f.psi * (-(mu * (y + z) + amb.h * (y - z)) / (2.0 * mu));
        let q = amb.eps * amb.inner(&mt, &mt);
        let sphere_like = q > 1e-13;
        let norm = if sphere_like { q.sqrt() } else { amb.inner(&mt, &mt).abs().max(1e-300).sqrt() };
        let m = mt * (1.0 / norm);
        let d = amb.inner(&f.psi, &m);
        // contact angle from the sphere normal m - eps d psi
        let nhat = m - f.psi * (amb.eps * d);
        let nhat_norm = amb.inner(&nhat, &nhat).max(0.0).sqrt();
        let cos_theta = if nhat_norm > 1e-14 {
            (amb.inner(&f.n, &nhat) / nhat_norm).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        out.m_tilde.push(mt);
        out.m.push(m);
        out.d.push(d);
        out.theta.push(cos_theta.acos());
        out.alpha.push(2.0 * mu * (y + z));
        out.beta.push((y - z) / (2.0 * mu));
        out.sphere_like.push(sphere_like);
    }
    Ok(out)
}

/// `m3` at the orthogonal-contact parameter `tau`: the quantity whose zero
/// certifies that both boundary circles share one umbilic sphere.
pub fn h_frak(sp: &SeedParams, amb: &Ambient) -> Result<f64> {
    h_frak_with_tau(sp, amb).map(|(h, _)| h)
}

/// Same as [`h_frak`], also returning `tau`.
pub fn h_frak_with_tau(sp: &SeedParams, amb: &Ambient) -> Result<(f64, f64)> {
    let traj = integrate_hamiltonian(sp, 14.0, 1e-12)?;
    let tau = find_tau(&traj, amb)?;
    let spine = integrate_spine(sp, amb, tau * (1.0 + 1e-6) + 1e-9, true, 1e-12)?;
    Ok((spine.center_height(tau)?, tau))
}

/// First zero of `m3(u)` inside `bracket`, with a nonzero-slope check.
///
/// Zeros of the normalized height coincide with zeros of the third
/// component of `m~`, which is analytic, so the root find runs on that.
pub fn find_ustar(sp: &SeedParams, amb: &Ambient, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(0.0 <= lo && lo < hi) {
        return Err(Error::Domain(format!("bad bracket ({lo}, {hi})")));
    }
    let spine = integrate_spine(sp, amb, hi * (1.0 + 1e-9), true, 1e-12)?;
    let m3 = |u: f64| spine.m_tilde(u).x3();
    let u_star = roots::first_root(|u| Some(m3(u)), lo.max(1e-9), hi, (hi - lo) / 400.0, 1e-13)?;
    let h = 1e-6;
    let slope = (m3(u_star + h) - m3(u_star - h)) / (2.0 * h);
    if slope.abs() < 1e-10 {
        return Err(Error::Degenerate(format!(
            "m3 has a degenerate (flat) zero at u = {u_star}"
        )));
    }
    Ok(u_star)
}

// ---------------------------------------------------------------------------
// symmetry planes
// ---------------------------------------------------------------------------

/// Normals `nu_k = psi_v(0, k sigma)` of the vertical symmetry planes and
/// the derived data.
#[derive(Clone, Debug)]
pub struct SymmetryData {
    pub nu: Vec<Vec4>,
    /// Gram matrix of `(nu_0, nu_1)`.
    pub gram: [[f64; 2]; 2],
    /// Positivity of the Gram determinant: the plane normals span a
    /// spacelike 2-plane and the construction is non-degenerate.
    pub o_minus: bool,
    /// Angle between consecutive normals inside their common plane.
    pub angles: Vec<f64>,
}

/// Extract the vertical-plane data from a patch covering `v` up to
/// `k_max * sigma`.
pub fn symmetry_planes(patch: &SurfacePatch, k_max: usize) -> Result<SymmetryData> {
    let sigma = patch.sigma;
    let iu0 = patch.iu_zero();
    let v_max = *patch.vs.last().unwrap();
    if (k_max as f64) * sigma > v_max + 1e-9 {
        return Err(Error::Domain(format!(
            "patch covers v <= {v_max}, need {} sigma",
            k_max
        )));
    }
    let hv = patch.vs[1] - patch.vs[0];
    let mut nu = Vec::new();
    for k in 0..=k_max {
        let v = k as f64 * sigma;
        let idx = (v / hv).round() as usize;
        if (patch.vs[idx] - v).abs() > 1e-9 {
            return Err(Error::Domain(
                "patch v grid does not contain the multiples of sigma".into(),
            ));
        }
        nu.push(patch.frame(iu0, idx).psi_v);
    }
    let amb = patch.amb;
    let ip = |x: &Vec4, y: &Vec4| amb.inner(x, y);
    let gram = [
        [ip(&nu[0], &nu[0]), ip(&nu[0], &nu[1])],
        [ip(&nu[1], &nu[0]), ip(&nu[1], &nu[1])],
    ];
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let mut angles = Vec::new();
    for k in 0..nu.len() - 1 {
        let g00 = ip(&nu[k], &nu[k]);
        let g11 = ip(&nu[k + 1], &nu[k + 1]);
        let g01 = ip(&nu[k], &nu[k + 1]);
        angles.push((g01 / (g00 * g11).sqrt()).clamp(-1.0, 1.0).acos());
    }
    Ok(SymmetryData {
        nu,
        gram,
        o_minus: det > 0.0,
        angles,
    })
}

/// Standalone non-degeneracy test (`nu_0`, `nu_1` span a spacelike plane),
/// evaluated from a single `v`-line at `u = 0`.
pub fn is_o_minus(sp: &SeedParams, amb: &Ambient) -> Result<bool> {
    let sigma = crate::sinh_system::sigma(sp)?;
    let spine = integrate_spine(sp, amb, 1e-6, false, 1e-11)?;
    let line = integrate_vline(&spine, 0.0, sigma, 1e-11)?;
    let nu0 = line.frame(0.0).psi_v;
    let nu1 = line.frame(sigma).psi_v;
    let det = amb.inner(&nu0, &nu0) * amb.inner(&nu1, &nu1) - amb.inner(&nu0, &nu1).powi(2);
    Ok(det > 0.0)
}
