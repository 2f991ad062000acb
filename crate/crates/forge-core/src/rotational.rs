//! Delaunay-type rotational CMC surfaces: profile curves, the
//! free-boundary arclength, the axis-crossing point, and the bridge
//! between the conformal parameter `u` of the frame pipeline and the
//! arclength parameter of the profile.
//!
//! Profiles are driven by `x'^2 = h(x)/x^2` with the biquadratic
//! `h(x) = x^2 - eps x^4 - (H x^2 - delta)^2`, integrated in second-order
//! form from the neck `x(0) = x_m` (the squared equation is
//! branch-ambiguous at turning points; it stays as a residual check).
//! The angle `phi` rides along as a third state, so no singular
//! quadrature appears on this path.

use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution};
use crate::roots;
use crate::sinh_system::SeedParams;
use crate::spaceform::{Ambient, Vec4};

/// Rotational surface parameters. Unlike [`Ambient`], `h` is not tied to
/// `h^2 + eps > 0`: profiles exist for all `H >= 0` in the hyperbolic
/// case (they are just not compact CMC annulus material when `H <= 1`).
#[derive(Clone, Copy, Debug)]
pub struct RotationalParams {
    pub eps: f64,
    pub h: f64,
    pub delta: f64,
}

/// Surface type by the range of `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelaunayKind {
    Nodoid,
    Unduloid,
    Catenoid,
    /// Double root of `h`: constant profile sweeping a flat torus
    /// (`eps = +1`).
    FlatTorus,
    /// Double root in the hyperbolic case: flat cylinder.
    Cylinder,
    /// Hyperbolic `H <= 1`: profile unbounded (no second root).
    Unbounded,
}

impl RotationalParams {
    pub fn new(eps: f64, h: f64, delta: f64) -> Result<RotationalParams> {
        if eps != 1.0 && eps != -1.0 {
            return Err(Error::Domain("eps must be +-1".into()));
        }
        if h < 0.0 {
            return Err(Error::Domain("mean curvature must be >= 0".into()));
        }
        if delta == 0.0 {
            return Err(Error::Domain("delta = 0 is totally umbilic, not rotational".into()));
        }
        let p = RotationalParams { eps, h, delta };
        // regime check: h(x) must be nonnegative somewhere
        if eps > 0.0 {
            let mu = (h * h + 1.0).sqrt();
            if delta < (h - mu) / 2.0 - 1e-14 || delta > (h + mu) / 2.0 + 1e-14 {
                return Err(Error::Region(format!(
                    "delta = {delta} outside [{}, {}]",
                    (h - mu) / 2.0,
                    (h + mu) / 2.0
                )));
            }
        } else if h > 1.0 {
            let mu = (h * h - 1.0).sqrt();
            if delta < (mu - h) / 2.0 - 1e-14 {
                return Err(Error::Region(format!(
                    "delta = {delta} below the hyperbolic root threshold {}",
                    (mu - h) / 2.0
                )));
            }
        } else if h == 1.0 && delta <= -0.5 {
            return Err(Error::Region("H = 1 requires delta > -1/2".into()));
        }
        Ok(p)
    }

    /// `h(x) = x^2 - eps x^4 - (H x^2 - delta)^2`.
    pub fn h_poly(&self, x: f64) -> f64 {
        let x2 = x * x;
        x2 - self.eps * x2 * x2 - (self.h * x2 - self.delta).powi(2)
    }

    pub fn kind(&self) -> DelaunayKind {
        let (eps, h, delta) = (self.eps, self.h, self.delta);
        if eps > 0.0 {
            let mu = (h * h + 1.0).sqrt();
            if (delta - (h + mu) / 2.0).abs() < 1e-13 || (delta - (h - mu) / 2.0).abs() < 1e-13 {
                return DelaunayKind::FlatTorus;
            }
            if h == 0.0 {
                return DelaunayKind::Catenoid;
            }
            return if delta > 0.0 {
                DelaunayKind::Nodoid
            } else {
                DelaunayKind::Unduloid
            };
        }
        if h > 1.0 {
            let mu = (h * h - 1.0).sqrt();
            if (delta - (mu - h) / 2.0).abs() < 1e-13 {
                return DelaunayKind::Cylinder;
            }
            return if delta > 0.0 {
                DelaunayKind::Nodoid
            } else {
                DelaunayKind::Unduloid
            };
        }
        DelaunayKind::Unbounded
    }
}

/// Positive roots of `h(x)`, smallest first; `None` for the second root
/// when the profile is unbounded (`eps = -1`, `H <= 1`).
pub fn profile_roots(p: &RotationalParams) -> Result<(f64, Option<f64>)> {
    // h as a quadratic in X = x^2: -(eps + H^2) X^2 + (1 + 2 H delta) X - delta^2
    let a = -(p.eps + p.h * p.h);
    let b = 1.0 + 2.0 * p.h * p.delta;
    let c = -p.delta * p.delta;
    if a.abs() < 1e-15 {
        // eps = -1, H = 1: linear
        let x2 = -c / b;
        if x2 <= 0.0 {
            return Err(Error::Region("no positive root (H = 1 regime)".into()));
        }
        return Ok((x2.sqrt(), None));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-14 {
        return Err(Error::Region(format!("h(x) has no real roots (disc = {disc:.3e})")));
    }
    let sq = disc.max(0.0).sqrt();
    let x2_1 = (-b + sq) / (2.0 * a);
    let x2_2 = (-b - sq) / (2.0 * a);
    let mut pos: Vec<f64> = [x2_1, x2_2].iter().copied().filter(|&x| x > 0.0).collect();
    pos.sort_by(|p, q| p.partial_cmp(q).unwrap());
    match pos.len() {
        2 => Ok((pos[0].sqrt(), Some(pos[1].sqrt()))),
        1 => Ok((pos[0].sqrt(), None)),
        _ => Err(Error::Region("h(x) has no positive roots".into())),
    }
}

enum ProfileData {
    /// Dense `(x, x', phi)` over `[0, s_max]`.
    Oscillating(DenseSolution<3>),
    /// Constant profile `x = xc`, `phi = omega * s` (double-root case).
    FlatTorus { xc: f64, omega: f64 },
}

/// Integrated rotational profile with its embedding data.
pub struct DelaunayProfile {
    pub params: RotationalParams,
    pub x_m: f64,
    pub x_max: Option<f64>,
    pub s_max: f64,
    data: ProfileData,
}

impl DelaunayProfile {
    /// `(x, x', phi)` at arclength `s >= 0` (`x` even, `phi` odd for
    /// negative arguments).
    pub fn state(&self, s: f64) -> (f64, f64, f64) {
        let (x, xp, phi) = match &self.data {
            ProfileData::Oscillating(sol) => {
                let st = sol.eval(s.abs());
                (st[0], st[1], st[2])
            }
            ProfileData::FlatTorus { xc, omega } => (*xc, 0.0, omega * s.abs()),
        };
        if s < 0.0 {
            (x, -xp, -phi)
        } else {
            (x, xp, phi)
        }
    }

    fn w(&self, x: f64) -> f64 {
        (1.0 - self.params.eps * x * x).max(0.0).sqrt()
    }

    fn phi_rate(&self, x: f64) -> f64 {
        let (h, delta) = (self.params.h, self.params.delta);
        (delta - h * x * x) / (x * (1.0 - self.params.eps * x * x))
    }

    /// Profile-curve point `(x, 0, x3, x4)` in the quadric.
    pub fn profile_point(&self, s: f64) -> Vec4 {
        self.psi(s, 0.0)
    }

    /// Full immersion point at `(s, theta)`.
    pub fn psi(&self, s: f64, theta: f64) -> Vec4 {
        let (x, _, phi) = self.state(s);
        let w = self.w(x);
        if self.params.eps > 0.0 {
            Vec4::new(x * theta.cos(), -x * theta.sin(), w * phi.sin(), w * phi.cos())
        } else {
            Vec4::new(x * theta.cos(), -x * theta.sin(), w * phi.sinh(), w * phi.cosh())
        }
    }

    /// Unit tangent of the profile curve.
    pub fn psi_s(&self, s: f64, theta: f64) -> Vec4 {
        let (x, xp, phi) = self.state(s);
        let w = self.w(x);
        let dw = -self.params.eps * x * xp / w;
        let dphi = self.phi_rate(x);
        if self.params.eps > 0.0 {
            Vec4::new(
                xp * theta.cos(),
                -xp * theta.sin(),
                dw * phi.sin() + w * phi.cos() * dphi,
                dw * phi.cos() - w * phi.sin() * dphi,
            )
        } else {
            Vec4::new(
                xp * theta.cos(),
                -xp * theta.sin(),
                dw * phi.sinh() + w * phi.cosh() * dphi,
                dw * phi.cosh() + w * phi.sinh() * dphi,
            )
        }
    }

    /// `(x3, x4, x3', x4')` along the profile curve.
    pub fn coords(&self, s: f64) -> (f64, f64, f64, f64) {
        let p = self.profile_point(s);
        let t = self.psi_s(s, 0.0);
        (p.x3(), p.x4(), t.x3(), t.x4())
    }

    /// Axis-crossing function `F(s) = x3 x' - x3' x`; its first positive
    /// root is the free-boundary arclength.
    pub fn axis_cross(&self, s: f64) -> f64 {
        let (x, xp, _) = self.state(s);
        let (x3, _, x3p, _) = self.coords(s);
        x3 * xp - x3p * x
    }

    /// Principal curvatures `(kappa_s, kappa_theta) = (H + delta/x^2, H - delta/x^2)`.
    pub fn principal_curvatures(&self, s: f64) -> (f64, f64) {
        let (x, _, _) = self.state(s);
        let r = self.params.delta / (x * x);
        (self.params.h + r, self.params.h - r)
    }

    /// Residual of the first-order profile equation at `s`.
    pub fn profile_residual(&self, s: f64) -> f64 {
        let (x, xp, _) = self.state(s);
        xp * xp - self.params.h_poly(x) / (x * x)
    }

    /// First arclength where `x` reaches its maximum (turning point).
    pub fn first_crest(&self) -> Result<f64> {
        match &self.data {
            ProfileData::FlatTorus { .. } => Err(Error::Domain(
                "constant profile has no turning point".into(),
            )),
            ProfileData::Oscillating(_) => roots::first_root(
                |s| Some(self.state(s).1),
                1e-6,
                self.s_max,
                1e-2,
                1e-12,
            ),
        }
    }
}

/// Integrate the profile from the neck over `[0, s_max]`.
pub fn integrate_profile(p: &RotationalParams, s_max: f64) -> Result<DelaunayProfile> {
    let (x_m, x_max) = profile_roots(p)?;
    if p.eps > 0.0 {
        let mu = (p.h * p.h + 1.0).sqrt();
        if (p.delta - (p.h + mu) / 2.0).abs() < 1e-13 {
            // double root: explicit flat-torus profile
            let xc = ((mu + p.h) / (2.0 * mu)).sqrt();
            let omega = (2.0 * mu * (mu + p.h)).sqrt();
            return Ok(DelaunayProfile {
                params: *p,
                x_m: xc,
                x_max: Some(xc),
                s_max,
                data: ProfileData::FlatTorus { xc, omega },
            });
        }
    }
    let pp = *p;
    // x'' = g'(x)/2 with g = h(x)/x^2 = 1 - eps x^2 - (H x - delta/x)^2
    let rhs = move |_s: f64, st: &[f64; 3]| {
        let [x, xp, _phi] = *st;
        let gp = -2.0 * pp.eps * x
            - 2.0 * (pp.h * x - pp.delta / x) * (pp.h + pp.delta / (x * x));
        let dphi = (pp.delta - pp.h * x * x) / (x * (1.0 - pp.eps * x * x));
        [xp, gp / 2.0, dphi]
    };
    let sol = ode::integrate(rhs, 0.0, s_max, [x_m, 0.0, 0.0], 1e-12, 1e-13)?;
    Ok(DelaunayProfile {
        params: *p,
        x_m,
        x_max,
        s_max,
        data: ProfileData::Oscillating(sol),
    })
}

/// Free-boundary data: arclength, ball, and the embedded annulus checks.
pub struct FreeBoundaryData {
    pub s_free: f64,
    /// Ball `B[e4, eps * x4(s_free)]` that the annulus meets orthogonally.
    pub ball_center: Vec4,
    pub ball_d: f64,
    pub x4_at_boundary: f64,
}

/// Closed-form free-boundary arclength on the double-root boundary
/// (`eps = +1`, `delta = (H + mu)/2`).
pub fn s_free_flat_torus(h: f64) -> f64 {
    let mu = (h * h + 1.0).sqrt();
    std::f64::consts::PI / (2.0 * (2.0 * mu * (h + mu)).sqrt())
}

/// First positive root of the axis-crossing function, with the
/// free-boundary certificates that come with it.
pub fn find_stilde(profile: &DelaunayProfile) -> Result<FreeBoundaryData> {
    if profile.params.delta <= 0.0 {
        return Err(Error::Region("free boundary requires delta > 0".into()));
    }
    let guard = |s: f64| {
        let (x, _, _) = profile.state(s);
        if profile.params.eps > 0.0 && 1.0 - x * x < 1e-12 {
            None // embedding degenerates at x = 1; F resumes beyond it
        } else {
            Some(profile.axis_cross(s))
        }
    };
    let s_free = roots::first_root(guard, 1e-8, profile.s_max, 5e-3, 1e-13)?;
    let (_, x4, _, _) = profile.coords(s_free);
    if x4 <= 0.0 {
        return Err(Error::Degenerate(format!(
            "boundary sphere parameter x4({s_free}) = {x4} not positive"
        )));
    }
    Ok(FreeBoundaryData {
        s_free,
        ball_center: Vec4::E4,
        ball_d: profile.params.eps * x4,
        x4_at_boundary: x4,
    })
}

/// Axis point cut out by the tangent geodesic of the profile at `s`:
/// the projective intersection of that geodesic with `{x1 = x2 = 0}`.
pub fn hat_p(profile: &DelaunayProfile, s: f64) -> Result<Vec4> {
    let (x, xp, _) = profile.state(s);
    let (x3, x4, x3p, x4p) = profile.coords(s);
    if x4 <= 0.0 {
        return Err(Error::Domain(format!("x4({s}) = {x4} must be positive")));
    }
    let denom = xp * x4 - x * x4p;
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "tangent geodesic at s = {s} does not cross the axis transversally (x' x4 - x x4' = {denom:.3e})"
        )));
    }
    let y0 = (x3 * xp - x3p * x) / denom;
    if profile.params.eps > 0.0 {
        let x4h = 1.0 / (1.0 + y0 * y0).sqrt();
        Ok(Vec4::new(0.0, 0.0, y0 * x4h, x4h))
    } else {
        if y0.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "axis intersection outside the hyperboloid (ybar = {y0})"
            )));
        }
        let x4h = 1.0 / (1.0 - y0 * y0).sqrt();
        Ok(Vec4::new(0.0, 0.0, y0 * x4h, x4h))
    }
}

/// Whether `phi` at the first crest of `x` exceeds `pi/2`.
///
/// Applies in the spherical regime `delta > H`; the free-boundary root
/// exists below the crest exactly when this holds.
pub fn check_phi_exceeds(profile: &DelaunayProfile) -> Result<bool> {
    if profile.params.eps < 0.0 || profile.params.delta <= profile.params.h {
        return Err(Error::Domain(
            "crest-angle check applies to eps = +1, delta > H".into(),
        ));
    }
    let s2 = profile.first_crest()?;
    let (_, _, phi) = profile.state(s2);
    Ok(phi > std::f64::consts::FRAC_PI_2)
}

/// Conformal-to-arclength correspondence `s(u)` for a double-root seed:
/// `ds/du = e^{rho(u)}/(2 mu)` with the oscillator field feeding `rho`.
pub struct ArcMap {
    sol: DenseSolution<6>,
    pub u_max: f64,
}

impl ArcMap {
    pub fn s_of_u(&self, u: f64) -> f64 {
        if u >= 0.0 {
            self.sol.eval(u)[5]
        } else {
            -self.sol.eval(-u)[5]
        }
    }

    pub fn rho(&self, u: f64) -> f64 {
        self.sol.eval(u.abs())[4]
    }

    /// Invert the strictly increasing map on `[0, u_max]`.
    pub fn u_of_s(&self, s: f64) -> Result<f64> {
        let span = self.s_of_u(self.u_max);
        if !(0.0..=span).contains(&s) {
            return Err(Error::Domain(format!("arclength {s} outside [0, {span}]")));
        }
        roots::refine(|u| self.s_of_u(u) - s, 0.0, self.u_max, 1e-13)
    }
}

/// Build the arclength map for the seed `(1, b, c)`. The map depends on
/// `c` only (the underlying surface ignores `b`), so callers may pass the
/// pure-oscillator seed `b = 1`.
pub fn arclength_map(sp: &SeedParams, amb: &Ambient, u_max: f64) -> Result<ArcMap> {
    let a_hat = sp.a_hat;
    let mu = amb.mu;
    let (yp0, zp0, rho0) = (sp.yp0, sp.zp0, sp.rho00);
    let rhs = move |_u: f64, st: &[f64; 6]| {
        let [y, z, yp, zp, rho, _s] = *st;
        let w = y * y - z * z;
        [
            yp,
            zp,
            (a_hat - 1.0) * y - 2.0 * y * w,
            a_hat * z - 2.0 * z * w,
            y * rho.cosh() + z * rho.sinh(),
            rho.exp() / (2.0 * mu),
        ]
    };
    let sol = ode::integrate(rhs, 0.0, u_max, [0.0, 0.0, yp0, zp0, rho0, 0.0], 1e-12, 1e-12)?;
    Ok(ArcMap { sol, u_max })
}

/// `delta` of the rotational surface whose orbit circles have geodesic
/// curvature `H - mu c^2`: equating that with the neck principal
/// curvature `H - delta / x_m^2` and `h(x_m) = 0` gives
/// `x_m^2 = 1/((H - mu c^2)^2 + eps)` and `delta = mu c^2 x_m^2`.
pub fn delta_for_neck(c: f64, amb: &Ambient) -> Result<f64> {
    let k = amb.h - amb.mu * c * c;
    let denom = k * k + amb.eps;
    if denom <= 0.0 {
        return Err(Error::Region(format!(
            "(H - mu c^2)^2 + eps = {denom:.3e} <= 0: orbits are not circles"
        )));
    }
    Ok(amb.mu * c * c / denom)
}

/// `u`-value at which the rotational annulus of parameter `r3` becomes
/// free boundary: compose `r3 -> c -> delta -> s_free` with the inverse
/// arclength map.
pub fn tilde_u(r3: f64, amb: &Ambient) -> Result<f64> {
    if r3 < 1.0 - 1e-12 {
        return Err(Error::Domain(format!("r3 = {r3} must be >= 1")));
    }
    if amb.eps > 0.0 && r3 - 1.0 < 1e-12 {
        // continuous extension onto the flat-torus corner
        return Ok(std::f64::consts::FRAC_PI_2 * 2.0_f64.sqrt()
            * (amb.mu / (amb.h + amb.mu)).sqrt());
    }
    let c = r3.sqrt() + (r3 - 1.0).max(0.0).sqrt();
    let delta = delta_for_neck(c, amb)?;
    let p = RotationalParams::new(amb.eps, amb.h, delta)?;
    let mut s_max = 4.0;
    let fb = loop {
        let profile = integrate_profile(&p, s_max)?;
        match find_stilde(&profile) {
            Ok(fb) => break fb,
            Err(Error::RootNotFound(_)) if s_max < 64.0 => s_max *= 2.0,
            Err(e) => return Err(e),
        }
    };
    let sp = SeedParams::new(1.0, 1.0, c)?;
    let mut u_max = 2.0 * amb.mu * fb.s_free * c + 1.0;
    let map = loop {
        let map = arclength_map(&sp, amb, u_max)?;
        if map.s_of_u(u_max) >= fb.s_free {
            break map;
        }
        u_max *= 2.0;
        if u_max > 200.0 {
            return Err(Error::RootNotFound(
                "arclength map does not reach the free-boundary length".into(),
            ));
        }
    };
    map.u_of_s(fb.s_free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame;
    use crate::quad;
    use crate::spaceform::{self, Ambient};
    use std::f64::consts::PI;

    #[test]
    fn root_structure() {
        // delta = H pins the outer root at 1
        let p = RotationalParams::new(1.0, 0.7, 0.7).unwrap();
        let (xm, xmax) = profile_roots(&p).unwrap();
        assert!((xmax.unwrap() - 1.0).abs() < 1e-12);
        assert!(xm > 0.0 && xm < 1.0);

        // double root at the flat-torus boundary
        let h = 0.4;
        let mu = (h * h + 1.0_f64).sqrt();
        let p = RotationalParams::new(1.0, h, (h + mu) / 2.0).unwrap();
        let (xm, xmax) = profile_roots(&p).unwrap();
        let xc = ((mu + h) / (2.0 * mu)).sqrt();
        assert!((xm - xc).abs() < 1e-7);
        assert!((xmax.unwrap() - xc).abs() < 1e-7);

        // hyperbolic catenoid: single root, x_m^2 = (sqrt(5) - 1)/2
        let p = RotationalParams::new(-1.0, 0.0, 1.0).unwrap();
        let (xm, xmax) = profile_roots(&p).unwrap();
        assert!(xmax.is_none());
        assert!((xm * xm - (5.0_f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);

        // regime violation
        assert!(RotationalParams::new(-1.0, 1.5, -0.8).is_err());
        assert!(RotationalParams::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn flat_torus_profile() {
        let h = 0.0;
        let p = RotationalParams::new(1.0, h, 0.5).unwrap();
        assert_eq!(p.kind(), DelaunayKind::FlatTorus);
        let profile = integrate_profile(&p, 3.0).unwrap();
        let (x, _, _) = profile.state(1.3);
        assert!((x - 0.5_f64.sqrt()).abs() < 1e-14);
        // x3(s) = sqrt((mu - H)/(2 mu)) sin(sqrt(2 mu (mu + H)) s)
        let (x3, _, _, _) = profile.coords(0.7);
        assert!((x3 - 0.5_f64.sqrt() * (2.0_f64.sqrt() * 0.7).sin()).abs() < 1e-12);
    }

    #[test]
    fn profile_first_order_residual_and_curvature() {
        let p = RotationalParams::new(-1.0, 1.5, 0.9).unwrap();
        let profile = integrate_profile(&p, 6.0).unwrap();
        for k in 0..=60 {
            let s = 6.0 * k as f64 / 60.0;
            assert!(profile.profile_residual(s).abs() < 1e-9, "residual at s = {s}");
            // embedding identity
            let psi = profile.psi(s, 0.8);
            let ip = spaceform::inner(&psi, &psi, -1.0);
            assert!((ip + 1.0).abs() < 1e-12);
            // unit-speed profile
            let t = profile.psi_s(s, 0.8);
            assert!((spaceform::inner(&t, &t, -1.0) - 1.0).abs() < 1e-9);
        }
        // kappa_s against a finite-difference turning of the tangent
        let h = 1e-5;
        for &s in &[0.5, 1.4, 2.3] {
            let tm = profile.psi_s(s - h, 0.0);
            let tp = profile.psi_s(s + h, 0.0);
            let dt = (tp - tm) * (1.0 / (2.0 * h));
            let psi = profile.profile_point(s);
            // remove the tangential (psi) component: covariant derivative
            let acc = dt - psi * (spaceform::inner(&dt, &psi, -1.0) / -1.0);
            let k_fd = spaceform::inner(&acc, &acc, -1.0).sqrt();
            let (ks, _) = profile.principal_curvatures(s);
            assert!((k_fd - ks.abs()).abs() < 1e-5, "kappa_s at {s}: {k_fd} vs {ks}");
        }
    }

    #[test]
    fn free_boundary_root_spherical() {
        let p = RotationalParams::new(1.0, 0.0, 0.3).unwrap();
        let profile = integrate_profile(&p, 6.0).unwrap();
        let fb = find_stilde(&profile).unwrap();
        // F < 0 strictly inside, changes sign at the root
        for k in 1..20 {
            let s = fb.s_free * k as f64 / 20.0;
            assert!(profile.axis_cross(s) < 0.0, "F(s) must be negative before the root");
        }
        assert!(profile.axis_cross(fb.s_free / 2.0) < 0.0);
        assert!(profile.axis_cross(fb.s_free + 0.01) > 0.0);
        // containment: eps x4 non-increasing on [0, s_free]
        let mut prev = f64::INFINITY;
        for k in 0..=40 {
            let s = fb.s_free * k as f64 / 40.0;
            let (_, x4, _, _) = profile.coords(s);
            assert!(x4 <= prev + 1e-12);
            prev = x4;
        }
        // orthogonality: the conormal at the boundary is parallel to the
        // sphere normal of S[e4, x4(s~)]
        let psi = profile.profile_point(fb.s_free);
        let t = profile.psi_s(fb.s_free, 0.0);
        let nhat = Vec4::E4 - psi * (1.0 * fb.ball_d);
        let nn = spaceform::inner(&nhat, &nhat, 1.0).sqrt();
        let cross = spaceform::inner(&t, &nhat, 1.0) / nn;
        assert!(
            (cross.abs() - 1.0).abs() < 1e-7,
            "conormal-normal alignment {cross}"
        );
    }

    #[test]
    fn free_boundary_flat_torus_limit() {
        // at the double root itself the profile is explicit and the
        // free-boundary root is pi / (2 sqrt(2 mu (H + mu)))
        let h = 0.0;
        let closed = s_free_flat_torus(h);
        assert!((closed - PI / (2.0 * 2.0_f64.sqrt())).abs() < 1e-15);
        let p = RotationalParams::new(1.0, h, 0.5).unwrap();
        let profile = integrate_profile(&p, 3.0).unwrap();
        let fb = find_stilde(&profile).unwrap();
        assert!((fb.s_free - closed).abs() < 1e-10, "gap {}", (fb.s_free - closed).abs());
        // and the oscillating branch converges to it (like sqrt of the
        // parameter gap, hence the shrinking offsets)
        let mut prev_gap = f64::INFINITY;
        for delta in [0.49, 0.499, 0.49999] {
            let p = RotationalParams::new(1.0, h, delta).unwrap();
            let profile = integrate_profile(&p, 6.0).unwrap();
            let fb = find_stilde(&profile).unwrap();
            let gap = (fb.s_free - closed).abs();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 5e-3, "limit gap {prev_gap}");
    }

    #[test]
    fn axis_point_vanishes_at_free_boundary() {
        for (eps, h, delta) in [(1.0, 0.0, 0.3), (-1.0, 1.5, 0.9), (-1.0, 0.0, 1.0)] {
            let p = RotationalParams::new(eps, h, delta).unwrap();
            let profile = integrate_profile(&p, 10.0).unwrap();
            let fb = find_stilde(&profile).unwrap();
            let axis_pt = hat_p(&profile, fb.s_free).unwrap();
            assert!(axis_pt.x3().abs() < 1e-10, "p3(s~) = {}", axis_pt.x3());
            assert!(axis_pt.x4() > 0.0);
            // identity ybar * (x' x4 - x x4') = F
            let (x, xp, _) = profile.state(fb.s_free * 0.9);
            let (x3, x4, x3p, x4p) = profile.coords(fb.s_free * 0.9);
            let y0 = (x3 * xp - x3p * x) / (xp * x4 - x * x4p);
            let back = y0 * (xp * x4 - x * x4p) - (x3 * xp - x * x3p);
            assert!(back.abs() < 1e-10);
            // increasing through the root
            let hh = 1e-5;
            let p3m = hat_p(&profile, fb.s_free - hh).unwrap().x3();
            let p3p = hat_p(&profile, fb.s_free + hh).unwrap().x3();
            assert!(p3p > p3m, "p3 must increase across the root");
        }
    }

    #[test]
    fn free_boundary_geodesic_reaches_ball_center() {
        // hyperbolic catenoid: tangent geodesic at s~ passes through e4
        let p = RotationalParams::new(-1.0, 0.0, 1.0).unwrap();
        let profile = integrate_profile(&p, 10.0).unwrap();
        let fb = find_stilde(&profile).unwrap();
        // this ambient is only a container for eps; mu is irrelevant here
        let amb = Ambient::new(-1, 1.5).unwrap();
        let psi = profile.profile_point(fb.s_free);
        let t = profile.psi_s(fb.s_free, 0.0);
        assert!(spaceform::geodesic_hits_point(&psi, &t, &Vec4::E4, &amb, 1e-8));
        // scan + golden-section minimization cross-check
        let gap_at = |s: f64| {
            let q = spaceform::geodesic_point(&psi, &t, s, &amb).unwrap();
            (q - Vec4::E4).norm_euclid()
        };
        let mut s_best = 0.0;
        let mut best = f64::INFINITY;
        for k in 0..4000 {
            let s = -2.0 + 4.0 * k as f64 / 3999.0;
            let gap = gap_at(s);
            if gap < best {
                best = gap;
                s_best = s;
            }
        }
        let (mut lo, mut hi) = (s_best - 2e-3, s_best + 2e-3);
        let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
        for _ in 0..80 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if gap_at(m1) < gap_at(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        assert!(gap_at(0.5 * (lo + hi)) < 1e-8, "closest approach {}", gap_at(0.5 * (lo + hi)));
    }

    #[test]
    fn crest_angle_check() {
        let p = RotationalParams::new(1.0, 0.0, 0.4).unwrap();
        let profile = integrate_profile(&p, 8.0).unwrap();
        assert!(check_phi_exceeds(&profile).unwrap());
        // quadrature oracle: phi(s2) = int (delta - H x^2) / ((1 - x^2) sqrt(h(x))) dx
        let (xm, xmax) = profile_roots(&p).unwrap();
        let xmax = xmax.unwrap();
        let mu2 = 1.0 + p.h * p.h;
        let f = |x: f64| (p.delta - p.h * x * x) / (1.0 - x * x);
        let reduced = |x: f64, end: usize| {
            // h(x) = mu2 (x - xm)(x + xm)(xmax - x)(xmax + x)
            match end {
                0 => mu2 * (x + xm) * (xmax - x) * (xmax + x),
                _ => mu2 * (x - xm) * (x + xm) * (xmax + x),
            }
        };
        let oracle = quad::integrate_sqrt_endpoints(f, reduced, xm, xmax, 1e-12).unwrap();
        let s2 = profile.first_crest().unwrap();
        let (_, _, phi2) = profile.state(s2);
        assert!((phi2 - oracle).abs() < 1e-9, "phi(s2) = {phi2} vs {oracle}");
        assert!(oracle > PI / 2.0);
        // sweep of the regime: the crest angle never dips below pi/2
        for i in 0..10 {
            let h = 2.0 * i as f64 / 9.0;
            let mu = (h * h + 1.0_f64).sqrt();
            for j in 1..=10 {
                let delta = h + ((h + mu) / 2.0 - h) * j as f64 / 11.0;
                if delta <= h {
                    continue;
                }
                let p = RotationalParams::new(1.0, h, delta).unwrap();
                let profile = integrate_profile(&p, 12.0).unwrap();
                assert!(
                    check_phi_exceeds(&profile).unwrap(),
                    "crest angle fails at H = {h}, delta = {delta}"
                );
            }
        }
    }

    #[test]
    fn arclength_map_properties() {
        let amb = Ambient::new(1, 0.0).unwrap();
        // c = 1: rho vanishes and s(u) = u / (2 mu)
        let sp = SeedParams::new(1.0, 2.0, 1.0).unwrap();
        let map = arclength_map(&sp, &amb, 3.0).unwrap();
        assert_eq!(map.s_of_u(0.0), 0.0);
        for k in 1..=10 {
            let u = 3.0 * k as f64 / 10.0;
            assert!((map.s_of_u(u) - u / (2.0 * amb.mu)).abs() < 1e-12);
        }
        // generic c: matches the ambient arclength of the frame spine
        let amb = Ambient::new(-1, 1.5).unwrap();
        let sp = SeedParams::new(1.0, 1.0, 2.0).unwrap();
        let map = arclength_map(&sp, &amb, 2.0).unwrap();
        let spine = frame::integrate_spine(&sp, &amb, 2.0, false, 1e-12).unwrap();
        let n = 4000;
        let mut acc = 0.0;
        let mut prev = spine.frame(0.0).psi;
        for k in 1..=n {
            let u = 2.0 * k as f64 / n as f64;
            let f = spine.frame(u);
            let step = f.psi - prev;
            // chordal length with the ambient metric (flat chart of the quadric)
            acc += amb.inner(&step, &step).abs().sqrt();
            prev = f.psi;
        }
        assert!(
            (map.s_of_u(2.0) - acc).abs() < 1e-6,
            "quadrature {} vs chordal {acc}",
            map.s_of_u(2.0)
        );
    }

    #[test]
    fn critical_u_endpoint_and_continuity() {
        let amb = Ambient::new(1, 0.0).unwrap();
        let u1 = tilde_u(1.0, &amb).unwrap();
        assert!((u1 - PI / 2.0_f64.sqrt()).abs() < 1e-13);
        // the r3 = 1 corner is a square-root-type limit: the gap decays
        // like (r3 - 1)^(1/2), roughly 5e-2 at r3 = 1.001
        let mut prev_gap = f64::INFINITY;
        for k in [3, 4, 5] {
            let gap = (tilde_u(1.0 + 10.0_f64.powi(-k), &amb).unwrap() - u1).abs();
            assert!(gap < prev_gap, "gap must shrink toward the corner");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-2, "gap at r3 = 1 + 1e-5 still {prev_gap}");
        let amb = Ambient::new(1, 1.0).unwrap();
        let expect = (PI / 2.0_f64.sqrt()) * (amb.mu / (amb.h + amb.mu)).sqrt();
        assert!((tilde_u(1.0, &amb).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn neck_matching_consistency() {
        let amb = Ambient::new(-1, 1.5).unwrap();
        let c = 2.0;
        let delta = delta_for_neck(c, &amb).unwrap();
        let p = RotationalParams::new(-1.0, amb.h, delta).unwrap();
        let (xm, _) = profile_roots(&p).unwrap();
        // neck circle curvature equals the double-root orbit curvature
        let (_, ktheta) = (amb.h + delta / (xm * xm), amb.h - delta / (xm * xm));
        assert!((ktheta - (amb.h - amb.mu * c * c)).abs() < 1e-10);
    }
}
