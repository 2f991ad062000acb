//! Seed data and integrable structure behind the surfaces.
//!
//! A seed `(a, b, c)` with `a, b, c >= 1` fixes initial data for the coupled
//! oscillator system
//!
//! ```text
//! y'' = (a_hat - 1) y - 2 y (y^2 - z^2)
//! z'' =  a_hat    z - 2 z (y^2 - z^2)
//! ```
//!
//! together with a profile `X(v) = exp(rho(0, v))` solving `4 X'^2 = p(0, X)`
//! for an explicit quartic `p`. Sweeping the first-order relation
//! `rho_u = y cosh(rho) + z sinh(rho)` in `u` from `rho(0, v) = log X(v)`
//! produces the full field `rho(u, v)`, which solves the elliptic
//! sinh-Gordon equation `laplace(rho) + cosh(rho) sinh(rho) = 0`; that
//! residual is kept as a cross-check rather than being integrated directly.

use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution};
use crate::quad;
use crate::roots;
use crate::spaceform::Ambient;

/// Seed parameters `(a, b, c)` with the derived initial data.
#[derive(Clone, Copy, Debug)]
pub struct SeedParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `(a + 1/a)/2`
    pub cap_a: f64,
    /// `(b + 1/b)/2`
    pub cap_b: f64,
    /// `(c - 1/c)/2`
    pub cap_c: f64,
    /// `1 - cap_a * cap_b + cap_c^2`
    pub a_hat: f64,
    /// `y'(0)`
    pub yp0: f64,
    /// `z'(0)`
    pub zp0: f64,
    /// `rho(0, 0) = -log(a c)`
    pub rho00: f64,
}

impl SeedParams {
    /// Derive all initial data from `(a, b, c)`; the domain is
    /// `a, b, c >= 1`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<SeedParams> {
        if !(a >= 1.0 && b >= 1.0 && c >= 1.0) {
            return Err(Error::Domain(format!(
                "seed ({a}, {b}, {c}) outside a, b, c >= 1"
            )));
        }
        let cap_a = 0.5 * (a + 1.0 / a);
        let cap_b = 0.5 * (b + 1.0 / b);
        let cap_c = 0.5 * (c - 1.0 / c);
        Ok(SeedParams {
            a,
            b,
            c,
            cap_a,
            cap_b,
            cap_c,
            a_hat: 1.0 - cap_a * cap_b + cap_c * cap_c,
            yp0: 0.5 * (cap_a + cap_b) * cap_c,
            zp0: 0.5 * (cap_b - cap_a) * (cap_c * cap_c + 1.0).sqrt(),
            rho00: -(a * c).ln(),
        })
    }

    /// Quartic `p(0, x)` in factored form; positive strictly between the
    /// two positive roots `1/(ac)` and `a/c`.
    pub fn p0(&self, x: f64) -> f64 {
        -(x - self.a / self.c)
            * (x - 1.0 / (self.a * self.c))
            * (x + self.b * self.c)
            * (x + self.c / self.b)
    }

    /// Same quartic from the expanded coefficients.
    pub fn p0_expanded(&self, x: f64) -> f64 {
        let s = self.yp0 + self.zp0;
        let d = self.yp0 - self.zp0;
        -x.powi(4) - 4.0 * s * x.powi(3) + (2.0 - 4.0 * self.a_hat) * x * x + 4.0 * d * x - 1.0
    }

    /// Derivative of the expanded quartic.
    pub fn dp0(&self, x: f64) -> f64 {
        let s = self.yp0 + self.zp0;
        let d = self.yp0 - self.zp0;
        -4.0 * x.powi(3) - 12.0 * s * x * x + 2.0 * (2.0 - 4.0 * self.a_hat) * x + 4.0 * d
    }

    /// Positive roots of `p(0, x)`, smallest first.
    pub fn p0_positive_roots(&self) -> (f64, f64) {
        (1.0 / (self.a * self.c), self.a / self.c)
    }

    /// `r1 = -(b-1)^2 / (4b) <= 0`.
    pub fn r1(&self) -> f64 {
        -(self.b - 1.0).powi(2) / (4.0 * self.b)
    }

    /// `r3 = (c + 1/c)^2 / 4 >= 1`.
    pub fn r3(&self) -> f64 {
        0.25 * (self.c + 1.0 / self.c).powi(2)
    }

    /// Conserved quantities of the oscillator system, evaluated from the
    /// initial data (`y = z = 0` at `u = 0`).
    pub fn conserved_h_k(&self) -> (f64, f64) {
        (self.yp0 * self.yp0 - self.zp0 * self.zp0, self.zp0 * self.zp0)
    }

    /// Cubic `q(x) = -x^3 + (a_hat + 1) x^2 + (h - a_hat) x + k` governing
    /// the separated `(s, t)` coordinates.
    pub fn q_cubic(&self, x: f64) -> f64 {
        let (h, k) = self.conserved_h_k();
        -x.powi(3) + (self.a_hat + 1.0) * x * x + (h - self.a_hat) * x + k
    }
}

/// Cubic membership regions used by the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionFlags {
    /// Parameter domain `a, b, c >= 1`.
    pub in_o: bool,
    /// Free-boundary region: `b >= a` and `C^2 > (A - B)^2 / (4AB)`.
    pub in_w: bool,
    /// Rotational region at `a = 1`: `(H - mu c^2)^2 + eps > 0`.
    pub in_r: bool,
    /// `(r1, r3)` form of the intersection of the two regions.
    pub in_w_hat: bool,
}

/// Evaluate all region predicates for a seed in a given ambient.
pub fn region_flags(sp: &SeedParams, amb: &Ambient) -> RegionFlags {
    let in_o = sp.a >= 1.0 && sp.b >= 1.0 && sp.c >= 1.0;
    let gap = sp.cap_c * sp.cap_c
        - (sp.cap_a - sp.cap_b).powi(2) / (4.0 * sp.cap_a * sp.cap_b);
    let in_w = in_o && sp.b >= sp.a && gap > 0.0;
    let in_r = in_o && {
        let k = amb.h - amb.mu * sp.c * sp.c;
        k * k + amb.eps > 0.0
    };
    RegionFlags {
        in_o,
        in_w,
        in_r,
        in_w_hat: in_w_hat(sp.r1(), sp.r3(), amb),
    }
}

/// `(r1, r3)` region predicate: `r1 <= 0` and
/// `r3 > max((r1-1)^2/(1-2 r1), -eps (H+mu)/(2 mu))`.
pub fn in_w_hat(r1: f64, r3: f64, amb: &Ambient) -> bool {
    if r1 > 0.0 {
        return false;
    }
    let lower = ((r1 - 1.0).powi(2) / (1.0 - 2.0 * r1))
        .max(-amb.eps * (amb.h + amb.mu) / (2.0 * amb.mu));
    r3 > lower
}

/// Map `(r1, r3)` back to `(b, c)` (with `a = 1`).
pub fn seed_from_r1_r3(r1: f64, r3: f64) -> Result<SeedParams> {
    if r1 > 1e-14 || r3 < 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "(r1, r3) = ({r1}, {r3}) outside r1 <= 0, r3 >= 1"
        )));
    }
    let w = 1.0 - 2.0 * r1;
    let b = w + (w * w - 1.0).max(0.0).sqrt();
    let r3c = r3.max(1.0);
    let c = r3c.sqrt() + (r3c - 1.0).sqrt();
    SeedParams::new(1.0, b, c)
}

/// Dense trajectory of `(y, z, y', z')` with its conserved quantities.
#[derive(Clone, Debug)]
pub struct HamiltonianTrajectory {
    pub sp: SeedParams,
    sol: DenseSolution<4>,
    pub u_max: f64,
    /// Conserved values at `u = 0`.
    pub h: f64,
    pub k: f64,
}

fn oscillator_rhs(a_hat: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    move |_u, s| {
        let [y, z, yp, zp] = *s;
        let w = y * y - z * z;
        [yp, zp, (a_hat - 1.0) * y - 2.0 * y * w, a_hat * z - 2.0 * z * w]
    }
}

impl HamiltonianTrajectory {
    /// State `(y, z, y', z')` at `u` (symmetric continuation to `u < 0`:
    /// `y`, `z` are odd).
    pub fn state(&self, u: f64) -> [f64; 4] {
        if u >= 0.0 {
            self.sol.eval(u)
        } else {
            let [y, z, yp, zp] = self.sol.eval(-u);
            [-y, -z, yp, zp]
        }
    }

    pub fn y(&self, u: f64) -> f64 {
        self.state(u)[0]
    }

    pub fn z(&self, u: f64) -> f64 {
        self.state(u)[1]
    }

    /// Evaluate the two conserved expressions at `u`.
    pub fn conserved_at(&self, u: f64) -> (f64, f64) {
        let [y, z, yp, zp] = self.state(u);
        let w = y * y - z * z;
        let a_hat = self.sp.a_hat;
        let h = yp * yp - zp * zp - (a_hat - 1.0) * y * y + a_hat * z * z + w * w;
        let k = (z * yp - y * zp).powi(2) + zp * zp + z * z * (w - a_hat);
        (h, k)
    }
}

/// Integrate the oscillator system on `[0, u_max]`.
pub fn integrate_hamiltonian(
    sp: &SeedParams,
    u_max: f64,
    tol: f64,
) -> Result<HamiltonianTrajectory> {
    if !(u_max > 0.0 && tol > 0.0) {
        return Err(Error::Domain("u_max and tol must be positive".into()));
    }
    let sol = ode::integrate(
        oscillator_rhs(sp.a_hat),
        0.0,
        u_max,
        [0.0, 0.0, sp.yp0, sp.zp0],
        tol,
        tol,
    )?;
    let (h, k) = sp.conserved_h_k();
    Ok(HamiltonianTrajectory {
        sp: *sp,
        sol,
        u_max,
        h,
        k,
    })
}

/// First positive zero `u1` of `y` (requires `c > 1`).
///
/// Scans the dense output for the first sign change and refines; if no
/// change occurs within the trajectory, the scan is retried once on a
/// doubled interval before failing.
pub fn find_u1(traj: &HamiltonianTrajectory) -> Result<f64> {
    if traj.sp.c <= 1.0 {
        return Err(Error::Domain(
            "first zero of y requires c > 1 (y has no positive root at c = 1)".into(),
        ));
    }
    match roots::first_root(|u| Some(traj.y(u)), 1e-9, traj.u_max, 1e-2, 1e-12) {
        Ok(r) => Ok(r),
        Err(_) => {
            let retry = integrate_hamiltonian(&traj.sp, 2.0 * traj.u_max, 1e-12)?;
            roots::first_root(|u| Some(retry.y(u)), 1e-9, retry.u_max, 1e-2, 1e-12)
        }
    }
}

/// First `u > 0` with `y(u) = z(u)` (orthogonal contact parameter).
///
/// Defined on the free-boundary region; outside it `y < z` immediately and
/// the operation refuses.
pub fn find_tau(traj: &HamiltonianTrajectory, amb: &Ambient) -> Result<f64> {
    let flags = region_flags(&traj.sp, amb);
    if !flags.in_w {
        return Err(Error::Region(format!(
            "seed ({}, {}, {}) outside the free-boundary region",
            traj.sp.a, traj.sp.b, traj.sp.c
        )));
    }
    let u1 = find_u1(traj)?;
    // y = z first happens in (0, u1]; z == 0 collapses it onto u1 itself
    if traj.sp.zp0 == 0.0 {
        return Ok(u1);
    }
    roots::first_root(
        |u| Some(traj.y(u) - traj.z(u)),
        1e-9,
        u1 * (1.0 + 1e-9),
        1e-3,
        1e-13,
    )
    .map_err(|_| {
        Error::RootNotFound(format!(
            "y = z not reached in (0, u1 = {u1}] for seed ({}, {}, {})",
            traj.sp.a, traj.sp.b, traj.sp.c
        ))
    })
}

/// Half-period of the profile `X(v)`.
///
/// For `a > 1` this is the singular quadrature of `2 / sqrt(p(0, x))`
/// between the two positive roots of the quartic; at `a = 1` the roots
/// collide and the closed form `2 pi c / sqrt(1 + (b + 1/b) c^2 + c^4)`
/// applies.
pub fn sigma(sp: &SeedParams) -> Result<f64> {
    let (lo, hi) = sp.p0_positive_roots();
    if hi - lo < 1e-12 {
        let (b, c) = (sp.b, sp.c);
        return Ok(2.0 * std::f64::consts::PI * c
            / (1.0 + (b + 1.0 / b) * c * c + c.powi(4)).sqrt());
    }
    // p(0, x) with one positive-root factor divided out, for the
    // endpoint substitution
    let reduced = |x: f64, end: usize| -> f64 {
        let tail = (x + sp.b * sp.c) * (x + sp.c / sp.b);
        match end {
            0 => (hi - x) * tail,      // divided by (x - lo)
            _ => (x - lo) * tail,      // divided by (hi - x)
        }
    };
    quad::integrate_sqrt_endpoints(|_x| 2.0, reduced, lo, hi, 1e-13)
}

/// Dense profile `X(v) = exp(rho(0, v))` over one full period `[0, 2 sigma]`.
#[derive(Clone, Debug)]
pub struct ProfileX {
    pub sp: SeedParams,
    pub sigma: f64,
    sol: Option<DenseSolution<2>>,
    constant: Option<f64>,
}

impl ProfileX {
    /// Value of `X` at `v`, using evenness in `v` and `2 sigma`
    /// periodicity to fold the argument into `[0, sigma]`.
    pub fn x(&self, v: f64) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        let folded = fold_half_period(v, self.sigma);
        self.sol.as_ref().unwrap().eval(folded)[0]
    }

    /// Derivative `X'(v)` with the symmetry-induced sign.
    pub fn xv(&self, v: f64) -> f64 {
        if self.constant.is_some() {
            return 0.0;
        }
        let period = 2.0 * self.sigma;
        let mut w = v.rem_euclid(period);
        let mut sign = 1.0;
        if w > self.sigma {
            w = period - w;
            sign = -1.0;
        }
        sign * self.sol.as_ref().unwrap().eval(w)[1]
    }

    pub fn rho0(&self, v: f64) -> f64 {
        self.x(v).ln()
    }
}

fn fold_half_period(v: f64, sigma: f64) -> f64 {
    let period = 2.0 * sigma;
    let w = v.rem_euclid(period);
    if w > sigma {
        period - w
    } else {
        w
    }
}

/// Integrate the profile equation in second-order form
/// `X'' = p'(0, X) / 8` from the turning point `X(0) = 1/(ac)`.
///
/// The first-order relation `4 X'^2 = p(0, X)` is branch-ambiguous at
/// turning points, so it is kept only as a residual check.
pub fn solve_x(sp: &SeedParams, n_grid: usize) -> Result<ProfileX> {
    if n_grid < 64 {
        return Err(Error::Domain("profile grid must have >= 64 cells".into()));
    }
    let sg = sigma(sp)?;
    if sp.a == 1.0 {
        return Ok(ProfileX {
            sp: *sp,
            sigma: sg,
            sol: None,
            constant: Some(1.0 / sp.c),
        });
    }
    let sp2 = *sp;
    let sol = ode::integrate(
        move |_v, s: &[f64; 2]| [s[1], sp2.dp0(s[0]) / 8.0],
        0.0,
        sg,
        [1.0 / (sp.a * sp.c), 0.0],
        1e-12,
        1e-13,
    )?;
    Ok(ProfileX {
        sp: *sp,
        sigma: sg,
        sol: Some(sol),
        constant: None,
    })
}

/// Discrete field `rho(u, v)` on `[-u_max, u_max] x [0, 2 sigma]`,
/// row-major in `u`.
#[derive(Clone, Debug)]
pub struct RhoField {
    pub sp: SeedParams,
    pub sigma: f64,
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    /// `vals[iu * vs.len() + iv]`
    pub vals: Vec<f64>,
}

impl RhoField {
    pub fn at(&self, iu: usize, iv: usize) -> f64 {
        self.vals[iu * self.vs.len() + iv]
    }

    pub fn hu(&self) -> f64 {
        self.us[1] - self.us[0]
    }

    pub fn hv(&self) -> f64 {
        self.vs[1] - self.vs[0]
    }

    /// Max residual of the five-point discrete sinh-Gordon operator over
    /// interior nodes.
    pub fn sinh_gordon_residual(&self) -> f64 {
        let (nu, nv) = (self.us.len(), self.vs.len());
        let (hu, hv) = (self.hu(), self.hv());
        let mut worst = 0.0_f64;
        for iu in 1..nu - 1 {
            for iv in 1..nv - 1 {
                let c = self.at(iu, iv);
                let lap = (self.at(iu + 1, iv) - 2.0 * c + self.at(iu - 1, iv)) / (hu * hu)
                    + (self.at(iu, iv + 1) - 2.0 * c + self.at(iu, iv - 1)) / (hv * hv);
                worst = worst.max((lap + c.cosh() * c.sinh()).abs());
            }
        }
        worst
    }
}

/// Build the field by sweeping `rho_u = y cosh(rho) + z sinh(rho)` in `u`
/// from `rho(0, v) = log X(v)` along every grid line `v = const`.
///
/// `|rho| > 50` on any line aborts: the solution exists globally, so
/// crossing the guard indicates a numerical fault upstream.
pub fn solve_rho(
    sp: &SeedParams,
    traj: &HamiltonianTrajectory,
    profile: &ProfileX,
    u_max: f64,
    nu: usize,
    nv: usize,
) -> Result<RhoField> {
    if nu < 2 || nv < 2 {
        return Err(Error::Domain("rho grid needs at least 2x2 nodes".into()));
    }
    let us: Vec<f64> = (0..=2 * nu)
        .map(|i| -u_max + i as f64 * u_max / nu as f64)
        .collect();
    let vs: Vec<f64> = (0..=nv)
        .map(|j| j as f64 * 2.0 * profile.sigma / nv as f64)
        .collect();
    let mut vals = vec![0.0; us.len() * vs.len()];

    for (j, &v) in vs.iter().enumerate() {
        let rho0 = profile.rho0(v);
        for dir in [1.0_f64, -1.0] {
            let sol = ode::integrate(
                |u, s: &[f64; 1]| {
                    let [y, z, _, _] = traj.state(u);
                    [y * s[0].cosh() + z * s[0].sinh()]
                },
                0.0,
                dir * u_max,
                [rho0],
                1e-12,
                1e-12,
            )?;
            for (i, &u) in us.iter().enumerate() {
                if u * dir >= 0.0 {
                    let r = sol.eval(u)[0];
                    if r.abs() > 50.0 {
                        return Err(Error::Integration {
                            at: u,
                            what: format!("rho blow-up guard tripped (rho = {r:.2}) at v = {v}"),
                        });
                    }
                    vals[i * vs.len() + j] = r;
                }
            }
        }
    }
    Ok(RhoField {
        sp: *sp,
        sigma: profile.sigma,
        us,
        vs,
        vals,
    })
}

/// Separated coordinates `(s(lambda), t(lambda))` for a double-root seed
/// (`a = 1`), with the parameter change `2 du/dlambda = s - t`.
#[derive(Clone, Debug)]
pub struct STCoordinates {
    pub sp: SeedParams,
    pub r1: f64,
    pub r3: f64,
    /// States `(s, s', t, t', u)` over `lambda` in `[0, lambda_max]`.
    sol: DenseSolution<5>,
    pub lambda_max: f64,
}

impl STCoordinates {
    pub fn state(&self, lambda: f64) -> [f64; 5] {
        self.sol.eval(lambda)
    }

    pub fn s(&self, lambda: f64) -> f64 {
        self.state(lambda)[0]
    }

    pub fn t(&self, lambda: f64) -> f64 {
        self.state(lambda)[2]
    }

    pub fn u_of_lambda(&self, lambda: f64) -> f64 {
        self.state(lambda)[4]
    }
}

/// Integrate the `(s, t)` system for an `a = 1` seed in second-order form.
///
/// `g_s(s) = s (s - 1) q(s)` and `g_t(t) = t (t - 1) q(t)` both vanish at
/// the initial data `(s, t)(0) = (1, 0)`, so `s'' = g_s'(s)/2`,
/// `t'' = g_t'(t)/2` with zero initial velocities is the branch-free form.
pub fn solve_st(sp: &SeedParams, lambda_max: f64) -> Result<STCoordinates> {
    if sp.a != 1.0 {
        return Err(Error::Domain(
            "separated (s, t) coordinates require a double-root seed (a = 1)".into(),
        ));
    }
    let r1 = sp.r1();
    let r3 = sp.r3();
    // q(x) = -(x - r1)^2 (x - r3) for a = 1, so the squared-velocity
    // polynomial is g(x) = -x (x - 1) (x - r1)^2 (x - r3)
    let dg = move |x: f64| {
        let p = x * x - x;
        let q = (x - r1) * (x - r1);
        let r = x - r3;
        -((2.0 * x - 1.0) * q * r + p * 2.0 * (x - r1) * r + p * q)
    };
    let sol = ode::integrate(
        move |_l, st: &[f64; 5]| {
            let [s, spv, t, tpv, _u] = *st;
            [spv, dg(s) / 2.0, tpv, dg(t) / 2.0, (s - t) / 2.0]
        },
        0.0,
        lambda_max,
        [1.0, 0.0, 0.0, 0.0, 0.0],
        1e-12,
        1e-12,
    )?;
    Ok(STCoordinates {
        sp: *sp,
        r1,
        r3,
        sol,
        lambda_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derived_initials() {
        let sp = SeedParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(sp.yp0, 0.0);
        assert_eq!(sp.zp0, 0.0);
        assert_eq!(sp.a_hat, 0.0);
        assert_eq!(sp.rho00, 0.0);

        // b = a kills z'(0)
        let sp = SeedParams::new(1.7, 1.7, 2.3).unwrap();
        assert_eq!(sp.zp0, 0.0);

        let sp = SeedParams::new(1.0, 3.0, 2.0).unwrap();
        assert!((sp.r1() - (-1.0 / 3.0)).abs() < 1e-15);
        assert!((sp.r3() - 25.0 / 16.0).abs() < 1e-15);

        assert!(SeedParams::new(0.9, 1.0, 1.0).is_err());
    }

    #[test]
    fn quartic_factored_vs_expanded() {
        for (a, b, c) in [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (1.3, 2.5, 1.7), (1.0, 3.0, 2.0)] {
            let sp = SeedParams::new(a, b, c).unwrap();
            for k in 0..10 {
                let x = -2.0 + 4.0 * k as f64 / 9.0;
                assert!(
                    (sp.p0(x) - sp.p0_expanded(x)).abs() <= 1e-10 * (1.0 + sp.p0(x).abs()),
                    "({a},{b},{c}) at x={x}"
                );
            }
        }
    }

    #[test]
    fn double_root_iff_a_is_one() {
        let sp = SeedParams::new(1.0, 2.0, 3.0).unwrap();
        let (lo, hi) = sp.p0_positive_roots();
        assert!((lo - hi).abs() < 1e-15);
        assert!((lo - 1.0 / 3.0).abs() < 1e-15);
        let sp = SeedParams::new(1.5, 2.0, 3.0).unwrap();
        let (lo, hi) = sp.p0_positive_roots();
        assert!(hi > lo);
    }

    #[test]
    fn equilibrium_seed_stays_at_zero() {
        let sp = SeedParams::new(1.0, 1.0, 1.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 10.0, 1e-12).unwrap();
        for k in 0..11 {
            let u = k as f64;
            let [y, z, _, _] = traj.state(u);
            assert_eq!(y, 0.0);
            assert_eq!(z, 0.0);
        }
    }

    #[test]
    fn z_vanishes_when_b_equals_a() {
        let sp = SeedParams::new(1.0, 1.0, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 8.0, 1e-12).unwrap();
        for k in 1..=16 {
            assert_eq!(traj.z(k as f64 / 2.0), 0.0);
        }
    }

    #[test]
    fn conserved_quantities_drift() {
        let sp = SeedParams::new(1.0, 2.0, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 5.0, 1e-12).unwrap();
        let (h0, k0) = traj.conserved_at(0.0);
        let (h5, k5) = traj.conserved_at(5.0);
        assert!((h0 - traj.h).abs() < 1e-14);
        assert!((k0 - traj.k).abs() < 1e-14);
        assert!((h5 - h0).abs() < 1e-9, "h drift {}", (h5 - h0).abs());
        assert!((k5 - k0).abs() < 1e-9, "k drift {}", (k5 - k0).abs());
    }

    #[test]
    fn sigma_values() {
        let sp = SeedParams::new(1.0, 1.0, 1.0).unwrap();
        assert!((sigma(&sp).unwrap() - PI).abs() < 1e-14);
        let sp = SeedParams::new(1.0, 2.0, 2.0).unwrap();
        assert!((sigma(&sp).unwrap() - 4.0 * PI / 27.0_f64.sqrt()).abs() < 1e-13);
        // continuity across the double-root boundary
        let s_const = sigma(&SeedParams::new(1.0, 2.0, 2.0).unwrap()).unwrap();
        let s_quad = sigma(&SeedParams::new(1.001, 2.0, 2.0).unwrap()).unwrap();
        assert!((s_quad - s_const).abs() < 1e-3, "{s_quad} vs {s_const}");
    }

    #[test]
    fn sigma_quadrature_matches_ode_half_period() {
        // X(v) runs from 1/(ac) to a/c in exactly one half-period
        let sp = SeedParams::new(2.0, 1.0, 2.0).unwrap();
        let sg = sigma(&sp).unwrap();
        let profile = solve_x(&sp, 256).unwrap();
        assert!((profile.x(0.0) - 0.25).abs() < 1e-12);
        assert!((profile.x(sg) - 1.0).abs() < 1e-6, "X(sigma) = {}", profile.x(sg));
        // X' vanishes at sigma and nowhere inside
        for k in 1..20 {
            let v = sg * k as f64 / 20.0;
            assert!(profile.xv(v) > 0.0, "X' must be positive inside (0, sigma)");
        }
    }

    #[test]
    fn profile_first_order_residual() {
        let sp = SeedParams::new(2.0, 1.0, 2.0).unwrap();
        let profile = solve_x(&sp, 256).unwrap();
        let sg = profile.sigma;
        let mut worst = 0.0_f64;
        for k in 0..=400 {
            let v = 2.0 * sg * k as f64 / 400.0;
            let x = profile.x(v);
            let xv = profile.xv(v);
            worst = worst.max((4.0 * xv * xv - sp.p0(x)).abs());
        }
        assert!(worst <= 1e-9, "residual {worst}");
    }

    #[test]
    fn constant_profile_at_double_root() {
        let sp = SeedParams::new(1.0, 2.0, 3.0).unwrap();
        let profile = solve_x(&sp, 64).unwrap();
        for k in 0..10 {
            assert_eq!(profile.x(k as f64), 1.0 / 3.0);
        }
    }

    #[test]
    fn first_y_zero() {
        // pure-y oscillator at b = 1: independent quadrature oracle for u1
        let sp = SeedParams::new(1.0, 1.0, 3.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 8.0, 1e-12).unwrap();
        let u1 = find_u1(&traj).unwrap();

        let a_hat = sp.a_hat;
        let h0 = sp.yp0 * sp.yp0;
        let ym2 = 0.5 * ((a_hat - 1.0) + ((a_hat - 1.0).powi(2) + 4.0 * h0).sqrt());
        let ym = ym2.sqrt();
        // y'^2 = h0 + (a_hat - 1) y^2 - y^4 = (ym^2 - y^2)(y^2 + h0/ym^2),
        // so u1 = 2 int_0^{ym} dy / y'. The lower endpoint is regular; the
        // turning point at ym gets the y = ym - t^2 substitution.
        let mid = 0.7 * ym;
        let part_regular = quad::integrate(
            |y| 1.0 / ((ym2 - y * y) * (y * y + h0 / ym2)).sqrt(),
            0.0,
            mid,
            1e-13,
        )
        .unwrap();
        let part_turning = quad::integrate(
            |t| {
                let y = ym - t * t;
                2.0 / ((ym + y) * (y * y + h0 / ym2)).sqrt()
            },
            0.0,
            (ym - mid).sqrt(),
            1e-13,
        )
        .unwrap();
        let u1_quad = 2.0 * (part_regular + part_turning);
        assert!(
            (u1 - u1_quad).abs() < 1e-9,
            "ODE u1 = {u1}, quadrature = {u1_quad}"
        );

        // y stays positive strictly inside (0, u1)
        for k in 1..20 {
            assert!(traj.y(u1 * k as f64 / 20.0) > 0.0);
        }

        // c = 1 rejected
        let sp = SeedParams::new(1.0, 2.0, 1.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 8.0, 1e-12).unwrap();
        assert!(find_u1(&traj).is_err());
    }

    #[test]
    fn orthogonal_contact_parameter() {
        let amb = Ambient::new(1, 0.0).unwrap();
        // z == 0 collapses tau onto u1
        let sp = SeedParams::new(1.5, 1.5, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 10.0, 1e-12).unwrap();
        let tau = find_tau(&traj, &amb).unwrap();
        let u1 = find_u1(&traj).unwrap();
        assert!((tau - u1).abs() < 1e-12);

        // generic case: y(tau) = z(tau), y > z before
        let sp = SeedParams::new(1.0, 2.0, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 10.0, 1e-12).unwrap();
        let tau = find_tau(&traj, &amb).unwrap();
        assert!((traj.y(tau) - traj.z(tau)).abs() < 1e-10);
        for k in 1..=10 {
            let u = tau * k as f64 / 11.0;
            assert!(traj.y(u) > traj.z(u));
        }
        let u1 = find_u1(&traj).unwrap();
        assert!(tau <= u1 + 1e-12);

        // complement of the region: refused
        let sp = SeedParams::new(1.0, 3.0, 1.05).unwrap();
        let flags = region_flags(&sp, &amb);
        assert!(!flags.in_w);
        let traj = integrate_hamiltonian(&sp, 10.0, 1e-12).unwrap();
        assert!(find_tau(&traj, &amb).is_err());
        // and indeed y < z immediately
        assert!(traj.y(0.05) < traj.z(0.05));
    }

    #[test]
    fn region_examples() {
        let amb = Ambient::new(1, 0.0).unwrap();
        for (b, c) in [(1.0, 1.0), (2.0, 1.5), (3.0, 3.0)] {
            let sp = SeedParams::new(1.0, b, c).unwrap();
            assert!(region_flags(&sp, &amb).in_r, "(1, {b}, {c}) must be rotational");
        }
        let amb = Ambient::new(-1, 1.25).unwrap();
        assert!((amb.mu - 0.75).abs() < 1e-15);
        let sp = SeedParams::new(1.0, 2.0, 1.0).unwrap();
        assert!(!region_flags(&sp, &amb).in_r);

        let amb = Ambient::new(1, 0.0).unwrap();
        assert!(!in_w_hat(0.0, 1.0, &amb), "boundary point must be excluded");
        assert!(in_w_hat(0.0, 1.01, &amb));
    }

    #[test]
    fn rho_field_symmetries_and_flat_solution() {
        let sp = SeedParams::new(1.0, 1.0, 1.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 2.0, 1e-12).unwrap();
        let profile = solve_x(&sp, 64).unwrap();
        let field = solve_rho(&sp, &traj, &profile, 2.0, 8, 8).unwrap();
        assert!(field.vals.iter().all(|&r| r == 0.0));

        let sp = SeedParams::new(2.0, 1.0, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 3.0, 1e-12).unwrap();
        let profile = solve_x(&sp, 256).unwrap();
        let field = solve_rho(&sp, &traj, &profile, 3.0, 24, 32).unwrap();
        let (nu, nv) = (field.us.len(), field.vs.len());
        // u-evenness
        for iu in 0..nu {
            for iv in 0..nv {
                let mirrored = field.at(nu - 1 - iu, iv);
                assert!((field.at(iu, iv) - mirrored).abs() < 1e-8);
            }
        }
        // v-reflection across sigma (vs spans [0, 2 sigma])
        for iu in 0..nu {
            for iv in 0..nv {
                let jv = nv - 1 - iv;
                assert!((field.at(iu, iv) - field.at(iu, jv)).abs() < 1e-8);
            }
        }
        // first-order relation rho_u = y cosh rho + z sinh rho (FD in u)
        let hu = field.hu();
        let mut worst = 0.0_f64;
        for iu in 1..nu - 1 {
            for iv in 0..nv {
                let du = (field.at(iu + 1, iv) - field.at(iu - 1, iv)) / (2.0 * hu);
                let r = field.at(iu, iv);
                let [y, z, _, _] = traj.state(field.us[iu]);
                worst = worst.max((du - (y * r.cosh() + z * r.sinh())).abs());
            }
        }
        assert!(worst < hu * hu * 10.0, "first-order residual {worst}");
    }

    #[test]
    fn sinh_gordon_residual_second_order() {
        let sp = SeedParams::new(2.0, 1.0, 2.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 2.0, 1e-12).unwrap();
        let profile = solve_x(&sp, 256).unwrap();
        let mut res = Vec::new();
        for n in [64usize, 128, 256] {
            let field = solve_rho(&sp, &traj, &profile, 2.0, n, n).unwrap();
            res.push(field.sinh_gordon_residual());
        }
        let rate1 = (res[0] / res[1]).log2();
        let rate2 = (res[1] / res[2]).log2();
        assert!(
            rate1 > 1.9 && rate2 > 1.9,
            "refinement rates {rate1:.2}, {rate2:.2} (residuals {res:?})"
        );
    }

    #[test]
    fn st_coordinates_reconstruct_oscillators() {
        let sp = SeedParams::new(1.0, 2.0, 2.0).unwrap();
        let st = solve_st(&sp, 6.0).unwrap();
        let traj = integrate_hamiltonian(&sp, 10.0, 1e-12).unwrap();
        // q matches its double-root factorization
        for k in 0..10 {
            let x = -1.0 + 3.0 * k as f64 / 9.0;
            let f = -(x - st.r1) * (x - st.r1) * (x - st.r3);
            assert!((sp.q_cubic(x) - f).abs() < 1e-10);
        }
        let mut worst = 0.0_f64;
        for k in 0..=60 {
            let l = 6.0 * k as f64 / 60.0;
            let [s, _, t, _, u] = st.state(l);
            assert!((1.0 - 1e-8..=st.r3 + 1e-8).contains(&s));
            assert!((st.r1 - 1e-8..=1e-8).contains(&t));
            assert!(s - t >= 1.0 - 1e-8, "parameter rate 2 du/dl = s - t >= 1");
            let [y, z, _, _] = traj.state(u);
            worst = worst.max((y * y - (s - 1.0) * (1.0 - t)).abs());
            worst = worst.max((z * z + s * t).abs());
        }
        assert!(worst <= 1e-7, "reconstruction error {worst}");

        // b = 1 (r1 = 0) forces t == 0
        let sp = SeedParams::new(1.0, 1.0, 2.0).unwrap();
        let st = solve_st(&sp, 6.0).unwrap();
        for k in 0..=20 {
            assert!(st.t(6.0 * k as f64 / 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seed_round_trip_through_r1_r3() {
        let sp = SeedParams::new(1.0, 2.7, 1.8).unwrap();
        let back = seed_from_r1_r3(sp.r1(), sp.r3()).unwrap();
        assert!((back.b - 2.7).abs() < 1e-12);
        assert!((back.c - 1.8).abs() < 1e-12);
    }
}
