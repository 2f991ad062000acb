//! Ambient geometry of the space form `M^3(eps)` realized as a quadric in
//! `R^4` with the inner product `dx1^2 + dx2^2 + dx3^2 + eps dx4^2`.
//!
//! `eps = +1` gives the round sphere `S^3`, `eps = -1` the hyperboloid model
//! of `H^3` (upper sheet, `x4 > 0`). All downstream modules express their
//! geometry through the handful of primitives here: the signed inner
//! product, geodesics, totally umbilic surfaces `S[m, d]`, geodesic balls,
//! and the two projections (stereographic and totally geodesic).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Point or vector of `R^4` with the ambient signature fixed by context.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const E1: Vec4 = Vec4([1.0, 0.0, 0.0, 0.0]);
    pub const E2: Vec4 = Vec4([0.0, 1.0, 0.0, 0.0]);
    pub const E3: Vec4 = Vec4([0.0, 0.0, 1.0, 0.0]);
    pub const E4: Vec4 = Vec4([0.0, 0.0, 0.0, 1.0]);

    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Vec4([x1, x2, x3, x4])
    }

    pub fn zero() -> Self {
        Vec4([0.0; 4])
    }

    /// Euclidean norm of the coordinate vector (no signature).
    pub fn norm_euclid(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    pub fn x3(&self) -> f64 {
        self.0[2]
    }
    pub fn x4(&self) -> f64 {
        self.0[3]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    fn add(self, o: Vec4) -> Vec4 {
        Vec4([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    fn mul(self, s: f64) -> Vec4 {
        Vec4([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    fn neg(self) -> Vec4 {
        self * -1.0
    }
}

/// Signed inner product `x1 y1 + x2 y2 + x3 y3 + eps x4 y4`.
pub fn inner(x: &Vec4, y: &Vec4, eps: f64) -> f64 {
    x.0[0] * y.0[0] + x.0[1] * y.0[1] + x.0[2] * y.0[2] + eps * x.0[3] * y.0[3]
}

/// Ambient data: curvature sign, mean curvature, and the derived constants
/// `mu = sqrt(H^2 + eps)` and the Hopf constant `Q = 1/(8 mu)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ambient {
    pub eps: f64,
    pub h: f64,
    pub mu: f64,
    pub q_hopf: f64,
}

impl Ambient {
    /// `epsilon` must be `+1` or `-1`, `h >= 0`, and `h^2 + epsilon > 0`
    /// (so `h > 1` in the hyperbolic case).
    pub fn new(epsilon: i32, h: f64) -> Result<Ambient> {
        if epsilon != 1 && epsilon != -1 {
            return Err(Error::Domain(format!("epsilon must be +-1, got {epsilon}")));
        }
        let eps = epsilon as f64;
        if h < 0.0 || h.is_nan() {
            return Err(Error::Domain(format!("mean curvature must be >= 0, got {h}")));
        }
        let mu2 = h * h + eps;
        if mu2 <= 0.0 {
            return Err(Error::Domain(format!(
                "H^2 + eps = {mu2} must be positive (H = {h}, eps = {epsilon})"
            )));
        }
        let mu = mu2.sqrt();
        Ok(Ambient {
            eps,
            h,
            mu,
            q_hopf: 1.0 / (8.0 * mu),
        })
    }

    pub fn inner(&self, x: &Vec4, y: &Vec4) -> f64 {
        inner(x, y, self.eps)
    }

    /// Whether `x` lies on the quadric `⟨x, x⟩ = eps` (upper sheet for
    /// `eps = -1`) within `tol`.
    pub fn on_manifold(&self, x: &Vec4, tol: f64) -> bool {
        let r = (self.inner(x, x) - self.eps).abs();
        r <= tol && (self.eps > 0.0 || x.x4() > 0.0)
    }
}

/// Totally umbilic surface `S[m, d] = { x : ⟨x, m⟩ = d }`, stored with
/// `⟨m, m⟩` normalized to `{0, -1, +1}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UmbilicSurface {
    pub m: Vec4,
    pub d: f64,
    /// `⟨m, m⟩` after normalization.
    pub m_norm_class: f64,
}

impl UmbilicSurface {
    /// Normalize `(m, d)` (defined only up to a common factor): scale so
    /// `⟨m, m⟩ ∈ {0, -1, +1}`, then pick the sign with `d >= 0`, breaking
    /// ties by the first nonzero coordinate of `m`.
    pub fn new(m: Vec4, d: f64, amb: &Ambient) -> Result<UmbilicSurface> {
        if m.norm_euclid() == 0.0 {
            return Err(Error::Degenerate("umbilic surface needs m != 0".into()));
        }
        let mm = amb.inner(&m, &m);
        let scale_sq = mm.abs();
        let (m, d, class) = if scale_sq < 1e-14 * m.norm_euclid().powi(2) {
            // lightlike m: no scale normalization available
            (m, d, 0.0)
        } else {
            let s = scale_sq.sqrt();
            (m * (1.0 / s), d / s, mm.signum())
        };
        if class != 0.0 && class - amb.eps * d * d <= 0.0 {
            return Err(Error::Degenerate(format!(
                "S[m, d] empty: |m|^2 - eps d^2 = {}",
                class - amb.eps * d * d
            )));
        }
        // horosphere case: the sheet condition x4 > 0 forces d and m4 to
        // have opposite signs
        if amb.eps < 0.0 && class == 0.0 && d * m.x4() > 0.0 {
            return Err(Error::Degenerate(
                "S[m, d] empty: d and m4 must have opposite signs".into(),
            ));
        }
        let (m, d) = if d < 0.0 || (d == 0.0 && first_nonzero_sign(&m) < 0.0) {
            (-m, -d)
        } else {
            (m, d)
        };
        Ok(UmbilicSurface {
            m,
            d,
            m_norm_class: class,
        })
    }

    /// Signed residual of a point against the surface equation.
    pub fn residual(&self, x: &Vec4, amb: &Ambient) -> f64 {
        amb.inner(x, &self.m) - self.d
    }
}

fn first_nonzero_sign(m: &Vec4) -> f64 {
    for &c in &m.0 {
        if c != 0.0 {
            return c.signum();
        }
    }
    0.0
}

/// Geodesic ball `B[center, d] = { x : ⟨x, center⟩ >= d }` with center on
/// the manifold.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GeodesicBall {
    pub center: Vec4,
    pub d: f64,
}

impl GeodesicBall {
    pub fn new(center: Vec4, d: f64, amb: &Ambient) -> Result<GeodesicBall> {
        if !amb.on_manifold(&center, 1e-8) {
            return Err(Error::Domain("ball center must lie on the manifold".into()));
        }
        let ok = if amb.eps > 0.0 { d.abs() < 1.0 } else { d < -1.0 };
        if !ok {
            return Err(Error::Domain(format!(
                "ball radius parameter d = {d} outside range for eps = {}",
                amb.eps
            )));
        }
        Ok(GeodesicBall { center, d })
    }

    /// `⟨x, center⟩ - d`; nonnegative inside the ball.
    pub fn depth(&self, x: &Vec4, amb: &Ambient) -> f64 {
        amb.inner(x, &self.center) - self.d
    }
}

/// Point of the geodesic through `p` with unit tangent `t` at arclength `s`.
///
/// Closed form: `cos(s) p + sin(s) t` on the sphere, `cosh(s) p + sinh(s) t`
/// on the hyperboloid. `(p, t)` must be orthonormal for the ambient metric.
pub fn geodesic_point(p: &Vec4, t: &Vec4, s: f64, amb: &Ambient) -> Result<Vec4> {
    check_orthonormal(p, t, amb)?;
    Ok(geodesic_point_unchecked(p, t, s, amb))
}

pub(crate) fn geodesic_point_unchecked(p: &Vec4, t: &Vec4, s: f64, amb: &Ambient) -> Vec4 {
    if amb.eps > 0.0 {
        *p * s.cos() + *t * s.sin()
    } else {
        *p * s.cosh() + *t * s.sinh()
    }
}

fn check_orthonormal(p: &Vec4, t: &Vec4, amb: &Ambient) -> Result<()> {
    let tol = 1e-7;
    if (amb.inner(p, p) - amb.eps).abs() > tol
        || (amb.inner(t, t) - 1.0).abs() > tol
        || amb.inner(p, t).abs() > tol
    {
        return Err(Error::Domain(
            "geodesic initial data (p, t) not orthonormal".into(),
        ));
    }
    Ok(())
}

/// Minimal intrinsic distance from the geodesic `(p, t)` to `target`,
/// computed by closed-form projection onto the 2-plane span{p, t}.
///
/// The distance comes from the component of `target` orthogonal to the
/// plane (`sin` / `sinh` of the distance), which stays well-conditioned
/// when the geodesic passes through or very near the target; the
/// `acos`-of-projection form loses half the significant digits there.
pub fn geodesic_distance_to_point(p: &Vec4, t: &Vec4, target: &Vec4, amb: &Ambient) -> Result<f64> {
    check_orthonormal(p, t, amb)?;
    let qp = amb.inner(target, p);
    let qt = amb.inner(target, t);
    if amb.eps > 0.0 {
        let perp = *target - *p * qp - *t * qt;
        let s2 = amb.inner(&perp, &perp).max(0.0);
        // the projection onto the plane can vanish (target orthogonal to
        // the whole circle): distance is then pi/2
        if qp * qp + qt * qt < 1e-28 {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        Ok(s2.sqrt().clamp(0.0, 1.0).asin())
    } else {
        // q_par = A p - B t with A = -qp, B = -qt; need the plane component
        // timelike, i.e. A^2 > B^2, or the geodesic diverges from target
        let a = -qp;
        let b = -qt;
        if a * a - b * b <= 0.0 {
            return Err(Error::Degenerate(
                "geodesic diverges from target (no interior minimum)".into(),
            ));
        }
        let perp = *target - *p * a + *t * b;
        let s2 = amb.inner(&perp, &perp).max(0.0);
        Ok(s2.sqrt().asinh())
    }
}

/// True iff the geodesic `(p, t)` passes within `tol` of `target`.
pub fn geodesic_hits_point(p: &Vec4, t: &Vec4, target: &Vec4, amb: &Ambient, tol: f64) -> bool {
    geodesic_distance_to_point(p, t, target, amb)
        .map(|d| d <= tol)
        .unwrap_or(false)
}

/// Stereographic projection of `M^3(eps)` from `-e4` into `R^3`.
///
/// Maps `H^3` into the open unit ball and `{x3 = 0}` into the plane
/// `z = 0`. The pole `-e4` itself is rejected.
pub fn stereographic(x: &Vec4, amb: &Ambient) -> Result<[f64; 3]> {
    let den = 1.0 + x.x4();
    if den.abs() < 1e-12 {
        return Err(Error::Domain("stereographic pole -e4".into()));
    }
    if !amb.on_manifold(x, 1e-6) {
        return Err(Error::Domain("stereographic input off the manifold".into()));
    }
    Ok([x.x1() / den, x.x2() / den, x.x3() / den])
}

/// Totally geodesic projection of the slice `{x2 = 0, x4 > 0}` to the
/// plane: `(x1, 0, x3, x4) -> (x1/x4, x3/x4)`. Geodesics map to straight
/// lines; the axis `{x1 = x2 = 0}` maps into the vertical coordinate axis.
pub fn totally_geodesic_projection(x: &Vec4) -> Result<[f64; 2]> {
    if x.x4() <= 0.0 {
        return Err(Error::Domain(format!(
            "projection needs x4 > 0, got {}",
            x.x4()
        )));
    }
    if x.x2().abs() > 1e-9 {
        return Err(Error::Domain("projection needs x2 = 0".into()));
    }
    Ok([x.x1() / x.x4(), x.x3() / x.x4()])
}
