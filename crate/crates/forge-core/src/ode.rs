//! Adaptive Dormand–Prince 5(4) integration with continuous (dense) output.
//!
//! The integrator is generic over the state dimension `N` and keeps every
//! accepted step together with the interpolation coefficients, so solutions
//! can be evaluated anywhere in the integrated interval after the fact.
//! This is what the downstream root finders (first zero of `y`, first
//! `y = z` contact, free-boundary arclength, ...) operate on.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];

// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// Dense-output weights (Hairer's continuous extension of order 4).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its interpolation polynomial.
#[derive(Clone, Debug)]
struct Segment<const N: usize> {
    t0: f64,
    h: f64,
    r1: [f64; N],
    r2: [f64; N],
    r3: [f64; N],
    r4: [f64; N],
    r5: [f64; N],
}

impl<const N: usize> Segment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = self.r1[i]
                + th * (self.r2[i] + th1 * (self.r3[i] + th * (self.r4[i] + th1 * self.r5[i])));
        }
        y
    }
}

/// Dense solution of an initial value problem on `[t0, t1]`.
///
/// Integration direction may be forward or backward; `eval` accepts any `t`
/// inside the integrated interval (endpoints clamped within `1e-12`).
#[derive(Clone, Debug)]
pub struct DenseSolution<const N: usize> {
    t_start: f64,
    t_end: f64,
    segments: Vec<Segment<N>>,
    y_end: [f64; N],
    pub steps: usize,
}

impl<const N: usize> DenseSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn y_end(&self) -> [f64; N] {
        self.y_end
    }

    /// Evaluate the interpolant at `t`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let forward = self.t_end >= self.t_start;
        let (lo, hi) = if forward {
            (self.t_start, self.t_end)
        } else {
            (self.t_end, self.t_start)
        };
        let t = t.clamp(lo - 1e-9, hi + 1e-9);
        // binary search for the segment containing t
        let mut a = 0usize;
        let mut b = self.segments.len();
        while b - a > 1 {
            let m = (a + b) / 2;
            let seg = &self.segments[m];
            let inside_left = if forward { t >= seg.t0 } else { t <= seg.t0 };
            if inside_left {
                a = m;
            } else {
                b = m;
            }
        }
        self.segments[a].eval(t)
    }
}

/// Integrate `dy/dt = f(t, y)` from `(t0, y0)` to `t1` with dense output.
///
/// `rtol`/`atol` control the local error; the step count is capped to guard
/// against runaway step rejection, which is reported as an error with the
/// location of the failure.
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    rtol: f64,
    atol: f64,
) -> Result<DenseSolution<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    if span == 0.0 {
        return Ok(DenseSolution {
            t_start: t0,
            t_end: t1,
            segments: vec![Segment {
                t0,
                h: dir * 1e-300,
                r1: y0,
                r2: [0.0; N],
                r3: [0.0; N],
                r4: [0.0; N],
                r5: [0.0; N],
            }],
            y_end: y0,
            steps: 0,
        });
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = dir * (span / 100.0).clamp(1e-10, 1e-2);
    let max_steps = 4_000_000usize;
    let mut segments: Vec<Segment<N>> = Vec::new();
    let mut nstep = 0usize;
    let mut err_old: f64 = 1e-4;

    while (t1 - t) * dir > 1e-14 * span.max(1.0) {
        if nstep >= max_steps {
            return Err(Error::Integration {
                at: t,
                what: format!("step limit {max_steps} exceeded"),
            });
        }
        nstep += 1;
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }

        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let stage = |y: &[f64; N], k: &[[f64; N]; 7], coeffs: &[f64], h: f64| {
            let mut out = *y;
            for (j, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    for i in 0..N {
                        out[i] += h * a * k[j][i];
                    }
                }
            }
            out
        };
        k[1] = f(t + C[1] * h, &stage(&y, &k, &A2, h));
        k[2] = f(t + C[2] * h, &stage(&y, &k, &A3, h));
        k[3] = f(t + C[3] * h, &stage(&y, &k, &A4, h));
        k[4] = f(t + C[4] * h, &stage(&y, &k, &A5, h));
        k[5] = f(t + C[5] * h, &stage(&y, &k, &A6, h));
        let y_new = stage(&y, &k, &A7, h);
        k[6] = f(t + h, &y_new);

        // error estimate
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            e *= h;
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / N as f64).sqrt().max(1e-30);

        if err <= 1.0 {
            // accept: build dense coefficients
            let mut r1 = [0.0; N];
            let mut r2 = [0.0; N];
            let mut r3 = [0.0; N];
            let mut r4 = [0.0; N];
            let mut r5 = [0.0; N];
            for i in 0..N {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                r1[i] = y[i];
                r2[i] = ydiff;
                r3[i] = bspl;
                r4[i] = ydiff - h * k[6][i] - bspl;
                let mut d = 0.0;
                for j in 0..7 {
                    d += D[j] * k[j][i];
                }
                r5[i] = h * d;
            }
            segments.push(Segment {
                t0: t,
                h,
                r1,
                r2,
                r3,
                r4,
                r5,
            });
            t += h;
            y = y_new;
            k1 = k[6]; // FSAL
            // PI step-size control
            let fac = 0.9 * err.powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 6.0);
            err_old = err;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h.abs() < 1e-14 * span.max(1.0) {
                return Err(Error::Integration {
                    at: t,
                    what: "step size underflow".into(),
                });
            }
        }
    }

    Ok(DenseSolution {
        t_start: t0,
        t_end: t1,
        segments,
        y_end: y,
        steps: nstep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_round_trip() {
        let sol = integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            2.0 * std::f64::consts::PI,
            [1.0, 0.0],
            1e-12,
            1e-12,
        )
        .unwrap();
        let y = sol.y_end();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn dense_output_matches_exact_solution() {
        let sol = integrate(|_t, y: &[f64; 1]| [-y[0]], 0.0, 5.0, [1.0], 1e-12, 1e-12).unwrap();
        for k in 0..61 {
            let t = 5.0 * k as f64 / 60.0;
            let y = sol.eval(t);
            assert!(
                (y[0] - (-t).exp()).abs() < 1e-10,
                "t={t}, err={}",
                (y[0] - (-t).exp()).abs()
            );
        }
    }

    #[test]
    fn backward_integration() {
        let sol = integrate(|t, _y: &[f64; 1]| [t.cos()], 1.0, -1.0, [1.0_f64.sin()], 1e-12, 1e-12)
            .unwrap();
        let y = sol.eval(-0.5);
        assert!((y[0] - (-0.5_f64).sin()).abs() < 1e-10);
    }
}
