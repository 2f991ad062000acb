//! Run configuration: one human-editable JSON document, with every field
//! defaulted so minimal configs stay minimal. All effective values are
//! echoed into the report so runs are self-describing.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Space-form sign: +1 (sphere) or -1 (hyperbolic).
    pub epsilon: i32,
    /// Mean curvature, >= 0 with `h^2 + epsilon > 0`.
    pub h: f64,
    /// Period target as an irreducible fraction "m/n" with m < 0 < n.
    #[serde(default = "default_theta")]
    pub theta: String,
    /// Sweep mode: additional period targets (defaults to just `theta`).
    #[serde(default)]
    pub theta_list: Vec<String>,
    /// Rotational mode: flux-like profile parameter.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Family mode: requested pseudo-arclength values.
    #[serde(default = "default_eta_list")]
    pub eta_list: Vec<f64>,
    /// Continuation step.
    #[serde(default = "default_step")]
    pub continuation_step: f64,
    /// Capillary mode: symmetry order parameter (n >= 2).
    #[serde(default = "default_n")]
    pub n: i64,
    /// Capillary mode: (da, dc) perturbations of the seed.
    #[serde(default = "default_perturbations")]
    pub capillary_perturbations: Vec<(f64, f64)>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub grid: Grid,
    /// Verify mode: PLY mesh path (sidecar expected next to it).
    #[serde(default)]
    pub mesh: Option<String>,
}

fn default_theta() -> String {
    "-1/2".into()
}

fn default_eta_list() -> Vec<f64> {
    vec![0.01, 0.02]
}

fn default_step() -> f64 {
    5e-3
}

fn default_n() -> i64 {
    2
}

fn default_perturbations() -> Vec<(f64, f64)> {
    vec![(0.01, 0.005)]
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub ode_tol: f64,
    pub root_tol: f64,
    pub cert_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_tol: 1e-11,
            root_tol: 1e-10,
            cert_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n_u: usize,
    pub n_v: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_u: 48, n_v: 192 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon != 1 && self.epsilon != -1 {
            bail!("epsilon must be +1 or -1");
        }
        if self.h < 0.0 || self.h * self.h + self.epsilon as f64 <= 0.0 {
            bail!("need H >= 0 and H^2 + epsilon > 0 (got H = {})", self.h);
        }
        let t = self.tolerances;
        if t.ode_tol <= 0.0 || t.root_tol <= 0.0 || t.cert_tol <= 0.0 {
            bail!("tolerances must be positive");
        }
        self.theta_fraction()?;
        for t in &self.theta_list {
            parse_fraction(t)?;
        }
        Ok(())
    }

    /// All sweep targets: `theta` plus any `theta_list` entries.
    pub fn sweep_targets(&self) -> Result<Vec<(i64, i64)>> {
        let mut out = vec![self.theta_fraction()?];
        for t in &self.theta_list {
            out.push(parse_fraction(t)?);
        }
        Ok(out)
    }

    /// Parse `theta` as an irreducible fraction `m/n`, `m < 0 < n`.
    pub fn theta_fraction(&self) -> Result<(i64, i64)> {
        parse_fraction(&self.theta)
    }
}

/// Parse an irreducible fraction `m/n`, `m < 0 < n`.
fn parse_fraction(raw: &str) -> Result<(i64, i64)> {
    {
        let s = raw.trim();
        let (num, den) = s
            .split_once('/')
            .with_context(|| format!("theta must look like \"-1/2\", got {s:?}"))?;
        let m: i64 = num.trim().parse().context("theta numerator")?;
        let n: i64 = den.trim().parse().context("theta denominator")?;
        if !(m < 0 && n > 0) {
            bail!("theta = {s} must have m < 0 < n");
        }
        if gcd(-m, n) != 1 {
            bail!("theta = {s} must be irreducible");
        }
        Ok((m, n))
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}
