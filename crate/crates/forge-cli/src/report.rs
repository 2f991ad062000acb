//! Report documents written by the driver. The main report is fully
//! deterministic for a fixed config (timings go to a separate file).

use forge_core::search::{AnnulusCertificate, CapillaryFamily, FamilyCurve, JInterval, LevelSweep};
use forge_core::spaceform::Vec4;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmbientEcho {
    pub epsilon: i32,
    pub h: f64,
    pub mu: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationalReport {
    pub delta: f64,
    pub kind: String,
    pub s_free: f64,
    pub ball_d: f64,
    pub axis_cross_residual: f64,
    /// Gap of the boundary conormal from the sphere normal direction.
    pub orthogonality_gap: f64,
    pub containment_margin: f64,
    pub embedded: bool,
    /// Closed-form check on the flat-torus edge, when applicable.
    pub flat_torus_s_free_gap: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mesh: String,
    pub manifold_residual: f64,
    pub boundary_sphere_residual: f64,
    pub containment_margin: f64,
    pub embedded: bool,
    pub containment_pass: bool,
    pub sphere_pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshSidecar {
    pub epsilon: i32,
    pub h: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub u0: f64,
    pub m: i64,
    pub n: i64,
    pub mode: String,
    pub ball_center: Vec4,
    pub ball_d: f64,
    pub rows: usize,
    pub cols: usize,
    pub closed_v: bool,
    pub boundary: [Vec<u32>; 2],
    pub cert_tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub mode: String,
    pub config: RunConfig,
    pub ambient: AmbientEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval_j: Option<JInterval>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sweeps: Vec<LevelSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capillary: Option<CapillaryFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotational: Option<RotationalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
    pub certificates: Vec<AnnulusCertificate>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub stages: Vec<(String, f64)>,
}
