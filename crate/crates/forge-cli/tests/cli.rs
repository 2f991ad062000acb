//! End-to-end driver tests: each command through the real binary on
//! temporary directories.

use std::fs;
use std::path::Path;
use std::process::Command;

fn forge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forge"))
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn rotational_catenoid_certifies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{ "epsilon": 1, "h": 0.0, "delta": 0.3 }"#);
    let out = tmp.path().join("out");
    let status = forge()
        .args(["rotational", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["rotational"]["kind"], "Catenoid");
    assert!(r["rotational"]["axis_cross_residual"].as_f64().unwrap() < 1e-10);
    assert!(out.join("rotational.obj").exists());
    assert!(out.join("rotational.ply").exists());
    assert!(out.join("rotational.sidecar.json").exists());
}

#[test]
fn rotational_meshes_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{ "epsilon": 1, "h": 0.0, "delta": 0.3 }"#);
    let out1 = tmp.path().join("o1");
    let out2 = tmp.path().join("o2");
    for out in [&out1, &out2] {
        assert!(forge()
            .args(["rotational", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status()
            .unwrap()
            .success());
    }
    for name in ["report.json", "rotational.ply", "rotational.obj", "rotational.sidecar.json"] {
        assert_eq!(
            fs::read(out1.join(name)).unwrap(),
            fs::read(out2.join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
}

#[test]
fn rotational_flat_torus_branch() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{ "epsilon": 1, "h": 0.0, "delta": 0.5 }"#);
    let out = tmp.path().join("out");
    assert!(forge()
        .args(["rotational", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let r = report(&out);
    assert_eq!(r["rotational"]["kind"], "FlatTorus");
    let gap = r["rotational"]["flat_torus_s_free_gap"].as_f64().unwrap();
    assert!(gap < 1e-10, "closed-form gap {gap}");
}

#[test]
fn rotational_rejects_zero_delta() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "cfg.json", r#"{ "epsilon": 1, "h": 0.0, "delta": 0.0 }"#);
    let out = tmp.path().join("out");
    let status = forge()
        .args(["rotational", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "delta = 0 must be a usage error");
}

#[test]
fn sweep_is_deterministic_and_verify_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{ "epsilon": -1, "h": 1.5, "theta": "-1/2" }"#,
    );
    let out1 = tmp.path().join("o1");
    let out2 = tmp.path().join("o2");
    for out in [&out1, &out2] {
        assert!(forge()
            .args(["sweep", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status()
            .unwrap()
            .success());
    }
    // bit-identical reports and tables
    assert_eq!(
        fs::read(out1.join("report.json")).unwrap(),
        fs::read(out2.join("report.json")).unwrap()
    );
    assert_eq!(
        fs::read(out1.join("sweep.csv")).unwrap(),
        fs::read(out2.join("sweep.csv")).unwrap()
    );
    let r = report(&out1);
    assert!(r["sweeps"][0]["r_star"].as_f64().unwrap() > 0.0);

    // rotational emission, then verify it round-trips
    let cfg_rot = write_cfg(
        tmp.path(),
        "rot.json",
        r#"{ "epsilon": -1, "h": 1.5, "delta": 2.236067977499790 }"#,
    );
    let out_rot = tmp.path().join("rot");
    assert!(forge()
        .args(["rotational", "--config", &cfg_rot, "--out", out_rot.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let mesh_path = out_rot.join("rotational.ply");
    let cfg_ver = write_cfg(
        tmp.path(),
        "ver.json",
        &format!(
            r#"{{ "epsilon": -1, "h": 1.5, "mesh": "{}" }}"#,
            mesh_path.to_str().unwrap().replace('\\', "/")
        ),
    );
    let out_ver = tmp.path().join("ver");
    assert!(forge()
        .args(["verify", "--config", &cfg_ver, "--out", out_ver.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let rv = report(&out_ver);
    assert_eq!(rv["verify"]["containment_pass"], true);
    assert_eq!(rv["verify"]["sphere_pass"], true);
    assert_eq!(rv["verify"]["embedded"], true);

    // negative control: shrink the ball in the sidecar; containment fails
    let side_path = out_rot.join("rotational.sidecar.json");
    let mut side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&side_path).unwrap()).unwrap();
    let d = side["ball_d"].as_f64().unwrap();
    side["ball_d"] = serde_json::json!(d + 0.05);
    let bad_ply = tmp.path().join("bad.ply");
    fs::copy(&mesh_path, &bad_ply).unwrap();
    fs::write(tmp.path().join("bad.sidecar.json"), side.to_string()).unwrap();
    let cfg_bad = write_cfg(
        tmp.path(),
        "bad.json",
        &format!(
            r#"{{ "epsilon": -1, "h": 1.5, "mesh": "{}" }}"#,
            bad_ply.to_str().unwrap().replace('\\', "/")
        ),
    );
    let out_bad = tmp.path().join("badout");
    let status = forge()
        .args(["verify", "--config", &cfg_bad, "--out", out_bad.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1), "containment failure must exit 1");
    let rb = report(&out_bad);
    assert_eq!(rb["verify"]["containment_pass"], false);
}

#[test]
fn family_command_emits_certified_members() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{ "epsilon": -1, "h": 1.5, "theta": "-1/2", "eta_list": [0.0, 0.01],
             "grid": {"n_u": 24, "n_v": 96} }"#,
    );
    let out = tmp.path().join("out");
    assert!(forge()
        .args(["family", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let r = report(&out);
    let certs = r["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 2);
    // first requested member is the rotational cover at the seed
    assert_eq!(certs[0]["rotational_orbit"], true);
    assert_eq!(certs[1]["rotational_orbit"], false);
    for c in certs {
        assert_eq!(c["passed"], true, "failures: {}", c["failures"]);
        assert_eq!(c["embedded"], true);
        assert_eq!(c["rotation_index"], -1);
    }
    // family table has full-precision rows for the whole curve, with the
    // certificate columns filled on certified members
    let csv = fs::read_to_string(out.join("family.csv")).unwrap();
    assert!(csv.lines().count() >= 4);
    assert!(csv.starts_with("eta,a,b,c,theta,center_height,tau,angle_low,angle_high,embedded"));
    assert!(csv.contains(",true"));
    assert!(out.join("family_0.ply").exists() && out.join("family_1.ply").exists());
}

#[test]
fn capillary_command_emits_seed_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{ "epsilon": 1, "h": 0.0, "n": 2, "capillary_perturbations": [],
             "grid": {"n_u": 16, "n_v": 64} }"#,
    );
    let out = tmp.path().join("out");
    assert!(forge()
        .args(["capillary", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let r = report(&out);
    assert_eq!(r["capillary"]["flat_torus_branch"], true);
    let cert = &r["certificates"][0];
    assert_eq!(cert["passed"], true);
    // constant contact angle away from a right angle
    let lo = cert["contact_angle_low"].as_f64().unwrap();
    assert!((lo - std::f64::consts::FRAC_PI_2).abs() > 0.1);
    assert!(out.join("capillary.csv").exists());
}

#[test]
fn cli_overrides_apply() {
    let tmp = tempfile::tempdir().unwrap();
    // config says hyperbolic; flags override to an invalid sphere setup,
    // which must be rejected at validation time
    let cfg = write_cfg(
        tmp.path(),
        "cfg.json",
        r#"{ "epsilon": -1, "h": 1.5, "theta": "-1/2" }"#,
    );
    let out = tmp.path().join("out");
    let status = forge()
        .args([
            "sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--eps",
            "-1",
            "--H",
            "0.5",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "H^2 + eps <= 0 must be rejected");
    // theta override lands in the echoed config
    let status = forge()
        .args([
            "sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--theta",
            "-1/3",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let r = report(&out);
    assert_eq!(r["config"]["theta"], "-1/3");
    assert!((r["sweeps"][0]["theta0"].as_f64().unwrap() + 1.0 / 3.0).abs() < 1e-15);
}
