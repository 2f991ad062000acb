//! The five driver commands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use forge_core::mesh::TriMesh;
use forge_core::rotational::{self, RotationalParams};
use forge_core::search::{self, CertTolerances, ContactMode};
use forge_core::sinh_system::SeedParams;
use forge_core::spaceform::Ambient;

use crate::config::RunConfig;
use crate::report::{
    AmbientEcho, MeshSidecar, Report, RotationalReport, Timings, VerifyReport,
};

pub struct Runner {
    pub config: RunConfig,
    pub out: PathBuf,
    pub timings: Timings,
    t_last: Instant,
}

impl Runner {
    pub fn new(config: RunConfig, out: &Path) -> Result<Runner> {
        config.validate().context("invalid configuration")?;
        fs::create_dir_all(out)
            .with_context(|| format!("cannot create output directory {}", out.display()))?;
        Ok(Runner {
            config,
            out: out.to_path_buf(),
            timings: Timings::default(),
            t_last: Instant::now(),
        })
    }

    fn ambient(&self) -> Result<Ambient> {
        Ambient::new(self.config.epsilon, self.config.h).map_err(|e| anyhow!(e))
    }

    fn stage(&mut self, name: &str) {
        let dt = self.t_last.elapsed().as_secs_f64();
        self.timings.stages.push((name.to_string(), dt));
        self.t_last = Instant::now();
    }

    fn report_skeleton(&self, mode: &str) -> Result<Report> {
        let amb = self.ambient()?;
        Ok(Report {
            mode: mode.into(),
            config: self.config.clone(),
            ambient: AmbientEcho {
                epsilon: self.config.epsilon,
                h: self.config.h,
                mu: amb.mu,
            },
            interval_j: None,
            sweeps: Vec::new(),
            family: None,
            capillary: None,
            rotational: None,
            verify: None,
            certificates: Vec::new(),
            artifacts: Vec::new(),
            passed: false,
        })
    }

    fn cert_tols(&self) -> CertTolerances {
        CertTolerances {
            angle: self.config.tolerances.cert_tol,
            residual: self.config.tolerances.cert_tol,
            containment: 1e-8,
        }
    }

    fn write_mesh_bundle(
        &self,
        report: &mut Report,
        mesh: &TriMesh,
        sidecar: &MeshSidecar,
        stem: &str,
    ) -> Result<()> {
        let obj = self.out.join(format!("{stem}.obj"));
        let mut f = fs::File::create(&obj)?;
        mesh.write_obj(&mut f)?;
        let ply = self.out.join(format!("{stem}.ply"));
        let mut f = fs::File::create(&ply)?;
        mesh.write_ply(&mut f)?;
        let side = self.out.join(format!("{stem}.sidecar.json"));
        fs::write(&side, serde_json::to_string_pretty(sidecar)?)?;
        for p in [obj, ply, side] {
            report
                .artifacts
                .push(p.file_name().unwrap().to_string_lossy().into_owned());
        }
        Ok(())
    }

    fn finish(&mut self, mut report: Report) -> Result<bool> {
        self.stage("finish");
        report.artifacts.push("report.json".into());
        fs::write(
            self.out.join("report.json"),
            serde_json::to_string_pretty(&report)?,
        )?;
        fs::write(
            self.out.join("timings.json"),
            serde_json::to_string_pretty(&self.timings)?,
        )?;
        Ok(report.passed)
    }

    // ------------------------------------------------------------------
    pub fn cmd_rotational(&mut self) -> Result<bool> {
        let amb = self.ambient()?;
        let mut report = self.report_skeleton("rotational")?;
        let delta = self
            .config
            .delta
            .ok_or_else(|| anyhow!("rotational mode needs a delta value"))?;
        let p = RotationalParams::new(amb.eps, amb.h, delta).map_err(|e| anyhow!(e))?;
        let profile = rotational::integrate_profile(&p, 16.0).map_err(|e| anyhow!(e))?;
        let fb = rotational::find_stilde(&profile).map_err(|e| anyhow!(e))?;
        self.stage("profile");

        // certificates along the annulus [-s~, s~] x S^1
        let f_res = profile.axis_cross(fb.s_free).abs();
        let mut ortho_gap = 0.0_f64;
        let mut margin = f64::INFINITY;
        let (rows, cols) = (2 * self.config.grid.n_u + 1, self.config.grid.n_v);
        let mut verts = Vec::with_capacity(rows * cols);
        for iu in 0..rows {
            let s = -fb.s_free + 2.0 * fb.s_free * iu as f64 / (rows - 1) as f64;
            for iv in 0..cols {
                let th = 2.0 * std::f64::consts::PI * iv as f64 / cols as f64;
                let psi = profile.psi(s, th);
                margin = margin.min(amb.inner(&psi, &fb.ball_center) - fb.ball_d);
                verts.push(psi);
            }
        }
        for iv in 0..cols {
            let th = 2.0 * std::f64::consts::PI * iv as f64 / cols as f64;
            for s in [-fb.s_free, fb.s_free] {
                let psi = profile.psi(s, th);
                let t = profile.psi_s(s, th);
                let nhat = fb.ball_center - psi * (amb.eps * fb.ball_d);
                let nn = amb.inner(&nhat, &nhat);
                // angle between conormal and sphere normal from the
                // perpendicular component (conditioned near alignment)
                let t_perp = t - nhat * (amb.inner(&t, &nhat) / nn);
                let gap = amb.inner(&t_perp, &t_perp).abs().sqrt().asin();
                ortho_gap = ortho_gap.max(gap);
            }
        }
        let mesh = TriMesh::from_grid(verts, rows, cols, true, &amb).map_err(|e| anyhow!(e))?;
        let embedded = !mesh.self_intersects();
        self.stage("certify");

        let flat_gap = if amb.eps > 0.0 && (delta - (amb.h + amb.mu) / 2.0).abs() < 1e-12 {
            Some((fb.s_free - rotational::s_free_flat_torus(amb.h)).abs())
        } else {
            None
        };
        let tol = self.config.tolerances.cert_tol;
        let passed = f_res < 1e-10
            && ortho_gap < 1e-7_f64.max(tol)
            && margin > -1e-8
            && embedded
            && flat_gap.map(|g| g < 1e-10).unwrap_or(true);
        report.rotational = Some(RotationalReport {
            delta,
            kind: format!("{:?}", p.kind()),
            s_free: fb.s_free,
            ball_d: fb.ball_d,
            axis_cross_residual: f_res,
            orthogonality_gap: ortho_gap,
            containment_margin: margin,
            embedded,
            flat_torus_s_free_gap: flat_gap,
        });
        let sidecar = MeshSidecar {
            epsilon: self.config.epsilon,
            h: self.config.h,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            u0: fb.s_free,
            m: -1,
            n: 1,
            mode: "rotational".into(),
            ball_center: fb.ball_center,
            ball_d: fb.ball_d,
            rows,
            cols,
            closed_v: true,
            boundary: mesh.boundary.clone(),
            cert_tol: tol,
        };
        self.write_mesh_bundle(&mut report, &mesh, &sidecar, "rotational")?;
        report.passed = passed;
        self.finish(report)
    }

    // ------------------------------------------------------------------
    pub fn cmd_sweep(&mut self) -> Result<bool> {
        let amb = self.ambient()?;
        let mut report = self.report_skeleton("sweep")?;
        report.interval_j = Some(search::interval_j(&amb));
        let mut ok = true;
        let mut csv = String::from("theta0,r,f\n");
        for (m, n) in self.config.sweep_targets()? {
            let theta0 = m as f64 / n as f64;
            let sweep = search::sweep_upsilon(theta0, &amb).map_err(|e| anyhow!(e))?;
            self.stage(&format!("sweep_{m}_{n}"));
            // sign-change certificate per level
            ok &= sweep.h_before * sweep.h_after < 0.0;
            for (r, f) in &sweep.samples {
                csv.push_str(&format!("{theta0:.16e},{r:.16e},{f:.16e}\n"));
            }
            report.sweeps.push(sweep);
        }
        fs::write(self.out.join("sweep.csv"), csv)?;
        report.artifacts.push("sweep.csv".into());
        report.passed = ok;
        self.finish(report)
    }

    // ------------------------------------------------------------------
    pub fn cmd_family(&mut self) -> Result<bool> {
        let amb = self.ambient()?;
        let mut report = self.report_skeleton("family")?;
        let (m, n) = self.config.theta_fraction()?;
        let theta0 = m as f64 / n as f64;
        report.interval_j = Some(search::interval_j(&amb));
        let sweep = search::sweep_upsilon(theta0, &amb).map_err(|e| anyhow!(e))?;
        self.stage("sweep");
        let eta_max = self
            .config
            .eta_list
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max);
        let fam = search::continue_family(
            theta0,
            sweep.b_star,
            sweep.c_star,
            eta_max + 1e-9,
            self.config.continuation_step,
            &amb,
        )
        .map_err(|e| anyhow!(e))?;
        self.stage("continuation");

        // certify requested members (nearest continuation points)
        let mut all_pass = true;
        let mut cert_by_index: Vec<Option<usize>> = vec![None; fam.members.len()];
        let eta_list = self.config.eta_list.clone();
        for (k, &eta) in eta_list.iter().enumerate() {
            let (mi, member) = fam
                .members
                .iter()
                .enumerate()
                .min_by(|(_, x), (_, y)| {
                    (x.eta - eta)
                        .abs()
                        .partial_cmp(&(y.eta - eta).abs())
                        .unwrap()
                })
                .unwrap();
            let sp = SeedParams::new(member.a, member.b, member.c).map_err(|e| anyhow!(e))?;
            let (patch, mesh) = search::build_annulus(
                &sp,
                member.tau,
                m,
                n,
                &amb,
                self.config.grid.n_u,
                self.config.grid.n_v,
            )
            .map_err(|e| anyhow!(e))?;
            let cert = search::certify(
                &patch,
                &mesh,
                m,
                n,
                ContactMode::FreeBoundary,
                &amb,
                &self.cert_tols(),
            )
            .map_err(|e| anyhow!(e))?;
            all_pass &= cert.passed;
            let sidecar = MeshSidecar {
                epsilon: self.config.epsilon,
                h: self.config.h,
                a: member.a,
                b: member.b,
                c: member.c,
                u0: member.tau,
                m,
                n,
                mode: "free_boundary".into(),
                ball_center: cert.ball_center,
                ball_d: cert.ball_d,
                rows: mesh.rows,
                cols: mesh.cols,
                closed_v: true,
                boundary: mesh.boundary.clone(),
                cert_tol: self.config.tolerances.cert_tol,
            };
            self.write_mesh_bundle(&mut report, &mesh, &sidecar, &format!("family_{k}"))?;
            cert_by_index[mi] = Some(report.certificates.len());
            report.certificates.push(cert);
            self.stage(&format!("member_{k}"));
        }

        // table of the whole curve; angle/embedded columns filled for the
        // certified members
        let mut csv =
            String::from("eta,a,b,c,theta,center_height,tau,angle_low,angle_high,embedded\n");
        for (mi, mm) in fam.members.iter().enumerate() {
            csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                mm.eta, mm.a, mm.b, mm.c, mm.theta, mm.center_height, mm.tau
            ));
            if let Some(ci) = cert_by_index[mi] {
                let cert = &report.certificates[ci];
                csv.push_str(&format!(
                    ",{:.16e},{:.16e},{}\n",
                    cert.contact_angle_low, cert.contact_angle_high, cert.embedded
                ));
            } else {
                csv.push_str(",,,\n");
            }
        }
        fs::write(self.out.join("family.csv"), csv)?;
        report.artifacts.push("family.csv".into());
        report.family = Some(fam);
        report.sweeps.push(sweep);
        report.passed = all_pass;
        self.finish(report)
    }

    // ------------------------------------------------------------------
    pub fn cmd_capillary(&mut self) -> Result<bool> {
        let amb = self.ambient()?;
        let mut report = self.report_skeleton("capillary")?;
        let n = self.config.n;
        let fam = search::capillary_family(n, &amb, &self.config.capillary_perturbations)
            .map_err(|e| anyhow!(e))?;
        self.stage("family");
        let mut all_pass = true;
        let mut csv = String::from("a,b,c,u_star,theta,angle_low,angle_high,embedded\n");
        for (k, member) in fam.members.iter().enumerate() {
            let sp = SeedParams::new(member.a, member.b, member.c).map_err(|e| anyhow!(e))?;
            let (patch, mesh) = search::build_annulus(
                &sp,
                member.u_star,
                -1,
                n,
                &amb,
                self.config.grid.n_u,
                self.config.grid.n_v,
            )
            .map_err(|e| anyhow!(e))?;
            let cert = search::certify(
                &patch,
                &mesh,
                -1,
                n,
                ContactMode::Capillary,
                &amb,
                &self.cert_tols(),
            )
            .map_err(|e| anyhow!(e))?;
            all_pass &= cert.passed;
            csv.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                member.a,
                member.b,
                member.c,
                member.u_star,
                member.theta,
                cert.contact_angle_low,
                cert.contact_angle_high,
                cert.embedded
            ));
            let sidecar = MeshSidecar {
                epsilon: self.config.epsilon,
                h: self.config.h,
                a: member.a,
                b: member.b,
                c: member.c,
                u0: member.u_star,
                m: -1,
                n,
                mode: "capillary".into(),
                ball_center: cert.ball_center,
                ball_d: cert.ball_d,
                rows: mesh.rows,
                cols: mesh.cols,
                closed_v: true,
                boundary: mesh.boundary.clone(),
                cert_tol: self.config.tolerances.cert_tol,
            };
            self.write_mesh_bundle(&mut report, &mesh, &sidecar, &format!("capillary_{k}"))?;
            report.certificates.push(cert);
            self.stage(&format!("member_{k}"));
        }
        fs::write(self.out.join("capillary.csv"), csv)?;
        report.artifacts.push("capillary.csv".into());
        report.capillary = Some(fam);
        report.passed = all_pass;
        self.finish(report)
    }

    // ------------------------------------------------------------------
    pub fn cmd_verify(&mut self) -> Result<bool> {
        let mut report = self.report_skeleton("verify")?;
        let mesh_path = self
            .config
            .mesh
            .clone()
            .ok_or_else(|| anyhow!("verify mode needs a mesh path"))?;
        let data = fs::read(&mesh_path)
            .with_context(|| format!("cannot read mesh {mesh_path}"))?;
        let mut mesh = TriMesh::read_ply(&data).map_err(|e| anyhow!(e))?;
        let sidecar_path = mesh_path.replace(".ply", ".sidecar.json");
        let sidecar: MeshSidecar = serde_json::from_str(
            &fs::read_to_string(&sidecar_path)
                .with_context(|| format!("cannot read sidecar {sidecar_path}"))?,
        )?;
        let amb = Ambient::new(sidecar.epsilon, sidecar.h).map_err(|e| anyhow!(e))?;
        mesh.rows = sidecar.rows;
        mesh.cols = sidecar.cols;
        mesh.closed_v = sidecar.closed_v;
        mesh.boundary = sidecar.boundary.clone();
        mesh.project(&sidecar.ball_center, &amb).map_err(|e| anyhow!(e))?;
        self.stage("load");

        let mut manifold = 0.0_f64;
        let mut margin = f64::INFINITY;
        for v in &mesh.verts {
            manifold = manifold.max((amb.inner(v, v) - amb.eps).abs());
            margin = margin.min(amb.inner(v, &sidecar.ball_center) - sidecar.ball_d);
        }
        let mut sphere_res = 0.0_f64;
        for loop_ids in &sidecar.boundary {
            for &vi in loop_ids {
                let v = &mesh.verts[vi as usize];
                sphere_res =
                    sphere_res.max((amb.inner(v, &sidecar.ball_center) - sidecar.ball_d).abs());
            }
        }
        // embedding needs a simple cover on top of crossing-freeness
        let embedded = sidecar.m == -1 && !mesh.self_intersects();
        self.stage("checks");

        let containment_pass = margin > -1e-8;
        let sphere_pass = sphere_res < sidecar.cert_tol.max(1e-6);
        let passed = containment_pass && sphere_pass && embedded && manifold < 1e-8;
        report.verify = Some(VerifyReport {
            mesh: mesh_path,
            manifold_residual: manifold,
            boundary_sphere_residual: sphere_res,
            containment_margin: margin,
            embedded,
            containment_pass,
            sphere_pass,
        });
        report.passed = passed;
        self.finish(report)
    }
}
