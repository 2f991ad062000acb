//! `forge`: build, search for, and certify constant-mean-curvature annuli
//! in geodesic balls of the 3-sphere and hyperbolic 3-space.
//!
//! ```text
//! forge rotational --config cfg.json --out out/          # one rotational free-boundary annulus
//! forge sweep      --config cfg.json --out out/          # locate the critical parameter on a period level
//! forge family     --config cfg.json --out out/          # continue + certify non-rotational annuli
//! forge capillary  --config cfg.json --out out/          # constant-angle annuli in the sphere
//! forge verify     --config cfg.json --out out/          # re-check an emitted mesh
//! ```
//!
//! Exit code 0 only when every requested certificate passes.

mod config;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use run::Runner;

#[derive(Parser)]
#[command(name = "forge", about = "CMC annulus construction and certification", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rotational free-boundary annulus from (eps, H, delta).
    Rotational(RunArgs),
    /// Walk a period level line to its critical rotational annulus.
    Sweep(RunArgs),
    /// Continue the family of non-rotational free-boundary annuli.
    Family(RunArgs),
    /// Capillary (constant-angle) annuli in the sphere.
    Capillary(RunArgs),
    /// Re-run mesh-level checks on an emitted mesh.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Override the period target, e.g. "-1/2".
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Override the mean curvature.
    #[arg(long = "H")]
    h: Option<f64>,
    /// Override the space-form sign (+1 or -1).
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<i32>,
    /// Override the certificate tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut cfg: RunConfig = serde_json::from_str(&text).context("config parse error")?;
    if let Some(t) = &args.theta {
        cfg.theta = t.clone();
    }
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(e) = args.eps {
        cfg.epsilon = e;
    }
    if let Some(t) = args.tol {
        cfg.tolerances.cert_tol = t;
    }
    Ok(cfg)
}

fn dispatch(cmd: &Cmd) -> Result<bool> {
    let (args, f): (&RunArgs, fn(&mut Runner) -> Result<bool>) = match cmd {
        Cmd::Rotational(a) => (a, Runner::cmd_rotational),
        Cmd::Sweep(a) => (a, Runner::cmd_sweep),
        Cmd::Family(a) => (a, Runner::cmd_family),
        Cmd::Capillary(a) => (a, Runner::cmd_capillary),
        Cmd::Verify(a) => (a, Runner::cmd_verify),
    };
    let cfg = load_config(args)?;
    let mut runner = Runner::new(cfg, &args.out)?;
    f(&mut runner)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.cmd) {
        Ok(true) => {
            eprintln!("all requested certificates passed");
            ExitCode::SUCCESS
        }
        Ok(false) => {
            eprintln!("one or more certificates FAILED (see report.json)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
