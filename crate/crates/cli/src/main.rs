//! `conic-lens`: declarative experiment runner.
//!
//! Each subcommand reads a TOML experiment configuration, runs the task
//! over the configured sweep, and writes an RFC-4180 CSV plus a JSON
//! summary with named pass/fail assertions. Outputs are deterministic
//! given the config and seed. Exit codes: 0 ok, 2 config error,
//! 3 numerical failure (partial outputs are still written and flagged).

mod config;
mod output;
mod tasks;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "conic-lens", version, about = "Geodesic flow, X-ray transforms and lens data on asymptotically conic manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for the sweep (deterministic output order).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dense trajectory output for plotting.
    Trace(RunArgs),
    /// Scattering map over a sweep of entry points.
    Scatter(RunArgs),
    /// Renormalized lengths over a sweep.
    Length(RunArgs),
    /// X-ray transform of a radial Gaussian over a sweep.
    Xray(RunArgs),
    /// Curvature decay report.
    Curvature(RunArgs),
    /// Conjugate-point scan over a sweep.
    Conjugate(RunArgs),
    /// Length variation against the 2-tensor transform.
    Variation(RunArgs),
    /// Large-eta scattering and boundary pi-transform limits.
    Limits(RunArgs),
    /// Linearized flow: finite differences vs the Duhamel formula.
    Perturb(RunArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Trace(_) => "trace",
            Cmd::Scatter(_) => "scatter",
            Cmd::Length(_) => "length",
            Cmd::Xray(_) => "xray",
            Cmd::Curvature(_) => "curvature",
            Cmd::Conjugate(_) => "conjugate",
            Cmd::Variation(_) => "variation",
            Cmd::Limits(_) => "limits",
            Cmd::Perturb(_) => "perturb",
        }
    }
    fn args(&self) -> &RunArgs {
        match self {
            Cmd::Trace(a)
            | Cmd::Scatter(a)
            | Cmd::Length(a)
            | Cmd::Xray(a)
            | Cmd::Curvature(a)
            | Cmd::Conjugate(a)
            | Cmd::Variation(a)
            | Cmd::Limits(a)
            | Cmd::Perturb(a) => a,
        }
    }
}

fn run() -> Result<u8, String> {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CONIC_LENS_LOG")).init();
    let cli = Cli::parse();
    let task = cli.cmd.name();
    let args = cli.cmd.args();

    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read config {}: {e}", args.config.display()))?;
    let cfg = config::ExperimentConfig::parse(&text).map_err(|e| e.to_string())?;
    if let Some(declared) = &cfg.task {
        if declared != task {
            return Err(format!("config declares task '{declared}' but subcommand is '{task}'"));
        }
    }
    let model = cfg.model().map_err(|e| e.to_string())?;
    let hash = {
        let mut h = Sha256::new();
        h.update(text.as_bytes());
        format!("{:x}", h.finalize())
    };
    log::info!("task {task}, config hash {hash}, seed {}", cfg.seed);

    let out = tasks::run_task(task, &cfg, &model, &hash, args.jobs).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    let csv_path = args.out.join(format!("{task}.csv"));
    let header: Vec<&str> = out.header.clone();
    output::write_csv(&csv_path, &header, &out.rows).map_err(|e| e.to_string())?;
    if let Some((dense_header, dense_rows)) = &out.dense {
        let dense_path = args.out.join(format!("{task}_dense.csv"));
        output::write_csv(&dense_path, dense_header, dense_rows).map_err(|e| e.to_string())?;
    }
    let failed_assertions = out.assertions.iter().filter(|a| !a.passed).count();
    let status = if out.numerical_failures > 0 || failed_assertions > 0 {
        "numerical-failure"
    } else {
        "ok"
    };
    let summary = output::Summary {
        tool: "conic-lens".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        task: task.into(),
        config_hash: hash,
        seed: cfg.seed,
        jobs: args.jobs,
        entries: out.rows.len(),
        numerical_failures: out.numerical_failures,
        status: status.into(),
        assertions: out.assertions.clone(),
        fitted: out.fitted.clone(),
    };
    let json_path = args.out.join(format!("{task}_summary.json"));
    output::write_summary(&json_path, &summary).map_err(|e| e.to_string())?;

    for a in &out.assertions {
        log::info!(
            "assertion '{}' [{}]: {} (value {:.3e}, tol {:.3e})",
            a.name,
            a.anchor,
            if a.passed { "pass" } else { "FAIL" },
            a.value,
            a.tolerance
        );
    }
    Ok(if status == "ok" { 0 } else { 3 })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
