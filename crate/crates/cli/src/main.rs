//! `hybrid-finger`: fingertip deformation partitioning and five-bar finger
//! linkage synthesis from the command line.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 invalid model
//! input, 4 internal model inconsistency.

mod config;
mod manifest;
mod units;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand};
use hybrid_finger::design::optimize_linkage;
use hybrid_finger::fivebar::workspace_map;
use hybrid_finger::hertz::Environment;
use hybrid_finger::partition::{curvature_trend, partition, sweep_eta, Axis, PartitionResult};
use hybrid_finger::ModelError;
use serde_json::json;

use config::{ConfigError, RunConfig};
use manifest::{OutputDigest, RunManifest, TOOL};
use units::Length;

#[derive(Parser)]
#[command(name = "hybrid-finger", version, about)]
struct Cli {
    /// JSON or TOML run config, or a manifest from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split one approach depth into bending and indentation.
    Partition {
        /// Approach depth, e.g. "2 mm"; overrides the config.
        #[arg(long, value_parser = Length::parse)]
        delta_total: Option<Length>,
    },
    /// Contact-energy fraction over nail and pulp stiffness.
    Sweep,
    /// Reachability and mechanical advantage over the actuator grid.
    Workspace,
    /// CMA-ES synthesis of the free link lengths.
    Optimize,
    /// Indentation sensitivity to object curvature with and without the nail.
    Trend,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Partition { .. } => "partition",
            Command::Sweep => "sweep",
            Command::Workspace => "workspace",
            Command::Optimize => "optimize",
            Command::Trend => "trend",
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("ConfigError: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("IoError: {0}")]
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Model(e) => match e {
                ModelError::InvalidGrid(_) | ModelError::InvalidConfig(_) => 2,
                ModelError::ModelInconsistency(_) | ModelError::NonConvergence { .. } => 4,
                _ => 3,
            },
        }
    }
}

struct Outputs {
    dir: PathBuf,
    digests: Vec<OutputDigest>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            digests: Vec::new(),
        })
    }

    fn write(&mut self, file: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(file);
        std::fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.digests.push(OutputDigest::of(file, contents.as_bytes()));
        Ok(())
    }
}

fn partition_csv(r: &PartitionResult) -> String {
    format!(
        "delta_total,delta_b,delta_c,bending_energy,contact_energy,total_energy,eta_contact,beta,contact_radius\n\
         {},{},{},{},{},{},{},{},{}\n",
        r.delta_total,
        r.delta_b,
        r.delta_c,
        r.bending_energy,
        r.contact_energy,
        r.total_energy,
        r.eta_contact,
        r.beta,
        r.contact_radius
    )
}

fn partition_text(r: &PartitionResult) -> String {
    let mut out = String::new();
    for (k, v) in [
        ("delta_total", r.delta_total),
        ("delta_b", r.delta_b),
        ("delta_c", r.delta_c),
        ("bending_energy", r.bending_energy),
        ("contact_energy", r.contact_energy),
        ("total_energy", r.total_energy),
        ("eta_contact", r.eta_contact),
        ("beta", r.beta),
        ("contact_radius", r.contact_radius),
    ] {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}

/// Runs one subcommand, writing its outputs. The returned summary goes into
/// the manifest; a trailing error is reported after the manifest is written.
fn execute(
    command: &Command,
    cfg: &RunConfig,
    out: &mut Outputs,
) -> Result<(Option<serde_json::Value>, Option<Failure>), Failure> {
    match command {
        Command::Partition { .. } => {
            let r = partition(&cfg.fingertip_section(), &cfg.contact_scenario(), cfg.partition.delta_total.0)?;
            out.write("partition.csv", &partition_csv(&r))?;
            print!("{}", partition_text(&r));
            Ok((None, None))
        }
        Command::Sweep => {
            let s = &cfg.sweep;
            let nail = Axis::log_spaced("nail_modulus", s.nail_modulus[0].0, s.nail_modulus[1].0, s.nail_points)?;
            let pulp = Axis::log_spaced("pulp_modulus", s.pulp_modulus[0].0, s.pulp_modulus[1].0, s.pulp_points)?;
            let grid = sweep_eta(
                &nail,
                &pulp,
                &cfg.fingertip_section(),
                &cfg.contact_scenario(),
                cfg.partition.delta_total.0,
            )?;
            out.write("sweep.csv", &grid.to_csv())?;
            let (lo, hi) = grid
                .eta
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            println!("cells={} eta_min={lo} eta_max={hi}", grid.eta.len());
            Ok((Some(json!({"cells": grid.eta.len(), "eta_min": lo, "eta_max": hi})), None))
        }
        Command::Workspace => {
            let s = cfg.workspace_sampling();
            let map = workspace_map(&cfg.linkage_geometry(), s.phi1, s.phi2, s.resolution, s.branch, &cfg.finger_chain())?;
            out.write("workspace.csv", &map.to_csv())?;
            let singular = map.samples().filter(|s| !s.mechanical_advantage.is_finite()).count();
            println!("samples={} feasible={} singular={singular}", map.cells.len(), map.feasible_count());
            Ok((
                Some(json!({"samples": map.cells.len(), "feasible": map.feasible_count(), "singular": singular})),
                None,
            ))
        }
        Command::Optimize => {
            let opt = optimize_linkage(&cfg.objective_config(), &cfg.cma_es_config())?;
            out.write("optimize_trace.csv", &opt.trace_csv())?;
            let b = &opt.best;
            println!(
                "L1={} L3={} J={} sigma_n={} evaluations={}",
                b.design[0], b.design[1], b.objective, b.sigma_n, opt.result.evaluations
            );
            let summary = json!({
                "L1": b.design[0],
                "L3": b.design[1],
                "objective": b.objective,
                "coverage_term": b.coverage_term,
                "sigma_n": b.sigma_n,
                "ti_term": b.ti_term,
                "length_reg": b.length_reg,
                "feasible_samples": b.feasible_samples,
                "phi4_span": b.phi4_span,
                "evaluations": opt.result.evaluations,
                "termination": format!("{:?}", opt.result.termination),
            });
            Ok((Some(summary), None))
        }
        Command::Trend => {
            let with_nail = cfg.fingertip_section();
            let envs = [
                Environment::Flat,
                Environment::Convex(cfg.trend.convex_radius.0),
                Environment::Concave(cfg.trend.concave_radius.0),
            ];
            let report = curvature_trend(
                &with_nail,
                &with_nail.without_nail(),
                &cfg.contact_scenario(),
                &envs,
                cfg.partition.delta_total.0,
            )?;
            out.write("trend.csv", &report.to_csv())?;
            let stable = report.nail_stabilizes();
            let mut summary = serde_json::Map::new();
            for env in ["convex", "concave"] {
                for (with, tag) in [(true, "with_nail"), (false, "without_nail")] {
                    if let Some(v) = report.curvature_sensitivity(with, env) {
                        println!("{env}_sensitivity_{tag}={v}");
                        summary.insert(format!("{env}_sensitivity_{tag}"), json!(v));
                    }
                }
            }
            println!("nail_stabilizes={stable}");
            summary.insert("nail_stabilizes".into(), json!(stable));
            let failure = (!stable).then(|| {
                Failure::Model(ModelError::ModelInconsistency(
                    "nail does not reduce curvature sensitivity and beta in every environment".into(),
                ))
            });
            Ok((Some(serde_json::Value::Object(summary)), failure))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started_at = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
    let mut cfg = match &cli.config {
        Some(path) => manifest::load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Command::Partition { delta_total: Some(d) } = &cli.command {
        cfg.partition.delta_total = *d;
    }
    let cfg = cfg.resolve()?;

    let mut out = Outputs::new(&cli.out)?;
    let (summary, failure) = execute(&cli.command, &cfg, &mut out)?;

    let manifest = RunManifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        seed: cfg.seed,
        started_at,
        finished_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        config: cfg,
        outputs: out.digests.clone(),
        summary,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = out.dir.join(format!("{}.manifest.json", cli.command.name()));
    std::fs::write(&path, text + "\n").map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
