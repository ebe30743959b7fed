//! `frontier simulate`: Monte Carlo replicas of the branching particle
//! system. Emits `simulate_records.csv` (one row per replica per
//! observation time) and `simulate_summary.json` (means, standard
//! errors, censoring counts) into `--out-dir`.
//!
//! Configuration precedence is flags over config file over library
//! defaults. The TOML file uses the same key names as the library
//! config (`rho`, `drift`, `barrier`, `barrier_mode`, `dt`, `t_max`,
//! `initial`, `seed`, `replica_count`, `max_particles`,
//! `bridge_correction`, `record_schedule`); `rho` and `t_max` must come
//! from a flag or the file.

use crate::out::{atomic_write, envelope, fmt, json_bytes, Csv};
use crate::{CmdResult, Failure};
use clap::Args;
use frontier_core::sim::{self, BarrierMode, ReplicaStatus, SimConfig};
use serde::Deserialize;
use serde_json::json;
use std::path::PathBuf;

#[derive(Args)]
pub struct SimulateArgs {
    /// TOML config file; any flag below overrides the file's value
    #[arg(long)]
    config: Option<PathBuf>,
    /// Branching intensity parameter ρ (> 1); rate is ρ/2 on [0,1], ½ above
    #[arg(long)]
    rho: Option<f64>,
    /// Leftward drift magnitude (default: the front speed μ(ρ))
    #[arg(long)]
    drift: Option<f64>,
    /// Right boundary position L (default: no right boundary)
    #[arg(long)]
    barrier: Option<f64>,
    /// Right-boundary behaviour: absorbing | log_only
    #[arg(long)]
    barrier_mode: Option<String>,
    /// Euler time step (default 1e-3)
    #[arg(long)]
    dt: Option<f64>,
    /// Time horizon of each replica
    #[arg(long)]
    t_max: Option<f64>,
    /// Initial particles as "x:count[,x:count...]" (default "1:1")
    #[arg(long)]
    initial: Option<String>,
    /// Master seed; replicas derive their streams from it (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent replicas (default 1)
    #[arg(long)]
    replicas: Option<usize>,
    /// Particle cap; a replica that exceeds it is censored (default 10⁶)
    #[arg(long)]
    max_particles: Option<usize>,
    /// Disable the Brownian-bridge boundary-crossing correction
    #[arg(long)]
    no_bridge: bool,
    /// Observation times as "t1,t2,..." (strictly increasing; default t_max)
    #[arg(long)]
    schedule: Option<String>,
    /// Directory receiving simulate_records.csv and simulate_summary.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// On-disk configuration: every key optional, names identical to the
/// library config so a saved effective config can be fed back in.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    rho: Option<f64>,
    drift: Option<f64>,
    barrier: Option<f64>,
    barrier_mode: Option<BarrierMode>,
    dt: Option<f64>,
    t_max: Option<f64>,
    initial: Option<Vec<(f64, usize)>>,
    seed: Option<u64>,
    replica_count: Option<usize>,
    max_particles: Option<usize>,
    bridge_correction: Option<bool>,
    record_schedule: Option<Vec<f64>>,
}

pub fn run(args: SimulateArgs) -> CmdResult {
    let cfg = effective_config(&args)?;
    let results = sim::run(&cfg)?;

    let csv_path = args.out_dir.join("simulate_records.csv");
    let provenance = vec![
        format!("frontier simulate v{}", env!("CARGO_PKG_VERSION")),
        format!(
            "rho = {}, drift = {}, barrier = {}, dt = {}, t_max = {}, seed = {}, replicas = {}",
            fmt(cfg.rho),
            fmt(cfg.drift),
            cfg.barrier.map_or("none".to_string(), fmt),
            fmt(cfg.dt),
            fmt(cfg.t_max),
            cfg.seed,
            cfg.replica_count
        ),
        "M_max is NaN on rows recorded after extinction; status repeats the replica's final status"
            .to_string(),
    ];
    let mut csv = Csv::new(
        &provenance,
        &[
            "replica", "t", "N", "Z", "Zprime", "Y", "Ytilde", "M_max", "R_cum", "status",
        ],
    );
    for result in &results {
        let status = status_label(result.status);
        for rec in &result.records {
            csv.row(&[
                result.replica.to_string(),
                fmt(rec.t),
                rec.n.to_string(),
                fmt(rec.z),
                fmt(rec.zprime),
                fmt(rec.y),
                fmt(rec.ytilde),
                fmt(rec.m_max),
                rec.r_cum.to_string(),
                status.to_string(),
            ]);
        }
    }
    atomic_write(&csv_path, &csv.bytes())?;

    let (mut extinct, mut t_max_reached, mut censored) = (0usize, 0usize, 0usize);
    for result in &results {
        match result.status {
            ReplicaStatus::Extinct => extinct += 1,
            ReplicaStatus::TMax => t_max_reached += 1,
            ReplicaStatus::Censored => censored += 1,
        }
    }
    let summary = sim::summarize_replicas(&results)?;
    let doc = envelope(
        serde_json::to_value(&cfg)?,
        json!({
            "summary": serde_json::to_value(&summary)?,
            "status_counts": {
                "extinct": extinct,
                "t_max": t_max_reached,
                "censored": censored,
            },
        }),
        cfg.seed,
    );
    let json_path = args.out_dir.join("simulate_summary.json");
    atomic_write(&json_path, &json_bytes(&doc))?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

/// Resolves the precedence chain flags > file > defaults into one
/// validated config. Validation itself happens inside the library run.
fn effective_config(args: &SimulateArgs) -> Result<SimConfig, Failure> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| Failure::Domain(format!("parsing {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let rho = args
        .rho
        .or(file.rho)
        .ok_or_else(|| Failure::Domain("rho is required (--rho or config key rho)".into()))?;
    let t_max = args
        .t_max
        .or(file.t_max)
        .ok_or_else(|| Failure::Domain("t_max is required (--t-max or config key t_max)".into()))?;
    let mut cfg = SimConfig::new(rho, t_max)?;

    if let Some(v) = file.drift {
        cfg.drift = v;
    }
    if file.barrier.is_some() {
        cfg.barrier = file.barrier;
    }
    if let Some(v) = file.barrier_mode {
        cfg.barrier_mode = v;
    }
    if let Some(v) = file.dt {
        cfg.dt = v;
    }
    if let Some(v) = &file.initial {
        cfg.initial = v.clone();
    }
    if let Some(v) = file.seed {
        cfg.seed = v;
    }
    if let Some(v) = file.replica_count {
        cfg.replica_count = v;
    }
    if let Some(v) = file.max_particles {
        cfg.max_particles = v;
    }
    if let Some(v) = file.bridge_correction {
        cfg.bridge_correction = v;
    }
    if let Some(v) = &file.record_schedule {
        cfg.record_schedule = v.clone();
    }

    if let Some(v) = args.drift {
        cfg.drift = v;
    }
    if args.barrier.is_some() {
        cfg.barrier = args.barrier;
    }
    if let Some(s) = &args.barrier_mode {
        cfg.barrier_mode = parse_barrier_mode(s)?;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(s) = &args.initial {
        cfg.initial = parse_initial(s)?;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.replicas {
        cfg.replica_count = v;
    }
    if let Some(v) = args.max_particles {
        cfg.max_particles = v;
    }
    if args.no_bridge {
        cfg.bridge_correction = false;
    }
    if let Some(s) = &args.schedule {
        cfg.record_schedule = parse_schedule(s)?;
    }
    Ok(cfg)
}

fn parse_barrier_mode(s: &str) -> Result<BarrierMode, Failure> {
    match s {
        "absorbing" => Ok(BarrierMode::Absorbing),
        "log_only" | "log-only" => Ok(BarrierMode::LogOnly),
        other => Err(Failure::Domain(format!(
            "barrier mode must be 'absorbing' or 'log_only', got '{other}'"
        ))),
    }
}

fn parse_initial(s: &str) -> Result<Vec<(f64, usize)>, Failure> {
    let mut groups = Vec::new();
    for token in s.split(',') {
        let (x, count) = token.split_once(':').ok_or_else(|| {
            Failure::Domain(format!("initial group '{token}' is not of the form x:count"))
        })?;
        let x: f64 = x
            .trim()
            .parse()
            .map_err(|e| Failure::Domain(format!("initial position '{x}': {e}")))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|e| Failure::Domain(format!("initial count '{count}': {e}")))?;
        groups.push((x, count));
    }
    Ok(groups)
}

fn parse_schedule(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<f64>()
                .map_err(|e| Failure::Domain(format!("schedule time '{token}': {e}")))
        })
        .collect()
}

fn status_label(status: ReplicaStatus) -> &'static str {
    match status {
        ReplicaStatus::Extinct => "extinct",
        ReplicaStatus::TMax => "t_max",
        ReplicaStatus::Censored => "censored",
    }
}
