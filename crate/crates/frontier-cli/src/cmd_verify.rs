//! `frontier verify` — compares empirical Monte Carlo moments against
//! analytic predictions and writes a scorecard (JSON + markdown) into
//! `--out-dir`.
//!
//! Three input modes, exactly one of which must be chosen:
//! * `--records file.csv --predictions pred.json`: re-summarizes a
//!   per-replica CSV produced by `frontier simulate`;
//! * `--summary file.json --predictions pred.json`: takes a ready run
//!   summary (bare, or the `simulate_summary.json` envelope);
//! * `--self-check`: runs a built-in reference configuration and scores
//!   it against its own spectral predictions (first-moment growth of the
//!   weighted sum `Zprime` and the expected cumulative boundary-hit
//!   count `R_cum`).
//!
//! Exit code is 2 when any scorecard row fails; the files are written
//! either way.

use crate::out::{atomic_write, envelope, fmt, json_bytes};
use crate::{CmdResult, Failure};
use clap::Args;
use frontier_core::kernels::{flux_i, KernelConfig};
use frontier_core::sim::{
    self, EscapeEvent, ObservableRecord, ReplicaResult, ReplicaStatus, SimConfig,
};
use frontier_core::spectrum::FiniteSpectrum;
use frontier_core::stats::{
    moment_scorecard, PredPoint, PredictedSeries, PredictionKind, Predictions, RunSummary,
    Scorecard,
};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source")
    .required(true)
    .args(["records", "summary", "self_check"]))]
pub struct VerifyArgs {
    /// Per-replica records CSV produced by `frontier simulate`
    #[arg(long, requires = "predictions")]
    records: Option<PathBuf>,
    /// Run-summary JSON (bare, or a simulate_summary.json envelope)
    #[arg(long, requires = "predictions")]
    summary: Option<PathBuf>,
    /// Predicted-series JSON: {"series":[{"name","kind","points"}...]}
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Run the built-in reference simulation and score it analytically
    #[arg(long)]
    self_check: bool,
    /// Self-check: branching intensity ρ
    #[arg(long, default_value_t = 4.0)]
    rho: f64,
    /// Self-check: absorbing interval length L
    #[arg(long, default_value_t = 10.0)]
    length: f64,
    /// Self-check: initial particle position
    #[arg(long, default_value_t = 5.0)]
    x0: f64,
    /// Self-check: observation time
    #[arg(long, default_value_t = 3.0)]
    t: f64,
    /// Self-check: replica count
    #[arg(long, default_value_t = 20_000)]
    replicas: usize,
    /// Self-check: Euler step
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Self-check: master seed (default matches the library reference run)
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Directory receiving scorecard.json and scorecard.md
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Spectral modes used for the boundary-flux prediction; enough that the
/// series truncation error is far below Monte Carlo resolution.
const FLUX_MODES: usize = 400;

pub fn run(args: VerifyArgs) -> CmdResult {
    let (summary, predictions, config, seed) = if args.self_check {
        self_check_inputs(&args)?
    } else {
        let pred_path = args.predictions.as_ref().expect("clap enforces the pairing");
        let predictions = read_predictions(pred_path)?;
        let (summary, source) = match (&args.records, &args.summary) {
            (Some(path), _) => {
                let results = read_records(path)?;
                (sim::summarize_replicas(&results)?, path)
            }
            (_, Some(path)) => (read_summary(path)?, path),
            _ => unreachable!("clap enforces the source group"),
        };
        let config = json!({
            "source": source.display().to_string(),
            "predictions": pred_path.display().to_string(),
        });
        (summary, predictions, config, 0u64)
    };

    let scorecard = moment_scorecard(&summary, &predictions)?;

    let json_path = args.out_dir.join("scorecard.json");
    let doc = envelope(config, serde_json::to_value(&scorecard)?, seed);
    atomic_write(&json_path, &json_bytes(&doc))?;
    let md_path = args.out_dir.join("scorecard.md");
    atomic_write(&md_path, scorecard_markdown(&scorecard).as_bytes())?;

    let passed = scorecard.rows.iter().filter(|r| r.pass).count();
    println!(
        "scorecard: {passed} of {} rows pass; wrote {} and {}",
        scorecard.rows.len(),
        json_path.display(),
        md_path.display()
    );
    if scorecard.all_pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

/// Runs the reference configuration (one particle at `x0` inside
/// `[0, length]`, drift at the front speed) and derives its two analytic
/// first-moment predictions.
fn self_check_inputs(
    args: &VerifyArgs,
) -> Result<(RunSummary, Predictions, Value, u64), Failure> {
    let mut cfg = SimConfig::new(args.rho, args.t)?;
    cfg.barrier = Some(args.length);
    cfg.initial = vec![(args.x0, 1)];
    cfg.replica_count = args.replicas;
    cfg.dt = args.dt;
    cfg.seed = args.seed;
    cfg.record_schedule = vec![args.t];

    let results = sim::run(&cfg)?;
    let summary = sim::summarize_replicas(&results)?;

    // E[Z′_t] = e^{(λ₁−λ∞)t}·z(x₀): exact first-moment growth of the
    // weighted sum over never-escaped lineages.
    let spec = FiniteSpectrum::compute(args.rho, args.length, 1)?;
    let zprime_pred = ((spec.lambda(1) - spec.lambda_inf()) * args.t).exp()
        * spec.eval_z(args.x0)?;
    // E[R_t] = e^{μ(x₀−L)}·I(x₀, [0, t]): the tilted boundary-flux window
    // integral. Hit counts are thin, so the scorecard applies a Poisson
    // floor √(predicted/replicas) to the empirical SE.
    let kcfg = KernelConfig::new(FiniteSpectrum::compute(args.rho, args.length, FLUX_MODES)?);
    let r_pred =
        (spec.mu() * (args.x0 - args.length)).exp() * flux_i(&kcfg, args.x0, &[(0.0, args.t)])?;
    let predictions = Predictions {
        series: vec![
            PredictedSeries {
                name: "Zprime".into(),
                kind: PredictionKind::TwoSided,
                points: vec![PredPoint {
                    t: args.t,
                    value: zprime_pred,
                    se_floor: 0.0,
                }],
            },
            PredictedSeries {
                name: "R_cum".into(),
                kind: PredictionKind::TwoSided,
                points: vec![PredPoint {
                    t: args.t,
                    value: r_pred,
                    se_floor: (r_pred / args.replicas as f64).sqrt(),
                }],
            },
        ],
    };
    let config = json!({
        "mode": "self_check",
        "rho": args.rho,
        "length": args.length,
        "x0": args.x0,
        "t": args.t,
        "replicas": args.replicas,
        "dt": args.dt,
        "seed": args.seed,
    });
    Ok((summary, predictions, config, args.seed))
}

fn read_predictions(path: &Path) -> Result<Predictions, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Domain(format!("parsing {}: {e}", path.display())))
}

/// Accepts either a bare run summary or the simulate_summary.json
/// envelope (where the summary sits at results.summary).
fn read_summary(path: &Path) -> Result<RunSummary, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Domain(format!("parsing {}: {e}", path.display())))?;
    let candidate = value
        .pointer("/results/summary")
        .cloned()
        .unwrap_or(value);
    serde_json::from_value(candidate).map_err(|e| {
        Failure::Domain(format!(
            "{} is neither a run summary nor a simulate summary envelope: {e}",
            path.display()
        ))
    })
}

/// Rebuilds per-replica results from a `frontier simulate` records CSV.
/// Only the fields the summarizer consumes (records and status) are
/// populated; escape events and final clouds are not in the CSV.
fn read_records(path: &Path) -> Result<Vec<ReplicaResult>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))?;
    let mut replicas: Vec<ReplicaResult> = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            // First non-comment line is the column header.
            saw_header = true;
            let expected = "replica,t,N,Z,Zprime,Y,Ytilde,M_max,R_cum,status";
            if line != expected {
                return Err(Failure::Domain(format!(
                    "{} line {}: header '{line}' does not match '{expected}'",
                    path.display(),
                    idx + 1
                )));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(Failure::Domain(format!(
                "{} line {}: expected 10 fields, got {}",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        let bad = |what: &str, e: &dyn std::fmt::Display| {
            Failure::Domain(format!("{} line {}: {what}: {e}", path.display(), idx + 1))
        };
        let replica: usize = fields[0].parse().map_err(|e| bad("replica", &e))?;
        let record = ObservableRecord {
            t: fields[1].parse().map_err(|e| bad("t", &e))?,
            n: fields[2].parse().map_err(|e| bad("N", &e))?,
            z: fields[3].parse().map_err(|e| bad("Z", &e))?,
            zprime: fields[4].parse().map_err(|e| bad("Zprime", &e))?,
            y: fields[5].parse().map_err(|e| bad("Y", &e))?,
            ytilde: fields[6].parse().map_err(|e| bad("Ytilde", &e))?,
            m_max: fields[7].parse().map_err(|e| bad("M_max", &e))?,
            r_cum: fields[8].parse().map_err(|e| bad("R_cum", &e))?,
        };
        let status = match fields[9] {
            "extinct" => ReplicaStatus::Extinct,
            "t_max" => ReplicaStatus::TMax,
            "censored" => ReplicaStatus::Censored,
            other => {
                return Err(Failure::Domain(format!(
                    "{} line {}: unknown status '{other}'",
                    path.display(),
                    idx + 1
                )))
            }
        };
        match replicas.last_mut() {
            Some(last) if last.replica == replica => {
                last.records.push(record);
                last.final_time = record.t;
                last.status = status;
            }
            _ => replicas.push(ReplicaResult {
                replica,
                records: vec![record],
                escapes: Vec::<EscapeEvent>::new(),
                status,
                final_particles: Vec::new(),
                final_time: record.t,
            }),
        }
    }
    if replicas.is_empty() {
        return Err(Failure::Domain(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    Ok(replicas)
}

fn scorecard_markdown(card: &Scorecard) -> String {
    let mut md = String::from("# Moment scorecard\n\n");
    md.push_str(&format!("Policy: {}\n\n", card.policy));
    md.push_str("| series | t | empirical | SE | predicted | kind | z | pass |\n");
    md.push_str("|---|---|---|---|---|---|---|---|\n");
    for row in &card.rows {
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
            row.name,
            fmt(row.t),
            fmt(row.empirical),
            fmt(row.se),
            fmt(row.predicted),
            kind_label(row.kind),
            fmt(row.z),
            if row.pass { "yes" } else { "no" }
        ));
    }
    md.push_str(&format!(
        "\nAll pass: {}\n",
        if card.all_pass { "yes" } else { "no" }
    ));
    md
}

fn kind_label(kind: PredictionKind) -> String {
    match kind {
        PredictionKind::TwoSided => "two-sided".into(),
        PredictionKind::UpperBound { constant } => format!("upper-bound ×{}", fmt(constant)),
    }
}
