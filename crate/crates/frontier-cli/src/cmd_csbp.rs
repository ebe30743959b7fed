//! `frontier csbp` — evaluates the Laplace flow `u_t(λ)` of the
//! continuous-state branching process with mechanism
//! `Ψ(u) = −a·u + b·u^α`, and (via the `fit` subcommand) fits the stable
//! coefficient `b` to an empirical Laplace curve.

use crate::out::{emit_json, envelope, fmt};
use crate::{CmdResult, Failure};
use clap::{Args, Subcommand};
use frontier_core::csbp::{fit_b, laplace, u_flow, CsbpParams};
use serde_json::json;
use std::path::PathBuf;

#[derive(Args)]
pub struct CsbpArgs {
    #[command(subcommand)]
    cmd: Option<CsbpCmd>,
    /// Linear coefficient a (positive a is supercritical)
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Stable coefficient b (> 0)
    #[arg(long)]
    b: Option<f64>,
    /// Stability exponent α in [1, 2]
    #[arg(long)]
    alpha: Option<f64>,
    /// Laplace argument λ (≥ 0)
    #[arg(long)]
    lambda: Option<f64>,
    /// Flow time t (≥ 0)
    #[arg(long)]
    t: Option<f64>,
    /// Initial mass Ξ₀; when given, E[e^{−λΞ_t}] is also reported
    #[arg(long)]
    x0: Option<f64>,
    /// Emit a single JSON object instead of text
    #[arg(long)]
    json: bool,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (echoed into the JSON envelope; this subcommand itself
    /// is deterministic analytics)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum CsbpCmd {
    /// Fit the stable coefficient b to an empirical Laplace curve
    Fit(FitArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Stability exponent α in [1, 2], held fixed during the fit
    #[arg(long)]
    alpha: f64,
    /// Linear coefficient a, held fixed during the fit
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Initial mass Ξ₀ entering exp(−Ξ₀·u_τ(λ))
    #[arg(long)]
    xi0: f64,
    /// Flow horizon τ
    #[arg(long)]
    tau: f64,
    /// CSV file of empirical points: rows "lambda,value,se"
    /// (`#` comments and a non-numeric header line are skipped)
    #[arg(long)]
    points: PathBuf,
    /// Emit a single JSON object instead of text
    #[arg(long)]
    json: bool,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (echoed into the JSON envelope; the fit is deterministic)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(args: CsbpArgs) -> CmdResult {
    match args.cmd {
        Some(CsbpCmd::Fit(fit)) => run_fit(fit),
        None => run_eval(args),
    }
}

fn run_eval(args: CsbpArgs) -> CmdResult {
    let require = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Failure::Domain(format!("--{name} is required")))
    };
    let a = require(args.a, "a")?;
    let b = require(args.b, "b")?;
    let alpha = require(args.alpha, "alpha")?;
    let lambda = require(args.lambda, "lambda")?;
    let t = require(args.t, "t")?;

    let params = CsbpParams::new(a, b, alpha)?;
    let u = u_flow(&params, lambda, t)?;
    let lap = args.x0.map(|x0| laplace(&params, x0, lambda, t)).transpose()?;

    if args.json {
        let config = json!({
            "a": a, "b": b, "alpha": alpha, "lambda": lambda, "t": t, "x0": args.x0,
        });
        let results = json!({ "u_t": u, "laplace": lap });
        return emit_json(&envelope(config, results, args.seed), args.out.as_deref());
    }
    let mut text = format!("u_t(λ)                 = {}\n", fmt(u));
    if let (Some(x0), Some(lap)) = (args.x0, lap) {
        text.push_str(&format!(
            "E[e^(−λ·Ξ_t) | Ξ₀ = {}] = {}\n",
            fmt(x0),
            fmt(lap)
        ));
    }
    emit_text(&text, args.out.as_deref())
}

fn run_fit(args: FitArgs) -> CmdResult {
    let points = read_points(&args.points)?;
    let fit = fit_b(args.alpha, args.a, args.xi0, args.tau, &points)?;

    if args.json {
        let config = json!({
            "alpha": args.alpha,
            "a": args.a,
            "xi0": args.xi0,
            "tau": args.tau,
            "points": args.points.display().to_string(),
            "points_used": points.len(),
        });
        let results = json!({ "b": fit.b, "objective": fit.objective });
        return emit_json(&envelope(config, results, args.seed), args.out.as_deref());
    }
    let text = format!(
        "b         = {}\nobjective = {}\npoints    = {}\n",
        fmt(fit.b),
        fmt(fit.objective),
        points.len()
    );
    emit_text(&text, args.out.as_deref())
}

/// Parses "lambda,value,se" rows, skipping `#` comments, blank lines,
/// and one optional non-numeric header row.
fn read_points(path: &PathBuf) -> Result<Vec<(f64, f64, f64)>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("reading {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Failure::Domain(format!(
                "{} line {}: expected 3 comma-separated fields, got {}",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => points.push((v[0], v[1], v[2])),
            // A single non-numeric row at the top is a column header.
            Err(_) if points.is_empty() && fields[0].parse::<f64>().is_err() => continue,
            Err(e) => {
                return Err(Failure::Domain(format!(
                    "{} line {}: {e}",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    if points.is_empty() {
        return Err(Failure::Domain(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    Ok(points)
}

fn emit_text(text: &str, out: Option<&std::path::Path>) -> CmdResult {
    match out {
        Some(path) => crate::out::atomic_write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
