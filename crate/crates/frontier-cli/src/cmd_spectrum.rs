//! `frontier spectrum` — the leading eigenvalues of the finite-interval
//! operator, with their isolation brackets, squared norms, and residuals.

use crate::out::{emit_json, envelope, fmt, Csv};
use crate::{CmdResult, Failure};
use clap::Args;
use frontier_core::spectrum::{eigenvalue_residual, FiniteSpectrum};
use serde_json::json;
use std::path::PathBuf;

#[derive(Args)]
pub struct SpectrumArgs {
    /// Branching strength ρ
    #[arg(long)]
    rho: f64,
    /// Interval length L
    #[arg(long)]
    length: f64,
    /// Number of leading eigenvalues to compute
    #[arg(long, default_value_t = 12)]
    count: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Emit the JSON envelope instead of CSV
    #[arg(long)]
    json: bool,
    /// Write JSON to this file instead of stdout (with --json)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (echoed; this subcommand is deterministic analytics)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(args: SpectrumArgs) -> CmdResult {
    let spec = FiniteSpectrum::compute(args.rho, args.length, args.count)
        .map_err(|e| Failure::Domain(e.to_string()))?;

    if args.json {
        let config = json!({
            "rho": args.rho, "length": args.length, "count": args.count,
        });
        let rows: Vec<_> = (1..=spec.len())
            .map(|k| {
                let (lo, hi) = spec.bracket(k);
                json!({
                    "k": k,
                    "lambda_k": spec.lambda(k),
                    "bracket_lo": lo,
                    "bracket_hi": hi,
                    "norm_sq": spec.norm_sq(k),
                    "residual": eigenvalue_residual(args.rho, args.length, spec.lambda(k)),
                })
            })
            .collect();
        let results = json!({
            "lambda_inf": spec.lambda_inf(),
            "mu": spec.mu(),
            "beta": spec.beta(),
            "k_positive": spec.k_positive(),
            "eigenvalues": rows,
        });
        return emit_json(&envelope(config, results, args.seed), args.out.as_deref());
    }

    let provenance = vec![
        format!("frontier spectrum v{}", env!("CARGO_PKG_VERSION")),
        format!(
            "rho = {}, length = {}, count = {}, lambda_inf = {}, mu = {}",
            fmt(args.rho),
            fmt(args.length),
            args.count,
            fmt(spec.lambda_inf()),
            fmt(spec.mu()),
        ),
    ];
    let mut csv = Csv::new(
        &provenance,
        &["k", "lambda_k", "bracket_lo", "bracket_hi", "norm_sq", "residual"],
    );
    for k in 1..=spec.len() {
        let (lo, hi) = spec.bracket(k);
        csv.row(&[
            k.to_string(),
            fmt(spec.lambda(k)),
            fmt(lo),
            fmt(hi),
            fmt(spec.norm_sq(k)),
            fmt(eigenvalue_residual(args.rho, args.length, spec.lambda(k))),
        ]);
    }
    csv.emit(args.csv.as_deref())
}
