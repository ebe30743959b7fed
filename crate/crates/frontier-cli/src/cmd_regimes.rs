//! `frontier regimes` — phase classification and the interval-independent
//! constants (λ∞, μ, β, γ, α) for one branching strength ρ.

use crate::out::{emit_json, envelope, fmt};
use crate::{CmdResult, Failure};
use clap::Args;
use frontier_core::regimes::{derive, Regime, RegimeThresholds};
use serde_json::json;
use std::path::PathBuf;

#[derive(Args)]
pub struct RegimesArgs {
    /// Branching strength ρ (must exceed 1)
    #[arg(long)]
    rho: f64,
    /// Emit a single JSON object instead of aligned text
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

pub fn regime_label(regime: Regime) -> &'static str {
    match regime {
        Regime::Pulled => "pulled",
        Regime::SemiPushed => "semi_pushed",
        Regime::FullyPushed => "fully_pushed",
        Regime::Boundary => "boundary",
    }
}

pub fn run(args: RegimesArgs) -> CmdResult {
    let params = derive(args.rho).map_err(|e| Failure::Domain(e.to_string()))?;
    let thresholds = RegimeThresholds::get();

    if args.json {
        let config = json!({ "rho": args.rho, "json": true });
        let results = json!({
            "rho": params.rho,
            "regime": regime_label(params.regime),
            "lambda_inf": params.lambda_inf,
            "mu": params.mu,
            "beta": params.beta,
            "gamma": params.gamma,
            "alpha": params.alpha,
            "rho1": thresholds.rho1,
            "rho2": thresholds.rho2,
        });
        return emit_json(&envelope(config, results, args.seed), args.out.as_deref());
    }

    let alpha = params
        .alpha
        .map(fmt)
        .unwrap_or_else(|| "undefined (pulled)".into());
    let text = format!(
        "rho         {}\n\
         regime      {}\n\
         lambda_inf  {}\n\
         mu          {}\n\
         beta        {}\n\
         gamma       {}\n\
         alpha       {}\n\
         rho1        {}\n\
         rho2        {}\n",
        fmt(params.rho),
        regime_label(params.regime),
        fmt(params.lambda_inf),
        fmt(params.mu),
        fmt(params.beta),
        fmt(params.gamma),
        alpha,
        fmt(thresholds.rho1),
        fmt(thresholds.rho2),
    );
    match args.out {
        Some(path) => crate::out::atomic_write(&path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
