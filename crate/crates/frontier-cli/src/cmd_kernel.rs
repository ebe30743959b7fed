//! `frontier kernel {qt|pt|green|flux}` — CSV evaluation grids of the
//! spectral kernels at fixed source point.

use crate::out::{fmt, Csv};
use crate::{CmdResult, Failure};
use clap::{Args, Subcommand};
use frontier_core::kernels::{
    flux_i, green_closed, green_series, p_t, q_t, GreenComponents, KernelConfig,
};
use frontier_core::spectrum::FiniteSpectrum;
use std::path::PathBuf;

#[derive(Subcommand)]
pub enum KernelCmd {
    /// Heat kernel q_t(x, ·) of the spectral operator on a y-grid
    Qt(GridArgs),
    /// Expectation kernel p_t(x, ·) of the particle system on a y-grid
    Pt(GridArgs),
    /// Green function G(x, ·) at spectral shift λ∞ + ξ on a y-grid
    Green(GreenArgs),
    /// Boundary flux J(x, T) on a T-grid, plus its window integral
    Flux(FluxArgs),
}

#[derive(Args)]
pub struct GridArgs {
    /// Branching strength ρ
    #[arg(long)]
    rho: f64,
    /// Interval length L
    #[arg(long)]
    length: f64,
    /// Number of spectral modes backing the evaluation
    #[arg(long, default_value_t = 200)]
    modes: usize,
    /// Source point x
    #[arg(long)]
    x: f64,
    /// Time t (must be ≥ 0.05 where the spectral sum converges)
    #[arg(long)]
    t: f64,
    /// Grid points across [0, L]
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct GreenArgs {
    /// Branching strength ρ
    #[arg(long)]
    rho: f64,
    /// Interval length L
    #[arg(long)]
    length: f64,
    /// Source point x
    #[arg(long)]
    x: f64,
    /// Positive spectral shift ξ (the Green function is taken at λ∞ + ξ)
    #[arg(long, default_value_t = 1e-3)]
    xi: f64,
    /// Evaluate by the eigenfunction series instead of the closed form
    #[arg(long)]
    series: bool,
    /// Number of modes for --series
    #[arg(long, default_value_t = 400)]
    modes: usize,
    /// Grid points across (0, L), endpoints excluded
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FluxArgs {
    /// Branching strength ρ
    #[arg(long)]
    rho: f64,
    /// Interval length L
    #[arg(long)]
    length: f64,
    /// Number of spectral modes backing the evaluation
    #[arg(long, default_value_t = 200)]
    modes: usize,
    /// Evaluation point x
    #[arg(long)]
    x: f64,
    /// Grid start time (0 is allowed; values inside (0, 0.05) are not)
    #[arg(long, default_value_t = 0.05)]
    t0: f64,
    /// Grid end time
    #[arg(long, default_value_t = 10.0)]
    t1: f64,
    /// Grid points across [t0, t1]
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cmd: KernelCmd) -> CmdResult {
    match cmd {
        KernelCmd::Qt(args) => grid(args, "qt"),
        KernelCmd::Pt(args) => grid(args, "pt"),
        KernelCmd::Green(args) => green(args),
        KernelCmd::Flux(args) => flux(args),
    }
}

fn kernel_config(rho: f64, length: f64, modes: usize) -> Result<KernelConfig, Failure> {
    let spec = FiniteSpectrum::compute(rho, length, modes)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    Ok(KernelConfig::new(spec))
}

fn grid(args: GridArgs, which: &str) -> CmdResult {
    if args.points < 2 {
        return Err(Failure::Domain("need at least 2 grid points".into()));
    }
    let cfg = kernel_config(args.rho, args.length, args.modes)?;
    let provenance = vec![
        format!("frontier kernel {which} v{}", env!("CARGO_PKG_VERSION")),
        format!(
            "rho = {}, length = {}, modes = {}, x = {}, t = {}",
            fmt(args.rho),
            fmt(args.length),
            args.modes,
            fmt(args.x),
            fmt(args.t)
        ),
    ];
    let mut csv = Csv::new(&provenance, &["y", which]);
    let h = args.length / (args.points - 1) as f64;
    for i in 0..args.points {
        let y = (i as f64 * h).min(args.length);
        let v = match which {
            "qt" => q_t(&cfg, args.x, y, args.t),
            _ => p_t(&cfg, args.x, y, args.t),
        }
        .map_err(|e| Failure::Domain(e.to_string()))?;
        csv.row(&[fmt(y), fmt(v)]);
    }
    csv.emit(args.out.as_deref())
}

fn green(args: GreenArgs) -> CmdResult {
    if args.points < 1 {
        return Err(Failure::Domain("need at least 1 grid point".into()));
    }
    let provenance = vec![
        format!("frontier kernel green v{}", env!("CARGO_PKG_VERSION")),
        format!(
            "rho = {}, length = {}, x = {}, xi = {}, method = {}",
            fmt(args.rho),
            fmt(args.length),
            fmt(args.x),
            fmt(args.xi),
            if args.series { "series" } else { "closed" }
        ),
    ];
    let mut csv = Csv::new(&provenance, &["y", "green"]);
    let series_cfg = if args.series {
        Some(kernel_config(args.rho, args.length, args.modes)?)
    } else {
        None
    };
    let closed = if args.series {
        None
    } else {
        Some(
            GreenComponents::new(args.rho, args.length, args.xi)
                .map_err(|e| Failure::Domain(e.to_string()))?,
        )
    };
    // Endpoints excluded: the Green function's domain is the open interval.
    let h = args.length / (args.points + 1) as f64;
    for i in 1..=args.points {
        let y = i as f64 * h;
        let v = match (&closed, &series_cfg) {
            (Some(c), _) => green_closed(c, args.x, y),
            (_, Some(cfg)) => green_series(cfg, args.x, y, args.xi),
            _ => unreachable!(),
        }
        .map_err(|e| Failure::Domain(e.to_string()))?;
        csv.row(&[fmt(y), fmt(v)]);
    }
    csv.emit(args.out.as_deref())
}

fn flux(args: FluxArgs) -> CmdResult {
    if args.points < 2 {
        return Err(Failure::Domain("need at least 2 grid points".into()));
    }
    if !(args.t1 > args.t0) {
        return Err(Failure::Domain(format!(
            "need t1 > t0, got [{}, {}]",
            args.t0, args.t1
        )));
    }
    let cfg = kernel_config(args.rho, args.length, args.modes)?;
    let integral = flux_i(&cfg, args.x, &[(args.t0, args.t1)])
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let provenance = vec![
        format!("frontier kernel flux v{}", env!("CARGO_PKG_VERSION")),
        format!(
            "rho = {}, length = {}, modes = {}, x = {}",
            fmt(args.rho),
            fmt(args.length),
            args.modes,
            fmt(args.x)
        ),
        format!(
            "window integral I(x, [{}, {}]) = {}",
            fmt(args.t0),
            fmt(args.t1),
            fmt(integral)
        ),
    ];
    let mut csv = Csv::new(&provenance, &["t", "flux_remaining"]);
    let h = (args.t1 - args.t0) / (args.points - 1) as f64;
    for i in 0..args.points {
        let t = args.t0 + i as f64 * h;
        // J(x, t) = I(x, [t, ∞)): boundary flux still to come after time t.
        let v = flux_i(&cfg, args.x, &[(t, f64::INFINITY)])
            .map_err(|e| Failure::Domain(e.to_string()))?;
        csv.row(&[fmt(t), fmt(v)]);
    }
    csv.emit(args.out.as_deref())
}
