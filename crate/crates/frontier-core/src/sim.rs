//! Monte Carlo engine for the dyadic branching Brownian motion with
//! space-dependent branching rate `r(x) = ½ + (ρ−1)/2·1_{[0,1]}(x)`,
//! leftward drift, absorption at 0, and an optional right barrier at `L`.
//!
//! Discretization is fixed-step Euler: per particle per step, a Bernoulli
//! branch draw at the pre-move position, then a Gaussian increment, then
//! boundary tests with an optional Brownian-bridge crossing correction.
//! Branching replaces the parent by two children at its pre-move position
//! (the parent's move is discarded for that step); each convention of this
//! kind agrees to `O(dt)` and this one is stated so runs are reproducible.
//!
//! Reproducibility contract: every replica derives its own ChaCha8
//! generators from `(master seed, replica index)`, branch decisions and
//! motion draws come from two separate streams of the same key, and
//! replicas are collected in index order — output is byte-identical for
//! any thread count. The separate branch stream also makes single-step
//! branch events pointwise monotone in ρ under a shared seed, which the
//! property tests exploit.

use crate::numerics::splitmix64;
use crate::regimes::{classify, lambda_inf, mu_of_rho, Regime, RegimeError};
use crate::spectrum::FiniteSpectrum;
use crate::stats::{ObservedSeries, RunSummary, SeriesStat, StatsError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Errors from simulation configuration and execution.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    /// Invalid model constants.
    #[error(transparent)]
    Regime(#[from] RegimeError),
    /// Invalid configuration or arguments.
    #[error("domain error: {0}")]
    Domain(String),
    /// The particle count would exceed the configured cap. Runs hitting
    /// this are marked censored, never silently truncated.
    #[error("particle capacity {limit} exceeded at t = {time}")]
    CapacityExceeded { time: f64, limit: usize },
}

/// What the right barrier does when a particle crosses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierMode {
    /// The barrier kills: crossing particles are removed and counted.
    Absorbing,
    /// The barrier logs: crossings are counted and the lineage is flagged
    /// as escaped, but particles keep evolving. This mode measures the
    /// decomposition of `Z` into never-escaped (`Z′`) and escaped parts.
    LogOnly,
}

/// Default hard cap on the live particle count.
pub const DEFAULT_MAX_PARTICLES: usize = 1_000_000;

/// Default Euler step.
pub const DEFAULT_DT: f64 = 1e-3;

/// Full description of one simulation campaign.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// Interior branching intensity: the rate is `ρ/2` on `[0,1]`, `½` right of 1.
    pub rho: f64,
    /// Magnitude of the leftward drift; defaults to the front speed μ(ρ)
    /// and may be overridden (0 gives driftless motion).
    pub drift: f64,
    /// Right absorbing/logging boundary `L`; `None` leaves the right side open.
    pub barrier: Option<f64>,
    /// Behaviour at the right barrier (ignored when `barrier` is `None`).
    pub barrier_mode: BarrierMode,
    /// Euler time step.
    pub dt: f64,
    /// Time horizon of each replica.
    pub t_max: f64,
    /// Initial condition: (position, particle count) groups.
    pub initial: Vec<(f64, usize)>,
    /// Master seed; all replica randomness derives from it.
    pub seed: u64,
    /// Number of independent replicas.
    pub replica_count: usize,
    /// Hard cap on simultaneous particles; exceeding it censors the replica.
    pub max_particles: usize,
    /// Brownian-bridge crossing correction at every boundary (default on).
    /// Without it, absorption between grid points is missed and boundary
    /// hits are systematically under-counted.
    pub bridge_correction: bool,
    /// Sorted times at which observables are recorded.
    pub record_schedule: Vec<f64>,
}

impl SimConfig {
    /// A config with library defaults: drift μ(ρ), `dt = 1e-3`, one
    /// particle at `x = 1`, one replica, bridge correction on, and a
    /// single observation at `t_max`.
    pub fn new(rho: f64, t_max: f64) -> Result<Self, SimError> {
        Ok(SimConfig {
            rho,
            drift: mu_of_rho(rho)?,
            barrier: None,
            barrier_mode: BarrierMode::Absorbing,
            dt: DEFAULT_DT,
            t_max,
            initial: vec![(1.0, 1)],
            seed: 0,
            replica_count: 1,
            max_particles: DEFAULT_MAX_PARTICLES,
            bridge_correction: true,
            record_schedule: vec![t_max],
        })
    }

    /// Validates every invariant the engine relies on.
    pub fn validate(&self) -> Result<(), SimError> {
        crate::regimes::validate_rho(self.rho)?;
        if !self.drift.is_finite() {
            return Err(SimError::Domain(format!("drift = {} not finite", self.drift)));
        }
        if !(self.dt > 0.0) || self.dt > 0.01 {
            return Err(SimError::Domain(format!(
                "dt = {} outside (0, 0.01]",
                self.dt
            )));
        }
        // Per-step branch probability r(x)·dt must stay well below 1.
        let p_max = self.dt * (self.rho / 2.0).max(1.0);
        if p_max > 0.02 {
            return Err(SimError::Domain(format!(
                "dt·max(ρ/2, 1) = {p_max} exceeds 0.02; shrink dt"
            )));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(SimError::Domain(format!(
                "t_max = {} must be positive and finite",
                self.t_max
            )));
        }
        if let Some(l1) = self.barrier {
            if !(l1 > 0.0) || !l1.is_finite() {
                return Err(SimError::Domain(format!(
                    "barrier = {l1} must be positive and finite"
                )));
            }
        }
        if self.initial.is_empty() || self.initial.iter().all(|&(_, c)| c == 0) {
            return Err(SimError::Domain("initial condition is empty".into()));
        }
        let mut total = 0usize;
        for &(x, count) in &self.initial {
            let inside = x > 0.0 && self.barrier.map_or(true, |l1| x < l1);
            if !inside || !x.is_finite() {
                return Err(SimError::Domain(format!(
                    "initial position {x} outside (0, {})",
                    self.barrier.map_or(f64::INFINITY, |l1| l1)
                )));
            }
            total += count;
        }
        if total > self.max_particles {
            return Err(SimError::Domain(format!(
                "initial particle count {total} exceeds max_particles {}",
                self.max_particles
            )));
        }
        if self.max_particles == 0 {
            return Err(SimError::Domain("max_particles must be positive".into()));
        }
        if self.replica_count == 0 {
            return Err(SimError::Domain("replica_count must be positive".into()));
        }
        let mut prev = -f64::INFINITY;
        for &t in &self.record_schedule {
            if !(t >= 0.0) || t > self.t_max {
                return Err(SimError::Domain(format!(
                    "schedule time {t} outside [0, t_max = {}]",
                    self.t_max
                )));
            }
            if t <= prev {
                return Err(SimError::Domain(
                    "record_schedule must be strictly increasing".into(),
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

/// One particle: Euclidean position and whether its lineage has ever
/// crossed the right barrier (meaningful in log-only mode; children
/// inherit the flag).
#[derive(Debug, Clone, Copy)]
struct Particle {
    x: f64,
    escaped: bool,
}

/// The evolving state of one replica: the clock, the particle cloud, and
/// the RNG cursors (one stream for branch decisions, one for motion).
#[derive(Debug, Clone)]
pub struct ParticleState {
    /// Current simulation time.
    pub time: f64,
    particles: Vec<Particle>,
    scratch: Vec<Particle>,
    branch_rng: ChaCha8Rng,
    motion_rng: ChaCha8Rng,
    /// Cumulative count of right-barrier first hits (per lineage).
    pub r_cum: u64,
    escapes: Vec<EscapeEvent>,
}

/// One logged crossing of the right barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeEvent {
    /// Simulation time at the end of the step in which the crossing was detected.
    pub time: f64,
    /// Whether the lineage keeps evolving (log-only barrier) or was killed.
    pub lineage_continues: bool,
}

/// Derives the 32-byte ChaCha key for one replica from the master seed.
/// The replica index is whitened through one splitmix64 round, folded into
/// the master seed, and the result is expanded by a splitmix64 chain, so
/// nearby indices give unrelated keys.
pub fn replica_seed(master_seed: u64, replica: u64) -> [u8; 32] {
    let mut idx = replica;
    let mut s = master_seed ^ splitmix64(&mut idx);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    seed
}

impl ParticleState {
    /// Initial state of the given replica under `config`.
    pub fn init(config: &SimConfig, replica: usize) -> Self {
        let mut particles = Vec::new();
        for &(x, count) in &config.initial {
            particles.extend(std::iter::repeat(Particle { x, escaped: false }).take(count));
        }
        Self::from_parts(replica_seed(config.seed, replica as u64), particles)
    }

    fn from_parts(seed: [u8; 32], particles: Vec<Particle>) -> Self {
        let mut branch_rng = ChaCha8Rng::from_seed(seed);
        branch_rng.set_stream(1);
        let mut motion_rng = ChaCha8Rng::from_seed(seed);
        motion_rng.set_stream(2);
        ParticleState {
            time: 0.0,
            particles,
            scratch: Vec::new(),
            branch_rng,
            motion_rng,
            r_cum: 0,
            escapes: Vec::new(),
        }
    }

    /// Number of live particles.
    pub fn n(&self) -> usize {
        self.particles.len()
    }

    /// Live particle positions, in stable engine order.
    pub fn positions(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.x).collect()
    }

    /// Whether the population has died out.
    pub fn is_extinct(&self) -> bool {
        self.particles.is_empty()
    }
}

/// Advances the state by one Euler step of length `dt_eff ∈ (0, dt]`.
///
/// Per particle, in a fixed order: (1) branch with probability
/// `r(x)·dt_eff` at the pre-move position, producing two children there
/// and discarding the move; (2) otherwise move by `−drift·dt_eff + √dt_eff·ξ`;
/// (3) absorb at 0 on sign crossing, plus a bridge acceptance with
/// probability `exp(−2·d_pre·d_post/dt_eff)` when the correction is on;
/// (4) same test at the right barrier, which kills or flags the lineage
/// depending on the barrier mode. Branch decisions come from a dedicated
/// RNG stream so they stay aligned across runs that differ only in ρ.
pub fn step(state: &mut ParticleState, config: &SimConfig, dt_eff: f64) -> Result<(), SimError> {
    debug_assert!(dt_eff > 0.0 && dt_eff <= config.dt * (1.0 + 1e-12));
    let sqrt_dt = dt_eff.sqrt();
    let t_end = state.time + dt_eff;
    let mut next = std::mem::take(&mut state.scratch);
    next.clear();

    for i in 0..state.particles.len() {
        let p = state.particles[i];
        let rate = if p.x <= 1.0 { config.rho / 2.0 } else { 0.5 };
        let u_branch: f64 = state.branch_rng.gen();
        if u_branch < rate * dt_eff {
            next.push(p);
            next.push(p);
            if next.len() > config.max_particles {
                state.scratch = next;
                return Err(SimError::CapacityExceeded {
                    time: t_end,
                    limit: config.max_particles,
                });
            }
            continue;
        }
        let xi: f64 = state.motion_rng.sample(StandardNormal);
        let x1 = p.x - config.drift * dt_eff + sqrt_dt * xi;
        // Left boundary at 0.
        if x1 <= 0.0 {
            continue;
        }
        if config.bridge_correction {
            let u0: f64 = state.motion_rng.gen();
            if u0 < (-2.0 * p.x * x1 / dt_eff).exp() {
                continue;
            }
        }
        // Right barrier, applied only to lineages still inside.
        if let Some(l1) = config.barrier {
            if !p.escaped {
                let crossed = if x1 >= l1 {
                    true
                } else if config.bridge_correction {
                    let ul: f64 = state.motion_rng.gen();
                    ul < (-2.0 * (l1 - p.x) * (l1 - x1) / dt_eff).exp()
                } else {
                    false
                };
                if crossed {
                    state.r_cum += 1;
                    let lineage_continues = config.barrier_mode == BarrierMode::LogOnly;
                    state.escapes.push(EscapeEvent {
                        time: t_end,
                        lineage_continues,
                    });
                    if lineage_continues {
                        next.push(Particle { x: x1, escaped: true });
                    }
                    continue;
                }
            }
        }
        next.push(Particle { x: x1, escaped: p.escaped });
    }

    state.scratch = std::mem::replace(&mut state.particles, next);
    state.time = t_end;
    Ok(())
}

/// Observables recorded at one schedule time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    /// Observation time.
    pub t: f64,
    /// Live particle count (all lineages).
    pub n: usize,
    /// Σ z(X_v) over particles at or below the barrier, escaped lineages
    /// included — the full spectral weight of the cloud.
    pub z: f64,
    /// Σ z(X_v) over never-escaped lineages only.
    pub zprime: f64,
    /// Σ (X_v ∧ 1)·e^{μ(X_v−L)} over never-escaped lineages.
    pub y: f64,
    /// Σ e^{μ(X_v−L)} over never-escaped lineages.
    pub ytilde: f64,
    /// Rightmost live position; NaN once the population is extinct.
    pub m_max: f64,
    /// Cumulative right-barrier hit count up to this time.
    pub r_cum: u64,
}

/// Why a replica stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicaStatus {
    /// The population died out before the horizon.
    Extinct,
    /// The horizon `t_max` was reached with particles alive.
    TMax,
    /// The particle cap was hit; records end early and the replica must be
    /// excluded from estimators.
    Censored,
}

/// Everything one replica produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicaResult {
    /// Replica index (also the RNG derivation index).
    pub replica: usize,
    /// One record per schedule time reached before termination.
    pub records: Vec<ObservableRecord>,
    /// Right-barrier crossings in order of detection.
    pub escapes: Vec<EscapeEvent>,
    /// Termination cause.
    pub status: ReplicaStatus,
    /// Particle cloud at termination: (position, lineage-escaped flag).
    pub final_particles: Vec<(f64, bool)>,
    /// Clock value at termination.
    pub final_time: f64,
}

/// Builds the observable record for the current state. The spectral
/// weights `Z`, `Z′`, `Y`, `Ỹ` are defined relative to the right barrier;
/// without a barrier (or without a positive principal eigenvalue to
/// define `z`) they are recorded as 0.
fn observe(
    state: &ParticleState,
    config: &SimConfig,
    weight: Option<&FiniteSpectrum>,
    t: f64,
) -> ObservableRecord {
    let mut m_max = f64::NAN;
    for p in &state.particles {
        if m_max.is_nan() || p.x > m_max {
            m_max = p.x;
        }
    }
    let (mut z, mut zprime, mut y, mut ytilde) = (0.0, 0.0, 0.0, 0.0);
    if let (Some(l1), Some(spec)) = (config.barrier, weight) {
        for p in &state.particles {
            if p.x <= l1 {
                let zi = spec
                    .eval_z(p.x)
                    .expect("live particles below the barrier are inside [0, L]");
                z += zi;
                if !p.escaped {
                    zprime += zi;
                }
            }
            if !p.escaped {
                let e = (config.drift * (p.x - l1)).exp();
                y += p.x.min(1.0) * e;
                ytilde += e;
            }
        }
    }
    ObservableRecord {
        t,
        n: state.particles.len(),
        z,
        zprime,
        y,
        ytilde,
        m_max,
        r_cum: state.r_cum,
    }
}

/// Runs one replica to its horizon, recording at every schedule time.
fn run_replica(
    replica: usize,
    config: &SimConfig,
    weight: Option<&FiniteSpectrum>,
) -> ReplicaResult {
    let mut state = ParticleState::init(config, replica);
    let mut records = Vec::with_capacity(config.record_schedule.len());
    let mut censored = false;

    // Advance target by target; schedule times are landed on exactly via a
    // final partial step, and the run continues to t_max so the
    // termination cause is well defined.
    let mut targets: Vec<(f64, bool)> =
        config.record_schedule.iter().map(|&t| (t, true)).collect();
    if config.record_schedule.last().copied() != Some(config.t_max) {
        targets.push((config.t_max, false));
    }

    'targets: for &(target, record) in &targets {
        while state.time < target - 1e-12 && !state.is_extinct() {
            let dt_eff = (target - state.time).min(config.dt);
            if step(&mut state, config, dt_eff).is_err() {
                censored = true;
                break 'targets;
            }
        }
        // Snap to the target exactly; an extinct population jumps forward
        // in time unchanged.
        state.time = target;
        if record {
            records.push(observe(&state, config, weight, target));
        }
    }

    let status = if censored {
        ReplicaStatus::Censored
    } else if state.is_extinct() {
        ReplicaStatus::Extinct
    } else {
        ReplicaStatus::TMax
    };
    ReplicaResult {
        replica,
        records,
        escapes: state.escapes,
        status,
        final_particles: state.particles.iter().map(|p| (p.x, p.escaped)).collect(),
        final_time: state.time,
    }
}

/// Runs all replicas of the campaign, in parallel, deterministically.
///
/// Output is a function of the config alone (replica RNG streams are
/// derived from `(seed, index)` and results are collected in index
/// order), so any thread count produces identical bytes.
pub fn run(config: &SimConfig) -> Result<Vec<ReplicaResult>, SimError> {
    config.validate()?;
    // The spectral weight z needs the barrier and a positive principal
    // eigenvalue; otherwise Z-family observables are recorded as zero.
    let weight = match config.barrier {
        Some(l1) => FiniteSpectrum::compute(config.rho, l1, 1)
            .ok()
            .filter(|s| s.lambda(1) > 0.0),
        None => None,
    };
    Ok((0..config.replica_count)
        .into_par_iter()
        .map(|i| run_replica(i, config, weight.as_ref()))
        .collect())
}

/// Aggregates replica outputs into per-observable mean/SE series.
///
/// Censored replicas are excluded and counted (averaging them in would
/// bias the heavy-tail quantities the engine exists to measure). The
/// remaining replicas must share the observation schedule. `M_max` is not
/// aggregated: its mean across replicas mixes extinct populations with
/// live ones; read it per replica from the records instead.
pub fn summarize_replicas(results: &[ReplicaResult]) -> Result<RunSummary, StatsError> {
    let included: Vec<&ReplicaResult> = results
        .iter()
        .filter(|r| r.status != ReplicaStatus::Censored)
        .collect();
    let censored = results.len() - included.len();
    if included.is_empty() {
        return Err(StatsError::ScheduleMismatch(
            "no uncensored replicas to summarize".into(),
        ));
    }
    let schedule: Vec<f64> = included[0].records.iter().map(|r| r.t).collect();
    for r in &included {
        let times: Vec<f64> = r.records.iter().map(|rec| rec.t).collect();
        if times != schedule {
            return Err(StatsError::ScheduleMismatch(format!(
                "replica {} recorded at {:?}, expected {:?}",
                r.replica, times, schedule
            )));
        }
    }

    let extractors: [(&str, fn(&ObservableRecord) -> f64); 6] = [
        ("N", |r| r.n as f64),
        ("Z", |r| r.z),
        ("Zprime", |r| r.zprime),
        ("Y", |r| r.y),
        ("Ytilde", |r| r.ytilde),
        ("R_cum", |r| r.r_cum as f64),
    ];
    let n = included.len() as f64;
    let series = extractors
        .iter()
        .map(|&(name, get)| {
            let stats = schedule
                .iter()
                .enumerate()
                .map(|(j, &t)| {
                    let mean = included.iter().map(|r| get(&r.records[j])).sum::<f64>() / n;
                    let se = if included.len() < 2 {
                        0.0
                    } else {
                        let var = included
                            .iter()
                            .map(|r| {
                                let d = get(&r.records[j]) - mean;
                                d * d
                            })
                            .sum::<f64>()
                            / (n - 1.0);
                        (var / n).sqrt()
                    };
                    SeriesStat { t, mean, se }
                })
                .collect();
            ObservedSeries { name: name.into(), stats }
        })
        .collect();

    Ok(RunSummary {
        replica_count: included.len(),
        censored,
        series,
    })
}

/// Internal time cap for the descendant-count sampler: the absorbed
/// process dies out almost surely, so a replica still alive this late
/// signals a runaway excursion and is censored rather than looped forever.
const W_TIME_CAP: f64 = 1e4;

/// Samples of the rescaled descendant count `W`, with censoring made
/// explicit because truncation biases exactly the tail under study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WSamples {
    /// Rescaled first-passage counts `e^{−(μ−β)y}·(hits at −y)`.
    pub w: Vec<f64>,
    /// Replicas dropped for hitting the particle cap or the time cap.
    pub censored: usize,
    /// The rescaling factor that was applied.
    pub scale: f64,
}

/// Monte Carlo sampler for the limit variable `W`: a single particle at 0
/// with constant branching rate ½ and drift −μ(ρ), every particle stopped
/// and counted on first passage of `−y`; the count is rescaled by
/// `e^{−(μ−β)y}` so that `E[W] = 1`.
///
/// Requires a pushed ρ (so μ > β) and a deep boundary `y ≥ 3`, where the
/// exponential tilt has converged; `y = 0` is the degenerate anchor where
/// the initial particle is absorbed immediately and every sample is 1.
pub fn sample_w(rho: f64, y: f64, n_samples: usize, seed: u64) -> Result<WSamples, SimError> {
    if classify(rho)? == Regime::Pulled {
        return Err(SimError::Domain(format!(
            "rho = {rho} is pulled; W requires a pushed regime"
        )));
    }
    if n_samples == 0 {
        return Err(SimError::Domain("n_samples must be positive".into()));
    }
    if y == 0.0 {
        return Ok(WSamples {
            w: vec![1.0; n_samples],
            censored: 0,
            scale: 1.0,
        });
    }
    if !(y >= 3.0) {
        return Err(SimError::Domain(format!(
            "absorption depth y = {y} must be 0 or ≥ 3; shallow depths bias the tilt"
        )));
    }
    let mu = mu_of_rho(rho)?;
    let beta = (2.0 * lambda_inf(rho)?).sqrt();
    let scale = (-(mu - beta) * y).exp();
    let dt = DEFAULT_DT;

    let counts: Vec<Option<u64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| sample_w_replica(replica_seed(seed, i as u64), mu, y, dt))
        .collect();
    let censored = counts.iter().filter(|c| c.is_none()).count();
    let w = counts
        .into_iter()
        .flatten()
        .map(|c| scale * c as f64)
        .collect();
    Ok(WSamples { w, censored, scale })
}

/// One replica of the W sampler: returns the first-passage count at −y,
/// or None when censored by the particle or time cap.
fn sample_w_replica(seed: [u8; 32], mu: f64, y: f64, dt: f64) -> Option<u64> {
    let mut branch_rng = ChaCha8Rng::from_seed(seed);
    branch_rng.set_stream(1);
    let mut motion_rng = ChaCha8Rng::from_seed(seed);
    motion_rng.set_stream(2);
    let sqrt_dt = dt.sqrt();
    let mut particles = vec![0.0f64];
    let mut next: Vec<f64> = Vec::new();
    let mut count = 0u64;
    let mut time = 0.0;

    while !particles.is_empty() {
        if time >= W_TIME_CAP {
            return None;
        }
        next.clear();
        for i in 0..particles.len() {
            let x = particles[i];
            let u_branch: f64 = branch_rng.gen();
            if u_branch < 0.5 * dt {
                next.push(x);
                next.push(x);
                if next.len() > DEFAULT_MAX_PARTICLES {
                    return None;
                }
                continue;
            }
            let xi: f64 = motion_rng.sample(StandardNormal);
            let x1 = x - mu * dt + sqrt_dt * xi;
            if x1 <= -y {
                count += 1;
                continue;
            }
            // Bridge correction against the boundary at −y.
            let ub: f64 = motion_rng.gen();
            if ub < (-2.0 * (x + y) * (x1 + y) / dt).exp() {
                count += 1;
                continue;
            }
            next.push(x1);
        }
        std::mem::swap(&mut particles, &mut next);
        time += dt;
    }
    Some(count)
}
