//! End-to-end cross-check between the Monte Carlo engine and the spectral
//! analytics: the expected particle density of the branching process is the
//! kernel `p_t`, so the binned occupation histogram of many replicas must
//! match `∫_bin p_t(x₀, y) dy` bin by bin at χ² level.

use frontier_core::kernels::{p_t, KernelConfig};
use frontier_core::numerics::adaptive_simpson;
use frontier_core::sim::{run, summarize_replicas, SimConfig};
use frontier_core::spectrum::FiniteSpectrum;

#[test]
fn occupation_histogram_matches_the_expectation_kernel() {
    let (rho, length, x0, t) = (4.0, 10.0, 3.0, 2.0);
    let replicas = 20_000usize;

    let mut cfg = SimConfig::new(rho, t).unwrap();
    cfg.barrier = Some(length);
    cfg.initial = vec![(x0, 1)];
    cfg.replica_count = replicas;
    cfg.seed = 31415;
    cfg.record_schedule = vec![t];
    let results = run(&cfg).unwrap();
    assert!(results.iter().all(|r| r.records.len() == 1));

    // Bin the final clouds over the bulk (0, 5) — the exponential tilt
    // e^{μ(x₀−y)} leaves < 0.3% of the mass beyond 5, far too thin for
    // per-bin CLT normality. counts[r][b] = particles of replica r in bin b.
    let n_bins = 20usize;
    let bulk = 5.0;
    let width = bulk / n_bins as f64;
    let mut counts = vec![vec![0u32; n_bins]; replicas];
    for (r, res) in results.iter().enumerate() {
        for &(x, _) in &res.final_particles {
            if x < bulk {
                counts[r][(x / width) as usize] += 1;
            }
        }
    }

    // Analytic per-replica expectation per bin from the kernel.
    let kcfg = KernelConfig::new(FiniteSpectrum::compute(rho, length, 400).unwrap());
    let expected: Vec<f64> = (0..n_bins)
        .map(|b| {
            let (a, c) = (b as f64 * width, (b + 1) as f64 * width);
            adaptive_simpson(&|y: f64| p_t(&kcfg, x0, y, t).unwrap(), a, c, 1e-10, 40)
        })
        .collect();

    // Keep bins with enough expected mass for per-bin CLT normality
    // (≥ 100 expected counts in total); sparse edge bins would make the
    // z-scores Poisson-skewed rather than Gaussian.
    let nf = replicas as f64;
    let mut chi2 = 0.0;
    let mut kept = 0usize;
    for b in 0..n_bins {
        if expected[b] * nf < 100.0 {
            continue;
        }
        let mean = counts.iter().map(|c| c[b] as f64).sum::<f64>() / nf;
        let var = counts
            .iter()
            .map(|c| {
                let d = c[b] as f64 - mean;
                d * d
            })
            .sum::<f64>()
            / (nf - 1.0);
        // Poisson floor keeps thin bins from producing degenerate SEs.
        let se = (var / nf).sqrt().max((expected[b] / nf).sqrt());
        let z = (mean - expected[b]) / se;
        chi2 += z * z;
        kept += 1;
    }
    assert!(
        kept >= 15,
        "only {kept} of {n_bins} bins carry enough mass; check the setup"
    );
    let m = kept as f64;
    assert!(
        (chi2 - m).abs() <= 3.0 * (2.0 * m).sqrt(),
        "χ² = {chi2} over {kept} bins vs expected {m} ± {:.1}",
        3.0 * (2.0 * m).sqrt()
    );

    // Total-mass crosscheck: E[N(t)] = ∫₀ᴸ p_t(x₀, y) dy over the whole interval.
    let summary = summarize_replicas(&results).unwrap();
    let n_row = &summary.series.iter().find(|s| s.name == "N").unwrap().stats[0];
    let total = adaptive_simpson(&|y: f64| p_t(&kcfg, x0, y, t).unwrap(), 0.0, length, 1e-10, 40);
    assert!(
        (n_row.mean - total).abs() <= 3.0 * n_row.se,
        "E[N] = {} ± {} vs ∫p = {total}",
        n_row.mean,
        n_row.se
    );
}
