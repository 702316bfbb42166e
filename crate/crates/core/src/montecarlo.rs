//! Seeded Monte Carlo estimate of the outage probability.
//!
//! Sample `j` draws its uniforms from ChaCha8 stream `j` of a generator keyed by
//! the seed, so every sample is a pure function of `(seed, j)`. Samples are
//! partitioned across workers freely and the event counts are integers, which
//! makes the estimate bit-identical for any worker count.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_means, Method, OutageResult, Variant};
use crate::error::{Error, Result};

/// Largest `n` the per-sample stack buffers hold.
pub const MAX_MC_N: usize = 64;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McModel {
    /// Independent `X_i = P_(i) · Γ_i` with fixed per-UE means, ordered afterwards.
    #[default]
    PairThenOrder,
    /// Draw `Γ_i`, rank them, then hand out the transmit powers by rank.
    OrderThenPair,
}

impl McModel {
    pub fn label(self) -> &'static str {
        match self {
            McModel::PairThenOrder => "pair_then_order",
            McModel::OrderThenPair => "order_then_pair",
        }
    }
}

impl fmt::Display for McModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub model: McModel,
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: 0, model: McModel::PairThenOrder, workers: 1 }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, ..Self::default() }
    }

    pub fn with_model(self, model: McModel) -> Self {
        Self { model, ..self }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    fn check(&self, expected: McModel) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be at least 1"));
        }
        if self.model != expected {
            return Err(Error::invalid(format!("this estimator implements the {expected} model, config asks for {}", self.model)));
        }
        Ok(())
    }
}

/// Stream `j` of the generator keyed by the configured seed.
#[derive(Clone)]
struct SampleStreams(ChaCha8Rng);

impl SampleStreams {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    fn stream(&self, sample: u64) -> ChaCha8Rng {
        let mut rng = self.0.clone();
        rng.set_stream(sample);
        rng
    }
}

/// Exponential draw by inversion, `-mean · ln(1 - U)` with `U ∈ [0, 1)`.
fn exponential(rng: &mut impl Rng, mean: f64) -> f64 {
    let u: f64 = rng.random();
    -mean * (-u).ln_1p()
}

/// `X_(1) - Σ_{i≥2} X_(i)` without sorting.
pub fn sic_margin(x: &[f64]) -> f64 {
    let (max, sum) = x.iter().fold((f64::NEG_INFINITY, 0.0), |(m, s), &v| (m.max(v), s + v));
    2.0 * max - sum
}

/// Counts samples in `[0, samples)` where `event(stream)` holds, split over
/// `workers` threads. Integer counts keep the total independent of the split.
fn count_events<F>(cfg: &McConfig, event: F) -> Result<u64>
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let streams = SampleStreams::new(cfg.seed);
    let count_range = |range: std::ops::Range<u64>| range.filter(|&j| event(&mut streams.stream(j))).count() as u64;
    if cfg.workers == 1 {
        return Ok(count_range(0..cfg.samples));
    }
    let chunks = (cfg.workers as u64 * 8).min(cfg.samples);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {} workers: {e}", cfg.workers)))?;
    Ok(pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| count_range(cfg.samples * c / chunks..cfg.samples * (c + 1) / chunks))
            .sum()
    }))
}

fn estimate(events: u64, cfg: &McConfig) -> OutageResult {
    let p = events as f64 / cfg.samples as f64;
    OutageResult {
        value: p,
        method: Method::MonteCarlo,
        variant: Variant::Model(cfg.model),
        stderr: Some((p * (1.0 - p) / cfg.samples as f64).sqrt()),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_MC_N {
        return Err(Error::UnsupportedSize { what: "Monte Carlo", n, max: MAX_MC_N });
    }
    Ok(())
}

/// Independent exponential `X_i` with the given means; outage when
/// `2·max(X) - Σ X < pthres`. Ties (probability zero) count as success.
pub fn sample_outage(means: &[f64], pthres: f64, cfg: &McConfig) -> Result<OutageResult> {
    check_means(means, pthres)?;
    check_size(means.len())?;
    cfg.check(McModel::PairThenOrder)?;
    let n = means.len();
    let events = count_events(cfg, |rng| {
        let mut x = [0.0f64; MAX_MC_N];
        for (xi, &m) in x.iter_mut().zip(means) {
            *xi = exponential(rng, m);
        }
        sic_margin(&x[..n]) < pthres
    })?;
    Ok(estimate(events, cfg))
}

/// Protocol reading: draw `Γ_i`, sort descending, pair the `k`-th largest with
/// `powers[k]`, and test the SIC margin on the resulting received powers.
pub fn sample_outage_protocol(gamma_means: &[f64], powers: &[f64], pthres: f64, cfg: &McConfig) -> Result<OutageResult> {
    check_means(gamma_means, pthres)?;
    check_size(gamma_means.len())?;
    if powers.len() != gamma_means.len() {
        return Err(Error::invalid(format!("{} powers for {} channel means", powers.len(), gamma_means.len())));
    }
    if powers.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::invalid("powers must be positive and finite"));
    }
    if powers.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("powers must be strictly descending"));
    }
    cfg.check(McModel::OrderThenPair)?;
    let n = gamma_means.len();
    let events = count_events(cfg, |rng| {
        let mut g = [0.0f64; MAX_MC_N];
        for (gi, &m) in g.iter_mut().zip(gamma_means) {
            *gi = exponential(rng, m);
        }
        let g = &mut g[..n];
        g.sort_unstable_by(|a, b| b.total_cmp(a));
        let strongest = powers[0] * g[0];
        let rest: f64 = powers[1..].iter().zip(&g[1..]).map(|(p, v)| p * v).sum();
        strongest - rest < pthres
    })?;
    Ok(estimate(events, cfg))
}

/// Runs the configured estimator twice and reports whether both runs produced
/// bit-identical estimates.
pub fn reproduce(means: &[f64], pthres: f64, cfg: &McConfig) -> Result<bool> {
    let run = || match cfg.model {
        McModel::PairThenOrder => sample_outage(means, pthres, cfg),
        McModel::OrderThenPair => {
            let n = means.len() as f64;
            let powers: Vec<f64> = (0..means.len()).map(|k| n - k as f64).collect();
            sample_outage_protocol(means, &powers, pthres, cfg)
        }
    };
    let (a, b) = (run()?, run()?);
    Ok(a.value.to_bits() == b.value.to_bits() && a.stderr.map(f64::to_bits) == b.stderr.map(f64::to_bits))
}
