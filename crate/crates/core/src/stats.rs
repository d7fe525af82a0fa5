//! Descriptive statistics over batches of runs: extinction-time summaries
//! in the mean / 95% CI / median / skewness / min / max format.

use serde::Serialize;
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::engine::{run_batch, RunResult};

/// Descriptive summary of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Normal-approximation 95% interval: mean +/- 1.96 * s / sqrt(n).
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// Midpoint convention for even sample sizes.
    pub median: f64,
    /// Population-moment skewness g1 = m3 / m2^(3/2).
    pub skewness: f64,
    /// Bias-adjusted skewness G1 = g1 * sqrt(n(n-1)) / (n-2).
    pub skewness_adjusted: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("cannot describe an empty sample")]
    EmptySample,
}

/// Describe a sample: mean, normal-approximation 95% confidence interval of
/// the mean, median, both skewness variants, and the extremes.
pub fn describe(samples: &[f64]) -> Result<SummaryStats, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = samples.len();
    let nf = n as f64;
    // Sorting first makes every statistic exactly permutation-invariant,
    // ulps included.
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-comparable sample"));
    let mean = sorted.iter().sum::<f64>() / nf;

    let mut m2 = 0.0;
    let mut m3 = 0.0;
    for &x in &sorted {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    // Sample standard deviation (n-1 denominator); zero for n = 1.
    let sd = if n > 1 { (m2 / (nf - 1.0)).sqrt() } else { 0.0 };
    let half_width = 1.96 * sd / nf.sqrt();

    m2 /= nf;
    m3 /= nf;
    let skewness = if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 };
    let skewness_adjusted = if n > 2 && m2 > 0.0 {
        skewness * (nf * (nf - 1.0)).sqrt() / (nf - 2.0)
    } else {
        0.0
    };

    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };

    Ok(SummaryStats {
        n,
        mean,
        ci95_low: mean - half_width,
        ci95_high: mean + half_width,
        median,
        skewness,
        skewness_adjusted,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

/// Boxplot quartiles (q1, median, q3) by linear interpolation of order
/// statistics. None for an empty sample.
pub fn quartiles(samples: &[f64]) -> Option<(f64, f64, f64)> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-comparable sample"));
    let at = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    };
    Some((at(0.25), at(0.5), at(0.75)))
}

/// Cog-0 extinction times over a batch of runs.
#[derive(Debug, Clone)]
pub struct ExtinctionBatch {
    /// Extinction ticks in run order, for runs where cog-0 actually died out.
    pub samples: Vec<f64>,
    /// Runs that reached the tick bound with cog-0 still alive.
    pub censored: usize,
    pub stats: SummaryStats,
    /// The underlying runs, in seed order.
    pub runs: Vec<RunResult>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no run produced a cog-0 extinction time ({censored} censored)")]
    NoSamples { censored: usize },
}

/// Run one simulation per seed and summarize the cog-0 times to extinction.
/// Runs that hit the tick bound with cog-0 alive are excluded from the
/// sample and reported in `censored`.
pub fn batch_extinction(cfg: &Config, seeds: &[u64]) -> Result<ExtinctionBatch, BatchError> {
    let runs = run_batch(cfg, seeds)?;
    let mut samples = Vec::with_capacity(runs.len());
    let mut censored = 0;
    for run in &runs {
        match run.cog0_extinction_tick {
            Some(tick) => samples.push(tick as f64),
            None if run.final_cog0 > 0 => censored += 1,
            None => {}
        }
    }
    let stats = describe(&samples).map_err(|_| BatchError::NoSamples { censored })?;
    Ok(ExtinctionBatch {
        samples,
        censored,
        stats,
        runs,
    })
}
