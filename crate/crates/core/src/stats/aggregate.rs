//! Series-weighted metric aggregation and percentile bootstrap intervals.

use super::{kendall_tau, pearson, StatsError};
use crate::rng;
use serde::{Deserialize, Serialize};

pub const MIN_SERIES_SIZE: usize = 10;
pub const DEFAULT_BOOTSTRAP_REPLICATES: usize = 10_000;
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// One congeneric benchmark series: `(predicted pK, experimental pK)` per ligand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub pairs: Vec<(f64, f64)>,
}

impl Series {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn columns(&self) -> (Vec<f64>, Vec<f64>) {
        self.pairs.iter().copied().unzip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Pearson,
    KendallTau,
}

impl Metric {
    pub fn evaluate(self, s: &Series) -> Result<f64, StatsError> {
        let (p, e) = s.columns();
        match self {
            Metric::Pearson => pearson(&p, &e),
            Metric::KendallTau => kendall_tau(&p, &e),
        }
    }
}

/// Size-weighted mean of `(weight, value)` items.
fn weighted_mean(items: &[(f64, f64)]) -> f64 {
    let total: f64 = items.iter().map(|i| i.0).sum();
    items.iter().map(|(w, v)| w * v).sum::<f64>() / total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub value: f64,
    pub series_used: usize,
}

/// `Σ nᵢ·mᵢ / Σ nᵢ` over series with at least `min_size` ligands.
///
/// A metric that is undefined on an eligible series is an error.
pub fn weighted_aggregate(series: &[Series], metric: Metric, min_size: usize) -> Result<AggregatePoint, StatsError> {
    let eligible: Vec<&Series> = series.iter().filter(|s| s.len() >= min_size).collect();
    if eligible.is_empty() {
        return Err(StatsError::NoEligibleSeries { min_size });
    }
    let mut items = Vec::with_capacity(eligible.len());
    for s in &eligible {
        let v = metric
            .evaluate(s)
            .map_err(|e| StatsError::SeriesMetric { series: s.name.clone(), reason: e.to_string() })?;
        items.push((s.len() as f64, v));
    }
    Ok(AggregatePoint { value: weighted_mean(&items), series_used: eligible.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub min_size: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self { replicates: DEFAULT_BOOTSTRAP_REPLICATES, level: DEFAULT_CI_LEVEL, seed: 0, min_size: MIN_SERIES_SIZE }
    }
}

/// Linear interpolation between order statistics (`q ∈ [0, 1]`).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// One bootstrap replicate: each eligible series resampled with replacement (same size),
/// the metric recomputed and re-aggregated. Series whose resample leaves the metric
/// undefined are dropped from that replicate.
pub fn bootstrap_replicate(eligible: &[&Series], metric: Metric, seed: u64) -> Option<f64> {
    let mut r = rng::seeded(seed);
    let mut items = Vec::with_capacity(eligible.len());
    for s in eligible {
        let n = s.len();
        let pairs = (0..n).map(|_| s.pairs[rng::uniform_index(&mut r, n)]).collect();
        let resampled = Series { name: String::new(), pairs };
        if let Ok(v) = metric.evaluate(&resampled) {
            items.push((n as f64, v));
        }
    }
    (!items.is_empty()).then(|| weighted_mean(&items))
}

/// Percentile interval of the weighted aggregate. Replicate `k` uses seed `seed + k`.
pub fn bootstrap_ci(series: &[Series], metric: Metric, opts: &BootstrapOptions) -> Result<(f64, f64), StatsError> {
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(StatsError::InvalidLevel(opts.level));
    }
    let eligible: Vec<&Series> = series.iter().filter(|s| s.len() >= opts.min_size).collect();
    if eligible.is_empty() {
        return Err(StatsError::NoEligibleSeries { min_size: opts.min_size });
    }
    let mut values: Vec<f64> = (0..opts.replicates as u64)
        .filter_map(|k| bootstrap_replicate(&eligible, metric, opts.seed.wrapping_add(k)))
        .collect();
    if values.is_empty() {
        return Err(StatsError::NoValidReplicates);
    }
    values.sort_by(f64::total_cmp);
    let tail = (1.0 - opts.level) / 2.0;
    Ok((percentile(&values, tail), percentile(&values, 1.0 - tail)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub weighted_pcc: f64,
    pub weighted_tau: f64,
    pub series_used: usize,
    pub pcc_ci_low: f64,
    pub pcc_ci_high: f64,
    pub tau_ci_low: f64,
    pub tau_ci_high: f64,
}

/// Weighted PCC and τ with bootstrap intervals.
pub fn evaluate(series: &[Series], opts: &BootstrapOptions) -> Result<AggregateResult, StatsError> {
    let pcc = weighted_aggregate(series, Metric::Pearson, opts.min_size)?;
    let tau = weighted_aggregate(series, Metric::KendallTau, opts.min_size)?;
    let (pl, ph) = bootstrap_ci(series, Metric::Pearson, opts)?;
    let (tl, th) = bootstrap_ci(series, Metric::KendallTau, opts)?;
    Ok(AggregateResult {
        weighted_pcc: pcc.value,
        weighted_tau: tau.value,
        series_used: pcc.series_used,
        pcc_ci_low: pl,
        pcc_ci_high: ph,
        tau_ci_low: tl,
        tau_ci_high: th,
    })
}
