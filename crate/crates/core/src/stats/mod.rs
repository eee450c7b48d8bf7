//! Benchmark statistics: affinity unit conversion, correlation coefficients, series
//! weighting, bootstrap intervals and success-rate tables.

mod aggregate;
mod correlation;
mod tables;

pub use aggregate::{
    bootstrap_ci, bootstrap_replicate, evaluate, percentile, weighted_aggregate, AggregatePoint, AggregateResult,
    BootstrapOptions, Metric, Series, DEFAULT_BOOTSTRAP_REPLICATES, DEFAULT_CI_LEVEL, MIN_SERIES_SIZE,
};
pub use correlation::{kendall_counts, kendall_tau, pearson, KendallCounts};
pub use tables::{
    confidence_columns, correlation_matrix, kendall_table, quality_columns, success_rate, BinRate, Column,
    CorrelationCell, SuccessInput, SuccessTable, DEFAULT_SIMILARITY_EDGES,
};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::LN_10;
use std::io::Read;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("inputs differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("non-finite input value")]
    NonFinite,
    #[error("input is constant")]
    ConstantInput,
    #[error("all pairs tied")]
    AllTied,
    #[error("no series with at least {min_size} ligands")]
    NoEligibleSeries { min_size: usize },
    #[error("series {series}: {reason}")]
    SeriesMetric { series: String, reason: String },
    #[error("no bootstrap replicate produced a defined metric")]
    NoValidReplicates,
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("bin edges must be finite and strictly ascending, at least two")]
    InvalidBins,
    #[error("need at least 2 records, got {got}")]
    InsufficientData { got: usize },
    #[error("temperature must be positive, got {0}")]
    InvalidTemperature(f64),
    #[error("series CSV: {0}")]
    Csv(String),
}

/// Gas constant (kcal·K⁻¹·mol⁻¹) and temperature (K) for ΔG ↔ pK conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoConstants {
    pub gas_constant: f64,
    pub temperature: f64,
}

impl Default for ThermoConstants {
    fn default() -> Self {
        Self { gas_constant: 1.987e-3, temperature: 297.0 }
    }
}

impl ThermoConstants {
    pub fn at_temperature(temperature: f64) -> Result<Self, StatsError> {
        if !(temperature.is_finite() && temperature > 0.0) {
            return Err(StatsError::InvalidTemperature(temperature));
        }
        Ok(Self { temperature, ..Self::default() })
    }

    /// `ln(10)·R·T`, kcal/mol per pK unit.
    pub fn kcal_per_pk(&self) -> f64 {
        LN_10 * self.gas_constant * self.temperature
    }
}

/// `pK = −ΔG / (ln(10)·R·T)`.
pub fn dg_to_pk(dg: f64, c: &ThermoConstants) -> f64 {
    -dg / c.kcal_per_pk()
}

pub fn pk_to_dg(pk: f64, c: &ThermoConstants) -> f64 {
    -pk * c.kcal_per_pk()
}

/// Reads benchmark series from CSV with columns `series`, `ligand_id`, one of
/// `pred_pk`/`pred_dg` and one of `exp_pk`/`exp_dg`. ΔG columns (kcal/mol) are converted
/// with `c`; a pK column wins when both are present. Series come back sorted by name, rows
/// in file order.
pub fn read_series_csv(reader: impl Read, c: &ThermoConstants) -> Result<Vec<Series>, StatsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| StatsError::Csv(e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let series_col = find("series").ok_or_else(|| StatsError::Csv("missing column series".into()))?;
    let pick = |pk: &str, dg: &str| -> Result<(usize, bool), StatsError> {
        find(pk)
            .map(|i| (i, false))
            .or_else(|| find(dg).map(|i| (i, true)))
            .ok_or_else(|| StatsError::Csv(format!("missing column {pk} or {dg}")))
    };
    let pred = pick("pred_pk", "pred_dg")?;
    let exp = pick("exp_pk", "exp_dg")?;

    let mut by_name: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| StatsError::Csv(e.to_string()))?;
        let value = |(col, is_dg): (usize, bool)| -> Result<f64, StatsError> {
            let raw = record.get(col).unwrap_or("");
            let v: f64 =
                raw.parse().map_err(|_| StatsError::Csv(format!("row {}: {:?} is not a number", row + 2, raw)))?;
            if !v.is_finite() {
                return Err(StatsError::NonFinite);
            }
            Ok(if is_dg { dg_to_pk(v, c) } else { v })
        };
        let name = record.get(series_col).unwrap_or("").to_string();
        by_name.entry(name).or_default().push((value(pred)?, value(exp)?));
    }
    Ok(by_name.into_iter().map(|(name, pairs)| Series { name, pairs }).collect())
}
