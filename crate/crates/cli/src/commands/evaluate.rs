//! `evaluate`: benchmark correlations over congeneric series.

use crate::config::PipelineConfig;
use crate::report::{self, opt_f6};
use crate::CliError;
use cofold_qc::stats::{evaluate as aggregate, read_series_csv, AggregateResult, Metric};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct Evaluation {
    #[serde(flatten)]
    result: AggregateResult,
    series_total: usize,
    replicates: usize,
    level: f64,
    seed: u64,
    min_series_size: usize,
    temperature: f64,
}

/// Writes `evaluation.json` and `per_series.csv`.
pub fn evaluate(predictions: &Path, c: &PipelineConfig) -> Result<String, CliError> {
    let file =
        std::fs::File::open(predictions).map_err(|e| CliError::Input(format!("{}: {e}", predictions.display())))?;
    let series =
        read_series_csv(file, &c.thermo()?).map_err(|e| CliError::Input(format!("{}: {e}", predictions.display())))?;
    let opts = c.bootstrap_options();
    let result = aggregate(&series, &opts).map_err(|e| CliError::Input(e.to_string()))?;

    let out = c.out_dir();
    let rows: Vec<Vec<String>> = series
        .iter()
        .map(|s| {
            vec![
                s.name.clone(),
                s.len().to_string(),
                (s.len() >= opts.min_size).to_string(),
                opt_f6(Metric::Pearson.evaluate(s).ok()),
                opt_f6(Metric::KendallTau.evaluate(s).ok()),
            ]
        })
        .collect();
    report::write(
        &out,
        "per_series.csv",
        &report::csv_string(&["series", "n", "eligible", "pearson", "kendall_tau"], &rows),
    )?;
    let summary = format!(
        "weighted PCC {:.3} [{:.3}, {:.3}], weighted tau {:.3} [{:.3}, {:.3}] over {} series",
        result.weighted_pcc,
        result.pcc_ci_low,
        result.pcc_ci_high,
        result.weighted_tau,
        result.tau_ci_low,
        result.tau_ci_high,
        result.series_used
    );
    let report = Evaluation {
        result,
        series_total: series.len(),
        replicates: opts.replicates,
        level: opts.level,
        seed: opts.seed,
        min_series_size: opts.min_size,
        temperature: c.bootstrap.temperature,
    };
    report::write(&out, "evaluation.json", &report::json_report(&report))?;
    Ok(summary)
}
