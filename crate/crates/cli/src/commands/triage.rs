//! `triage` and `sankey`: labels, flow accounting and the per-label analyses.

use super::{check_failures, errors_csv, load_manifest, EntryError};
use crate::config::PipelineConfig;
use crate::report::{self, f6, opt_bool, opt_f6};
use crate::CliError;
use cofold_qc::stats::{correlation_matrix, success_rate, BinRate, StatsError, SuccessInput};
use cofold_qc::triage::{
    build_sankey, hybrid_score_of, triage_entry_with, write_manifest_jsonl, ManifestEntry, SankeyFlow, TriageLabel,
};
use serde::Serialize;
use std::path::Path;

struct Labelled {
    entries: Vec<ManifestEntry>,
    errors: Vec<EntryError>,
    total: usize,
}

fn label_all(manifest: &Path, c: &PipelineConfig, reuse_stored: bool) -> Result<Labelled, CliError> {
    let entries = load_manifest(manifest)?;
    let total = entries.len();
    let opts = c.triage_options();
    let mut labelled = Vec::new();
    let mut errors = Vec::new();
    for mut e in entries {
        match triage_entry_with(&e, &opts) {
            Ok(label) => {
                e.triage = Some(label);
                labelled.push(e);
            }
            Err(_) if reuse_stored && e.triage.is_some() => labelled.push(e),
            Err(err) => errors.push(EntryError::new(&e.id, "triage", err)),
        }
    }
    Ok(Labelled { entries: labelled, errors, total })
}

#[derive(Serialize)]
struct FlowRecord<'a> {
    stage_from: &'a str,
    stage_to: &'a str,
    count: usize,
    percent_of_parent: f64,
    annotation: String,
}

fn write_sankey(out: &Path, labels: &[TriageLabel]) -> Result<usize, CliError> {
    let flows: Vec<SankeyFlow> = build_sankey(labels).map_err(|e| CliError::Batch(format!("sankey: {e}")))?;
    let records: Vec<FlowRecord> = flows
        .iter()
        .map(|f| FlowRecord {
            stage_from: &f.stage_from,
            stage_to: &f.stage_to,
            count: f.count,
            percent_of_parent: f.percent_of_parent,
            annotation: f.annotation(),
        })
        .collect();
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.stage_from.into(),
                r.stage_to.into(),
                r.count.to_string(),
                f6(r.percent_of_parent),
                r.annotation.clone(),
            ]
        })
        .collect();
    report::write(
        out,
        "sankey.csv",
        &report::csv_string(&["stage_from", "stage_to", "count", "percent_of_parent", "annotation"], &rows),
    )?;
    report::write(out, "sankey.json", &report::json_report(&records))?;
    Ok(flows.len())
}

fn bin_row(label: &str, b: &BinRate) -> Vec<String> {
    vec![label.to_string(), opt_f6(b.low), opt_f6(b.high), b.total.to_string(), b.successes.to_string(), opt_f6(b.rate)]
}

fn write_success_rate(out: &Path, entries: &[ManifestEntry], c: &PipelineConfig) -> Result<(), CliError> {
    let inputs: Vec<SuccessInput> = entries
        .iter()
        .filter_map(|e| {
            let q = e.quality.as_ref().filter(|q| q.matching_coverage >= c.thresholds.min_coverage)?;
            Some(SuccessInput { pocket_rmsd: q.pocket_rmsd, similarity: e.train_test_similarity })
        })
        .collect();
    let table = success_rate(&inputs, c.thresholds.pocket_rmsd, &c.thresholds.similarity_bins)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rows: Vec<Vec<String>> = table.bins.iter().map(|b| bin_row("bin", b)).collect();
    rows.push(bin_row("unbinned", &table.unbinned));
    report::write(
        out,
        "success_rate.csv",
        &report::csv_string(&["kind", "similarity_low", "similarity_high", "total", "successes", "rate"], &rows),
    )
}

fn write_tau_table(out: &Path, entries: &[ManifestEntry]) -> Result<(), CliError> {
    let records: Vec<_> = entries.iter().filter_map(|e| Some((e.confidence.clone()?, e.quality.clone()?))).collect();
    let cells = match correlation_matrix(&records) {
        Ok(cells) => cells,
        Err(StatsError::InsufficientData { got }) => {
            log::warn!("confidence-quality table skipped: {got} entries with both records");
            Vec::new()
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let rows: Vec<Vec<String>> =
        cells.iter().map(|c| vec![c.row.clone(), c.column.clone(), c.n.to_string(), opt_f6(c.tau)]).collect();
    report::write(
        out,
        "confidence_quality_tau.csv",
        &report::csv_string(&["confidence_metric", "quality_metric", "n", "kendall_tau"], &rows),
    )
}

/// Writes labels, the triaged manifest, Sankey flows, success rates by similarity and the
/// confidence–quality τ table.
pub fn triage(manifest: &Path, c: &PipelineConfig) -> Result<String, CliError> {
    let l = label_all(manifest, c, false)?;
    let out = c.out_dir();
    let cut = c.hybrid_cutoffs();
    report::write(&out, "triaged.jsonl", &write_manifest_jsonl(&l.entries))?;
    let rows: Vec<Vec<String>> = l
        .entries
        .iter()
        .map(|e| {
            let t = e.triage.expect("labelled entries carry a label");
            vec![
                e.id.clone(),
                t.single_chain.to_string(),
                t.physical.to_string(),
                t.high_conf.to_string(),
                opt_bool(t.high_quality),
                hybrid_score_of(e).map(|h| cut.classify(h).name().to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    report::write(
        &out,
        "labels.csv",
        &report::csv_string(&["id", "single_chain", "physical", "high_conf", "high_quality", "partition"], &rows),
    )?;
    report::write(&out, "triage_errors.csv", &errors_csv(&l.errors))?;
    check_failures("triage", l.errors.len(), l.total, c.max_failure_fraction)?;
    let labels: Vec<TriageLabel> = l.entries.iter().filter_map(|e| e.triage).collect();
    write_sankey(&out, &labels)?;
    write_success_rate(&out, &l.entries, c)?;
    write_tau_table(&out, &l.entries)?;
    Ok(format!("labelled {} of {} entries into {}", labels.len(), l.total, out.display()))
}

/// Sankey flows only; entries lacking scoring fields fall back to a stored label.
pub fn sankey(manifest: &Path, c: &PipelineConfig) -> Result<String, CliError> {
    let l = label_all(manifest, c, true)?;
    let out = c.out_dir();
    check_failures("sankey", l.errors.len(), l.total, c.max_failure_fraction)?;
    let labels: Vec<TriageLabel> = l.entries.iter().filter_map(|e| e.triage).collect();
    let flows = write_sankey(&out, &labels)?;
    Ok(format!("{flows} flows over {} entries into {}", labels.len(), out.display()))
}
