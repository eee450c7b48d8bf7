//! `subsets`: nested random subsets for data-scaling experiments.

use super::load_manifest;
use crate::config::PipelineConfig;
use crate::report;
use crate::CliError;
use cofold_qc::triage::{nested_subsets, partition_by_hybrid, write_manifest_jsonl, ManifestEntry, TriageError};
use std::path::Path;

/// Writes `subsets/<partition>_<size>.jsonl` for every size that fits the partition, plus
/// `subsets.csv` listing each requested (partition, size).
pub fn subsets(manifest: &Path, sizes: &[usize], whole: bool, c: &PipelineConfig) -> Result<String, CliError> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::Usage("--sizes must be ascending".into()));
    }
    let entries = load_manifest(manifest)?;
    let groups: Vec<(&str, Vec<ManifestEntry>)> = if whole {
        vec![("all", entries)]
    } else {
        partition_by_hybrid(&entries, &c.hybrid_cutoffs())
            .map_err(|e| CliError::Input(format!("{e}; use --no-partition to skip partitioning")))?
            .into_iter()
            .map(|(p, members)| (p.name(), members))
            .collect()
    };

    let out = c.out_dir();
    let dir = out.join("subsets");
    let mut rows = Vec::new();
    let mut written = 0;
    for (name, members) in &groups {
        let fitting: Vec<usize> = sizes.iter().copied().filter(|&s| s <= members.len()).collect();
        let drawn =
            nested_subsets(members, &fitting, c.seed).map_err(|e: TriageError| CliError::Input(e.to_string()))?;
        for (k, &size) in sizes.iter().enumerate() {
            let file = if k < drawn.len() {
                let file = format!("{name}_{size}.jsonl");
                report::write(&dir, &file, &write_manifest_jsonl(&drawn[k]))?;
                written += 1;
                format!("subsets/{file}")
            } else {
                log::warn!("partition {name}: size {size} exceeds its {} entries", members.len());
                String::new()
            };
            let status = if file.is_empty() { "exceeds_population" } else { "ok" };
            rows.push(vec![name.to_string(), size.to_string(), members.len().to_string(), status.into(), file]);
        }
    }
    report::write(
        &out,
        "subsets.csv",
        &report::csv_string(&["partition", "size", "population", "status", "file"], &rows),
    )?;
    Ok(format!("wrote {written} subset manifests over {} partitions into {}", groups.len(), out.display()))
}
