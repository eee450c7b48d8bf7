//! `filter`: ligand element gate, then removal of training entries similar to test ligands.

use super::{check_failures, errors_csv, load_manifest, par_map, read_bytes, read_ligand, EntryError};
use crate::config::PipelineConfig;
use crate::report::{self, f6};
use crate::CliError;
use cofold_qc::chem::{morgan_fingerprint, Fingerprint, MolecularGraph};
use cofold_qc::structio::parse_sdf;
use cofold_qc::triage::{element_gate, leakage_filter, write_manifest_jsonl, ManifestEntry};
use std::path::Path;

fn with_fingerprint(e: &ManifestEntry) -> Result<(ManifestEntry, MolecularGraph), EntryError> {
    let g = read_ligand(&e.ligand_path).map_err(|m| EntryError::new(&e.id, "ligand", m))?;
    let mut e = e.clone();
    if e.fingerprint.is_none() {
        e.fingerprint = Some(morgan_fingerprint(&g).map_err(|x| EntryError::new(&e.id, "fingerprint", x))?);
    }
    Ok((e, g))
}

/// Test fingerprints from an SDF file (one per record, named by the title line) or a
/// JSON Lines manifest.
fn test_fingerprints(path: &Path, c: &PipelineConfig) -> Result<Vec<(String, Fingerprint)>, CliError> {
    let is_manifest = path.extension().is_some_and(|x| x == "jsonl" || x == "json");
    let bad = |m: String| CliError::Input(format!("test ligands: {m}"));
    if is_manifest {
        let entries = load_manifest(path)?;
        let done = par_map(c.workers, &entries, with_fingerprint)?;
        done.into_iter()
            .map(|r| {
                let (e, _) = r.map_err(|x| bad(format!("{}: {}", x.id, x.message)))?;
                Ok((e.id.clone(), e.fingerprint.expect("fingerprint filled")))
            })
            .collect()
    } else {
        let bytes = read_bytes(&path.to_string_lossy()).map_err(bad)?;
        let graphs = parse_sdf(&bytes).map_err(|e| bad(e.to_string()))?;
        let fps = par_map(c.workers, &graphs, morgan_fingerprint)?;
        graphs
            .iter()
            .zip(fps)
            .enumerate()
            .map(|(k, (g, fp))| {
                let name = if g.name.is_empty() { format!("test_{k}") } else { g.name.clone() };
                Ok((name, fp.map_err(|e| bad(e.to_string()))?))
            })
            .collect()
    }
}

/// Writes `filtered.jsonl`, `leakage_audit.csv`, `element_rejections.csv` and
/// `filter_errors.csv`.
pub fn filter(manifest: &Path, test_ligands: &Path, c: &PipelineConfig) -> Result<String, CliError> {
    let entries = load_manifest(manifest)?;
    let test = test_fingerprints(test_ligands, c)?;
    let mut ready = Vec::new();
    let mut errors = Vec::new();
    for r in par_map(c.workers, &entries, with_fingerprint)? {
        match r {
            Ok(x) => ready.push(x),
            Err(e) => errors.push(e),
        }
    }
    let (admitted, rejections) = element_gate(ready);
    let (kept, audit) = leakage_filter(&admitted, &test, c.thresholds.tanimoto)
        .map_err(|e| CliError::Input(format!("leakage filter: {e}")))?;

    let out = c.out_dir();
    report::write(&out, "filtered.jsonl", &write_manifest_jsonl(&kept))?;
    let rows: Vec<Vec<String>> = audit
        .iter()
        .map(|a| {
            vec![
                a.id.clone(),
                f6(a.max_similarity),
                a.nearest_test_id.clone().unwrap_or_default(),
                a.removed.to_string(),
            ]
        })
        .collect();
    report::write(
        &out,
        "leakage_audit.csv",
        &report::csv_string(&["id", "max_similarity", "nearest_test_id", "removed"], &rows),
    )?;
    let rows: Vec<Vec<String>> = rejections
        .iter()
        .map(|r| vec![r.id.clone(), r.offenders.iter().map(|e| e.symbol()).collect::<Vec<_>>().join(";")])
        .collect();
    report::write(&out, "element_rejections.csv", &report::csv_string(&["id", "offending_elements"], &rows))?;
    report::write(&out, "filter_errors.csv", &errors_csv(&errors))?;
    check_failures("filter", errors.len(), entries.len(), c.max_failure_fraction)?;
    Ok(format!(
        "kept {} of {} entries ({} element rejections, {} leakage removals) into {}",
        kept.len(),
        entries.len(),
        rejections.len(),
        audit.iter().filter(|a| a.removed).count(),
        out.display()
    ))
}
