//! Subcommand implementations and the plumbing they share.

mod evaluate;
mod filter;
mod score;
mod subsets;
mod triage;

pub use evaluate::evaluate;
pub use filter::filter;
pub use score::score;
pub use subsets::subsets;
pub use triage::{sankey, triage};

use crate::report;
use crate::CliError;
use cofold_qc::chem::MolecularGraph;
use cofold_qc::structio::parse_sdf;
use cofold_qc::triage::{read_manifest_jsonl, ManifestEntry};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// A per-entry failure, reported as one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct EntryError {
    pub id: String,
    pub stage: &'static str,
    pub message: String,
}

impl EntryError {
    pub fn new(id: &str, stage: &'static str, message: impl ToString) -> Self {
        Self { id: id.to_string(), stage, message: message.to_string() }
    }
}

pub(crate) fn errors_csv(errors: &[EntryError]) -> String {
    let rows: Vec<Vec<String>> =
        errors.iter().map(|e| vec![e.id.clone(), e.stage.to_string(), e.message.clone()]).collect();
    report::csv_string(&["id", "stage", "error"], &rows)
}

/// Reads a manifest, sorts it by id and makes every file path absolute against the
/// manifest's directory.
pub(crate) fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut entries = read_manifest_jsonl(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if entries.is_empty() {
        return Err(CliError::Batch(format!("manifest {} has no entries", path.display())));
    }
    let base = manifest_dir(path)?;
    for e in &mut entries {
        let fix = |p: &mut String| *p = resolve(&base, p).to_string_lossy().into_owned();
        fix(&mut e.pred_path);
        fix(&mut e.ligand_path);
        for p in [&mut e.ref_path, &mut e.confidence_path, &mut e.plddt_path].into_iter().flatten() {
            fix(p);
        }
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}

pub(crate) fn manifest_dir(path: &Path) -> Result<PathBuf, CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::canonicalize(parent).map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))
}

pub(crate) fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() || p.as_os_str().is_empty() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

pub(crate) fn read_bytes(path: &str) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{path}: {e}"))
}

/// First record of an SDF file.
pub(crate) fn read_ligand(path: &str) -> Result<MolecularGraph, String> {
    let bytes = read_bytes(path)?;
    let mut graphs = parse_sdf(&bytes).map_err(|e| format!("{path}: {e}"))?;
    if graphs.is_empty() {
        return Err(format!("{path}: no SDF records"));
    }
    Ok(graphs.swap_remove(0))
}

/// Maps `f` over `items` on a pool of `workers` threads, keeping input order.
pub(crate) fn par_map<T, R, F>(workers: usize, items: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// Batch failure once more than `max_fraction` of `total` entries failed.
pub(crate) fn check_failures(stage: &str, failed: usize, total: usize, max_fraction: f64) -> Result<(), CliError> {
    if total > 0 && failed as f64 > max_fraction * total as f64 {
        return Err(CliError::Batch(format!(
            "{stage}: {failed} of {total} entries failed (limit {:.0}%)",
            100.0 * max_fraction
        )));
    }
    Ok(())
}
