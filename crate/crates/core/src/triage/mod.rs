//! Dataset curation: per-entry triage gates, Sankey flow accounting, hybrid-score
//! partitions, nested subset sampling, fingerprint leakage filtering and the ligand
//! element gate.

mod curation;
mod manifest;
mod sankey;

pub use curation::{
    element_gate, hybrid_score_of, leakage_filter, nested_subsets, partition_by_hybrid, ConfidencePartition,
    ElementRejection, HybridCutoffs, LeakageAudit, DEFAULT_TANIMOTO_CUTOFF,
};
pub use manifest::{
    manifest_csv_header, manifest_csv_record, read_manifest_jsonl, write_manifest_jsonl, ManifestEntry,
};
pub use sankey::{build_sankey, SankeyFlow};

use crate::chem::ChemError;
use crate::confidence::{is_high_confidence, HIGH_CONFIDENCE_THRESHOLD};
use crate::quality::{verdict_with, DEFAULT_MIN_COVERAGE, HIGH_QUALITY_POCKET_RMSD};
use crate::structio::ChainClass;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriageError {
    #[error("entry {id}: missing {}", fields.join(", "))]
    MissingField { id: String, fields: Vec<&'static str> },
    #[error("no entries")]
    EmptyInput,
    #[error("subset size {size} exceeds population {population}")]
    SizeExceedsPopulation { size: usize, population: usize },
    #[error("subset sizes must be ascending")]
    SizesNotAscending,
    #[error("entry {0} has no fingerprint")]
    MissingFingerprint(String),
    #[error("duplicate entry id {0}")]
    DuplicateId(String),
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("entry {id}: {reason}")]
    InvalidValue { id: String, reason: String },
    #[error(transparent)]
    Chem(#[from] ChemError),
}

/// Outcome of the four curation gates for one entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriageLabel {
    pub single_chain: bool,
    pub physical: bool,
    pub high_conf: bool,
    /// Absent without a usable reference comparison.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high_quality: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriageOptions {
    pub confidence_threshold: f64,
    pub pocket_rmsd_threshold: f64,
    /// Quality reports matching fewer reference atoms than this are left unassessed.
    pub min_coverage: f64,
}

impl Default for TriageOptions {
    fn default() -> Self {
        Self {
            confidence_threshold: HIGH_CONFIDENCE_THRESHOLD,
            pocket_rmsd_threshold: HIGH_QUALITY_POCKET_RMSD,
            min_coverage: DEFAULT_MIN_COVERAGE,
        }
    }
}

pub fn triage_entry(e: &ManifestEntry) -> Result<TriageLabel, TriageError> {
    triage_entry_with(e, &TriageOptions::default())
}

/// Labels an entry. Chain class, physical flag and confidence record are required.
pub fn triage_entry_with(e: &ManifestEntry, opts: &TriageOptions) -> Result<TriageLabel, TriageError> {
    let mut missing = Vec::new();
    if e.chain_class.is_none() {
        missing.push("chain_class");
    }
    if e.physical.is_none() {
        missing.push("physical");
    }
    if e.confidence.is_none() {
        missing.push("confidence");
    }
    let (Some(chain), Some(physical), Some(conf)) = (e.chain_class, e.physical, e.confidence.as_ref()) else {
        return Err(TriageError::MissingField { id: e.id.clone(), fields: missing });
    };
    let high_quality = e
        .quality
        .as_ref()
        .filter(|q| q.matching_coverage >= opts.min_coverage)
        .map(|q| verdict_with(q, opts.pocket_rmsd_threshold).high_quality);
    Ok(TriageLabel {
        single_chain: chain == ChainClass::SingleChain,
        physical,
        high_conf: is_high_confidence(conf, opts.confidence_threshold),
        high_quality,
    })
}
