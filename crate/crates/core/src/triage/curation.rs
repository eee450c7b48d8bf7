//! Manifest-level curation: hybrid-score partitions, nested subsets, fingerprint leakage
//! filtering and the element whitelist gate.

use super::{ManifestEntry, TriageError};
use crate::chem::{element_whitelist_check, tanimoto, Element, Fingerprint, MolecularGraph};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_TANIMOTO_CUTOFF: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConfidencePartition {
    High,
    Moderate,
    Low,
}

impl ConfidencePartition {
    pub fn name(self) -> &'static str {
        match self {
            ConfidencePartition::High => "high",
            ConfidencePartition::Moderate => "moderate",
            ConfidencePartition::Low => "low",
        }
    }
}

/// `High` iff score > `high`; `Low` iff score < `low`; otherwise `Moderate`, so both
/// boundary values land in `Moderate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridCutoffs {
    pub low: f64,
    pub high: f64,
}

impl Default for HybridCutoffs {
    fn default() -> Self {
        Self { low: 1.0, high: 1.2 }
    }
}

impl HybridCutoffs {
    pub fn classify(&self, score: f64) -> ConfidencePartition {
        if score > self.high {
            ConfidencePartition::High
        } else if score < self.low {
            ConfidencePartition::Low
        } else {
            ConfidencePartition::Moderate
        }
    }
}

/// Top-level hybrid score, else the one inside the confidence record.
pub fn hybrid_score_of(e: &ManifestEntry) -> Option<f64> {
    e.hybrid_score.or_else(|| e.confidence.as_ref().and_then(|c| c.hybrid_score))
}

/// Groups entries by hybrid-score partition, keeping input order within each group.
pub fn partition_by_hybrid(
    entries: &[ManifestEntry],
    cutoffs: &HybridCutoffs,
) -> Result<BTreeMap<ConfidencePartition, Vec<ManifestEntry>>, TriageError> {
    let mut out: BTreeMap<ConfidencePartition, Vec<ManifestEntry>> = BTreeMap::new();
    for e in entries {
        let score = hybrid_score_of(e)
            .ok_or_else(|| TriageError::MissingField { id: e.id.clone(), fields: vec!["hybrid_score"] })?;
        if !score.is_finite() {
            return Err(TriageError::InvalidValue { id: e.id.clone(), reason: format!("hybrid_score {score}") });
        }
        out.entry(cutoffs.classify(score)).or_default().push(e.clone());
    }
    Ok(out)
}

/// Nested random subsets: entries are sorted by id, shuffled once with `seed`, and subset
/// `k` is the first `sizes[k]` entries of that permutation.
pub fn nested_subsets(
    entries: &[ManifestEntry],
    sizes: &[usize],
    seed: u64,
) -> Result<Vec<Vec<ManifestEntry>>, TriageError> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(TriageError::SizesNotAscending);
    }
    if let Some(&max) = sizes.last() {
        if max > entries.len() {
            return Err(TriageError::SizeExceedsPopulation { size: max, population: entries.len() });
        }
    }
    let mut order: Vec<&ManifestEntry> = entries.iter().collect();
    order.sort_by(|a, b| a.id.cmp(&b.id));
    rng::shuffle(&mut rng::seeded(seed), &mut order);
    Ok(sizes.iter().map(|&n| order[..n].iter().map(|e| (*e).clone()).collect()).collect())
}

/// Per-entry record of the leakage screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageAudit {
    pub id: String,
    /// 0 when the test set is empty.
    pub max_similarity: f64,
    pub nearest_test_id: Option<String>,
    pub removed: bool,
}

/// Drops training entries whose ligand is more similar than `cutoff` (strict) to any
/// test ligand. Ties for the nearest test ligand go to the earliest in `test`.
pub fn leakage_filter(
    train: &[ManifestEntry],
    test: &[(String, Fingerprint)],
    cutoff: f64,
) -> Result<(Vec<ManifestEntry>, Vec<LeakageAudit>), TriageError> {
    let mut kept = Vec::new();
    let mut audit = Vec::with_capacity(train.len());
    for e in train {
        let fp = e.fingerprint.as_ref().ok_or_else(|| TriageError::MissingFingerprint(e.id.clone()))?;
        let mut best = 0.0;
        let mut nearest = None;
        for (id, t) in test {
            let s = tanimoto(fp, t)?;
            if nearest.is_none() || s > best {
                best = s;
                nearest = Some(id.clone());
            }
        }
        let removed = best > cutoff;
        if !removed {
            kept.push(e.clone());
        }
        audit.push(LeakageAudit { id: e.id.clone(), max_similarity: best, nearest_test_id: nearest, removed });
    }
    Ok((kept, audit))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRejection {
    pub id: String,
    pub offenders: Vec<Element>,
}

/// Splits entries by the ligand element whitelist.
pub fn element_gate(entries: Vec<(ManifestEntry, MolecularGraph)>) -> (Vec<ManifestEntry>, Vec<ElementRejection>) {
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for (e, g) in entries {
        let check = element_whitelist_check(&g);
        if check.passed {
            kept.push(e);
        } else {
            rejected.push(ElementRejection { id: e.id, offenders: check.offenders });
        }
    }
    (kept, rejected)
}
