//! Manifest rows and their JSON Lines / CSV forms.

use super::{TriageError, TriageLabel};
use crate::chem::Fingerprint;
use crate::confidence::ConfidenceRecord;
use crate::quality::QualityReport;
use crate::structio::ChainClass;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One dataset entry as it flows through the curation stages.
///
/// Scoring fills `chain_class`, `confidence`, `quality` and `physical`; triage fills
/// `triage`. Paths are resolved relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub pred_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_path: Option<String>,
    pub ligand_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plddt_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affinity_pk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_class: Option<ChainClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<ConfidenceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<QualityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<bool>,
    /// Ingested train–test similarity in `[0, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_test_similarity: Option<f64>,
    /// Template-modelling hybrid score; takes precedence over `confidence.hybrid_score`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<Fingerprint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triage: Option<TriageLabel>,
}

impl ManifestEntry {
    fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if let Some(pk) = self.affinity_pk {
            if !pk.is_finite() {
                return Err("affinity_pk is not finite".into());
            }
        }
        if let Some(s) = self.train_test_similarity {
            if !(0.0..=1.0).contains(&s) {
                return Err(format!("train_test_similarity {s} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Parses a JSON Lines manifest. Blank lines are skipped; ids must be unique.
pub fn read_manifest_jsonl(text: &str) -> Result<Vec<ManifestEntry>, TriageError> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(line).map_err(|e| TriageError::Manifest { line: i + 1, reason: e.to_string() })?;
        entry.validate().map_err(|reason| TriageError::Manifest { line: i + 1, reason })?;
        if !ids.insert(entry.id.clone()) {
            return Err(TriageError::DuplicateId(entry.id));
        }
        out.push(entry);
    }
    Ok(out)
}

/// One JSON object per line, in the given order.
pub fn write_manifest_jsonl(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e).expect("manifest entries serialize"));
        out.push('\n');
    }
    out
}

pub fn manifest_csv_header() -> Vec<&'static str> {
    vec![
        "id",
        "pred_path",
        "ref_path",
        "ligand_path",
        "confidence_path",
        "plddt_path",
        "affinity_pk",
        "chain_class",
        "confidence",
        "quality",
        "physical",
        "train_test_similarity",
        "hybrid_score",
        "fingerprint",
        "triage",
    ]
}

/// CSV cells matching [`manifest_csv_header`]; nested records are embedded as JSON and
/// absent values are empty.
pub fn manifest_csv_record(e: &ManifestEntry) -> Vec<String> {
    fn opt<T: ToString>(v: &Option<T>) -> String {
        v.as_ref().map(|x| x.to_string()).unwrap_or_default()
    }
    fn json<T: Serialize>(v: &Option<T>) -> String {
        v.as_ref().map(|x| serde_json::to_string(x).expect("serializable")).unwrap_or_default()
    }
    vec![
        e.id.clone(),
        e.pred_path.clone(),
        opt(&e.ref_path),
        e.ligand_path.clone(),
        opt(&e.confidence_path),
        opt(&e.plddt_path),
        opt(&e.affinity_pk),
        e.chain_class.map(|c| format!("{c:?}")).unwrap_or_default(),
        json(&e.confidence),
        json(&e.quality),
        opt(&e.physical),
        opt(&e.train_test_similarity),
        opt(&e.hybrid_score),
        json(&e.fingerprint),
        json(&e.triage),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_round_trip() {
        let a = ManifestEntry {
            id: "a".into(),
            pred_path: "a.pdb".into(),
            ligand_path: "a.sdf".into(),
            affinity_pk: Some(6.25),
            chain_class: Some(ChainClass::SingleChain),
            fingerprint: Some(Fingerprint::from_bits(16, [1, 5])),
            ..Default::default()
        };
        let b = ManifestEntry {
            id: "b".into(),
            pred_path: "b.pdb".into(),
            ligand_path: "b.sdf".into(),
            ..Default::default()
        };
        let text = write_manifest_jsonl(&[a.clone(), b.clone()]);
        assert_eq!(read_manifest_jsonl(&text).unwrap(), vec![a, b]);
        assert_eq!(manifest_csv_record(&ManifestEntry::default()).len(), manifest_csv_header().len());
    }

    #[test]
    fn rejects_bad_rows() {
        let row = r#"{"id":"a","pred_path":"p","ligand_path":"l"}"#;
        assert_eq!(read_manifest_jsonl(&format!("{row}\n\n{row}\n")), Err(TriageError::DuplicateId("a".into())));
        assert!(matches!(read_manifest_jsonl("{\"id\":1}"), Err(TriageError::Manifest { line: 1, .. })));
        let sim = r#"{"id":"a","pred_path":"p","ligand_path":"l","train_test_similarity":1.5}"#;
        assert!(matches!(read_manifest_jsonl(sim), Err(TriageError::Manifest { .. })));
    }
}
