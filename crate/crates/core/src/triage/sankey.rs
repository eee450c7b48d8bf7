//! Flow counts through the staged triage taxonomy.

use super::{TriageError, TriageLabel};
use serde::{Deserialize, Serialize};

/// One edge of the triage tree.
///
/// Nodes are named by their path from the root, e.g. `Single-chain/Physical/High-conf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SankeyFlow {
    pub stage_from: String,
    pub stage_to: String,
    pub count: usize,
    /// `100 · count / parent count`.
    pub percent_of_parent: f64,
}

impl SankeyFlow {
    /// `"752 (75.2%)"`.
    pub fn annotation(&self) -> String {
        format!("{} ({:.1}%)", self.count, self.percent_of_parent)
    }
}

type Split = fn(&TriageLabel) -> &'static str;

const STAGES: [(Split, &[&str]); 4] = [
    (|l| if l.single_chain { "Single-chain" } else { "Multi-chain" }, &["Single-chain", "Multi-chain"]),
    (|l| if l.physical { "Physical" } else { "Nonphysical" }, &["Physical", "Nonphysical"]),
    (|l| if l.high_conf { "High-conf" } else { "Low-conf" }, &["High-conf", "Low-conf"]),
    (
        |l| match l.high_quality {
            Some(true) => "High-quality",
            Some(false) => "Low-quality",
            None => "Unassessed",
        },
        &["High-quality", "Low-quality", "Unassessed"],
    ),
];

/// Flows for `All → chain → physical → confidence → quality`, depth first.
///
/// Every non-empty node is split by the next stage. Zero-count children are listed, except
/// the `Unassessed` quality bucket, which appears only when populated.
pub fn build_sankey(labels: &[TriageLabel]) -> Result<Vec<SankeyFlow>, TriageError> {
    if labels.is_empty() {
        return Err(TriageError::EmptyInput);
    }
    let all: Vec<&TriageLabel> = labels.iter().collect();
    let mut out = Vec::new();
    expand("All", None, &all, 0, &mut out);
    Ok(out)
}

fn expand(name: &str, path: Option<&str>, members: &[&TriageLabel], stage: usize, out: &mut Vec<SankeyFlow>) {
    let Some((split, children)) = STAGES.get(stage) else {
        return;
    };
    if members.is_empty() {
        return;
    }
    for child in children.iter() {
        let subset: Vec<&TriageLabel> = members.iter().copied().filter(|l| split(l) == *child).collect();
        if subset.is_empty() && *child == "Unassessed" {
            continue;
        }
        let child_path = match path {
            Some(p) => format!("{p}/{child}"),
            None => child.to_string(),
        };
        out.push(SankeyFlow {
            stage_from: name.to_string(),
            stage_to: child_path.clone(),
            count: subset.len(),
            percent_of_parent: 100.0 * subset.len() as f64 / members.len() as f64,
        });
        expand(&child_path, Some(&child_path), &subset, stage + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(single_chain: bool, physical: bool, high_conf: bool, high_quality: Option<bool>) -> TriageLabel {
        TriageLabel { single_chain, physical, high_conf, high_quality }
    }

    #[test]
    fn all_true() {
        let flows = build_sankey(&[label(true, true, true, Some(true)); 4]).unwrap();
        let nonzero: Vec<_> = flows.iter().filter(|f| f.count > 0).collect();
        assert_eq!(nonzero.len(), 4);
        assert!(nonzero.iter().all(|f| f.count == 4 && f.percent_of_parent == 100.0));
        assert_eq!(nonzero[3].stage_to, "Single-chain/Physical/High-conf/High-quality");
        assert_eq!(nonzero[3].stage_from, "Single-chain/Physical/High-conf");
    }

    #[test]
    fn high_conf_share_annotation() {
        let mut labels = vec![label(true, true, true, None); 752];
        labels.extend(vec![label(true, true, false, None); 248]);
        let flows = build_sankey(&labels).unwrap();
        let hc = flows.iter().find(|f| f.stage_to == "Single-chain/Physical/High-conf").unwrap();
        assert!((hc.percent_of_parent - 75.2).abs() < 1e-9);
        assert_eq!(hc.annotation(), "752 (75.2%)");
        let unassessed = flows.iter().filter(|f| f.stage_to.ends_with("Unassessed")).count();
        assert_eq!(unassessed, 2);
    }

    #[test]
    fn empty() {
        assert_eq!(build_sankey(&[]), Err(TriageError::EmptyInput));
    }
}
