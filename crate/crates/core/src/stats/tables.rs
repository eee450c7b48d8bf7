//! Success rate by similarity bin and the confidence–quality τ table.

use super::{kendall_tau, StatsError};
use crate::confidence::ConfidenceRecord;
use crate::quality::QualityReport;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SIMILARITY_EDGES: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessInput {
    pub pocket_rmsd: f64,
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRate {
    /// `None` for the unbinned bucket.
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub total: usize,
    pub successes: usize,
    /// Absent for an empty bin.
    pub rate: Option<f64>,
}

impl BinRate {
    fn new(low: Option<f64>, high: Option<f64>) -> Self {
        BinRate { low, high, total: 0, successes: 0, rate: None }
    }

    fn finish(&mut self) {
        self.rate = (self.total > 0).then(|| self.successes as f64 / self.total as f64);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessTable {
    pub bins: Vec<BinRate>,
    /// Entries without a similarity, or with one outside every bin.
    pub unbinned: BinRate,
}

/// Fraction of entries with `pocket_rmsd < threshold` per similarity bin.
///
/// Bins are `[edges[i], edges[i+1])`; the last bin also includes its upper edge.
pub fn success_rate(entries: &[SuccessInput], threshold: f64, edges: &[f64]) -> Result<SuccessTable, StatsError> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) || edges.iter().any(|e| !e.is_finite()) {
        return Err(StatsError::InvalidBins);
    }
    let mut bins: Vec<BinRate> = edges.windows(2).map(|w| BinRate::new(Some(w[0]), Some(w[1]))).collect();
    let mut unbinned = BinRate::new(None, None);
    let last = bins.len() - 1;
    for e in entries {
        let slot = e.similarity.and_then(|s| {
            (0..bins.len()).find(|&i| s >= edges[i] && (s < edges[i + 1] || (i == last && s == edges[i + 1])))
        });
        let bin = match slot {
            Some(i) => &mut bins[i],
            None => &mut unbinned,
        };
        bin.total += 1;
        if e.pocket_rmsd < threshold {
            bin.successes += 1;
        }
    }
    bins.iter_mut().for_each(BinRate::finish);
    unbinned.finish();
    Ok(SuccessTable { bins, unbinned })
}

/// A named column of optional values, one per record.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub row: String,
    pub column: String,
    /// Complete pairs used.
    pub n: usize,
    /// Absent when fewer than two pairs remain or either side is fully tied.
    pub tau: Option<f64>,
}

/// τ-b between every row and column metric, pairwise-deleting missing values.
pub fn kendall_table(rows: &[Column], columns: &[Column]) -> Result<Vec<CorrelationCell>, StatsError> {
    let len = rows.iter().chain(columns).map(|c| c.values.len()).max().unwrap_or(0);
    if len < 2 {
        return Err(StatsError::InsufficientData { got: len });
    }
    let mut out = Vec::new();
    for r in rows {
        for c in columns {
            let (xs, ys): (Vec<f64>, Vec<f64>) = r
                .values
                .iter()
                .zip(&c.values)
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .unzip();
            let tau = if xs.len() >= 2 { kendall_tau(&xs, &ys).ok() } else { None };
            out.push(CorrelationCell { row: r.name.clone(), column: c.name.clone(), n: xs.len(), tau });
        }
    }
    Ok(out)
}

pub fn confidence_columns(records: &[(ConfidenceRecord, QualityReport)]) -> Vec<Column> {
    type Get = fn(&ConfidenceRecord) -> Option<f64>;
    let metrics: [(&str, Get); 11] = [
        ("confidence_score", |c| Some(c.confidence_score)),
        ("ptm", |c| c.ptm),
        ("iptm", |c| c.iptm),
        ("ligand_iptm", |c| c.ligand_iptm),
        ("protein_iptm", |c| c.protein_iptm),
        ("complex_plddt", |c| c.complex_plddt),
        ("complex_pde", |c| c.complex_pde),
        ("complex_ipde", |c| c.complex_ipde),
        ("ligand_plddt", |c| c.ligand_plddt),
        ("pocket_plddt", |c| c.pocket_plddt),
        ("shell_plddt", |c| c.shell_plddt),
    ];
    metrics
        .iter()
        .map(|(name, get)| Column { name: name.to_string(), values: records.iter().map(|(c, _)| get(c)).collect() })
        .collect()
}

pub fn quality_columns(records: &[(ConfidenceRecord, QualityReport)]) -> Vec<Column> {
    type Get = fn(&QualityReport) -> f64;
    let metrics: [(&str, Get); 4] = [
        ("complex_rmsd", |q| q.complex_rmsd),
        ("protein_rmsd", |q| q.protein_rmsd),
        ("ligand_rmsd", |q| q.ligand_rmsd),
        ("pocket_rmsd", |q| q.pocket_rmsd),
    ];
    metrics
        .iter()
        .map(|(name, get)| Column {
            name: name.to_string(),
            values: records.iter().map(|(_, q)| Some(get(q))).collect(),
        })
        .collect()
}

/// Kendall τ between every confidence metric and every quality metric.
pub fn correlation_matrix(records: &[(ConfidenceRecord, QualityReport)]) -> Result<Vec<CorrelationCell>, StatsError> {
    if records.len() < 2 {
        return Err(StatsError::InsufficientData { got: records.len() });
    }
    kendall_table(&confidence_columns(records), &quality_columns(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(rmsd: f64, sim: Option<f64>) -> SuccessInput {
        SuccessInput { pocket_rmsd: rmsd, similarity: sim }
    }

    #[test]
    fn rates() {
        let entries: Vec<_> = [1.0, 1.5, 2.5, 3.0].iter().map(|&r| input(r, Some(0.7))).collect();
        let t = success_rate(&entries, 2.0, &DEFAULT_SIMILARITY_EDGES).unwrap();
        assert_eq!(t.bins[3].rate, Some(0.5));
        assert_eq!(t.bins[0].rate, None);
        assert_eq!(t.unbinned.total, 0);
        let t = success_rate(
            &[input(1.0, Some(1.0)), input(0.5, None), input(2.0, Some(0.0))],
            2.0,
            &DEFAULT_SIMILARITY_EDGES,
        )
        .unwrap();
        assert_eq!(t.bins[4].rate, Some(1.0));
        assert_eq!(t.bins[0].rate, Some(0.0));
        assert_eq!(t.unbinned.rate, Some(1.0));
        assert_eq!(success_rate(&[], 2.0, &[0.5, 0.5]), Err(StatsError::InvalidBins));
    }

    #[test]
    fn self_and_negated_columns() {
        let a = Column { name: "a".into(), values: vec![Some(1.0), Some(3.0), None, Some(2.0)] };
        let neg = Column { name: "neg".into(), values: a.values.iter().map(|v| v.map(|x| -x)).collect() };
        let cells = kendall_table(&[a.clone()], &[a.clone(), neg]).unwrap();
        assert_eq!(cells[0].tau, Some(1.0));
        assert_eq!(cells[1].tau, Some(-1.0));
        assert_eq!(cells[0].n, 3);
    }
}
