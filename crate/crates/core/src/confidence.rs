//! Co-folding confidence metrics and region-resolved pLDDT.
//!
//! A confidence file is a JSON object using the field names of [`ConfidenceRecord`];
//! unknown fields are ignored. pLDDT vectors are read from a JSON array of numbers or
//! from whitespace-separated text and are aligned to a structure in one of three ways:
//! one value per atom (polymer atoms then ligand atoms, file order), one per token
//! (polymer residues then ligand heavy atoms), or one per polymer residue.

use crate::geometry::RegionSelection;
use crate::structio::ComplexStructure;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

pub const HIGH_CONFIDENCE_THRESHOLD: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfidenceError {
    #[error("missing required field {0}")]
    MissingRequiredField(&'static str),
    #[error("field {field} is not a number")]
    MalformedNumber { field: String },
    #[error("field {field} = {value} is outside {low}..={high}")]
    RangeViolation { field: String, value: f64, low: f64, high: f64 },
    #[error("confidence input is not a JSON object")]
    NotAnObject,
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("pLDDT vector has {got} values; structure has {atoms} atoms, {residues} residues and {ligand_heavy} ligand heavy atoms")]
    LengthMismatch { got: usize, atoms: usize, residues: usize, ligand_heavy: usize },
    #[error("pLDDT token {index} is not a number")]
    MalformedValue { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlddtUnit {
    /// 0–100.
    Percent,
    /// 0–1.
    Fraction,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfidenceRecord {
    pub confidence_score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ptm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iptm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ligand_iptm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protein_iptm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_plddt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_pde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_ipde: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ligand_plddt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pocket_plddt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_plddt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dope_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plddt_unit: Option<PlddtUnit>,
}

fn number(obj: &Map<String, Value>, field: &str) -> Result<Option<f64>, ConfidenceError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => match n.as_f64() {
            Some(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(ConfidenceError::MalformedNumber { field: field.into() }),
        },
        Some(_) => Err(ConfidenceError::MalformedNumber { field: field.into() }),
    }
}

fn in_range(field: &str, value: Option<f64>, low: f64, high: f64) -> Result<Option<f64>, ConfidenceError> {
    match value {
        Some(v) if !(low..=high).contains(&v) => {
            Err(ConfidenceError::RangeViolation { field: field.into(), value: v, low, high })
        }
        _ => Ok(value),
    }
}

/// Builds a record from a parsed confidence object.
///
/// `confidence_score` and the pTM/ipTM family must lie in `[0, 1]`; pLDDT aggregates in
/// `[0, 100]`. PDE values are non-negative. Scores without a fixed range (hybrid, DOPE)
/// only need to be finite.
pub fn load_confidence(value: &Value) -> Result<ConfidenceRecord, ConfidenceError> {
    let obj = value.as_object().ok_or(ConfidenceError::NotAnObject)?;
    let unit = |f: &str| in_range(f, number(obj, f)?, 0.0, 1.0);
    let plddt = |f: &str| in_range(f, number(obj, f)?, 0.0, 100.0);
    let pde = |f: &str| in_range(f, number(obj, f)?, 0.0, f64::INFINITY);

    let confidence_score =
        unit("confidence_score")?.ok_or(ConfidenceError::MissingRequiredField("confidence_score"))?;
    let complex_plddt = plddt("complex_plddt")?;
    let plddt_unit = complex_plddt.map(|p| if p <= 1.0 { PlddtUnit::Fraction } else { PlddtUnit::Percent });
    Ok(ConfidenceRecord {
        confidence_score,
        ptm: unit("ptm")?,
        iptm: unit("iptm")?,
        ligand_iptm: unit("ligand_iptm")?,
        protein_iptm: unit("protein_iptm")?,
        complex_plddt,
        complex_pde: pde("complex_pde")?,
        complex_ipde: pde("complex_ipde")?,
        ligand_plddt: plddt("ligand_plddt")?,
        pocket_plddt: plddt("pocket_plddt")?,
        shell_plddt: plddt("shell_plddt")?,
        hybrid_score: number(obj, "hybrid_score")?,
        dope_score: number(obj, "dope_score")?,
        plddt_unit,
    })
}

pub fn load_confidence_str(text: &str) -> Result<ConfidenceRecord, ConfidenceError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfidenceError::Json(e.to_string()))?;
    load_confidence(&value)
}

/// `confidence_score > threshold` (strict).
pub fn is_high_confidence(r: &ConfidenceRecord, threshold: f64) -> bool {
    r.confidence_score > threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Atom,
    Token,
    Residue,
}

/// pLDDT values aligned to a structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlddtVector {
    pub values: Vec<f64>,
    pub granularity: Granularity,
}

/// Reads a JSON array of numbers, or whitespace/comma-separated numbers.
pub fn parse_plddt_values(text: &str) -> Result<Vec<f64>, ConfidenceError> {
    let trimmed = text.trim_start();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        let raw: Vec<Value> = serde_json::from_str(trimmed).map_err(|e| ConfidenceError::Json(e.to_string()))?;
        raw.iter()
            .enumerate()
            .map(|(i, v)| v.as_f64().ok_or(ConfidenceError::MalformedValue { index: i }))
            .collect::<Result<_, _>>()?
    } else {
        trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .enumerate()
            .map(|(i, t)| t.parse::<f64>().map_err(|_| ConfidenceError::MalformedValue { index: i }))
            .collect::<Result<_, _>>()?
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(ConfidenceError::MalformedValue { index: i });
    }
    Ok(values)
}

impl PlddtVector {
    /// Chooses the granularity from the vector length: atoms first, then tokens, then
    /// residues.
    pub fn aligned(values: Vec<f64>, s: &ComplexStructure) -> Result<Self, ConfidenceError> {
        let atoms = s.atom_count();
        let residues = s.residue_count();
        let ligand_heavy = s.ligand_atoms.iter().filter(|a| a.is_heavy()).count();
        let granularity = match values.len() {
            n if n == atoms => Granularity::Atom,
            n if n == residues + ligand_heavy => Granularity::Token,
            n if n == residues => Granularity::Residue,
            got => return Err(ConfidenceError::LengthMismatch { got, atoms, residues, ligand_heavy }),
        };
        Ok(PlddtVector { values, granularity })
    }

    /// Per-atom values from the B-factor column.
    pub fn from_b_factors(s: &ComplexStructure) -> Self {
        let values = s.polymer_atoms().chain(s.ligand_atoms.iter()).map(|a| a.temp_factor).collect();
        PlddtVector { values, granularity: Granularity::Atom }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegionPlddt {
    pub ligand: Option<f64>,
    pub pocket: Option<f64>,
    pub shell: Option<f64>,
}

#[derive(Default)]
struct Mean {
    sum: f64,
    n: usize,
}

impl Mean {
    fn add(&mut self, x: f64) {
        self.sum += x;
        self.n += 1;
    }

    fn get(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Mean pLDDT over ligand heavy atoms, pocket-residue heavy atoms and shell-residue heavy
/// atoms. With per-residue or per-token vectors each residue contributes its one value.
pub fn region_plddt(
    v: &PlddtVector,
    sel: &RegionSelection,
    s: &ComplexStructure,
) -> Result<RegionPlddt, ConfidenceError> {
    let atoms = s.atom_count();
    let residues = s.residue_count();
    let ligand_heavy = s.ligand_atoms.iter().filter(|a| a.is_heavy()).count();
    let expected = match v.granularity {
        Granularity::Atom => atoms,
        Granularity::Token => residues + ligand_heavy,
        Granularity::Residue => residues,
    };
    if v.values.len() != expected {
        return Err(ConfidenceError::LengthMismatch { got: v.values.len(), atoms, residues, ligand_heavy });
    }
    let granularity = v.granularity;
    let (mut ligand, mut pocket, mut shell) = (Mean::default(), Mean::default(), Mean::default());
    let mut idx = 0;
    for residue in s.residues() {
        let target = if sel.in_pocket(&residue.key) {
            Some(&mut pocket)
        } else if sel.in_shell(&residue.key) {
            Some(&mut shell)
        } else {
            None
        };
        match granularity {
            Granularity::Atom => {
                if let Some(m) = target {
                    for (k, a) in residue.atoms.iter().enumerate() {
                        if a.is_heavy() {
                            m.add(v.values[idx + k]);
                        }
                    }
                }
                idx += residue.atoms.len();
            }
            Granularity::Token | Granularity::Residue => {
                if let Some(m) = target {
                    m.add(v.values[idx]);
                }
                idx += 1;
            }
        }
    }
    match granularity {
        Granularity::Atom => {
            for (k, a) in s.ligand_atoms.iter().enumerate() {
                if a.is_heavy() {
                    ligand.add(v.values[idx + k]);
                }
            }
        }
        Granularity::Token => {
            for x in &v.values[idx..] {
                ligand.add(*x);
            }
        }
        Granularity::Residue => {}
    }
    Ok(RegionPlddt { ligand: ligand.get(), pocket: pocket.get(), shell: shell.get() })
}
