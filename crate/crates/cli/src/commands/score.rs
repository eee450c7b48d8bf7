//! `score`: structure quality, plausibility, confidence and fingerprints per entry.

use super::{check_failures, errors_csv, load_manifest, par_map, read_bytes, read_ligand, EntryError};
use crate::config::PipelineConfig;
use crate::report::{self, f6, opt_bool, opt_f6};
use crate::CliError;
use cofold_qc::chem::{morgan_fingerprint, MolecularGraph};
use cofold_qc::confidence::{load_confidence_str, parse_plddt_values, region_plddt, PlddtVector};
use cofold_qc::geometry::{select_pocket_and_shell, Vec3};
use cofold_qc::plausibility::{assess_plausibility, PlausibilityReport};
use cofold_qc::quality::assess;
use cofold_qc::structio::{classify_chains, parse_pdb, ChainClass, ComplexStructure};
use cofold_qc::triage::{write_manifest_jsonl, ManifestEntry};
use std::path::Path;

/// Uses the input connection table as the ligand graph when it lines up atom for atom.
fn attach_graph(s: &mut ComplexStructure, input: &MolecularGraph) {
    let aligned = input.atom_count() == s.ligand_atoms.len()
        && input.atoms().iter().zip(&s.ligand_atoms).all(|(g, a)| g.element == a.element);
    if aligned {
        let positions: Vec<Vec3> = s.ligand_atoms.iter().map(|a| a.position).collect();
        s.ligand_graph = Some(input.clone().with_positions(&positions));
    }
}

fn load_structure(id: &str, stage: &'static str, path: &str) -> Result<ComplexStructure, EntryError> {
    let bytes = read_bytes(path).map_err(|m| EntryError::new(id, stage, m))?;
    parse_pdb(&bytes).map_err(|e| EntryError::new(id, stage, format!("{path}: {e}")))
}

struct Scored {
    entry: ManifestEntry,
    plausibility: Option<PlausibilityReport>,
}

fn score_entry(e: &ManifestEntry, c: &PipelineConfig) -> Result<Scored, EntryError> {
    let id = e.id.as_str();
    let err = |stage: &'static str| move |m: String| EntryError::new(id, stage, m);
    let mut pred = load_structure(id, "prediction", &e.pred_path)?;
    let input = read_ligand(&e.ligand_path).map_err(err("ligand"))?;
    attach_graph(&mut pred, &input);
    let chain_class = classify_chains(&pred).map_err(|x| EntryError::new(id, "chain_class", x))?;

    let (physical, plausibility) = if c.checks.internal_plausibility {
        let r = assess_plausibility(&pred, &input, &c.plausibility_options())
            .map_err(|x| EntryError::new(id, "plausibility", x))?;
        (r.physical, Some(r))
    } else {
        let flag = e.physical.ok_or_else(|| EntryError::new(id, "plausibility", "no ingested physical flag"))?;
        (flag, None)
    };

    let quality = match &e.ref_path {
        Some(path) => {
            let mut reference = load_structure(id, "reference", path)?;
            attach_graph(&mut reference, &input);
            Some(assess(&pred, &reference, &c.quality_options()).map_err(|x| EntryError::new(id, "quality", x))?)
        }
        None => None,
    };

    let mut confidence = match &e.confidence_path {
        Some(path) => {
            let text = String::from_utf8(read_bytes(path).map_err(err("confidence"))?)
                .map_err(|_| EntryError::new(id, "confidence", format!("{path}: not UTF-8")))?;
            Some(load_confidence_str(&text).map_err(|x| EntryError::new(id, "confidence", format!("{path}: {x}")))?)
        }
        None => e.confidence.clone(),
    };
    if let Some(record) = &mut confidence {
        let vector = match &e.plddt_path {
            Some(path) => {
                let text = String::from_utf8_lossy(&read_bytes(path).map_err(err("plddt"))?).into_owned();
                let values =
                    parse_plddt_values(&text).map_err(|x| EntryError::new(id, "plddt", format!("{path}: {x}")))?;
                PlddtVector::aligned(values, &pred).map_err(|x| EntryError::new(id, "plddt", format!("{path}: {x}")))?
            }
            None => PlddtVector::from_b_factors(&pred),
        };
        let regions = select_pocket_and_shell(&pred).map_err(|x| EntryError::new(id, "regions", x))?;
        let r = region_plddt(&vector, &regions, &pred).map_err(|x| EntryError::new(id, "plddt", x))?;
        record.ligand_plddt = record.ligand_plddt.or(r.ligand);
        record.pocket_plddt = record.pocket_plddt.or(r.pocket);
        record.shell_plddt = record.shell_plddt.or(r.shell);
    }

    let fingerprint = morgan_fingerprint(&input).map_err(|x| EntryError::new(id, "fingerprint", x))?;
    Ok(Scored {
        entry: ManifestEntry {
            chain_class: Some(chain_class),
            physical: Some(physical),
            quality,
            confidence,
            fingerprint: Some(fingerprint),
            ..e.clone()
        },
        plausibility,
    })
}

const REPORT_HEADER: [&str; 16] = [
    "id",
    "chain_class",
    "physical",
    "bond_length_violations",
    "clash_pairs",
    "connectivity_preserved",
    "complex_rmsd",
    "protein_rmsd",
    "ligand_rmsd",
    "pocket_rmsd",
    "pocket_size",
    "matching_coverage",
    "symmetry_corrected",
    "ligand_plddt",
    "pocket_plddt",
    "shell_plddt",
];

fn report_row(s: &Scored) -> Vec<String> {
    let e = &s.entry;
    let q = e.quality.as_ref();
    let p = s.plausibility.as_ref();
    let conf = e.confidence.as_ref();
    vec![
        e.id.clone(),
        match e.chain_class {
            Some(ChainClass::SingleChain) => "single_chain".into(),
            Some(ChainClass::MultiChain) => "multi_chain".into(),
            None => String::new(),
        },
        opt_bool(e.physical),
        p.map(|r| r.bond_length_violations.len().to_string()).unwrap_or_default(),
        p.map(|r| r.clash_pairs.len().to_string()).unwrap_or_default(),
        opt_bool(p.map(|r| r.connectivity_preserved)),
        opt_f6(q.map(|q| q.complex_rmsd)),
        opt_f6(q.map(|q| q.protein_rmsd)),
        opt_f6(q.map(|q| q.ligand_rmsd)),
        opt_f6(q.map(|q| q.pocket_rmsd)),
        q.map(|q| q.pocket_size.to_string()).unwrap_or_default(),
        q.map(|q| f6(q.matching_coverage)).unwrap_or_default(),
        opt_bool(q.map(|q| q.symmetry_corrected)),
        opt_f6(conf.and_then(|c| c.ligand_plddt)),
        opt_f6(conf.and_then(|c| c.pocket_plddt)),
        opt_f6(conf.and_then(|c| c.shell_plddt)),
    ]
}

/// Writes `scored.jsonl`, `score_report.csv` and `score_errors.csv`.
pub fn score(manifest: &Path, c: &PipelineConfig) -> Result<String, CliError> {
    let entries = load_manifest(manifest)?;
    let results = par_map(c.workers, &entries, |e| score_entry(e, c))?;
    let mut scored = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(s) => scored.push(s),
            Err(e) => errors.push(e),
        }
    }
    let out = c.out_dir();
    let kept: Vec<ManifestEntry> = scored.iter().map(|s| s.entry.clone()).collect();
    report::write(&out, "scored.jsonl", &write_manifest_jsonl(&kept))?;
    let rows: Vec<Vec<String>> = scored.iter().map(report_row).collect();
    report::write(&out, "score_report.csv", &report::csv_string(&REPORT_HEADER, &rows))?;
    report::write(&out, "score_errors.csv", &errors_csv(&errors))?;
    for e in &errors {
        log::warn!("{}: {} failed: {}", e.id, e.stage, e.message);
    }
    check_failures("score", errors.len(), entries.len(), c.max_failure_fraction)?;
    Ok(format!("scored {} of {} entries into {}", scored.len(), entries.len(), out.display()))
}
