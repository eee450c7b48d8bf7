//! Structural quality of a predicted complex against its experimental reference.
//!
//! Four RMSDs are reported, all over heavy atoms only:
//!
//! * protein: fit and measure on matched polymer atoms;
//! * ligand: fit on matched polymer atoms, measure on the ligand;
//! * complex: fit and measure on polymer and ligand together;
//! * pocket: fit on matched atoms of the reference pocket residues, measure on those atoms
//!   plus the ligand.
//!
//! Ligand terms are minimised over the automorphisms of the reference ligand graph.

use crate::chem::{find_isomorphism, graph_automorphisms_with, MatchMode, MolecularGraph, SearchLimits};
use crate::geometry::{kabsch, select_regions, GeometryError, RigidTransform, Vec3, POCKET_CUTOFF, SHELL_CUTOFF};
use crate::structio::{AtomRecord, ComplexStructure};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const HIGH_QUALITY_POCKET_RMSD: f64 = 2.0;
pub const DEFAULT_BOND_TOLERANCE: f64 = 0.25;
pub const DEFAULT_MIN_COVERAGE: f64 = 0.8;
const BACKBONE: [&str; 4] = ["N", "CA", "C", "O"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QualityError {
    #[error("no polymer atoms match between prediction and reference")]
    EmptyIntersection,
    #[error("ligands differ: prediction has {pred} heavy atoms, reference has {reference}")]
    LigandMismatch { pred: usize, reference: usize },
    #[error("pocket has {got} matched fit atoms, need at least 3")]
    PocketTooSmall { got: usize },
    #[error("no matched ligand heavy atoms")]
    NoLigand,
    #[error("{scope} fit needs at least 3 matched atoms, got {got}")]
    TooFewAtoms { scope: &'static str, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Identity of a polymer atom across two models of the same system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomKey {
    pub chain: char,
    pub residue_seq: i32,
    pub insertion_code: Option<char>,
    pub residue_name: String,
    pub atom_name: String,
}

impl AtomKey {
    pub fn of(a: &AtomRecord) -> Self {
        AtomKey {
            chain: a.chain_id,
            residue_seq: a.residue_seq,
            insertion_code: a.insertion_code,
            residue_name: a.residue_name.clone(),
            atom_name: a.name.clone(),
        }
    }
}

/// One matched polymer atom. Indices count heavy polymer atoms in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolymerPair {
    pub key: AtomKey,
    pub pred: usize,
    pub reference: usize,
}

/// Heavy-atom correspondence between a prediction and its reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomMatching {
    pub polymer_pairs: Vec<PolymerPair>,
    /// `(pred, reference)` indices into the respective `ligand_atoms`.
    pub ligand_pairs: Vec<(usize, usize)>,
    pub unmatched_ref: usize,
    pub unmatched_pred: usize,
    /// Whether ligand pairs came from a graph isomorphism rather than file order.
    pub ligand_by_graph: bool,
}

impl AtomMatching {
    /// Matched reference heavy atoms over all reference heavy atoms.
    pub fn coverage(&self) -> f64 {
        let matched = self.polymer_pairs.len() + self.ligand_pairs.len();
        let total = matched + self.unmatched_ref;
        if total == 0 {
            0.0
        } else {
            matched as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub complex_rmsd: f64,
    pub protein_rmsd: f64,
    pub ligand_rmsd: f64,
    pub pocket_rmsd: f64,
    pub pocket_size: usize,
    pub matching_coverage: f64,
    pub symmetry_corrected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityVerdict {
    pub high_quality: bool,
    pub threshold: f64,
}

/// Atoms used to superpose the pocket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PocketFit {
    #[default]
    AllHeavy,
    Backbone,
}

#[derive(Debug, Clone, Copy)]
pub struct QualityOptions {
    pub pocket_fit: PocketFit,
    pub symmetry: bool,
    pub limits: SearchLimits,
    /// Relative band used when ligand bonds must be perceived from coordinates.
    pub bond_tolerance: f64,
    pub pocket_cutoff: f64,
}

impl Default for QualityOptions {
    fn default() -> Self {
        Self {
            pocket_fit: PocketFit::AllHeavy,
            symmetry: true,
            limits: SearchLimits::default(),
            bond_tolerance: DEFAULT_BOND_TOLERANCE,
            pocket_cutoff: POCKET_CUTOFF,
        }
    }
}

fn heavy_polymer(s: &ComplexStructure) -> Vec<&AtomRecord> {
    s.polymer_atoms().filter(|a| a.is_heavy()).collect()
}

fn heavy_ligand(s: &ComplexStructure) -> Vec<usize> {
    (0..s.ligand_atoms.len()).filter(|&i| s.ligand_atoms[i].is_heavy()).collect()
}

/// The structure's own ligand graph when it lines up with `ligand_atoms`.
fn usable_graph(s: &ComplexStructure) -> Option<&MolecularGraph> {
    let g = s.ligand_graph.as_ref()?;
    let aligned = g.atom_count() == s.ligand_atoms.len()
        && g.atoms().iter().zip(&s.ligand_atoms).all(|(ga, la)| ga.element == la.element);
    aligned.then_some(g)
}

fn graph_or_inferred(s: &ComplexStructure, tolerance: f64) -> MolecularGraph {
    usable_graph(s).cloned().unwrap_or_else(|| {
        let atoms: Vec<_> = s.ligand_atoms.iter().map(|a| (a.element, a.position)).collect();
        MolecularGraph::from_coordinates(&atoms, tolerance)
    })
}

/// Matches atoms using each structure's own ligand graph, falling back to file order.
pub fn match_atoms(pred: &ComplexStructure, reference: &ComplexStructure) -> Result<AtomMatching, QualityError> {
    match_with_graphs(pred, reference, usable_graph(pred), usable_graph(reference))
}

fn match_with_graphs(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    pred_graph: Option<&MolecularGraph>,
    ref_graph: Option<&MolecularGraph>,
) -> Result<AtomMatching, QualityError> {
    let pred_poly = heavy_polymer(pred);
    let ref_poly = heavy_polymer(reference);
    let ref_index: BTreeMap<AtomKey, usize> = ref_poly.iter().enumerate().map(|(i, a)| (AtomKey::of(a), i)).collect();
    let mut polymer_pairs = Vec::new();
    let mut used = vec![false; ref_poly.len()];
    for (i, a) in pred_poly.iter().enumerate() {
        let key = AtomKey::of(a);
        if let Some(&j) = ref_index.get(&key) {
            if !used[j] {
                used[j] = true;
                polymer_pairs.push(PolymerPair { key, pred: i, reference: j });
            }
        }
    }
    if polymer_pairs.is_empty() {
        return Err(QualityError::EmptyIntersection);
    }

    let pred_lig = heavy_ligand(pred);
    let ref_lig = heavy_ligand(reference);
    let mut ligand_by_graph = false;
    let graph_pairs = match (pred_graph, ref_graph) {
        (Some(pg), Some(rg)) if pred_lig.len() == ref_lig.len() => {
            let (ph, pkept) = pg.heavy_subgraph();
            let (rh, rkept) = rg.heavy_subgraph();
            find_isomorphism(&ph, &rh, MatchMode::Topology, None)
                .map(|m| m.iter().enumerate().map(|(i, &j)| (pkept[i], rkept[j])).collect::<Vec<_>>())
        }
        _ => None,
    };
    let ligand_pairs = match graph_pairs {
        Some(pairs) => {
            ligand_by_graph = true;
            pairs
        }
        None if pred_lig.len() == ref_lig.len() => pred_lig.iter().copied().zip(ref_lig.iter().copied()).collect(),
        None => return Err(QualityError::LigandMismatch { pred: pred_lig.len(), reference: ref_lig.len() }),
    };

    let matched = polymer_pairs.len() + ligand_pairs.len();
    Ok(AtomMatching {
        unmatched_ref: ref_poly.len() + ref_lig.len() - matched,
        unmatched_pred: pred_poly.len() + pred_lig.len() - matched,
        polymer_pairs,
        ligand_pairs,
        ligand_by_graph,
    })
}

/// Reference-ligand automorphisms re-indexed onto `ligand_atoms`.
struct LigandSymmetry {
    mappings: Vec<Vec<usize>>,
    corrected: bool,
}

impl LigandSymmetry {
    fn identity(n: usize) -> Self {
        LigandSymmetry { mappings: vec![(0..n).collect()], corrected: false }
    }

    fn of(reference: &ComplexStructure, graph: Option<&MolecularGraph>, opts: &QualityOptions) -> Self {
        let n = reference.ligand_atoms.len();
        let Some(g) = graph.filter(|_| opts.symmetry && n > 0) else {
            return Self::identity(n);
        };
        let (heavy, kept) = g.heavy_subgraph();
        let set = graph_automorphisms_with(&heavy, MatchMode::Topology, opts.limits);
        if set.truncated {
            return Self::identity(n);
        }
        let mappings = set
            .mappings
            .iter()
            .map(|m| {
                let mut full: Vec<usize> = (0..n).collect();
                for (h, &img) in m.iter().enumerate() {
                    full[kept[h]] = kept[img];
                }
                full
            })
            .collect();
        LigandSymmetry { mappings, corrected: true }
    }

    /// Smallest ligand squared deviation after moving the prediction by `t`, with the
    /// index of the winning mapping. Ties keep the earliest mapping.
    fn best(
        &self,
        pred: &ComplexStructure,
        reference: &ComplexStructure,
        pairs: &[(usize, usize)],
        t: &RigidTransform,
    ) -> (f64, usize) {
        let moved: Vec<Vec3> = pairs.iter().map(|&(p, _)| t.apply(pred.ligand_atoms[p].position)).collect();
        let mut best = (f64::INFINITY, 0);
        for (k, m) in self.mappings.iter().enumerate() {
            let ssd: f64 = pairs
                .iter()
                .zip(&moved)
                .map(|(&(_, r), q)| q.distance_squared(reference.ligand_atoms[m[r]].position))
                .sum();
            if ssd < best.0 {
                best = (ssd, k);
            }
        }
        best
    }

    fn pairs_under(&self, k: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
        pairs.iter().map(|&(p, r)| (p, self.mappings[k][r])).collect()
    }
}

struct Context<'a> {
    pred: &'a ComplexStructure,
    reference: &'a ComplexStructure,
    pred_poly: Vec<&'a AtomRecord>,
    ref_poly: Vec<&'a AtomRecord>,
    matching: &'a AtomMatching,
    symmetry: LigandSymmetry,
}

impl<'a> Context<'a> {
    fn new(
        pred: &'a ComplexStructure,
        reference: &'a ComplexStructure,
        matching: &'a AtomMatching,
        symmetry: LigandSymmetry,
    ) -> Self {
        Context {
            pred,
            reference,
            pred_poly: heavy_polymer(pred),
            ref_poly: heavy_polymer(reference),
            matching,
            symmetry,
        }
    }

    fn polymer_points(&self, pairs: &[&PolymerPair]) -> (Vec<Vec3>, Vec<Vec3>) {
        pairs.iter().map(|p| (self.pred_poly[p.pred].position, self.ref_poly[p.reference].position)).unzip()
    }

    fn ligand_points(&self, pairs: &[(usize, usize)]) -> (Vec<Vec3>, Vec<Vec3>) {
        pairs
            .iter()
            .map(|&(p, r)| (self.pred.ligand_atoms[p].position, self.reference.ligand_atoms[r].position))
            .unzip()
    }

    fn require_ligand(&self) -> Result<(), QualityError> {
        if self.matching.ligand_pairs.is_empty() {
            Err(QualityError::NoLigand)
        } else {
            Ok(())
        }
    }

    fn protein_fit(&self) -> Result<(RigidTransform, f64), QualityError> {
        let all: Vec<&PolymerPair> = self.matching.polymer_pairs.iter().collect();
        if all.len() < 3 {
            return Err(QualityError::TooFewAtoms { scope: "protein", got: all.len() });
        }
        let (p, q) = self.polymer_points(&all);
        let fit = kabsch(&p, &q)?;
        Ok((fit.transform, fit.rmsd))
    }

    fn protein_rmsd(&self) -> Result<f64, QualityError> {
        Ok(self.protein_fit()?.1)
    }

    /// Ligand RMSD in the protein frame, and the mapping that achieves it.
    fn ligand_rmsd(&self) -> Result<(f64, usize), QualityError> {
        self.require_ligand()?;
        let (t, _) = self.protein_fit()?;
        let pairs = &self.matching.ligand_pairs;
        let (ssd, k) = self.symmetry.best(self.pred, self.reference, pairs, &t);
        Ok(((ssd / pairs.len() as f64).sqrt(), k))
    }

    fn complex_rmsd(&self, mapping: usize) -> Result<f64, QualityError> {
        let all: Vec<&PolymerPair> = self.matching.polymer_pairs.iter().collect();
        let (mut p, mut q) = self.polymer_points(&all);
        let (lp, lq) = self.ligand_points(&self.symmetry.pairs_under(mapping, &self.matching.ligand_pairs));
        p.extend(lp);
        q.extend(lq);
        if p.len() < 3 {
            return Err(QualityError::TooFewAtoms { scope: "complex", got: p.len() });
        }
        Ok(kabsch(&p, &q)?.rmsd)
    }

    fn pocket_rmsd(&self, opts: &QualityOptions) -> Result<(f64, usize), QualityError> {
        self.require_ligand()?;
        let shell = SHELL_CUTOFF.max(opts.pocket_cutoff * 1.5);
        let regions = select_regions(self.reference, opts.pocket_cutoff, shell).map_err(|e| match e {
            GeometryError::NoLigand => QualityError::NoLigand,
            GeometryError::NoPolymer => QualityError::EmptyIntersection,
            other => QualityError::Geometry(other),
        })?;
        let in_pocket: Vec<&PolymerPair> = self
            .matching
            .polymer_pairs
            .iter()
            .filter(|p| regions.in_pocket(&self.ref_poly[p.reference].residue_key()))
            .collect();
        let fit_pairs: Vec<&PolymerPair> = match opts.pocket_fit {
            PocketFit::AllHeavy => in_pocket.clone(),
            PocketFit::Backbone => {
                in_pocket.iter().copied().filter(|p| BACKBONE.contains(&p.key.atom_name.as_str())).collect()
            }
        };
        if fit_pairs.len() < 3 {
            return Err(QualityError::PocketTooSmall { got: fit_pairs.len() });
        }
        let (fp, fq) = self.polymer_points(&fit_pairs);
        let t = kabsch(&fp, &fq)?.transform;

        let (pp, pq) = self.polymer_points(&in_pocket);
        let pocket_ssd: f64 = pp.iter().zip(&pq).map(|(a, b)| t.apply(*a).distance_squared(*b)).sum();
        let pairs = &self.matching.ligand_pairs;
        let (lig_ssd, _) = self.symmetry.best(self.pred, self.reference, pairs, &t);
        let n = in_pocket.len() + pairs.len();
        Ok((((pocket_ssd + lig_ssd) / n as f64).sqrt(), regions.pocket_residues.len()))
    }
}

fn symmetry_for(reference: &ComplexStructure, opts: &QualityOptions) -> LigandSymmetry {
    let graph = graph_or_inferred(reference, opts.bond_tolerance);
    LigandSymmetry::of(reference, Some(&graph), opts)
}

/// Pocket RMSD and the number of reference pocket residues.
pub fn pocket_rmsd(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    matching: &AtomMatching,
    opts: &QualityOptions,
) -> Result<(f64, usize), QualityError> {
    Context::new(pred, reference, matching, symmetry_for(reference, opts)).pocket_rmsd(opts)
}

pub fn ligand_rmsd(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    matching: &AtomMatching,
    opts: &QualityOptions,
) -> Result<f64, QualityError> {
    Ok(Context::new(pred, reference, matching, symmetry_for(reference, opts)).ligand_rmsd()?.0)
}

pub fn protein_rmsd(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    matching: &AtomMatching,
) -> Result<f64, QualityError> {
    Context::new(pred, reference, matching, LigandSymmetry::identity(reference.ligand_atoms.len())).protein_rmsd()
}

/// Complex RMSD, pairing the ligand by the mapping that is best in the protein frame.
pub fn complex_rmsd(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    matching: &AtomMatching,
    opts: &QualityOptions,
) -> Result<f64, QualityError> {
    let ctx = Context::new(pred, reference, matching, symmetry_for(reference, opts));
    let mapping = if matching.ligand_pairs.is_empty() { 0 } else { ctx.ligand_rmsd()?.1 };
    ctx.complex_rmsd(mapping)
}

/// Match atoms and compute all four metrics.
///
/// Ligand graphs missing from either structure are perceived from coordinates with
/// `opts.bond_tolerance`.
pub fn assess(
    pred: &ComplexStructure,
    reference: &ComplexStructure,
    opts: &QualityOptions,
) -> Result<QualityReport, QualityError> {
    let pred_graph = graph_or_inferred(pred, opts.bond_tolerance);
    let ref_graph = graph_or_inferred(reference, opts.bond_tolerance);
    let matching = match_with_graphs(pred, reference, Some(&pred_graph), Some(&ref_graph))?;
    let symmetry = LigandSymmetry::of(reference, Some(&ref_graph), opts);
    let ctx = Context::new(pred, reference, &matching, symmetry);

    let protein = ctx.protein_rmsd()?;
    let (ligand, mapping) = ctx.ligand_rmsd()?;
    let complex = ctx.complex_rmsd(mapping)?;
    let (pocket, pocket_size) = ctx.pocket_rmsd(opts)?;
    Ok(QualityReport {
        complex_rmsd: complex,
        protein_rmsd: protein,
        ligand_rmsd: ligand,
        pocket_rmsd: pocket,
        pocket_size,
        matching_coverage: matching.coverage(),
        symmetry_corrected: ctx.symmetry.corrected,
    })
}

pub fn verdict(report: &QualityReport) -> QualityVerdict {
    verdict_with(report, HIGH_QUALITY_POCKET_RMSD)
}

/// High quality iff `pocket_rmsd < threshold` (strict).
pub fn verdict_with(report: &QualityReport, threshold: f64) -> QualityVerdict {
    QualityVerdict { high_quality: report.pocket_rmsd < threshold, threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Element;
    use crate::geometry::Mat3;
    use crate::structio::{Chain, Residue, ResidueKey};

    fn rec(name: &str, element: Element, res: &str, chain: char, seq: i32, pos: Vec3, het: bool) -> AtomRecord {
        AtomRecord {
            serial: 0,
            name: name.into(),
            element,
            alt_loc: None,
            residue_name: res.into(),
            chain_id: chain,
            residue_seq: seq,
            insertion_code: None,
            position: pos,
            occupancy: 1.0,
            temp_factor: 50.0,
            is_hetero: het,
        }
    }

    /// Ten four-atom residues on a helix-like path around a benzene ligand at the origin.
    fn fixture() -> ComplexStructure {
        let mut residues = Vec::new();
        for i in 0..10 {
            let angle = i as f64 * 0.7;
            let r = 4.0 + i as f64 * 0.6;
            let base = Vec3::new(r * angle.cos(), r * angle.sin(), i as f64 * 0.8 - 4.0);
            let atoms = ["N", "CA", "C", "O"]
                .iter()
                .enumerate()
                .map(|(k, n)| {
                    let el = if *n == "N" {
                        Element::N
                    } else if *n == "O" {
                        Element::O
                    } else {
                        Element::C
                    };
                    rec(
                        n,
                        el,
                        "GLY",
                        'A',
                        i + 1,
                        base + Vec3::new(0.5 * k as f64, 0.3 * (k % 2) as f64, 0.2 * k as f64),
                        false,
                    )
                })
                .collect();
            residues.push(Residue {
                key: ResidueKey { chain: 'A', seq: i + 1, insertion_code: None },
                name: "GLY".into(),
                atoms,
            });
        }
        let ligand_atoms = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                rec(
                    &format!("C{}", k + 1),
                    Element::C,
                    "BNZ",
                    'L',
                    1,
                    Vec3::new(1.39 * a.cos(), 1.39 * a.sin(), 0.0),
                    true,
                )
            })
            .collect();
        ComplexStructure {
            polymer_chains: vec![Chain { id: 'A', residues }],
            ligand_atoms,
            ligand_graph: None,
            source_id: "fx".into(),
        }
    }

    fn moved(s: &ComplexStructure, t: &RigidTransform) -> ComplexStructure {
        let mut out = s.clone();
        out.transform_positions(|p| t.apply(p));
        out
    }

    fn motion() -> RigidTransform {
        RigidTransform {
            rotation: Mat3::rotation(Vec3::new(1.0, -2.0, 0.5), 1.1),
            translation: Vec3::new(7.0, -3.0, 12.0),
        }
    }

    #[test]
    fn identical_structures() {
        let s = fixture();
        let m = match_atoms(&s, &s).unwrap();
        assert_eq!((m.unmatched_ref, m.unmatched_pred), (0, 0));
        assert_eq!(m.coverage(), 1.0);
        let r = assess(&s, &s, &QualityOptions::default()).unwrap();
        for v in [r.complex_rmsd, r.protein_rmsd, r.ligand_rmsd, r.pocket_rmsd] {
            assert!(v < 1e-7, "{r:?}");
        }
        assert!(r.symmetry_corrected);
        assert!(verdict(&r).high_quality);
    }

    #[test]
    fn extra_reference_residue_is_unmatched() {
        let pred = fixture();
        let mut reference = fixture();
        let mut extra = reference.polymer_chains[0].residues[9].clone();
        extra.key.seq = 11;
        for a in &mut extra.atoms {
            a.residue_seq = 11;
            a.position = a.position + Vec3::new(0.0, 0.0, 3.0);
        }
        reference.polymer_chains[0].residues.push(extra);
        let m = match_atoms(&pred, &reference).unwrap();
        assert_eq!(m.unmatched_ref, 4);
        assert_eq!(m.unmatched_pred, 0);
    }

    #[test]
    fn ligand_mismatch() {
        let reference = fixture();
        let mut pred = fixture();
        pred.ligand_atoms.truncate(3);
        pred.ligand_atoms.push(rec("H1", Element::H, "BNZ", 'L', 1, Vec3::ZERO, true));
        let mut shorter = fixture();
        shorter.ligand_atoms.truncate(2);
        assert_eq!(match_atoms(&pred, &shorter), Err(QualityError::LigandMismatch { pred: 3, reference: 2 }));
        assert!(match_atoms(&pred, &reference).is_err());
    }

    #[test]
    fn global_motion_is_removed() {
        let s = fixture();
        let p = moved(&s, &motion());
        let r = assess(&p, &s, &QualityOptions::default()).unwrap();
        for v in [r.complex_rmsd, r.protein_rmsd, r.ligand_rmsd, r.pocket_rmsd] {
            assert!(v < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn displaced_ligand_closed_form() {
        let s = fixture();
        let mut p = s.clone();
        for a in &mut p.ligand_atoms {
            a.position = a.position + Vec3::new(0.0, 0.0, 3.0);
        }
        let opts = QualityOptions::default();
        let m = match_atoms(&p, &s).unwrap();
        let (pocket, size) = pocket_rmsd(&p, &s, &m, &opts).unwrap();
        let regions = crate::geometry::select_pocket_and_shell(&s).unwrap();
        let pocket_atoms: usize = s.residues().filter(|r| regions.in_pocket(&r.key)).map(|r| r.atoms.len()).sum();
        assert_eq!(size, regions.pocket_residues.len());
        let expected = ((6.0 * 9.0) / (pocket_atoms + 6) as f64).sqrt();
        assert!((pocket - expected).abs() < 1e-9, "{pocket} vs {expected}");
        assert!(protein_rmsd(&p, &s, &m).unwrap() < 1e-9);
        assert!((ligand_rmsd(&p, &s, &m, &opts).unwrap() - 3.0).abs() < 1e-9);
        assert!(complex_rmsd(&p, &s, &m, &opts).unwrap() > 0.1);
    }

    #[test]
    fn relabelled_benzene_needs_symmetry() {
        let s = fixture();
        let mut p = s.clone();
        p.ligand_atoms.rotate_left(1);
        let on = QualityOptions::default();
        let off = QualityOptions { symmetry: false, ..on };
        let m = match_atoms(&p, &s).unwrap();
        assert!(ligand_rmsd(&p, &s, &m, &on).unwrap() < 1e-9);
        assert!(ligand_rmsd(&p, &s, &m, &off).unwrap() > 1.0);
        let r = assess(&p, &s, &off).unwrap();
        assert!(!r.symmetry_corrected);
    }

    #[test]
    fn complex_msd_is_weighted_mean_in_shared_frame() {
        let s = fixture();
        let mut p = moved(&s, &motion());
        for (k, a) in p.ligand_atoms.iter_mut().enumerate() {
            a.position = a.position + Vec3::new(0.1 * k as f64, -0.2, 0.05);
        }
        let m = match_atoms(&p, &s).unwrap();
        let ctx = Context::new(&p, &s, &m, LigandSymmetry::identity(6));
        let all: Vec<&PolymerPair> = m.polymer_pairs.iter().collect();
        let (mut pp, mut pq) = ctx.polymer_points(&all);
        let (lp, lq) = ctx.ligand_points(&m.ligand_pairs);
        let np = pp.len();
        pp.extend(lp);
        pq.extend(lq);
        let t = kabsch(&pp, &pq).unwrap().transform;
        let msd = |a: &[Vec3], b: &[Vec3]| {
            a.iter().zip(b).map(|(x, y)| t.apply(*x).distance_squared(*y)).sum::<f64>() / a.len() as f64
        };
        let total = msd(&pp, &pq);
        let weighted = (np as f64 * msd(&pp[..np], &pq[..np]) + 6.0 * msd(&pp[np..], &pq[np..])) / pp.len() as f64;
        assert!((total - weighted).abs() < 1e-12);
        assert!((ctx.complex_rmsd(0).unwrap() - total.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn backbone_pocket_fit() {
        let s = fixture();
        let p = moved(&s, &motion());
        let opts = QualityOptions { pocket_fit: PocketFit::Backbone, ..Default::default() };
        assert!(assess(&p, &s, &opts).unwrap().pocket_rmsd < 1e-6);
    }

    #[test]
    fn verdict_boundary() {
        let mut r = QualityReport {
            complex_rmsd: 0.0,
            protein_rmsd: 0.0,
            ligand_rmsd: 0.0,
            pocket_rmsd: 1.99,
            pocket_size: 1,
            matching_coverage: 1.0,
            symmetry_corrected: true,
        };
        assert!(verdict(&r).high_quality);
        r.pocket_rmsd = 2.0;
        assert!(!verdict(&r).high_quality);
        r.pocket_rmsd = 0.0;
        assert!(verdict(&r).high_quality);
    }

    #[test]
    fn no_matching_polymer() {
        let s = fixture();
        let mut p = s.clone();
        for c in &mut p.polymer_chains {
            for r in &mut c.residues {
                for a in &mut r.atoms {
                    a.chain_id = 'Z';
                }
            }
        }
        assert_eq!(match_atoms(&p, &s), Err(QualityError::EmptyIntersection));
    }
}
