//! Physical sanity screen for a predicted pose: covalent bond lengths, protein–ligand
//! steric clashes and preservation of the input bond graph.

use crate::chem::{are_isomorphic, find_isomorphism, MatchMode, MolecularGraph};
use crate::geometry::{GeometryError, NeighborGrid, Vec3};
use crate::quality::AtomKey;
use crate::structio::ComplexStructure;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BOND_TOLERANCE: f64 = 0.25;
pub const DEFAULT_CLASH_FACTOR: f64 = 0.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlausibilityError {
    #[error("atom {0} has no coordinates")]
    MissingCoordinates(usize),
    #[error("structure has no ligand heavy atoms")]
    NoLigand,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlausibilityOptions {
    /// Allowed relative deviation from the covalent-radius sum.
    pub bond_tolerance: f64,
    /// Clash when distance < factor × vdW-radius sum.
    pub clash_factor: f64,
}

impl Default for PlausibilityOptions {
    fn default() -> Self {
        Self { bond_tolerance: DEFAULT_BOND_TOLERANCE, clash_factor: DEFAULT_CLASH_FACTOR }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondViolation {
    pub a: usize,
    pub b: usize,
    pub observed: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clash {
    pub protein_atom: AtomKey,
    /// Index into `ligand_atoms`.
    pub ligand_atom: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlausibilityReport {
    pub bond_length_violations: Vec<BondViolation>,
    pub clash_pairs: Vec<Clash>,
    pub connectivity_preserved: bool,
    pub physical: bool,
}

/// Bonds whose length deviates from `r_cov(a) + r_cov(b)` by more than `tolerance`
/// (relative).
pub fn check_bond_lengths(g: &MolecularGraph, tolerance: f64) -> Result<Vec<BondViolation>, PlausibilityError> {
    let mut out = Vec::new();
    for bond in g.bonds() {
        let pa = g.atoms()[bond.a].position.ok_or(PlausibilityError::MissingCoordinates(bond.a))?;
        let pb = g.atoms()[bond.b].position.ok_or(PlausibilityError::MissingCoordinates(bond.b))?;
        let expected = g.atoms()[bond.a].element.covalent_radius() + g.atoms()[bond.b].element.covalent_radius();
        let observed = pa.distance(pb);
        if ((observed - expected) / expected).abs() > tolerance {
            out.push(BondViolation { a: bond.a, b: bond.b, observed, expected });
        }
    }
    Ok(out)
}

struct ClashInputs {
    protein: Vec<(AtomKey, Vec3, f64)>,
    ligand: Vec<(usize, Vec3, f64)>,
}

fn clash_inputs(s: &ComplexStructure) -> Result<ClashInputs, PlausibilityError> {
    let ligand: Vec<(usize, Vec3, f64)> = s
        .ligand_atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| a.is_heavy())
        .map(|(i, a)| (i, a.position, a.element.vdw_radius()))
        .collect();
    if ligand.is_empty() {
        return Err(PlausibilityError::NoLigand);
    }
    let protein = s
        .polymer_atoms()
        .filter(|a| a.is_heavy())
        .map(|a| (AtomKey::of(a), a.position, a.element.vdw_radius()))
        .collect();
    Ok(ClashInputs { protein, ligand })
}

/// Protein/ligand heavy-atom pairs closer than `factor × (r_vdw(a) + r_vdw(b))`, ordered
/// by protein atom then ligand atom.
pub fn check_clashes(s: &ComplexStructure, factor: f64) -> Result<Vec<Clash>, PlausibilityError> {
    let inputs = clash_inputs(s)?;
    if inputs.protein.is_empty() {
        return Ok(Vec::new());
    }
    let max_lig = inputs.ligand.iter().map(|l| l.2).fold(0.0, f64::max);
    let max_prot = inputs.protein.iter().map(|p| p.2).fold(0.0, f64::max);
    let positions: Vec<Vec3> = inputs.ligand.iter().map(|l| l.1).collect();
    let cell = (factor * (max_lig + max_prot)).max(1e-6);
    let grid = NeighborGrid::new(&positions, cell)?;

    let mut out = Vec::new();
    for (key, pos, r) in &inputs.protein {
        let mut hits = Vec::new();
        grid.for_each_within(*pos, factor * (r + max_lig), |k, d2| {
            let limit = factor * (r + inputs.ligand[k].2);
            if d2 < limit * limit {
                hits.push((k, d2.sqrt()));
            }
        })?;
        hits.sort_by_key(|h| h.0);
        for (k, distance) in hits {
            out.push(Clash { protein_atom: key.clone(), ligand_atom: inputs.ligand[k].0, distance });
        }
    }
    Ok(out)
}

/// All-pairs reference implementation of [`check_clashes`].
pub fn check_clashes_brute_force(s: &ComplexStructure, factor: f64) -> Result<Vec<Clash>, PlausibilityError> {
    let inputs = clash_inputs(s)?;
    let mut out = Vec::new();
    for (key, pos, r) in &inputs.protein {
        for (i, lp, lr) in &inputs.ligand {
            let d = pos.distance(*lp);
            if d < factor * (r + lr) {
                out.push(Clash { protein_atom: key.clone(), ligand_atom: *i, distance: d });
            }
        }
    }
    Ok(out)
}

/// Whether the heavy-atom graph perceived from the pose coordinates has the same
/// topology as the input connection table.
pub fn check_connectivity(pose: &MolecularGraph, input: &MolecularGraph, tolerance: f64) -> bool {
    let (pose_heavy, _) = pose.heavy_subgraph();
    let mut atoms = Vec::with_capacity(pose_heavy.atom_count());
    for a in pose_heavy.atoms() {
        match a.position {
            Some(p) => atoms.push((a.element, p)),
            None => return false,
        }
    }
    let inferred = MolecularGraph::from_coordinates(&atoms, tolerance);
    let (input_heavy, _) = input.heavy_subgraph();
    are_isomorphic(&inferred, &input_heavy, MatchMode::Topology)
}

pub fn physical_verdict(report: &PlausibilityReport) -> bool {
    report.bond_length_violations.is_empty() && report.clash_pairs.is_empty() && report.connectivity_preserved
}

/// The input connection table placed at the predicted ligand coordinates.
///
/// Heavy atoms are paired in file order when the element sequences agree, otherwise by
/// topological isomorphism with the bonds perceived from the pose. Returns `None` when no
/// correspondence exists.
pub fn pose_graph(s: &ComplexStructure, input: &MolecularGraph, tolerance: f64) -> Option<MolecularGraph> {
    let (input_heavy, _) = input.heavy_subgraph();
    let pose: Vec<_> = s.ligand_atoms.iter().filter(|a| a.is_heavy()).map(|a| (a.element, a.position)).collect();
    if pose.len() != input_heavy.atom_count() {
        return None;
    }
    let same_order = pose.iter().zip(input_heavy.atoms()).all(|(p, a)| p.0 == a.element);
    let positions: Vec<Vec3> = if same_order {
        pose.iter().map(|p| p.1).collect()
    } else {
        let inferred = MolecularGraph::from_coordinates(&pose, tolerance);
        let m = find_isomorphism(&input_heavy, &inferred, MatchMode::Topology, None)?;
        m.iter().map(|&j| pose[j].1).collect()
    };
    Some(input_heavy.with_positions(&positions))
}

/// Runs all three checks on a predicted complex against the ligand's input table.
pub fn assess_plausibility(
    s: &ComplexStructure,
    input: &MolecularGraph,
    opts: &PlausibilityOptions,
) -> Result<PlausibilityReport, PlausibilityError> {
    let clash_pairs = check_clashes(s, opts.clash_factor)?;
    let (bond_length_violations, connectivity_preserved) = match pose_graph(s, input, opts.bond_tolerance) {
        Some(pose) => {
            let connected = check_connectivity(&pose, input, opts.bond_tolerance);
            (check_bond_lengths(&pose, opts.bond_tolerance)?, connected)
        }
        None => (Vec::new(), false),
    };
    let mut report =
        PlausibilityReport { bond_length_violations, clash_pairs, connectivity_preserved, physical: false };
    report.physical = physical_verdict(&report);
    Ok(report)
}
