//! Pocket and shell residues around a ligand.

use super::grid::{within, NeighborGrid};
use super::GeometryError;
use crate::structio::{ComplexStructure, ResidueKey};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const POCKET_CUTOFF: f64 = 6.0;
pub const SHELL_CUTOFF: f64 = 8.0;

/// Residues with a heavy atom within `pocket_cutoff` of a ligand heavy atom (pocket), and
/// those within `shell_cutoff` but not in the pocket (shell). Both bounds are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSelection {
    pub pocket_residues: BTreeSet<ResidueKey>,
    pub shell_residues: BTreeSet<ResidueKey>,
    pub pocket_cutoff: f64,
    pub shell_cutoff: f64,
}

impl RegionSelection {
    pub fn in_pocket(&self, key: &ResidueKey) -> bool {
        self.pocket_residues.contains(key)
    }

    pub fn in_shell(&self, key: &ResidueKey) -> bool {
        self.shell_residues.contains(key)
    }
}

fn check_inputs(s: &ComplexStructure, pocket: f64, shell: f64) -> Result<(), GeometryError> {
    if !(pocket > 0.0 && shell > pocket && shell.is_finite()) {
        return Err(GeometryError::InvalidCutoffs { pocket, shell });
    }
    if !s.ligand_atoms.iter().any(|a| a.is_heavy()) {
        return Err(GeometryError::NoLigand);
    }
    if s.residue_count() == 0 {
        return Err(GeometryError::NoPolymer);
    }
    Ok(())
}

/// Default 6 Å / 8 Å selection.
pub fn select_pocket_and_shell(s: &ComplexStructure) -> Result<RegionSelection, GeometryError> {
    select_regions(s, POCKET_CUTOFF, SHELL_CUTOFF)
}

pub fn select_regions(
    s: &ComplexStructure,
    pocket_cutoff: f64,
    shell_cutoff: f64,
) -> Result<RegionSelection, GeometryError> {
    check_inputs(s, pocket_cutoff, shell_cutoff)?;
    let ligand = s.ligand_heavy_positions();
    let grid = NeighborGrid::new(&ligand, shell_cutoff)?;
    let pocket2 = pocket_cutoff * pocket_cutoff;

    let mut pocket_residues = BTreeSet::new();
    let mut shell_residues = BTreeSet::new();
    for residue in s.residues() {
        let mut nearest: Option<f64> = None;
        for atom in residue.atoms.iter().filter(|a| a.is_heavy()) {
            if let Some(d2) = grid.nearest_squared_within(atom.position, shell_cutoff)? {
                nearest = Some(nearest.map_or(d2, |n| n.min(d2)));
                if d2 <= pocket2 {
                    break;
                }
            }
        }
        match nearest {
            Some(d2) if d2 <= pocket2 => {
                pocket_residues.insert(residue.key);
            }
            Some(_) => {
                shell_residues.insert(residue.key);
            }
            None => {}
        }
    }
    Ok(RegionSelection { pocket_residues, shell_residues, pocket_cutoff, shell_cutoff })
}

/// All-pairs reference implementation of [`select_regions`].
pub fn select_pocket_and_shell_brute_force(
    s: &ComplexStructure,
    pocket_cutoff: f64,
    shell_cutoff: f64,
) -> Result<RegionSelection, GeometryError> {
    check_inputs(s, pocket_cutoff, shell_cutoff)?;
    let ligand = s.ligand_heavy_positions();
    let mut pocket_residues = BTreeSet::new();
    let mut shell_residues = BTreeSet::new();
    for residue in s.residues() {
        let heavy: Vec<_> = residue.atoms.iter().filter(|a| a.is_heavy()).collect();
        let hit = |r: f64| heavy.iter().any(|a| ligand.iter().any(|l| within(a.position, *l, r)));
        if hit(pocket_cutoff) {
            pocket_residues.insert(residue.key);
        } else if hit(shell_cutoff) {
            shell_residues.insert(residue.key);
        }
    }
    Ok(RegionSelection { pocket_residues, shell_residues, pocket_cutoff, shell_cutoff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::Element;
    use crate::geometry::Vec3;
    use crate::structio::{AtomRecord, Chain, Residue};

    fn atom(element: Element, pos: Vec3, het: bool) -> AtomRecord {
        AtomRecord {
            serial: 1,
            name: if het { "C1".into() } else { "CA".into() },
            element,
            alt_loc: None,
            residue_name: if het { "LIG".into() } else { "ALA".into() },
            chain_id: if het { 'X' } else { 'A' },
            residue_seq: 1,
            insertion_code: None,
            position: pos,
            occupancy: 1.0,
            temp_factor: 0.0,
            is_hetero: het,
        }
    }

    fn complex(residue_x: &[f64]) -> ComplexStructure {
        let residues = residue_x
            .iter()
            .enumerate()
            .map(|(i, &x)| Residue {
                key: ResidueKey { chain: 'A', seq: i as i32 + 1, insertion_code: None },
                name: "ALA".into(),
                atoms: vec![atom(Element::C, Vec3::new(x, 0.0, 0.0), false)],
            })
            .collect();
        ComplexStructure {
            polymer_chains: vec![Chain { id: 'A', residues }],
            ligand_atoms: vec![atom(Element::C, Vec3::ZERO, true), atom(Element::H, Vec3::new(5.5, 0.0, 0.0), true)],
            ligand_graph: None,
            source_id: "t".into(),
        }
    }

    fn key(seq: i32) -> ResidueKey {
        ResidueKey { chain: 'A', seq, insertion_code: None }
    }

    #[test]
    fn thresholds() {
        let s = complex(&[5.9, 6.0, 7.0, 8.0, 8.1, -3.0]);
        let sel = select_pocket_and_shell(&s).unwrap();
        assert_eq!(sel.pocket_residues, [key(1), key(2), key(6)].into_iter().collect());
        assert_eq!(sel.shell_residues, [key(3), key(4)].into_iter().collect());
        assert_eq!(sel, select_pocket_and_shell_brute_force(&s, 6.0, 8.0).unwrap());
    }

    #[test]
    fn ligand_hydrogens_are_ignored() {
        // Residue 12 Å from the heavy atom but 6.5 Å from the hydrogen.
        let s = complex(&[12.0]);
        let sel = select_pocket_and_shell(&s).unwrap();
        assert!(sel.pocket_residues.is_empty() && sel.shell_residues.is_empty());
    }

    #[test]
    fn errors() {
        let mut s = complex(&[1.0]);
        s.ligand_atoms.retain(|a| a.element.is_hydrogen());
        assert_eq!(select_pocket_and_shell(&s), Err(GeometryError::NoLigand));
        let mut s = complex(&[]);
        s.polymer_chains.clear();
        assert_eq!(select_pocket_and_shell(&s), Err(GeometryError::NoPolymer));
        assert!(matches!(select_regions(&complex(&[1.0]), 8.0, 6.0), Err(GeometryError::InvalidCutoffs { .. })));
    }
}
