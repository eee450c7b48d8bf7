//! Complex structures and their file formats: a fixed-column PDB subset and SDF V2000.

mod pdb;
mod sdf;

pub use pdb::{parse_pdb, parse_pdb_with, write_pdb, PdbOptions, DEFAULT_EXCLUDED_RESIDUES};
pub use sdf::{parse_sdf, write_sdf};

use crate::chem::{Element, MolecularGraph};
use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructError {
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("structure contains no atoms")]
    EmptyStructure,
    #[error("line {line}: duplicate atom {key}")]
    DuplicateAtom { line: usize, key: String },
    #[error("field {field} overflows its PDB column (value {value})")]
    FieldOverflow { field: &'static str, value: String },
    #[error("record {record}: malformed counts line")]
    MalformedCountsLine { record: usize },
    #[error("record {record}, line {line}: {reason}")]
    MalformedSdf { record: usize, line: usize, reason: String },
    #[error("record {record}: bond references atom {atom} but block has {atoms} atoms")]
    AtomIndexOutOfRange { record: usize, atom: usize, atoms: usize },
    #[error("structure has no polymer chain")]
    NoPolymer,
}

/// One ATOM/HETATM record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub serial: u32,
    pub name: String,
    pub element: Element,
    pub alt_loc: Option<char>,
    pub residue_name: String,
    pub chain_id: char,
    pub residue_seq: i32,
    pub insertion_code: Option<char>,
    pub position: Vec3,
    pub occupancy: f64,
    /// B-factor column; predicted structures store per-atom pLDDT (0–100) here.
    pub temp_factor: f64,
    pub is_hetero: bool,
}

impl AtomRecord {
    pub fn is_heavy(&self) -> bool {
        !self.element.is_hydrogen()
    }

    pub fn residue_key(&self) -> ResidueKey {
        ResidueKey { chain: self.chain_id, seq: self.residue_seq, insertion_code: self.insertion_code }
    }
}

/// Chain, sequence number and insertion code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueKey {
    pub chain: char,
    pub seq: i32,
    pub insertion_code: Option<char>,
}

impl std::fmt::Display for ResidueKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.chain, self.seq)?;
        if let Some(c) = self.insertion_code {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub key: ResidueKey,
    pub name: String,
    pub atoms: Vec<AtomRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub id: char,
    pub residues: Vec<Residue>,
}

/// Receptor chains plus the ligand of interest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexStructure {
    pub polymer_chains: Vec<Chain>,
    pub ligand_atoms: Vec<AtomRecord>,
    /// Bond graph over `ligand_atoms`, same indexing.
    pub ligand_graph: Option<MolecularGraph>,
    pub source_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainClass {
    SingleChain,
    MultiChain,
}

impl ComplexStructure {
    /// Polymer atoms in file order.
    pub fn polymer_atoms(&self) -> impl Iterator<Item = &AtomRecord> {
        self.polymer_chains.iter().flat_map(|c| c.residues.iter()).flat_map(|r| r.atoms.iter())
    }

    pub fn residues(&self) -> impl Iterator<Item = &Residue> {
        self.polymer_chains.iter().flat_map(|c| c.residues.iter())
    }

    pub fn residue_count(&self) -> usize {
        self.polymer_chains.iter().map(|c| c.residues.len()).sum()
    }

    pub fn polymer_atom_count(&self) -> usize {
        self.residues().map(|r| r.atoms.len()).sum()
    }

    /// Polymer atoms followed by ligand atoms.
    pub fn atom_count(&self) -> usize {
        self.polymer_atom_count() + self.ligand_atoms.len()
    }

    pub fn ligand_heavy_positions(&self) -> Vec<Vec3> {
        self.ligand_atoms.iter().filter(|a| a.is_heavy()).map(|a| a.position).collect()
    }

    /// Replaces `ligand_graph` with bonds perceived from ligand coordinates.
    pub fn infer_ligand_graph(&mut self, tolerance: f64) {
        let atoms: Vec<(Element, Vec3)> = self.ligand_atoms.iter().map(|a| (a.element, a.position)).collect();
        self.ligand_graph = Some(MolecularGraph::from_coordinates(&atoms, tolerance).with_name(self.source_id.clone()));
    }

    /// Applies `f` to every atom position.
    pub fn transform_positions(&mut self, f: impl Fn(Vec3) -> Vec3) {
        for chain in &mut self.polymer_chains {
            for residue in &mut chain.residues {
                for atom in &mut residue.atoms {
                    atom.position = f(atom.position);
                }
            }
        }
        for atom in &mut self.ligand_atoms {
            atom.position = f(atom.position);
        }
        if let Some(g) = &self.ligand_graph {
            if g.atom_count() == self.ligand_atoms.len() {
                let positions: Vec<Vec3> = self.ligand_atoms.iter().map(|a| a.position).collect();
                self.ligand_graph = Some(g.clone().with_positions(&positions));
            }
        }
    }
}

/// SingleChain iff exactly one polymer chain has at least one residue.
pub fn classify_chains(s: &ComplexStructure) -> Result<ChainClass, StructError> {
    match s.polymer_chains.iter().filter(|c| !c.residues.is_empty()).count() {
        0 => Err(StructError::NoPolymer),
        1 => Ok(ChainClass::SingleChain),
        _ => Ok(ChainClass::MultiChain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_classes() {
        let one =
            parse_pdb(b"ATOM      1  CA  ALA A   1       1.000   2.000   3.000  1.00  0.00           C\n").unwrap();
        assert_eq!(classify_chains(&one).unwrap(), ChainClass::SingleChain);
        let two = parse_pdb(
            b"ATOM      1  CA  ALA A   1       1.000   2.000   3.000  1.00  0.00           C\n\
              ATOM      2  CA  ALA B   1       4.000   2.000   3.000  1.00  0.00           C\n",
        )
        .unwrap();
        assert_eq!(classify_chains(&two).unwrap(), ChainClass::MultiChain);
        let lig_only =
            parse_pdb(b"HETATM    1  C1  LIG X   1       1.000   2.000   3.000  1.00  0.00           C\n").unwrap();
        assert_eq!(classify_chains(&lig_only), Err(StructError::NoPolymer));
    }
}
