//! Ligand chemistry: element whitelist, circular fingerprints, Tanimoto similarity and
//! graph symmetry.

mod element;
mod fingerprint;
mod graph;
mod symmetry;

pub use element::Element;
pub use fingerprint::{
    fnv1a64, morgan_fingerprint, morgan_fingerprint_with, morgan_identifiers, tanimoto, Fingerprint, DEFAULT_RADIUS,
    DEFAULT_WIDTH,
};
pub use graph::{Bond, BondOrder, GraphAtom, MolecularGraph};
pub use symmetry::{
    are_isomorphic, find_isomorphism, graph_automorphisms, graph_automorphisms_with, is_automorphism, AutomorphismSet,
    MatchMode, SearchLimits,
};

#[cfg(test)]
pub(crate) use graph::fixtures;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChemError {
    #[error("bond {a}-{b} references an atom outside 0..{atoms}")]
    BondIndexOutOfRange { a: usize, b: usize, atoms: usize },
    #[error("atom {0} is bonded to itself")]
    SelfBond(usize),
    #[error("duplicate bond {0}-{1}")]
    DuplicateBond(usize, usize),
    #[error("molecule has no heavy atoms")]
    EmptyMolecule,
    #[error("fingerprint widths differ ({0} vs {1})")]
    WidthMismatch(usize, usize),
}

/// Elements a ligand may contain to be kept for training.
pub const LIGAND_ELEMENT_WHITELIST: [Element; 11] = [
    Element::H,
    Element::B,
    Element::C,
    Element::N,
    Element::O,
    Element::F,
    Element::P,
    Element::S,
    Element::CL,
    Element::BR,
    Element::I,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitelistCheck {
    pub passed: bool,
    /// Distinct disallowed elements, by atomic number.
    pub offenders: Vec<Element>,
}

pub fn element_whitelist_check(g: &MolecularGraph) -> WhitelistCheck {
    let mut offenders: Vec<Element> =
        g.atoms().iter().map(|a| a.element).filter(|e| !LIGAND_ELEMENT_WHITELIST.contains(e)).collect();
    offenders.sort();
    offenders.dedup();
    WhitelistCheck { passed: offenders.is_empty(), offenders }
}
