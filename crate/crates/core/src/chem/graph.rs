//! Element/bond graph of a small molecule.

use super::element::Element;
use super::ChemError;
use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Small integer label used by hashing and matching.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphAtom {
    pub element: Element,
    #[serde(default)]
    pub formal_charge: i8,
    /// Absent for graphs built from topology alone.
    #[serde(default)]
    pub position: Option<Vec3>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

/// Atoms plus an undirected simple bond set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct MolecularGraph {
    pub name: String,
    atoms: Vec<GraphAtom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, BondOrder)>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    #[serde(default)]
    name: String,
    atoms: Vec<GraphAtom>,
    #[serde(default)]
    bonds: Vec<Bond>,
}

impl TryFrom<GraphRepr> for MolecularGraph {
    type Error = ChemError;

    fn try_from(r: GraphRepr) -> Result<Self, ChemError> {
        Ok(MolecularGraph::new(r.atoms, r.bonds)?.with_name(r.name))
    }
}

impl From<MolecularGraph> for GraphRepr {
    fn from(g: MolecularGraph) -> Self {
        GraphRepr { name: g.name, atoms: g.atoms, bonds: g.bonds }
    }
}

impl MolecularGraph {
    /// Validates endpoints, self-bonds and duplicates.
    pub fn new(atoms: Vec<GraphAtom>, bonds: Vec<Bond>) -> Result<Self, ChemError> {
        let n = atoms.len();
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n];
        for bond in &bonds {
            if bond.a >= n || bond.b >= n {
                return Err(ChemError::BondIndexOutOfRange { a: bond.a, b: bond.b, atoms: n });
            }
            if bond.a == bond.b {
                return Err(ChemError::SelfBond(bond.a));
            }
            let key = (bond.a.min(bond.b), bond.a.max(bond.b));
            if !seen.insert(key) {
                return Err(ChemError::DuplicateBond(key.0, key.1));
            }
            adjacency[bond.a].push((bond.b, bond.order));
            adjacency[bond.b].push((bond.a, bond.order));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { name: String::new(), atoms, bonds, adjacency })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Graph from elements and positions, bonding every pair whose distance lies within
    /// `tolerance` (relative) of the covalent-radius sum. Hydrogens take part like any atom.
    pub fn from_coordinates(atoms: &[(Element, Vec3)], tolerance: f64) -> Self {
        let graph_atoms: Vec<GraphAtom> =
            atoms.iter().map(|&(element, p)| GraphAtom { element, formal_charge: 0, position: Some(p) }).collect();
        let mut bonds = Vec::new();
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                let expected = atoms[i].0.covalent_radius() + atoms[j].0.covalent_radius();
                let d = atoms[i].1.distance(atoms[j].1);
                if ((d - expected) / expected).abs() <= tolerance {
                    bonds.push(Bond { a: i, b: j, order: BondOrder::Single });
                }
            }
        }
        Self::new(graph_atoms, bonds).expect("inferred bonds are valid by construction")
    }

    pub fn atoms(&self) -> &[GraphAtom] {
        &self.atoms
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Sorted `(neighbour, order)` list.
    pub fn neighbors(&self, i: usize) -> &[(usize, BondOrder)] {
        &self.adjacency[i]
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<BondOrder> {
        self.adjacency[i].binary_search_by(|&(k, _)| k.cmp(&j)).ok().map(|idx| self.adjacency[i][idx].1)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn heavy_atom_count(&self) -> usize {
        self.atoms.iter().filter(|a| !a.element.is_hydrogen()).count()
    }

    /// Induced subgraph on non-hydrogen atoms, plus the original index of each kept atom.
    pub fn heavy_subgraph(&self) -> (MolecularGraph, Vec<usize>) {
        let keep: Vec<usize> = (0..self.atoms.len()).filter(|&i| !self.atoms[i].element.is_hydrogen()).collect();
        let mut remap = vec![usize::MAX; self.atoms.len()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let atoms = keep.iter().map(|&i| self.atoms[i].clone()).collect();
        let bonds = self
            .bonds
            .iter()
            .filter(|b| remap[b.a] != usize::MAX && remap[b.b] != usize::MAX)
            .map(|b| Bond { a: remap[b.a], b: remap[b.b], order: b.order })
            .collect();
        let g = MolecularGraph::new(atoms, bonds)
            .expect("induced subgraph of a valid graph is valid")
            .with_name(self.name.clone());
        (g, keep)
    }

    /// Same molecule with atom `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> MolecularGraph {
        assert_eq!(perm.len(), self.atoms.len());
        let mut atoms = vec![self.atoms[0].clone(); self.atoms.len()];
        for (old, &new) in perm.iter().enumerate() {
            atoms[new] = self.atoms[old].clone();
        }
        let bonds = self.bonds.iter().map(|b| Bond { a: perm[b.a], b: perm[b.b], order: b.order }).collect();
        MolecularGraph::new(atoms, bonds).expect("relabelling preserves validity").with_name(self.name.clone())
    }

    /// Replaces every position; `positions` must match the atom count.
    pub fn with_positions(mut self, positions: &[Vec3]) -> Self {
        assert_eq!(positions.len(), self.atoms.len());
        for (a, p) in self.atoms.iter_mut().zip(positions) {
            a.position = Some(*p);
        }
        self
    }

    pub fn connected_components(&self) -> usize {
        let n = self.atoms.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Per-atom ring membership: an atom is in a ring iff one of its bonds is not a bridge.
    pub fn ring_atoms(&self) -> Vec<bool> {
        let n = self.atoms.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut in_ring = vec![false; n];
        let mut timer = 0usize;
        // Iterative Tarjan bridge search; frames are (vertex, parent edge index, next neighbour).
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(top) = stack.last_mut() {
                let (v, parent) = (top.0, top.1);
                if top.2 < self.adjacency[v].len() {
                    let w = self.adjacency[v][top.2].0;
                    top.2 += 1;
                    if w == parent {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, v, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(u, _, _)) = stack.last() {
                        low[u] = low[u].min(low[v]);
                        if low[v] <= disc[u] {
                            // edge u–v lies on a cycle
                            in_ring[u] = true;
                            in_ring[v] = true;
                        }
                    }
                }
            }
        }
        in_ring
    }
}
