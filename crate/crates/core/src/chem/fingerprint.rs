//! Folded circular (Morgan/ECFP-style) fingerprints and Tanimoto similarity.
//!
//! Identifier scheme, fixed so fingerprints are reproducible across runs and platforms:
//!
//! * hydrogens are removed first;
//! * radius-0 identifier = FNV-1a-64 over the little-endian words
//!   `[atomic number, heavy degree, formal charge (two's complement), in-ring flag]`;
//! * radius-r identifier = FNV-1a-64 over `[r, previous identifier, (bond code, neighbour
//!   identifier)…]` with the neighbour pairs sorted ascending;
//! * an environment is dropped when its bond set did not grow since the previous radius or
//!   when an identical bond set was already emitted (the smaller identifier wins);
//! * each identifier sets bit `id mod width`.

use super::graph::MolecularGraph;
use super::ChemError;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const DEFAULT_WIDTH: usize = 2048;
pub const DEFAULT_RADIUS: usize = 2;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the little-endian bytes of each word.
pub fn fnv1a64(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Fixed-width bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    width: usize,
    words: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct FingerprintRepr {
    width: usize,
    bits: Vec<usize>,
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FingerprintRepr { width: self.width, bits: self.on_bits() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = FingerprintRepr::deserialize(d)?;
        if repr.width == 0 {
            return Err(serde::de::Error::custom("fingerprint width must be positive"));
        }
        if let Some(&bad) = repr.bits.iter().find(|&&b| b >= repr.width) {
            return Err(serde::de::Error::custom(format!("bit {bad} outside width {}", repr.width)));
        }
        Ok(Fingerprint::from_bits(repr.width, repr.bits))
    }
}

impl Fingerprint {
    pub fn zeros(width: usize) -> Self {
        assert!(width > 0, "fingerprint width must be positive");
        Self { width, words: vec![0; width.div_ceil(64)] }
    }

    /// Panics if a bit is outside `width`.
    pub fn from_bits(width: usize, bits: impl IntoIterator<Item = usize>) -> Self {
        let mut fp = Self::zeros(width);
        for b in bits {
            fp.set(b);
        }
        fp
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.width, "bit {bit} outside width {}", self.width);
        self.words[bit / 64] |= 1u64 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        bit < self.width && self.words[bit / 64] & (1u64 << (bit % 64)) != 0
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn on_bits(&self) -> Vec<usize> {
        (0..self.width).filter(|&b| self.get(b)).collect()
    }
}

/// `|a∧b| / |a∨b|`, defined as 1 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, ChemError> {
    if a.width != b.width {
        return Err(ChemError::WidthMismatch(a.width, b.width));
    }
    let mut inter = 0u32;
    let mut union = 0u32;
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Circular-fingerprint identifiers per radius, before folding.
///
/// `result[0]` holds one identifier per heavy atom; later entries hold the identifiers that
/// survived de-duplication at that radius.
pub fn morgan_identifiers(g: &MolecularGraph, radius: usize) -> Result<Vec<Vec<u64>>, ChemError> {
    let (heavy, _) = g.heavy_subgraph();
    let n = heavy.atom_count();
    if n == 0 {
        return Err(ChemError::EmptyMolecule);
    }
    let rings = heavy.ring_atoms();
    let mut ids: Vec<u64> = (0..n)
        .map(|i| {
            let atom = &heavy.atoms()[i];
            fnv1a64(&[
                atom.element.atomic_number() as u64,
                heavy.degree(i) as u64,
                atom.formal_charge as i64 as u64,
                rings[i] as u64,
            ])
        })
        .collect();
    let mut levels = vec![ids.clone()];

    let bond_words = heavy.bonds().len().div_ceil(64).max(1);
    let bond_index = |i: usize, j: usize| -> usize {
        heavy
            .bonds()
            .iter()
            .position(|b| (b.a == i && b.b == j) || (b.a == j && b.b == i))
            .expect("neighbour pair is a bond")
    };
    let mut envs: Vec<Vec<u64>> = vec![vec![0u64; bond_words]; n];
    let mut seen: HashSet<Vec<u64>> = HashSet::new();

    for r in 1..=radius {
        let mut next_ids = Vec::with_capacity(n);
        let mut next_envs = Vec::with_capacity(n);
        let mut candidates: Vec<(Vec<u64>, u64)> = Vec::new();
        for i in 0..n {
            let mut neigh: Vec<(u64, u64)> =
                heavy.neighbors(i).iter().map(|&(w, order)| (order.code() as u64, ids[w])).collect();
            neigh.sort_unstable();
            let mut words = Vec::with_capacity(2 + 2 * neigh.len());
            words.push(r as u64);
            words.push(ids[i]);
            for (o, id) in &neigh {
                words.push(*o);
                words.push(*id);
            }
            let id = fnv1a64(&words);

            let mut env = envs[i].clone();
            for &(w, _) in heavy.neighbors(i) {
                let bi = bond_index(i, w);
                env[bi / 64] |= 1u64 << (bi % 64);
                for (slot, word) in env.iter_mut().zip(&envs[w]) {
                    *slot |= word;
                }
            }
            if env != envs[i] {
                candidates.push((env.clone(), id));
            }
            next_ids.push(id);
            next_envs.push(env);
        }
        candidates.sort();
        let mut kept = Vec::new();
        for (env, id) in candidates {
            if seen.insert(env) {
                kept.push(id);
            }
        }
        levels.push(kept);
        ids = next_ids;
        envs = next_envs;
    }
    Ok(levels)
}

/// Folded circular fingerprint of `g`.
pub fn morgan_fingerprint_with(g: &MolecularGraph, radius: usize, width: usize) -> Result<Fingerprint, ChemError> {
    let levels = morgan_identifiers(g, radius)?;
    let mut fp = Fingerprint::zeros(width);
    for id in levels.iter().flatten() {
        fp.set((*id % width as u64) as usize);
    }
    Ok(fp)
}

/// Radius 2, 2048 bits.
pub fn morgan_fingerprint(g: &MolecularGraph) -> Result<Fingerprint, ChemError> {
    morgan_fingerprint_with(g, DEFAULT_RADIUS, DEFAULT_WIDTH)
}

#[cfg(test)]
mod tests {
    use super::super::element::Element;
    use super::super::graph::fixtures::*;
    use super::super::graph::{Bond, BondOrder, GraphAtom};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fnv_reference_values() {
        // FNV-1a-64 of the empty input is the offset basis; of a single zero byte it is
        // offset ^ 0 times prime.
        assert_eq!(fnv1a64(&[]), FNV_OFFSET);
        let mut h = FNV_OFFSET;
        for _ in 0..8 {
            h = h.wrapping_mul(FNV_PRIME);
        }
        assert_eq!(fnv1a64(&[0]), h);
    }

    #[test]
    fn single_carbon_sets_only_its_radius_zero_bit() {
        let g = chain(&[Element::C]);
        // Hand trace: invariant words (6, 0, 0, 0), no bonds, so no further radii survive.
        let id = fnv1a64(&[6, 0, 0, 0]);
        let fp = morgan_fingerprint(&g).unwrap();
        assert_eq!(fp.on_bits(), vec![(id % 2048) as usize]);
        let levels = morgan_identifiers(&g, 2).unwrap();
        assert_eq!(levels, vec![vec![id], vec![], vec![]]);
    }

    #[test]
    fn methane_and_ethane_differ() {
        let methane = chain(&[Element::C, Element::H, Element::H, Element::H, Element::H]);
        let ethane = chain(&[Element::C, Element::C]);
        let a = morgan_fingerprint(&methane).unwrap();
        let b = morgan_fingerprint(&ethane).unwrap();
        assert_ne!(a, b);
        assert!(a.count_ones() >= 1 && b.count_ones() >= 1);
    }

    #[test]
    fn hydrogens_are_ignored() {
        assert_eq!(morgan_fingerprint(&benzene(true)).unwrap(), morgan_fingerprint(&benzene(false)).unwrap());
    }

    #[test]
    fn empty_molecule_rejected() {
        let h2 = chain(&[Element::H, Element::H]);
        assert!(matches!(morgan_fingerprint(&h2), Err(ChemError::EmptyMolecule)));
    }

    #[test]
    fn tanimoto_examples() {
        let a = Fingerprint::from_bits(2048, [1, 2, 3]);
        let b = Fingerprint::from_bits(2048, [2, 3, 4]);
        assert_eq!(tanimoto(&a, &b).unwrap(), 0.5);
        assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
        let c = Fingerprint::from_bits(2048, [10, 11]);
        assert_eq!(tanimoto(&a, &c).unwrap(), 0.0);
        assert_eq!(tanimoto(&Fingerprint::zeros(2048), &Fingerprint::zeros(2048)).unwrap(), 1.0);
        assert!(matches!(tanimoto(&a, &Fingerprint::zeros(1024)), Err(ChemError::WidthMismatch(2048, 1024))));
    }

    #[test]
    fn serde_uses_on_bit_list() {
        let a = Fingerprint::from_bits(64, [0, 5, 63]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"width":64,"bits":[0,5,63]}"#);
        assert_eq!(serde_json::from_str::<Fingerprint>(&json).unwrap(), a);
        assert!(serde_json::from_str::<Fingerprint>(r#"{"width":8,"bits":[9]}"#).is_err());
    }

    fn random_molecule() -> impl Strategy<Value = MolecularGraph> {
        (2usize..=12).prop_flat_map(|n| {
            let elems = prop::collection::vec(
                prop::sample::select(vec![Element::C, Element::N, Element::O, Element::S, Element::CL]),
                n,
            );
            // a spanning tree plus a few extra edges
            let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
            let extra = prop::collection::vec((0..n, 0..n), 0..3);
            let orders = prop::collection::vec(1u8..=4, 2 * n + 4);
            (elems, parents, extra, orders).prop_map(move |(elems, parents, extra, orders)| {
                let atoms: Vec<GraphAtom> = elems.into_iter().map(atom).collect();
                let mut pairs: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
                for (a, b) in extra {
                    let key = (a.min(b), a.max(b));
                    if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key) {
                        pairs.push(key);
                    }
                }
                let bonds = pairs
                    .iter()
                    .zip(orders.iter().cycle())
                    .map(|(&(a, b), &o)| Bond {
                        a,
                        b,
                        order: match o {
                            1 => BondOrder::Single,
                            2 => BondOrder::Double,
                            3 => BondOrder::Triple,
                            _ => BondOrder::Aromatic,
                        },
                    })
                    .collect();
                MolecularGraph::new(atoms, bonds).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn invariant_under_relabelling(g in random_molecule(), seed in any::<u64>()) {
            let n = g.atom_count();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(morgan_fingerprint(&g).unwrap(), morgan_fingerprint(&g.permuted(&perm)).unwrap());
        }

        #[test]
        fn tanimoto_properties(a in prop::collection::btree_set(0usize..256, 0..40), b in prop::collection::btree_set(0usize..256, 0..40)) {
            let fa = Fingerprint::from_bits(256, a);
            let fb = Fingerprint::from_bits(256, b);
            let ab = tanimoto(&fa, &fb).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, tanimoto(&fb, &fa).unwrap());
            prop_assert_eq!(tanimoto(&fa, &fa).unwrap(), 1.0);
        }
    }
}
