//! Graph isomorphism and automorphism enumeration for small molecules.
//!
//! Atoms are first partitioned by iterative colour refinement (element, charge, degree,
//! then neighbour colour multisets); a backtracking search then extends partial mappings
//! one atom at a time, checking bonds against every already-mapped atom.

use super::graph::MolecularGraph;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// What an atom or bond correspondence must preserve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Element, formal charge and bond order.
    #[default]
    Exact,
    /// Element and connectivity only. Used for graphs whose bonds were perceived from
    /// coordinates and therefore carry no reliable orders or charges.
    Topology,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_mappings: usize,
    pub time_budget: Option<Duration>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { max_mappings: 10_000, time_budget: Some(Duration::from_secs(1)) }
    }
}

/// Enumerated automorphisms. `mappings[k][i]` is the image of atom `i`; the identity is
/// always `mappings[0]`. When `truncated` is set the enumeration hit a limit and the list
/// is partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSet {
    pub mappings: Vec<Vec<usize>>,
    pub truncated: bool,
}

impl AutomorphismSet {
    pub fn identity(n: usize) -> Self {
        Self { mappings: vec![(0..n).collect()], truncated: false }
    }
}

/// All element- and bond-preserving atom permutations of `g`, up to `limits`.
///
/// Intended for heavy-atom graphs; hydrogens are treated like any other atom.
pub fn graph_automorphisms(g: &MolecularGraph, limits: SearchLimits) -> AutomorphismSet {
    graph_automorphisms_with(g, MatchMode::Exact, limits)
}

pub fn graph_automorphisms_with(g: &MolecularGraph, mode: MatchMode, limits: SearchLimits) -> AutomorphismSet {
    let n = g.atom_count();
    if n == 0 {
        return AutomorphismSet { mappings: vec![Vec::new()], truncated: false };
    }
    let mut search = Search::new(g, g, mode, true, limits);
    let mut mappings = Vec::new();
    let mut truncated = false;
    let max = limits.max_mappings.max(1);
    let completed = search.run(&mut |m| {
        if mappings.len() == max {
            truncated = true;
            return false;
        }
        mappings.push(m.to_vec());
        true
    });
    if !completed {
        truncated = true;
    }
    if mappings.is_empty() {
        // Only possible when the time budget expired before the first leaf.
        mappings.push((0..n).collect());
    }
    AutomorphismSet { mappings, truncated }
}

/// One isomorphism `a → b` (`result[i]` is the atom of `b` matched to atom `i` of `a`).
///
/// Where the search has a free choice it prefers mapping atom `i` onto atom `i`, so graphs
/// listed in the same atom order map onto each other by identity.
pub fn find_isomorphism(
    a: &MolecularGraph,
    b: &MolecularGraph,
    mode: MatchMode,
    time_budget: Option<Duration>,
) -> Option<Vec<usize>> {
    if a.atom_count() != b.atom_count() || a.bonds().len() != b.bonds().len() {
        return None;
    }
    if a.atom_count() == 0 {
        return Some(Vec::new());
    }
    let limits = SearchLimits { max_mappings: 1, time_budget };
    let mut search = Search::new(a, b, mode, true, limits);
    let mut found = None;
    search.run(&mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

pub fn are_isomorphic(a: &MolecularGraph, b: &MolecularGraph, mode: MatchMode) -> bool {
    find_isomorphism(a, b, mode, None).is_some()
}

/// Checks that `perm` maps `g` onto itself under `mode`.
pub fn is_automorphism(g: &MolecularGraph, perm: &[usize], mode: MatchMode) -> bool {
    let n = g.atom_count();
    if perm.len() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &p in perm {
        if p >= n || hit[p] {
            return false;
        }
        hit[p] = true;
    }
    for (i, &p) in perm.iter().enumerate() {
        let (x, y) = (&g.atoms()[i], &g.atoms()[p]);
        if x.element != y.element || (mode == MatchMode::Exact && x.formal_charge != y.formal_charge) {
            return false;
        }
    }
    g.bonds().iter().all(|bond| match g.bond_between(perm[bond.a], perm[bond.b]) {
        Some(order) => mode == MatchMode::Topology || order == bond.order,
        None => false,
    })
}

fn bond_label(order: super::graph::BondOrder, mode: MatchMode) -> u8 {
    match mode {
        MatchMode::Exact => order.code(),
        MatchMode::Topology => 0,
    }
}

/// Joint colour refinement over `a ⊔ b`, so colours are comparable across the two graphs.
fn refine(a: &MolecularGraph, b: &MolecularGraph, mode: MatchMode) -> (Vec<u32>, Vec<u32>) {
    let graphs = [a, b];
    let mut colors: Vec<Vec<u32>> = Vec::with_capacity(2);
    let mut initial: BTreeMap<(u8, i8, usize), u32> = BTreeMap::new();
    for g in graphs {
        for (i, atom) in g.atoms().iter().enumerate() {
            let charge = if mode == MatchMode::Exact { atom.formal_charge } else { 0 };
            initial.entry((atom.element.atomic_number(), charge, g.degree(i))).or_insert(0);
        }
    }
    for (k, v) in initial.values_mut().enumerate() {
        *v = k as u32;
    }
    for g in graphs {
        colors.push(
            g.atoms()
                .iter()
                .enumerate()
                .map(|(i, atom)| {
                    let charge = if mode == MatchMode::Exact { atom.formal_charge } else { 0 };
                    initial[&(atom.element.atomic_number(), charge, g.degree(i))]
                })
                .collect(),
        );
    }
    let mut classes = initial.len();
    loop {
        let mut sigs: Vec<Vec<(u32, Vec<(u8, u32)>)>> = Vec::with_capacity(2);
        let mut table: BTreeMap<(u32, Vec<(u8, u32)>), u32> = BTreeMap::new();
        for (gi, g) in graphs.iter().enumerate() {
            let mut per = Vec::with_capacity(g.atom_count());
            for i in 0..g.atom_count() {
                let mut neigh: Vec<(u8, u32)> =
                    g.neighbors(i).iter().map(|&(w, o)| (bond_label(o, mode), colors[gi][w])).collect();
                neigh.sort_unstable();
                let sig = (colors[gi][i], neigh);
                table.entry(sig.clone()).or_insert(0);
                per.push(sig);
            }
            sigs.push(per);
        }
        for (k, v) in table.values_mut().enumerate() {
            *v = k as u32;
        }
        let new_classes = table.len();
        for gi in 0..2 {
            colors[gi] = sigs[gi].iter().map(|s| table[s]).collect();
        }
        if new_classes == classes {
            break;
        }
        classes = new_classes;
    }
    let cb = colors.pop().unwrap();
    let ca = colors.pop().unwrap();
    (ca, cb)
}

struct Search<'g> {
    a: &'g MolecularGraph,
    b: &'g MolecularGraph,
    mode: MatchMode,
    color_a: Vec<u32>,
    /// Candidate atoms of `b` per colour, ascending.
    by_color_b: BTreeMap<u32, Vec<usize>>,
    order: Vec<usize>,
    map_ab: Vec<usize>,
    map_ba: Vec<usize>,
    prefer_identity: bool,
    deadline: Option<Instant>,
    steps: u64,
    timed_out: bool,
    feasible: bool,
}

const UNMAPPED: usize = usize::MAX;

impl<'g> Search<'g> {
    fn new(
        a: &'g MolecularGraph,
        b: &'g MolecularGraph,
        mode: MatchMode,
        prefer_identity: bool,
        limits: SearchLimits,
    ) -> Self {
        let (color_a, color_b) = refine(a, b, mode);
        let mut by_color_b: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (j, &c) in color_b.iter().enumerate() {
            by_color_b.entry(c).or_default().push(j);
        }
        let mut count_a: BTreeMap<u32, usize> = BTreeMap::new();
        for &c in &color_a {
            *count_a.entry(c).or_default() += 1;
        }
        let feasible = a.atom_count() == b.atom_count()
            && count_a.len() == by_color_b.len()
            && count_a.iter().all(|(c, &k)| by_color_b.get(c).is_some_and(|v| v.len() == k));
        let order = search_order(a, &color_a, &count_a);
        Self {
            a,
            b,
            mode,
            color_a,
            by_color_b,
            order,
            map_ab: vec![UNMAPPED; a.atom_count()],
            map_ba: vec![UNMAPPED; b.atom_count()],
            prefer_identity,
            deadline: limits.time_budget.map(|d| Instant::now() + d),
            steps: 0,
            timed_out: false,
            feasible,
        }
    }

    /// Returns false if stopped by the time budget.
    fn run(&mut self, emit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if self.feasible {
            self.extend(0, emit);
        }
        !self.timed_out
    }

    fn candidates(&self, x: usize) -> Vec<usize> {
        let pool = match self.by_color_b.get(&self.color_a[x]) {
            Some(p) => p,
            None => return Vec::new(),
        };
        let mut out: Vec<usize> = Vec::with_capacity(pool.len());
        if self.prefer_identity && pool.binary_search(&x).is_ok() {
            out.push(x);
        }
        out.extend(pool.iter().copied().filter(|&y| !(self.prefer_identity && y == x)));
        out
    }

    fn consistent(&self, x: usize, y: usize) -> bool {
        if self.map_ba[y] != UNMAPPED {
            return false;
        }
        let mut mapped_x = 0;
        for &(w, order) in self.a.neighbors(x) {
            let mw = self.map_ab[w];
            if mw == UNMAPPED {
                continue;
            }
            mapped_x += 1;
            match self.b.bond_between(y, mw) {
                Some(o) if bond_label(o, self.mode) == bond_label(order, self.mode) => {}
                _ => return false,
            }
        }
        let mapped_y = self.b.neighbors(y).iter().filter(|&&(w, _)| self.map_ba[w] != UNMAPPED).count();
        mapped_x == mapped_y
    }

    /// Returns false to abort the whole search.
    fn extend(&mut self, depth: usize, emit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        self.steps += 1;
        if self.steps.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                    return false;
                }
            }
        }
        if depth == self.order.len() {
            return emit(&self.map_ab);
        }
        let x = self.order[depth];
        for y in self.candidates(x) {
            if !self.consistent(x, y) {
                continue;
            }
            self.map_ab[x] = y;
            self.map_ba[y] = x;
            let go_on = self.extend(depth + 1, emit);
            self.map_ab[x] = UNMAPPED;
            self.map_ba[y] = UNMAPPED;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Rarest colour first, then greedily the atom with most already-ordered neighbours.
fn search_order(g: &MolecularGraph, colors: &[u32], counts: &BTreeMap<u32, usize>) -> Vec<usize> {
    let n = g.atom_count();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| (std::cmp::Reverse(links[i]), counts[&colors[i]], i))
            .expect("unplaced atom remains");
        placed[next] = true;
        order.push(next);
        for &(w, _) in g.neighbors(next) {
            links[w] += 1;
        }
    }
    order
}
