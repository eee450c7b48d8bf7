//! Synthetic complex corpus: reference and predicted PDBs, input SDFs, confidence files,
//! a manifest, test ligands and a benchmark predictions CSV.
#![allow(dead_code)]

use cofold_qc::chem::{Bond, BondOrder, Element, GraphAtom, MolecularGraph};
use cofold_qc::geometry::{Mat3, RigidTransform, Vec3};
use cofold_qc::stats::{pk_to_dg, ThermoConstants};
use cofold_qc::structio::{write_pdb, write_sdf, AtomRecord, Chain, ComplexStructure, Residue, ResidueKey};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_cofold-qc");

pub const RING: f64 = 1.39;
pub const TEMPLATES: usize = 12;

pub struct Corpus {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub test_ligands: PathBuf,
    pub predictions: PathBuf,
    pub entries: usize,
}

/// Heavy-atom ligand: a six-ring with template-dependent ring nitrogens and substituents.
/// Template 11 carries a silicon substituent, outside the element whitelist.
pub fn ligand(template: usize) -> MolecularGraph {
    let mut atoms = Vec::new();
    let mut bonds = Vec::new();
    for k in 0..6 {
        let a = k as f64 * std::f64::consts::PI / 3.0;
        let element = if k > 0 && (template >> (k - 1)) & 1 == 1 && k % 2 == 1 { Element::N } else { Element::C };
        atoms.push(GraphAtom {
            element,
            formal_charge: 0,
            position: Some(Vec3::new(RING * a.cos(), RING * a.sin(), 0.0)),
        });
        bonds.push(Bond { a: k, b: (k + 1) % 6, order: BondOrder::Aromatic });
    }
    let pool = [Element::C, Element::O, Element::N, Element::F, Element::CL];
    for k in 0..6 {
        if (template + k) % 3 == 0 || k == 0 {
            let element =
                if template == 11 && k == 0 { Element::SI } else { pool[(template * 5 + k * 3) % pool.len()] };
            let ring = atoms[k].position.unwrap();
            let len = atoms[k].element.covalent_radius() + element.covalent_radius();
            let position = ring + ring.scale(len / RING);
            atoms.push(GraphAtom { element, formal_charge: 0, position: Some(position) });
            bonds.push(Bond { a: k, b: atoms.len() - 1, order: BondOrder::Single });
        }
    }
    MolecularGraph::new(atoms, bonds).unwrap().with_name(format!("template_{template}"))
}

fn record(
    name: &str,
    element: Element,
    residue: &str,
    chain: char,
    seq: i32,
    position: Vec3,
    plddt: f64,
    het: bool,
) -> AtomRecord {
    AtomRecord {
        serial: 0,
        name: name.into(),
        element,
        alt_loc: None,
        residue_name: residue.into(),
        chain_id: chain,
        residue_seq: seq,
        insertion_code: None,
        position,
        occupancy: 1.0,
        temp_factor: plddt,
        is_hetero: het,
    }
}

fn unit_vector(rng: &mut StdRng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v.scale(1.0 / n);
        }
    }
}

pub fn random_motion(rng: &mut StdRng) -> RigidTransform {
    RigidTransform {
        rotation: Mat3::rotation(unit_vector(rng), rng.gen_range(0.0..std::f64::consts::PI)),
        translation: Vec3::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0)),
    }
}

fn jitter(rng: &mut StdRng, sigma: f64) -> Vec3 {
    let s = sigma * 3f64.sqrt();
    Vec3::new(rng.gen_range(-s..=s), rng.gen_range(-s..=s), rng.gen_range(-s..=s))
}

/// Reference complex around `lig`: 24 five-atom residues between 7.5 and 15 Å from the
/// ligand centre. `chains` > 1 splits residues across chains A and B.
pub fn reference_complex(id: &str, lig: &MolecularGraph, chains: usize, rng: &mut StdRng) -> ComplexStructure {
    const NAMES: [(&str, Element, [f64; 3]); 5] = [
        ("N", Element::N, [-1.0, 0.4, 0.2]),
        ("CA", Element::C, [0.0, 0.0, 0.0]),
        ("C", Element::C, [1.0, 0.5, -0.3]),
        ("O", Element::O, [1.1, 1.1, 0.4]),
        ("CB", Element::C, [0.2, -1.0, 0.6]),
    ];
    let n = 24;
    let mut chain_a = Vec::new();
    let mut chain_b = Vec::new();
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..n {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let dir = Vec3::new(r * (golden * i as f64).cos(), r * (golden * i as f64).sin(), z);
        let ca = dir.scale(7.5 + (i % 5) as f64 * 1.8);
        let chain = if chains > 1 && i >= n / 2 { 'B' } else { 'A' };
        let seq = i as i32 + 1;
        let atoms = NAMES
            .iter()
            .map(|(name, el, off)| {
                record(name, *el, "ALA", chain, seq, ca + Vec3::from(*off), rng.gen_range(40.0..95.0), false)
            })
            .collect();
        let residue = Residue { key: ResidueKey { chain, seq, insertion_code: None }, name: "ALA".into(), atoms };
        if chain == 'A' {
            chain_a.push(residue);
        } else {
            chain_b.push(residue);
        }
    }
    let mut polymer_chains = vec![Chain { id: 'A', residues: chain_a }];
    if !chain_b.is_empty() {
        polymer_chains.push(Chain { id: 'B', residues: chain_b });
    }
    let ligand_atoms = lig
        .atoms()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let name = format!("{}{}", a.element.symbol().to_uppercase(), k + 1);
            record(&name, a.element, "LIG", 'L', 900, a.position.unwrap(), rng.gen_range(50.0..95.0), true)
        })
        .collect();
    let mut s = ComplexStructure { polymer_chains, ligand_atoms, ligand_graph: None, source_id: id.into() };
    number(&mut s);
    s
}

fn number(s: &mut ComplexStructure) {
    let mut serial = 1;
    for chain in &mut s.polymer_chains {
        for r in &mut chain.residues {
            for a in &mut r.atoms {
                a.serial = serial;
                serial += 1;
            }
        }
    }
    for a in &mut s.ligand_atoms {
        a.serial = serial;
        serial += 1;
    }
}

pub struct PredictionParams {
    pub protein_sigma: f64,
    pub ligand_sigma: f64,
    pub ligand_shift: f64,
    pub clash: bool,
}

/// Prediction: noisy copy with the ligand shifted, optionally a residue pushed into the
/// ligand, all under a random global motion.
pub fn predicted_complex(
    reference: &ComplexStructure,
    params: &PredictionParams,
    rng: &mut StdRng,
) -> ComplexStructure {
    let mut s = reference.clone();
    for chain in &mut s.polymer_chains {
        for r in &mut chain.residues {
            for a in &mut r.atoms {
                a.position = a.position + jitter(rng, params.protein_sigma);
                a.temp_factor = rng.gen_range(40.0..95.0);
            }
        }
    }
    let shift = unit_vector(rng).scale(params.ligand_shift);
    for a in &mut s.ligand_atoms {
        a.position = a.position + shift + jitter(rng, params.ligand_sigma);
    }
    if params.clash {
        let target = s.ligand_atoms[0].position;
        let ca = &mut s.polymer_chains[0].residues[0].atoms[1];
        ca.position = target + Vec3::new(0.0, 0.0, 1.2);
    }
    let motion = random_motion(rng);
    s.transform_positions(|p| motion.apply(p));
    s
}

fn confidence_json(rng: &mut StdRng) -> String {
    format!(
        "{{\n  \"confidence_score\": {:.4},\n  \"ptm\": {:.4},\n  \"iptm\": {:.4},\n  \"ligand_iptm\": {:.4},\n  \"protein_iptm\": {:.4},\n  \"complex_plddt\": {:.3},\n  \"complex_pde\": {:.3},\n  \"complex_ipde\": {:.3}\n}}\n",
        rng.gen_range(0.6..1.0),
        rng.gen_range(0.5..1.0),
        rng.gen_range(0.4..1.0),
        rng.gen_range(0.4..1.0),
        rng.gen_range(0.4..1.0),
        rng.gen_range(50.0..95.0),
        rng.gen_range(0.2..2.0),
        rng.gen_range(0.5..4.0),
    )
}

fn token_plddt(s: &ComplexStructure, rng: &mut StdRng) -> String {
    let tokens = s.residue_count() + s.ligand_atoms.iter().filter(|a| a.is_heavy()).count();
    (0..tokens).map(|_| format!("{:.2}", rng.gen_range(30.0..95.0))).collect::<Vec<_>>().join(" ") + "\n"
}

/// Writes `n` entries under `dir`. With `broken` the last entry points at a missing
/// prediction file. Manifest lines are written in reverse id order.
pub fn write_corpus(dir: &Path, n: usize, seed: u64, broken: bool) -> Corpus {
    let mut rng = StdRng::seed_from_u64(seed);
    for sub in ["pred", "ref", "ligands", "confidence"] {
        std::fs::create_dir_all(dir.join(sub)).unwrap();
    }
    let mut lines = Vec::new();
    for i in 0..n {
        let id = format!("cx{i:04}");
        let template = i % TEMPLATES;
        let lig = ligand(template);
        let chains = if i % 7 == 3 { 2 } else { 1 };
        let reference = reference_complex(&id, &lig, chains, &mut rng);
        let params = PredictionParams {
            protein_sigma: 0.05 + (i % 4) as f64 * 0.1,
            ligand_sigma: 0.02,
            ligand_shift: (i as f64 * 0.37) % 4.0,
            clash: i % 9 == 4,
        };
        let pred = predicted_complex(&reference, &params, &mut rng);
        std::fs::write(dir.join(format!("ref/{id}.pdb")), write_pdb(&reference).unwrap()).unwrap();
        std::fs::write(dir.join(format!("pred/{id}.pdb")), write_pdb(&pred).unwrap()).unwrap();
        std::fs::write(dir.join(format!("ligands/{id}.sdf")), write_sdf(&[lig.clone().with_name(&id)]).unwrap())
            .unwrap();
        std::fs::write(dir.join(format!("confidence/{id}.json")), confidence_json(&mut rng)).unwrap();

        let mut fields = vec![
            format!("\"id\":\"{id}\""),
            format!("\"pred_path\":\"pred/{}.pdb\"", if broken && i == n - 1 { "missing" } else { &id }),
            format!("\"ligand_path\":\"ligands/{id}.sdf\""),
            format!("\"confidence_path\":\"confidence/{id}.json\""),
            format!("\"affinity_pk\":{:.3}", rng.gen_range(4.0..10.0)),
            format!("\"train_test_similarity\":{:.4}", rng.gen_range(0.0..1.0)),
            format!("\"hybrid_score\":{:.4}", rng.gen_range(0.8..1.5)),
        ];
        if i % 11 != 5 {
            fields.push(format!("\"ref_path\":\"ref/{id}.pdb\""));
        }
        if i % 6 == 2 {
            std::fs::write(dir.join(format!("confidence/{id}.plddt")), token_plddt(&pred, &mut rng)).unwrap();
            fields.push(format!("\"plddt_path\":\"confidence/{id}.plddt\""));
        }
        lines.push(format!("{{{}}}", fields.join(",")));
    }
    lines.reverse();
    let manifest = dir.join("manifest.jsonl");
    std::fs::write(&manifest, lines.join("\n") + "\n").unwrap();

    let test_ligands = dir.join("test_ligands.sdf");
    let tests: Vec<MolecularGraph> = (0..2).map(|t| ligand(t).with_name(format!("fep_{t}"))).collect();
    std::fs::write(&test_ligands, write_sdf(&tests).unwrap()).unwrap();

    let predictions = dir.join("predictions.csv");
    std::fs::write(&predictions, benchmark_csv(&mut rng, &[8, 12, 15, 20])).unwrap();
    Corpus { dir: dir.to_path_buf(), manifest, test_ligands, predictions, entries: n }
}

/// Series of the given sizes; experimental values as ΔG, predictions as pK.
pub fn benchmark_csv(rng: &mut StdRng, sizes: &[usize]) -> String {
    let c = ThermoConstants::default();
    let mut out = String::from("series,ligand_id,pred_pk,exp_dg\n");
    for (s, &n) in sizes.iter().enumerate() {
        let noise = 0.3 + s as f64 * 0.4;
        for k in 0..n {
            let exp = rng.gen_range(4.0..9.0);
            let pred = exp + rng.gen_range(-noise..noise);
            writeln!(out, "S{s},L{s}_{k},{pred:.4},{:.4}", pk_to_dg(exp, &c)).unwrap();
        }
    }
    out
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("COFOLD_QC_WORKERS").output().expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("UTF-8 path")
}
