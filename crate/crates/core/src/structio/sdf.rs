//! SDF reader and writer for V2000 connection tables.

use super::StructError;
use crate::chem::{Bond, BondOrder, ChemError, Element, GraphAtom, MolecularGraph};
use crate::geometry::Vec3;

/// Parses every record of a (possibly multi-record) SDF file.
///
/// Records are split on `$$$$`; a trailing empty record is ignored. Charges come from the
/// atom block unless `M  CHG` lines are present, which then take precedence for the whole
/// record as in the CTfile convention.
pub fn parse_sdf(text: &[u8]) -> Result<Vec<MolecularGraph>, StructError> {
    let text = String::from_utf8_lossy(text);
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut record = 0;
    while start < lines.len() {
        let end = (start..lines.len()).find(|&i| lines[i].trim() == "$$$$").unwrap_or(lines.len());
        let block = &lines[start..end];
        if block.iter().any(|l| !l.trim().is_empty()) {
            out.push(parse_record(block, record, start)?);
            record += 1;
        }
        start = end + 1;
    }
    Ok(out)
}

fn cols(line: &str, a: usize, b: usize) -> Option<&str> {
    let b = b.min(line.len());
    if a >= b {
        return Some("");
    }
    line.get(a..b).map(str::trim)
}

fn parse_counts(line: &str) -> Option<(usize, usize)> {
    if line.contains("V3000") {
        return None;
    }
    let fixed = (|| {
        let a = cols(line, 0, 3)?.parse().ok()?;
        let b = cols(line, 3, 6)?.parse().ok()?;
        Some((a, b))
    })();
    fixed.or_else(|| {
        let mut it = line.split_whitespace();
        Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?))
    })
}

fn charge_from_code(code: i32) -> i8 {
    match code {
        1 => 3,
        2 => 2,
        3 => 1,
        5 => -1,
        6 => -2,
        7 => -3,
        _ => 0,
    }
}

fn parse_atom(line: &str) -> Option<GraphAtom> {
    let fixed = (|| {
        let x: f64 = cols(line, 0, 10)?.parse().ok()?;
        let y: f64 = cols(line, 10, 20)?.parse().ok()?;
        let z: f64 = cols(line, 20, 30)?.parse().ok()?;
        let symbol = cols(line, 31, 34)?;
        let element = Element::from_symbol(symbol)?;
        let code = match cols(line, 36, 39)? {
            "" => 0,
            s => s.parse::<i32>().ok()?,
        };
        Some(GraphAtom { element, formal_charge: charge_from_code(code), position: Some(Vec3::new(x, y, z)) })
    })();
    let atom = fixed.or_else(|| {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() < 4 {
            return None;
        }
        let (x, y, z) = (t[0].parse().ok()?, t[1].parse().ok()?, t[2].parse().ok()?);
        let element = Element::from_symbol(t[3])?;
        let code = t.get(5).and_then(|s| s.parse::<i32>().ok()).unwrap_or(0);
        Some(GraphAtom { element, formal_charge: charge_from_code(code), position: Some(Vec3::new(x, y, z)) })
    })?;
    atom.position.filter(|p| p.is_finite())?;
    Some(atom)
}

fn parse_bond_fields(line: &str) -> Option<(usize, usize, u32)> {
    let fixed =
        (|| Some((cols(line, 0, 3)?.parse().ok()?, cols(line, 3, 6)?.parse().ok()?, cols(line, 6, 9)?.parse().ok()?)))(
        );
    fixed.or_else(|| {
        let mut it = line.split_whitespace();
        Some((it.next()?.parse().ok()?, it.next()?.parse().ok()?, it.next()?.parse().ok()?))
    })
}

fn parse_record(block: &[&str], record: usize, offset: usize) -> Result<MolecularGraph, StructError> {
    let bad = |line: usize, reason: String| StructError::MalformedSdf { record, line: offset + line + 1, reason };
    if block.len() < 4 {
        return Err(StructError::MalformedCountsLine { record });
    }
    let name = block[0].trim().to_string();
    let (n_atoms, n_bonds) = parse_counts(block[3]).ok_or(StructError::MalformedCountsLine { record })?;
    if block.len() < 4 + n_atoms + n_bonds {
        return Err(bad(
            block.len().saturating_sub(1),
            format!("record ends before {n_atoms} atoms and {n_bonds} bonds"),
        ));
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let li = 4 + i;
        atoms.push(parse_atom(block[li]).ok_or_else(|| bad(li, format!("malformed atom line {:?}", block[li])))?);
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for i in 0..n_bonds {
        let li = 4 + n_atoms + i;
        let (a, b, kind) =
            parse_bond_fields(block[li]).ok_or_else(|| bad(li, format!("malformed bond line {:?}", block[li])))?;
        for idx in [a, b] {
            if idx == 0 || idx > n_atoms {
                return Err(StructError::AtomIndexOutOfRange { record, atom: idx, atoms: n_atoms });
            }
        }
        let order = match kind {
            1 => BondOrder::Single,
            2 => BondOrder::Double,
            3 => BondOrder::Triple,
            4 => BondOrder::Aromatic,
            other => return Err(bad(li, format!("unsupported bond type {other}"))),
        };
        bonds.push(Bond { a: a - 1, b: b - 1, order });
    }

    let mut charges_reset = false;
    for (k, line) in block.iter().enumerate().skip(4 + n_atoms + n_bonds) {
        if line.starts_with("M  END") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  CHG") {
            if !charges_reset {
                for a in &mut atoms {
                    a.formal_charge = 0;
                }
                charges_reset = true;
            }
            let nums: Vec<i64> = rest
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad(k, "malformed M  CHG line".into()))?;
            let count = *nums.first().ok_or_else(|| bad(k, "empty M  CHG line".into()))?;
            let count = usize::try_from(count).map_err(|_| bad(k, format!("negative M  CHG count {count}")))?;
            if (nums.len() - 1) / 2 < count {
                return Err(bad(k, "truncated M  CHG line".into()));
            }
            for pair in nums[1..1 + 2 * count].chunks(2) {
                let idx = pair[0];
                if idx < 1 || idx as usize > n_atoms {
                    return Err(StructError::AtomIndexOutOfRange { record, atom: idx.max(0) as usize, atoms: n_atoms });
                }
                let charge = i8::try_from(pair[1]).map_err(|_| bad(k, format!("charge {} out of range", pair[1])))?;
                atoms[idx as usize - 1].formal_charge = charge;
            }
        }
    }

    MolecularGraph::new(atoms, bonds).map(|g| g.with_name(name)).map_err(|e: ChemError| bad(4 + n_atoms, e.to_string()))
}

fn fixed(field: &'static str, value: f64, width: usize) -> Result<String, StructError> {
    let text = format!("{value:>width$.4}");
    if !value.is_finite() || text.len() > width {
        return Err(StructError::FieldOverflow { field, value: value.to_string() });
    }
    Ok(text)
}

/// Writes V2000 records separated by `$$$$`.
///
/// Coordinates are printed with 4 decimals (atoms without a position at the origin) and
/// formal charges go to `M  CHG` lines.
pub fn write_sdf(graphs: &[MolecularGraph]) -> Result<String, StructError> {
    let mut out = String::new();
    for g in graphs {
        if g.atom_count() > 999 {
            return Err(StructError::FieldOverflow { field: "atom count", value: g.atom_count().to_string() });
        }
        if g.bonds().len() > 999 {
            return Err(StructError::FieldOverflow { field: "bond count", value: g.bonds().len().to_string() });
        }
        out.push_str(g.name.lines().next().unwrap_or(""));
        out.push_str("\n  cofold-qc\n\n");
        out.push_str(&format!("{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000\n", g.atom_count(), g.bonds().len()));
        for a in g.atoms() {
            let p = a.position.unwrap_or(Vec3::ZERO);
            out.push_str(&format!(
                "{}{}{} {:<3} 0  0  0  0  0  0  0  0  0  0  0  0\n",
                fixed("x", p.x, 10)?,
                fixed("y", p.y, 10)?,
                fixed("z", p.z, 10)?,
                a.element.symbol()
            ));
        }
        for b in g.bonds() {
            out.push_str(&format!("{:>3}{:>3}{:>3}  0\n", b.a + 1, b.b + 1, b.order.code()));
        }
        let charged: Vec<(usize, i8)> = g
            .atoms()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.formal_charge != 0)
            .map(|(i, a)| (i + 1, a.formal_charge))
            .collect();
        for chunk in charged.chunks(8) {
            out.push_str(&format!("M  CHG{:>3}", chunk.len()));
            for (i, c) in chunk {
                out.push_str(&format!(" {i:>3} {c:>3}"));
            }
            out.push('\n');
        }
        out.push_str("M  END\n$$$$\n");
    }
    Ok(out)
}
