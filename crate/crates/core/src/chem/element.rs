//! Chemical elements and the built-in radius table (`data/elements.tsv`).

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::LazyLock;

const TABLE_SOURCE: &str = include_str!("../../data/elements.tsv");
const DEFAULT_COVALENT: f64 = 1.50;
const DEFAULT_VDW: f64 = 2.00;

struct ElementData {
    symbol: String,
    covalent: f64,
    vdw: f64,
}

static TABLE: LazyLock<Vec<ElementData>> = LazyLock::new(|| {
    let mut rows = Vec::with_capacity(118);
    for line in TABLE_SOURCE.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "bad element row: {line}");
        let number: usize = cols[0].parse().expect("element number");
        assert_eq!(number, rows.len() + 1, "element table out of order at {line}");
        let radius = |s: &str, default: f64| if s == "-" { default } else { s.parse().expect("radius") };
        rows.push(ElementData {
            symbol: cols[1].to_string(),
            covalent: radius(cols[2], DEFAULT_COVALENT),
            vdw: radius(cols[3], DEFAULT_VDW),
        });
    }
    rows
});

/// An element, stored as its atomic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(1);
    pub const B: Element = Element(5);
    pub const C: Element = Element(6);
    pub const N: Element = Element(7);
    pub const O: Element = Element(8);
    pub const F: Element = Element(9);
    pub const SI: Element = Element(14);
    pub const P: Element = Element(15);
    pub const S: Element = Element(16);
    pub const CL: Element = Element(17);
    pub const BR: Element = Element(35);
    pub const I: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        (1..=TABLE.len()).contains(&(z as usize)).then_some(Element(z))
    }

    /// Case-insensitive symbol lookup (`"CL"`, `"cl"` and `"Cl"` all resolve to chlorine).
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        let s = symbol.trim();
        if s.is_empty() || s.len() > 3 || !s.bytes().all(|b| b.is_ascii_alphabetic()) {
            return None;
        }
        let mut norm = String::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            norm.push(if i == 0 { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() });
        }
        TABLE.iter().position(|e| e.symbol == norm).map(|i| Element((i + 1) as u8))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        &TABLE[self.0 as usize - 1].symbol
    }

    pub fn is_hydrogen(self) -> bool {
        self == Element::H
    }

    /// Single-bond covalent radius, Å.
    pub fn covalent_radius(self) -> f64 {
        TABLE[self.0 as usize - 1].covalent
    }

    /// Van der Waals radius, Å.
    pub fn vdw_radius(self) -> f64 {
        TABLE[self.0 as usize - 1].vdw
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Element::from_symbol(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown element {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_complete() {
        assert_eq!(TABLE.len(), 118);
        assert_eq!(Element::from_symbol("og").unwrap().atomic_number(), 118);
    }

    #[test]
    fn symbol_lookup_is_case_insensitive() {
        assert_eq!(Element::from_symbol("CL"), Some(Element::CL));
        assert_eq!(Element::from_symbol(" c "), Some(Element::C));
        assert_eq!(Element::from_symbol("Xx"), None);
        assert_eq!(Element::from_symbol("C1"), None);
        assert_eq!(Element::from_symbol(""), None);
    }

    #[test]
    fn radii_match_table() {
        assert!((Element::C.covalent_radius() - 0.76).abs() < 1e-12);
        assert!((Element::C.vdw_radius() - 1.70).abs() < 1e-12);
        // Fe has no Bondi radius; the default applies.
        assert_eq!(Element::from_symbol("Fe").unwrap().vdw_radius(), DEFAULT_VDW);
    }
}
