//! A SMILES reader for the common subset: organic-subset and bracket atoms,
//! explicit bonds, branches, ring closures (`1`..`9`, `%nn`) and aromatic
//! lowercase atoms. Stereo markers are accepted and dropped.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::elements::{self, AROMATIC_BRACKET, AROMATIC_ORGANIC, ORGANIC};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    pub fn symbol(self) -> char {
        match self {
            BondOrder::Single => '-',
            BondOrder::Double => '=',
            BondOrder::Triple => '#',
            BondOrder::Aromatic => ':',
        }
    }

    /// Valence contribution in half-bond units (aromatic counts as 1.5).
    fn half_units(self) -> u32 {
        match self {
            BondOrder::Single => 2,
            BondOrder::Double => 4,
            BondOrder::Triple => 6,
            BondOrder::Aromatic => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: &'static str,
    pub charge: i8,
    pub aromatic: bool,
    /// Hydrogen count written in a bracket atom; `None` for organic-subset atoms.
    pub explicit_h: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    /// Bonds closed through ring-closure digits.
    pub ring_bonds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SmilesError {
    pub kind: SmilesErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmilesErrorKind {
    Empty,
    UnmatchedOpenParen,
    UnmatchedCloseParen,
    UnmatchedRingClosure(u32),
    UnknownElement(String),
    UnexpectedChar(char),
    DanglingBond,
    DuplicateBond,
    BadBracket(String),
}

impl fmt::Display for SmilesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SmilesErrorKind::*;
        match &self.kind {
            Empty => write!(f, "empty SMILES"),
            UnmatchedOpenParen => write!(f, "unmatched '(' at offset {}", self.offset),
            UnmatchedCloseParen => write!(f, "unmatched ')' at offset {}", self.offset),
            UnmatchedRingClosure(n) => {
                write!(f, "ring closure {n} unmatched, offset {}", self.offset)
            }
            UnknownElement(s) => write!(f, "unknown element {s:?} at offset {}", self.offset),
            UnexpectedChar(c) => write!(f, "unexpected {c:?} at offset {}", self.offset),
            DanglingBond => write!(f, "bond without a following atom at offset {}", self.offset),
            DuplicateBond => write!(f, "duplicate bond at offset {}", self.offset),
            BadBracket(m) => write!(f, "bad bracket atom at offset {}: {m}", self.offset),
        }
    }
}

impl Molecule {
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Neighbor lists as `(atom, bond order)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, BondOrder)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for b in &self.bonds {
            adj[b.a].push((b.b, b.order));
            adj[b.b].push((b.a, b.order));
        }
        adj
    }

    /// Hydrogens attached to each atom: explicit for bracket atoms,
    /// default valence minus bond orders for organic-subset atoms.
    pub fn hydrogen_counts(&self) -> Vec<u32> {
        let mut half = vec![0u32; self.atoms.len()];
        for b in &self.bonds {
            half[b.a] += b.order.half_units();
            half[b.b] += b.order.half_units();
        }
        self.atoms
            .iter()
            .zip(half)
            .map(|(atom, half)| match atom.explicit_h {
                Some(h) => u32::from(h),
                None => {
                    let valence = u32::from(elements::default_valence(atom.element).unwrap_or(0));
                    valence.saturating_sub(half.div_ceil(2))
                }
            })
            .collect()
    }
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    pairs: HashSet<(usize, usize)>,
    ring_bonds: usize,
}

impl Parser<'_> {
    fn err(&self, kind: SmilesErrorKind, offset: usize) -> SmilesError {
        SmilesError { kind, offset }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn add_bond(&mut self, a: usize, b: usize, order: Option<BondOrder>, at: usize) -> Result<(), SmilesError> {
        let key = (a.min(b), a.max(b));
        if a == b || !self.pairs.insert(key) {
            return Err(self.err(SmilesErrorKind::DuplicateBond, at));
        }
        let order = order.unwrap_or(if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        });
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    fn starts_with(&self, s: &str) -> bool {
        self.text[self.pos..].starts_with(s.as_bytes())
    }

    fn organic_atom(&mut self) -> Option<Atom> {
        for sym in ORGANIC {
            if self.starts_with(sym) {
                self.pos += sym.len();
                return Some(Atom {
                    element: elements::canonical_symbol(sym).unwrap(),
                    charge: 0,
                    aromatic: false,
                    explicit_h: None,
                });
            }
        }
        for sym in AROMATIC_ORGANIC {
            if self.starts_with(sym) {
                self.pos += 1;
                return Some(Atom {
                    element: elements::canonical_symbol(&sym.to_uppercase()).unwrap(),
                    charge: 0,
                    aromatic: true,
                    explicit_h: None,
                });
            }
        }
        None
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.text[start..self.pos])
                .unwrap()
                .parse()
                .unwrap_or(u32::MAX)
        })
    }

    fn bracket_atom(&mut self) -> Result<Atom, SmilesError> {
        let open = self.pos;
        self.pos += 1;
        let _isotope = self.digits();
        let sym_start = self.pos;
        let mut atom = None;
        for sym in AROMATIC_BRACKET {
            if self.starts_with(sym) {
                self.pos += sym.len();
                let mut upper = sym[..1].to_uppercase();
                upper.push_str(&sym[1..]);
                atom = Some((elements::canonical_symbol(&upper).unwrap(), true));
                break;
            }
        }
        if atom.is_none() {
            let first = self.peek().filter(|c| c.is_ascii_uppercase());
            let Some(first) = first else {
                let token = self.peek().map(|c| (c as char).to_string()).unwrap_or_default();
                return Err(self.err(SmilesErrorKind::UnknownElement(token), sym_start));
            };
            let two = self
                .text
                .get(self.pos + 1)
                .filter(|c| c.is_ascii_lowercase())
                .map(|&c| format!("{}{}", first as char, c as char));
            if let Some(sym) = two.as_deref().and_then(elements::canonical_symbol) {
                self.pos += 2;
                atom = Some((sym, false));
            } else if let Some(sym) = elements::canonical_symbol(&(first as char).to_string()) {
                self.pos += 1;
                atom = Some((sym, false));
            } else {
                let token = two.unwrap_or_else(|| (first as char).to_string());
                return Err(self.err(SmilesErrorKind::UnknownElement(token), sym_start));
            }
        }
        let (element, aromatic) = atom.unwrap();

        // Chirality: @, @@, @TH1, @SP2, @OH15 ...
        if self.peek() == Some(b'@') {
            self.pos += 1;
            if self.peek() == Some(b'@') {
                self.pos += 1;
            } else {
                while self.peek().is_some_and(|c| c.is_ascii_uppercase()) {
                    self.pos += 1;
                }
                self.digits();
            }
        }
        let mut explicit_h = 0u8;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            explicit_h = self.digits().map_or(1, |d| d.min(9) as u8);
        }
        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(d) = self.digits() {
                charge = unit * d.min(15) as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
        }
        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.digits().is_none() {
                return Err(self.err(SmilesErrorKind::BadBracket("atom class without digits".into()), self.pos));
            }
        }
        match self.peek() {
            Some(b']') => self.pos += 1,
            Some(c) => {
                return Err(self.err(SmilesErrorKind::BadBracket(format!("unexpected {:?}", c as char)), self.pos))
            }
            None => return Err(self.err(SmilesErrorKind::BadBracket("missing ']'".into()), open)),
        }
        Ok(Atom {
            element,
            charge: charge.clamp(-15, 15) as i8,
            aromatic,
            explicit_h: Some(explicit_h),
        })
    }

    fn parse(mut self) -> Result<Molecule, SmilesError> {
        if self.text.is_empty() {
            return Err(self.err(SmilesErrorKind::Empty, 0));
        }
        let mut prev: Option<usize> = None;
        let mut pending: Option<(BondOrder, usize)> = None;
        let mut branches: Vec<(usize, usize)> = Vec::new();
        // ring number -> (atom, bond written at opening, offset)
        let mut rings: BTreeMap<u32, (usize, Option<BondOrder>, usize)> = BTreeMap::new();

        while let Some(c) = self.peek() {
            let at = self.pos;
            match c {
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if pending.is_some() || prev.is_none() {
                        return Err(self.err(SmilesErrorKind::UnexpectedChar(c as char), at));
                    }
                    let order = match c {
                        b'=' => BondOrder::Double,
                        b'#' => BondOrder::Triple,
                        b':' => BondOrder::Aromatic,
                        _ => BondOrder::Single,
                    };
                    pending = Some((order, at));
                    self.pos += 1;
                }
                b'(' => {
                    let Some(p) = prev else {
                        return Err(self.err(SmilesErrorKind::UnexpectedChar('('), at));
                    };
                    if pending.is_some() {
                        return Err(self.err(SmilesErrorKind::DanglingBond, at));
                    }
                    branches.push((p, at));
                    self.pos += 1;
                }
                b')' => {
                    if pending.is_some() {
                        return Err(self.err(SmilesErrorKind::DanglingBond, at));
                    }
                    let Some((p, _)) = branches.pop() else {
                        return Err(self.err(SmilesErrorKind::UnmatchedCloseParen, at));
                    };
                    prev = Some(p);
                    self.pos += 1;
                }
                b'.' => {
                    if pending.is_some() || prev.is_none() {
                        return Err(self.err(SmilesErrorKind::UnexpectedChar('.'), at));
                    }
                    prev = None;
                    self.pos += 1;
                }
                b'0'..=b'9' | b'%' => {
                    let Some(p) = prev else {
                        return Err(self.err(SmilesErrorKind::UnexpectedChar(c as char), at));
                    };
                    let number = if c == b'%' {
                        let d = self.text.get(at + 1..at + 3).filter(|d| d.iter().all(u8::is_ascii_digit));
                        let Some(d) = d else {
                            return Err(self.err(SmilesErrorKind::UnexpectedChar('%'), at));
                        };
                        self.pos += 3;
                        u32::from(d[0] - b'0') * 10 + u32::from(d[1] - b'0')
                    } else {
                        self.pos += 1;
                        u32::from(c - b'0')
                    };
                    let bond = pending.take().map(|(o, _)| o);
                    match rings.remove(&number) {
                        Some((other, open_bond, _)) => {
                            let order = match (open_bond, bond) {
                                (Some(a), Some(b)) if a != b => {
                                    return Err(self.err(SmilesErrorKind::UnexpectedChar(c as char), at))
                                }
                                (a, b) => a.or(b),
                            };
                            self.add_bond(other, p, order, at)?;
                            self.ring_bonds += 1;
                        }
                        None => {
                            rings.insert(number, (p, bond, at));
                        }
                    }
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.push_atom(atom, &mut prev, &mut pending)?;
                }
                _ => {
                    let Some(atom) = self.organic_atom() else {
                        let token = if c.is_ascii_alphabetic() {
                            let end = (at + 1..self.text.len())
                                .find(|&i| !self.text[i].is_ascii_lowercase())
                                .unwrap_or(self.text.len())
                                .min(at + 2);
                            String::from_utf8_lossy(&self.text[at..end]).into_owned()
                        } else {
                            return Err(self.err(SmilesErrorKind::UnexpectedChar(c as char), at));
                        };
                        return Err(self.err(SmilesErrorKind::UnknownElement(token), at));
                    };
                    self.push_atom(atom, &mut prev, &mut pending)?;
                }
            }
        }
        if let Some((_, at)) = pending {
            return Err(self.err(SmilesErrorKind::DanglingBond, at));
        }
        if let Some(&(_, at)) = branches.last() {
            return Err(self.err(SmilesErrorKind::UnmatchedOpenParen, at));
        }
        if let Some((&n, &(_, _, at))) = rings.iter().min_by_key(|(_, v)| v.2) {
            return Err(self.err(SmilesErrorKind::UnmatchedRingClosure(n), at));
        }
        Ok(Molecule {
            atoms: self.atoms,
            bonds: self.bonds,
            ring_bonds: self.ring_bonds,
        })
    }

    fn push_atom(
        &mut self,
        atom: Atom,
        prev: &mut Option<usize>,
        pending: &mut Option<(BondOrder, usize)>,
    ) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(p) = *prev {
            let order = pending.take().map(|(o, _)| o);
            self.add_bond(p, idx, order, self.pos)?;
        }
        *prev = Some(idx);
        Ok(())
    }
}

/// Parses a SMILES string.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    if let Some((offset, c)) = text.char_indices().find(|(_, c)| !c.is_ascii()) {
        return Err(SmilesError {
            kind: SmilesErrorKind::UnexpectedChar(c),
            offset,
        });
    }
    Parser {
        text: text.trim_end().as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        pairs: HashSet::new(),
        ring_bonds: 0,
    }
    .parse()
}
