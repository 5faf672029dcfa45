//! Hashed linear-path fingerprints and Tanimoto similarity.
//!
//! Every simple path of 1 to 7 atoms is written as a label alternating atom
//! symbols (lowercase when aromatic) and bond symbols, e.g. `C-C=O`. The
//! lexicographically smaller of the label and its reverse is hashed with
//! 64-bit FNV-1a and reduced modulo the fingerprint width.

use crate::error::{AnalysisError, Result};
use crate::smiles::{BondOrder, Molecule};

pub const DEFAULT_WIDTH: usize = 2048;
pub const MAX_PATH_ATOMS: usize = 7;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// A fixed-width bitset with a cached population count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    count: u32,
}

impl Fingerprint {
    pub fn empty(width: usize) -> Self {
        Fingerprint {
            words: vec![0; width.div_ceil(64)],
            width,
            count: 0,
        }
    }

    /// Bitset with the given bits set. Bits beyond `width` wrap around.
    pub fn from_bits(width: usize, bits: impl IntoIterator<Item = usize>) -> Self {
        let mut fp = Self::empty(width);
        for b in bits {
            fp.set(b % width);
        }
        fp
    }

    pub fn set(&mut self, bit: usize) {
        let (w, mask) = (bit / 64, 1u64 << (bit % 64));
        if self.words[w] & mask == 0 {
            self.words[w] |= mask;
            self.count += 1;
        }
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] & (1u64 << (bit % 64)) != 0
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }

    pub fn intersection_count(&self, other: &Fingerprint) -> Result<u32> {
        self.check_width(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum())
    }

    fn check_width(&self, other: &Fingerprint) -> Result<()> {
        if self.width != other.width {
            return Err(AnalysisError::WidthMismatch(self.width, other.width));
        }
        Ok(())
    }
}

/// |a ∧ b| / |a ∨ b|, and 1.0 when both are empty.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64> {
    let both = a.intersection_count(b)?;
    let either = a.count + b.count - both;
    if either == 0 {
        return Ok(1.0);
    }
    Ok(f64::from(both) / f64::from(either))
}

fn atom_label(m: &Molecule, i: usize) -> String {
    let a = &m.atoms[i];
    if a.aromatic {
        a.element.to_lowercase()
    } else {
        a.element.to_string()
    }
}

/// Canonical labels of all simple paths with 1..=`max_atoms` atoms.
pub fn path_labels(m: &Molecule, max_atoms: usize) -> Vec<String> {
    let adj = m.adjacency();
    let labels: Vec<String> = (0..m.atoms.len()).map(|i| atom_label(m, i)).collect();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_atoms);
    let mut bonds: Vec<BondOrder> = Vec::with_capacity(max_atoms);
    for start in 0..m.atoms.len() {
        path.push(start);
        walk(&adj, &labels, &mut path, &mut bonds, max_atoms, &mut out);
        path.pop();
    }
    out
}

fn walk(
    adj: &[Vec<(usize, BondOrder)>],
    labels: &[String],
    path: &mut Vec<usize>,
    bonds: &mut Vec<BondOrder>,
    max_atoms: usize,
    out: &mut Vec<String>,
) {
    out.push(canonical_label(labels, path, bonds));
    if path.len() == max_atoms {
        return;
    }
    let last = *path.last().unwrap();
    for &(next, order) in &adj[last] {
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        bonds.push(order);
        walk(adj, labels, path, bonds, max_atoms, out);
        bonds.pop();
        path.pop();
    }
}

fn canonical_label(labels: &[String], path: &[usize], bonds: &[BondOrder]) -> String {
    let write = |atoms: &mut dyn Iterator<Item = usize>, orders: &mut dyn Iterator<Item = BondOrder>| {
        let mut s = String::new();
        for (i, a) in atoms.enumerate() {
            if i > 0 {
                s.push(orders.next().unwrap().symbol());
            }
            s.push_str(&labels[a]);
        }
        s
    };
    let forward = write(&mut path.iter().copied(), &mut bonds.iter().copied());
    let backward = write(&mut path.iter().rev().copied(), &mut bonds.iter().rev().copied());
    forward.min(backward)
}

pub fn fingerprint(m: &Molecule) -> Fingerprint {
    fingerprint_with_width(m, DEFAULT_WIDTH)
}

pub fn fingerprint_with_width(m: &Molecule, width: usize) -> Fingerprint {
    let mut fp = Fingerprint::empty(width);
    for label in path_labels(m, MAX_PATH_ATOMS) {
        fp.set((fnv1a64(label.as_bytes()) % width as u64) as usize);
    }
    fp
}
