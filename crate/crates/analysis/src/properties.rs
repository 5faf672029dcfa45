//! A small descriptor set computed from a parsed molecule.

use crate::elements::{self, HYDROGEN_MASS};
use crate::error::{AnalysisError, Result};
use crate::smiles::Molecule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Properties {
    /// Average molecular weight including implicit hydrogens.
    pub molecular_weight: f64,
    pub heavy_atoms: usize,
    pub ring_bonds: usize,
    /// N + O atom count, a hydrogen-bond acceptor proxy.
    pub n_plus_o: usize,
    /// N and O atoms carrying at least one hydrogen, a donor proxy.
    pub nh_plus_oh: usize,
}

pub fn calc_properties(m: &Molecule) -> Result<Properties> {
    let hydrogens = m.hydrogen_counts();
    let mut weight = 0.0;
    let mut heavy = 0;
    let mut acceptors = 0;
    let mut donors = 0;
    for (atom, &h) in m.atoms.iter().zip(&hydrogens) {
        let mass = elements::average_mass(atom.element)
            .ok_or_else(|| AnalysisError::MissingMass(atom.element.to_string()))?;
        weight += mass + f64::from(h) * HYDROGEN_MASS;
        if atom.element != "H" {
            heavy += 1;
        }
        if matches!(atom.element, "N" | "O") {
            acceptors += 1;
            if h > 0 {
                donors += 1;
            }
        }
    }
    Ok(Properties {
        molecular_weight: weight,
        heavy_atoms: heavy,
        ring_bonds: m.ring_bonds,
        n_plus_o: acceptors,
        nh_plus_oh: donors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smiles::parse_smiles;

    fn props(s: &str) -> Properties {
        calc_properties(&parse_smiles(s).unwrap()).unwrap()
    }

    #[test]
    fn methane() {
        let p = props("C");
        // 12.011 + 4 * 1.008
        assert!((p.molecular_weight - 16.04).abs() <= 0.01);
        assert_eq!(p.heavy_atoms, 1);
    }

    #[test]
    fn benzene() {
        let p = props("c1ccccc1");
        // 6 * 12.011 + 6 * 1.008
        assert!((p.molecular_weight - 78.11).abs() <= 0.01);
        assert_eq!(p.heavy_atoms, 6);
        assert_eq!(p.ring_bonds, 1);
    }

    #[test]
    fn water() {
        let p = props("O");
        assert_eq!(p.n_plus_o, 1);
        assert_eq!(p.nh_plus_oh, 1);
    }

    #[test]
    fn aspirin() {
        let p = props("CC(=O)Oc1ccccc1C(=O)O");
        // C9H8O4: 9 * 12.011 + 8 * 1.008 + 4 * 15.999
        assert!((p.molecular_weight - 180.159).abs() < 1e-9);
        assert_eq!(p.n_plus_o, 4);
        assert_eq!(p.nh_plus_oh, 1);
    }

    #[test]
    fn missing_mass_names_element() {
        let err = calc_properties(&parse_smiles("[U]").unwrap()).unwrap_err();
        assert_eq!(err, AnalysisError::MissingMass("U".into()));
    }

    #[test]
    fn explicit_hydrogen_atoms_are_not_heavy() {
        let p = props("[H]C([H])([H])[H]");
        assert_eq!(p.heavy_atoms, 1);
        assert!((p.molecular_weight - 16.043).abs() < 1e-9);
    }
}
