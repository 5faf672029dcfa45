//! Element symbols, default valences and average atomic masses.

/// Every element symbol accepted inside a bracket atom.
pub const SYMBOLS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Organic-subset atoms writable without brackets, longest first.
pub const ORGANIC: &[&str] = &["Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I"];

/// Aromatic (lowercase) organic-subset atoms.
pub const AROMATIC_ORGANIC: &[&str] = &["b", "c", "n", "o", "p", "s"];

/// Aromatic symbols allowed inside brackets.
pub const AROMATIC_BRACKET: &[&str] = &["se", "as", "b", "c", "n", "o", "p", "s"];

pub const HYDROGEN_MASS: f64 = 1.008;

/// Standard average atomic masses (IUPAC abridged values).
pub fn average_mass(symbol: &str) -> Option<f64> {
    Some(match symbol {
        "H" => 1.008,
        "Li" => 6.94,
        "B" => 10.81,
        "C" => 12.011,
        "N" => 14.007,
        "O" => 15.999,
        "F" => 18.998,
        "Na" => 22.99,
        "Mg" => 24.305,
        "Al" => 26.982,
        "Si" => 28.085,
        "P" => 30.974,
        "S" => 32.06,
        "Cl" => 35.45,
        "K" => 39.098,
        "Ca" => 40.078,
        "Mn" => 54.938,
        "Fe" => 55.845,
        "Co" => 58.933,
        "Ni" => 58.693,
        "Cu" => 63.546,
        "Zn" => 65.38,
        "As" => 74.922,
        "Se" => 78.971,
        "Br" => 79.904,
        "Ag" => 107.87,
        "Sn" => 118.71,
        "I" => 126.9,
        "Pt" => 195.08,
        "Au" => 196.97,
        "Hg" => 200.59,
        _ => return None,
    })
}

/// Default valence used for implicit hydrogens of organic-subset atoms.
pub fn default_valence(symbol: &str) -> Option<u8> {
    Some(match symbol {
        "B" => 3,
        "C" => 4,
        "N" | "P" => 3,
        "O" | "S" => 2,
        "F" | "Cl" | "Br" | "I" => 1,
        _ => return None,
    })
}

pub fn canonical_symbol(symbol: &str) -> Option<&'static str> {
    SYMBOLS.iter().copied().find(|s| *s == symbol)
}
