//! Negative log molar activity.

use std::str::FromStr;

use crate::error::{AnalysisError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Molar,
    Millimolar,
    Micromolar,
    Nanomolar,
}

impl Unit {
    /// Power of ten dividing the value to give molar.
    fn exponent(self) -> f64 {
        match self {
            Unit::Molar => 0.0,
            Unit::Millimolar => 3.0,
            Unit::Micromolar => 6.0,
            Unit::Nanomolar => 9.0,
        }
    }
}

impl FromStr for Unit {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "M" => Unit::Molar,
            "mM" => Unit::Millimolar,
            "µM" | "μM" | "uM" => Unit::Micromolar,
            "nM" => Unit::Nanomolar,
            other => return Err(AnalysisError::UnknownUnit(other.to_string())),
        })
    }
}

/// `-log10` of the value converted to molar. Computed as
/// `exponent - log10(value)` so round inputs give exact results.
pub fn pchembl(value: f64, unit: Unit) -> Result<f64> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(AnalysisError::NonPositiveValue(value));
    }
    Ok(unit.exponent() - value.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(pchembl(1.0, Unit::Micromolar).unwrap(), 6.0);
        assert_eq!(pchembl(1.0, Unit::Molar).unwrap(), 0.0);
        assert_eq!(pchembl(10.0, Unit::Nanomolar).unwrap(), 8.0);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(pchembl(0.0, Unit::Nanomolar).is_err());
        assert!(pchembl(-3.0, Unit::Nanomolar).is_err());
        assert!(pchembl(f64::NAN, Unit::Nanomolar).is_err());
    }

    #[test]
    fn unit_names() {
        assert_eq!("µM".parse::<Unit>().unwrap(), Unit::Micromolar);
        assert_eq!("nM".parse::<Unit>().unwrap(), Unit::Nanomolar);
        assert!("pM".parse::<Unit>().is_err());
    }
}
