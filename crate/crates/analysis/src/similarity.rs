//! Pairwise similarity over fingerprint sets.

use rayon::prelude::*;

use crate::cluster::DistanceMatrix;
use crate::error::{AnalysisError, Result};
use crate::fingerprint::{tanimoto, Fingerprint};

fn check_widths(fps: &[Fingerprint]) -> Result<()> {
    if let Some(first) = fps.first() {
        if let Some(bad) = fps.iter().find(|f| f.width() != first.width()) {
            return Err(AnalysisError::WidthMismatch(first.width(), bad.width()));
        }
    }
    Ok(())
}

/// Distances `1 - tanimoto(i, j)`.
pub fn similarity_matrix(fps: &[Fingerprint]) -> Result<DistanceMatrix> {
    if fps.is_empty() {
        return Err(AnalysisError::Empty);
    }
    check_widths(fps)?;
    let n = fps.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| 1.0 - tanimoto(&fps[i], &fps[j]).expect("widths checked"))
                .collect()
        })
        .collect();
    DistanceMatrix::from_condensed(n, rows.into_iter().flatten().collect())
}

/// All pairs `(i, j)`, `i < j`, with Tanimoto similarity at or above
/// `threshold`, in lexicographic order.
pub fn chord_pairs(fps: &[Fingerprint], threshold: f64) -> Result<Vec<(usize, usize)>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(AnalysisError::Threshold(threshold));
    }
    check_widths(fps)?;
    let n = fps.len();
    let per_row: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| tanimoto(&fps[i], &fps[j]).expect("widths checked") >= threshold)
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    Ok(per_row.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fingerprint_is_zero_matrix() {
        let d = similarity_matrix(&[Fingerprint::from_bits(64, [1])]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn duplicates_give_zero_distances() {
        let f = Fingerprint::from_bits(64, [1, 5, 9]);
        let d = similarity_matrix(&[f.clone(), f.clone(), f]).unwrap();
        assert!(d.condensed().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_input_rejected() {
        assert_eq!(similarity_matrix(&[]), Err(AnalysisError::Empty));
    }

    #[test]
    fn threshold_zero_gives_all_pairs() {
        let fps: Vec<_> = (0..5).map(|i| Fingerprint::from_bits(64, [i])).collect();
        assert_eq!(chord_pairs(&fps, 0.0).unwrap().len(), 10);
        assert!(chord_pairs(&fps, 1.0).unwrap().is_empty());
        assert!(chord_pairs(&fps, 1.5).is_err());
    }
}
