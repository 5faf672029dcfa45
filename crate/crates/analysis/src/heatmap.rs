//! Column normalization and the red-yellow-green color ramp.

use crate::error::{AnalysisError, Result};

/// Min-max scales each column to [0, 1]. Non-finite entries are treated as
/// missing and come back as `None`. A constant column maps to 0.5.
pub fn heatmap_normalize(columns: &[Vec<Option<f64>>]) -> Result<Vec<Vec<Option<f64>>>> {
    columns
        .iter()
        .enumerate()
        .map(|(c, col)| {
            let finite = col.iter().flatten().copied().filter(|v| v.is_finite());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
            if lo > hi {
                return Err(AnalysisError::AllNullColumn(c));
            }
            let span = hi - lo;
            Ok(col
                .iter()
                .map(|v| match v {
                    Some(v) if v.is_finite() => Some(if span > 0.0 {
                        ((v - lo) / span).clamp(0.0, 1.0)
                    } else {
                        0.5
                    }),
                    _ => None,
                })
                .collect())
        })
        .collect()
}

/// Convenience form for fully populated columns.
pub fn normalize_dense(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let wrapped: Vec<Vec<Option<f64>>> =
        columns.iter().map(|c| c.iter().map(|&v| Some(v)).collect()).collect();
    let out = heatmap_normalize(&wrapped)?;
    Ok(out
        .into_iter()
        .map(|c| c.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
        .collect())
}

/// Maps `t` in [0, 1] to red (0), yellow (0.5), green (1). Values outside
/// the range are clamped.
pub fn ramp(t: f64) -> [u8; 3] {
    let t = if t.is_nan() { 0.5 } else { t.clamp(0.0, 1.0) };
    if t <= 0.5 {
        [255, (510.0 * t).round() as u8, 0]
    } else {
        [(255.0 * (2.0 - 2.0 * t)).round() as u8, 255, 0]
    }
}
