//! Agglomerative hierarchical clustering.

use crate::error::{AnalysisError, Result};

/// Symmetric distances with a zero diagonal, stored as the strict upper
/// triangle in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl DistanceMatrix {
    pub fn from_condensed(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(AnalysisError::Empty);
        }
        let expected = n * (n - 1) / 2;
        if values.len() != expected {
            return Err(AnalysisError::InvalidMatrix(format!(
                "{} condensed values for n = {n}, expected {expected}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(AnalysisError::InvalidMatrix(format!("distance {v} outside [0, 1]")));
        }
        Ok(DistanceMatrix { n, values })
    }

    /// From a full square matrix, checking symmetry, diagonal and range.
    pub fn from_square(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AnalysisError::InvalidMatrix("matrix is not square".into()));
        }
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            if rows[i][i] != 0.0 {
                return Err(AnalysisError::InvalidMatrix(format!("diagonal entry {i} is nonzero")));
            }
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(AnalysisError::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
                values.push(rows[i][j]);
            }
        }
        Self::from_condensed(n, values)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.values[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.values[condensed_index(self.n, j, i)],
        }
    }

    pub fn condensed(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(format!("unknown linkage {other:?}")),
        }
    }
}

/// One agglomeration step. Leaves are `0..n`, merged clusters `n..2n-1`
/// in merge order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Smaller of the two cluster ids.
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub id: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Leaf ids under a cluster id.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![cluster];
        while let Some(c) = stack.pop() {
            if c < self.leaves {
                out.push(c);
            } else {
                let m = &self.merges[c - self.leaves];
                stack.push(m.a);
                stack.push(m.b);
            }
        }
        out.sort_unstable();
        out
    }

    /// Leaf order for drawing: depth-first, smaller cluster id first.
    pub fn leaf_order(&self) -> Vec<usize> {
        if self.merges.is_empty() {
            return (0..self.leaves).collect();
        }
        let root = self.leaves + self.merges.len() - 1;
        let mut out = Vec::with_capacity(self.leaves);
        let mut stack = vec![root];
        while let Some(c) = stack.pop() {
            if c < self.leaves {
                out.push(c);
            } else {
                let m = &self.merges[c - self.leaves];
                stack.push(m.b);
                stack.push(m.a);
            }
        }
        out
    }
}

/// Agglomerates all points. The closest pair of active clusters merges
/// first; equal distances go to the smallest `(a, b)` id pair.
pub fn hcluster(d: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = d.len();
    if n == 0 {
        return Err(AnalysisError::Empty);
    }
    // Working matrix over slots; slot i initially holds leaf i.
    let mut work = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            work[i * n + j] = d.get(i, j);
        }
    }
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while active.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for (x, &si) in active.iter().enumerate() {
            for &sj in &active[x + 1..] {
                let dist = work[si * n + sj];
                let (ca, cb) = (cluster_id[si], cluster_id[sj]);
                let key = (ca.min(cb), ca.max(cb));
                let better = match &best {
                    None => true,
                    Some((bd, bkey, _, _)) => dist < *bd || (dist == *bd && key < *bkey),
                };
                if better {
                    best = Some((dist, key, si, sj));
                }
            }
        }
        let (height, (a, b), si, sj) = best.unwrap();
        let (ni, nj) = (size[si] as f64, size[sj] as f64);
        for &sk in &active {
            if sk == si || sk == sj {
                continue;
            }
            let (dki, dkj) = (work[sk * n + si], work[sk * n + sj]);
            let merged = match linkage {
                Linkage::Single => dki.min(dkj),
                Linkage::Complete => dki.max(dkj),
                Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
            };
            work[sk * n + si] = merged;
            work[si * n + sk] = merged;
        }
        let id = n + merges.len();
        size[si] += size[sj];
        cluster_id[si] = id;
        active.retain(|&s| s != sj);
        merges.push(Merge {
            a,
            b,
            height,
            id,
            size: size[si],
        });
    }
    Ok(Dendrogram { leaves: n, merges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_has_no_merges() {
        let d = DistanceMatrix::from_condensed(1, vec![]).unwrap();
        let dg = hcluster(&d, Linkage::Average).unwrap();
        assert!(dg.merges.is_empty());
        assert_eq!(dg.leaf_order(), vec![0]);
    }

    #[test]
    fn two_points() {
        let d = DistanceMatrix::from_condensed(2, vec![0.4]).unwrap();
        let dg = hcluster(&d, Linkage::Single).unwrap();
        assert_eq!(dg.merges, vec![Merge { a: 0, b: 1, height: 0.4, id: 2, size: 2 }]);
    }

    #[test]
    fn ties_take_smallest_pair() {
        let d = DistanceMatrix::from_condensed(3, vec![0.5, 0.5, 0.5]).unwrap();
        let dg = hcluster(&d, Linkage::Complete).unwrap();
        assert_eq!((dg.merges[0].a, dg.merges[0].b), (0, 1));
        assert_eq!((dg.merges[1].a, dg.merges[1].b), (2, 3));
    }

    #[test]
    fn invalid_matrices() {
        assert!(DistanceMatrix::from_square(&[vec![0.0, 0.2], vec![0.3, 0.0]]).is_err());
        assert!(DistanceMatrix::from_square(&[vec![0.0, 1.2], vec![1.2, 0.0]]).is_err());
        assert!(DistanceMatrix::from_square(&[vec![0.1, 0.2], vec![0.2, 0.0]]).is_err());
        assert!(DistanceMatrix::from_condensed(3, vec![0.1]).is_err());
        assert!(DistanceMatrix::from_condensed(0, vec![]).is_err());
    }

    #[test]
    fn members_and_order() {
        let d = DistanceMatrix::from_condensed(4, vec![0.1, 0.9, 0.9, 0.9, 0.9, 0.2]).unwrap();
        let dg = hcluster(&d, Linkage::Average).unwrap();
        assert_eq!(dg.members(4), vec![0, 1]);
        assert_eq!(dg.members(5), vec![2, 3]);
        assert_eq!(dg.members(6), vec![0, 1, 2, 3]);
        assert_eq!(dg.leaf_order(), vec![0, 1, 2, 3]);
    }
}
