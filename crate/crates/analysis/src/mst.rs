//! Minimum spanning forests.

use crate::graph::WeightedGraph;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`; false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over edges sorted by (weight, id). Returns the selected edge ids
/// in ascending id order.
pub fn mst(g: &WeightedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&g.edges[a], &g.edges[b]);
        ea.weight.total_cmp(&eb.weight).then(ea.id.cmp(&eb.id))
    });
    let mut uf = UnionFind::new(g.nodes);
    let mut chosen = Vec::with_capacity(g.nodes.saturating_sub(1));
    for i in order {
        let e = &g.edges[i];
        if uf.union(e.u, e.v) {
            chosen.push(e.id);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Sum of weights over the given edge ids.
pub fn total_weight(g: &WeightedGraph, ids: &[usize]) -> f64 {
    g.edges.iter().filter(|e| ids.contains(&e.id)).map(|e| e.weight).sum()
}
