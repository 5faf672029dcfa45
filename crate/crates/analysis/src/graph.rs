//! Weighted undirected graphs and the edge-list text format.

use crate::error::{AnalysisError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub id: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedGraph {
    pub nodes: usize,
    pub edges: Vec<WeightedEdge>,
}

impl WeightedGraph {
    pub fn new(nodes: usize) -> Self {
        WeightedGraph { nodes, edges: Vec::new() }
    }

    /// Adds an edge with the next free id.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<usize> {
        let id = self.edges.iter().map(|e| e.id + 1).max().unwrap_or(0);
        self.push(WeightedEdge { u, v, weight, id }, None)?;
        Ok(id)
    }

    pub fn with_edges(nodes: usize, edges: impl IntoIterator<Item = WeightedEdge>) -> Result<Self> {
        let mut g = WeightedGraph::new(nodes);
        for e in edges {
            g.push(e, None)?;
        }
        Ok(g)
    }

    fn push(&mut self, e: WeightedEdge, line: Option<usize>) -> Result<()> {
        let fail = |message: String| Err(AnalysisError::InvalidGraph { line, message });
        if e.u == e.v {
            return fail(format!("self-loop on node {}", e.u));
        }
        if e.u >= self.nodes || e.v >= self.nodes {
            return fail(format!("edge ({}, {}) outside {} nodes", e.u, e.v, self.nodes));
        }
        if !(e.weight >= 0.0 && e.weight.is_finite()) {
            return fail(format!("weight {} must be finite and non-negative", e.weight));
        }
        if self.edges.iter().any(|x| x.id == e.id) {
            return fail(format!("duplicate edge id {}", e.id));
        }
        self.edges.push(e);
        Ok(())
    }

    /// Number of connected components, counting isolated nodes.
    pub fn components(&self) -> usize {
        let mut uf = crate::mst::UnionFind::new(self.nodes);
        let mut count = self.nodes;
        for e in &self.edges {
            if uf.union(e.u, e.v) {
                count -= 1;
            }
        }
        count
    }
}

/// Parses `u v [weight]` lines. Blank lines and `#` comments are skipped,
/// missing weights default to 1.0, edge ids follow line order and the node
/// count is one past the largest index seen.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut raw = Vec::new();
    let mut max_node: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| AnalysisError::InvalidGraph { line: Some(lineno), message };
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected `u v [weight]`, found {} fields", fields.len())));
        }
        let node = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad node index {s:?}")));
        let (u, v) = (node(fields[0])?, node(fields[1])?);
        let weight = match fields.get(2) {
            Some(w) => w.parse::<f64>().map_err(|_| err(format!("bad weight {w:?}")))?,
            None => 1.0,
        };
        max_node = Some(max_node.unwrap_or(0).max(u).max(v));
        raw.push((lineno, u, v, weight));
    }
    let mut g = WeightedGraph::new(max_node.map_or(0, |m| m + 1));
    for (id, (lineno, u, v, weight)) in raw.into_iter().enumerate() {
        g.push(WeightedEdge { u, v, weight, id }, Some(lineno))?;
    }
    Ok(g)
}
