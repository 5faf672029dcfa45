//! Whole-document validation. Collects every violation instead of stopping
//! at the first one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::model::{Anchor, EdgeKind, KnowledgeNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub code: &'static str,
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn error(&mut self, code: &'static str, location: String, message: String) {
        self.violations.push(Violation {
            severity: Severity::Error,
            code,
            location,
            message,
        });
    }

    fn warn(&mut self, code: &'static str, location: String, message: String) {
        self.violations.push(Violation {
            severity: Severity::Warning,
            code,
            location,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            let tag = match v.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}[{}] {}: {}", v.code, v.location, v.message)?;
        }
        Ok(())
    }
}

impl KnowledgeNetwork {
    /// Checks every document invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        for (key, node) in &self.nodes {
            let loc = format!("node {key}");
            if &node.id != key {
                report.error("id-mismatch", loc.clone(), format!("keyed as {key:?} but id is {:?}", node.id));
            }
            if self.edges.contains_key(key) || *key == self.id {
                report.error("id-collision", loc.clone(), "id shared with another object".into());
            }
            for issue in node.table.issues() {
                let mut at = loc.clone();
                if let Some(r) = issue.row {
                    at.push_str(&format!(" row {r}"));
                }
                if let Some(c) = &issue.column {
                    at.push_str(&format!(" column {c:?}"));
                }
                report.error("table", at, issue.message);
            }
        }

        let mut spawn_parent: BTreeMap<&str, &str> = BTreeMap::new();
        let mut reference_pairs: BTreeSet<(&Anchor, &Anchor)> = BTreeSet::new();
        for (key, edge) in &self.edges {
            let loc = format!("edge {key}");
            if &edge.id != key {
                report.error("id-mismatch", loc.clone(), format!("keyed as {key:?} but id is {:?}", edge.id));
            }
            if *key == self.id {
                report.error("id-collision", loc.clone(), "id shared with the network".into());
            }
            for (end, anchor) in [("source", &edge.source), ("target", &edge.target)] {
                self.check_anchor_into(&mut report, &format!("{loc} {end}"), anchor);
            }
            if edge.source.node_id() == edge.target.node_id() && edge.source == edge.target {
                report.warn("self-edge", loc.clone(), "edge connects an anchor to itself".into());
            } else if edge.source.node_id() == edge.target.node_id() {
                report.warn("self-edge", loc.clone(), "edge stays within one node".into());
            }
            match edge.kind {
                EdgeKind::Spawn => {
                    if !edge.directed {
                        report.error("spawn-undirected", loc.clone(), "spawn edges are directed".into());
                    }
                    if !matches!(edge.target, Anchor::Node { .. }) {
                        report.error("spawn-target", loc.clone(), "spawn edge target must be a node anchor".into());
                    }
                    let child = edge.target.node_id();
                    if spawn_parent.insert(child, edge.source.node_id()).is_some() {
                        report.error(
                            "spawn-forest",
                            loc.clone(),
                            format!("node {child} has more than one spawn parent"),
                        );
                    }
                }
                EdgeKind::Reference => {
                    if !reference_pairs.insert((&edge.source, &edge.target)) {
                        report.warn("parallel-edge", loc.clone(), "duplicates an existing reference edge".into());
                    }
                }
            }
        }

        // Following spawn parents must never revisit a node.
        for start in spawn_parent.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = *start;
            while let Some(parent) = spawn_parent.get(cur) {
                if !seen.insert(cur) {
                    report.error("spawn-cycle", format!("node {start}"), "spawn ancestry is cyclic".into());
                    break;
                }
                cur = parent;
            }
        }

        for (node, (x, y)) in &self.positions {
            if !self.nodes.contains_key(node) {
                report.error("dangling-position", format!("position {node}"), "no such node".into());
            }
            if !x.is_finite() || !y.is_finite() {
                report.error("position", format!("position {node}"), "coordinates not finite".into());
            }
        }

        for (i, event) in self.events.iter().enumerate() {
            let expected = i as u64 + 1;
            if event.seq != expected {
                report.error(
                    "event-seq",
                    format!("event #{i}"),
                    format!("seq {} where {expected} expected", event.seq),
                );
            }
        }
        for node in self.nodes.values() {
            if node.created_seq == 0 || node.created_seq > self.last_seq() {
                report.error(
                    "created-seq",
                    format!("node {}", node.id),
                    format!("created_seq {} outside the event log", node.created_seq),
                );
            }
        }

        report
    }

    fn check_anchor_into(&self, report: &mut ValidationReport, loc: &str, anchor: &Anchor) {
        let Some(node) = self.nodes.get(anchor.node_id()) else {
            report.error(
                "dangling-anchor",
                loc.to_string(),
                format!("node {} does not exist", anchor.node_id()),
            );
            return;
        };
        if let Anchor::Cell { row, column, .. } = anchor {
            let (rows, cols) = (node.table.row_count(), node.table.column_count());
            if *row >= rows || *column >= cols {
                report.error(
                    "cell-out-of-bounds",
                    loc.to_string(),
                    format!("cell ({row}, {column}) outside a {rows}x{cols} table"),
                );
            }
        }
    }
}
