//! Mutating operations. Every mutation is expressed as an
//! [`InteractionEvent`] and goes through [`KnowledgeNetwork::apply`], the
//! same path replay uses.

use chrono::{DateTime, Utc};

use crate::canonical;
use crate::error::{CoreError, Result};
use crate::model::{
    now_seconds, Anchor, AppNode, Edge, EdgeId, EdgeKind, InteractionEvent, KnowledgeNetwork,
    NodeId,
};
use crate::registry::{ActionInput, ActionRegistry};
use crate::table::{DataTable, MetadataMap};

pub mod keys {
    pub const KIND: &str = "kind";
    pub const TITLE: &str = "title";
    pub const TABLE: &str = "table";
    pub const METADATA: &str = "metadata";
    pub const TARGET: &str = "target";
    pub const ANNOTATION: &str = "annotation";
    pub const DIRECTED: &str = "directed";
    pub const TEXT: &str = "text";
    pub const NODE: &str = "node";
    pub const EDGE: &str = "edge";
    pub const X: &str = "x";
    pub const Y: &str = "y";
}

/// What [`KnowledgeNetwork::annotate`] resolved its target to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationTarget {
    Network,
    Node,
    Edge,
}

fn bad_event(seq: u64, message: impl Into<String>) -> CoreError {
    CoreError::MalformedEvent {
        seq,
        message: message.into(),
    }
}

fn param<'a>(event: &'a InteractionEvent, key: &str) -> Result<&'a str> {
    event
        .params
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| bad_event(event.seq, format!("missing param {key:?}")))
}

fn single<'a>(event: &InteractionEvent, ids: &'a [String], what: &str) -> Result<&'a str> {
    match ids {
        [id] => Ok(id),
        _ => Err(bad_event(
            event.seq,
            format!("expected exactly one produced {what}, found {}", ids.len()),
        )),
    }
}

fn none_produced(event: &InteractionEvent) -> Result<()> {
    if event.produced_nodes.is_empty() && event.produced_edges.is_empty() {
        Ok(())
    } else {
        Err(bad_event(event.seq, "event must not produce nodes or edges"))
    }
}

fn parse_coord(event: &InteractionEvent, key: &str) -> Result<f64> {
    let raw = param(event, key)?;
    let v: f64 = raw
        .parse()
        .map_err(|_| bad_event(event.seq, format!("{key} {raw:?} is not a number")))?;
    if !v.is_finite() {
        return Err(bad_event(event.seq, format!("{key} {raw:?} is not finite")));
    }
    Ok(v)
}

impl KnowledgeNetwork {
    fn id_in_use(&self, id: &str) -> bool {
        id == self.id || self.nodes.contains_key(id) || self.edges.contains_key(id)
    }

    fn fresh_unused_id(&self) -> String {
        loop {
            let id = crate::fresh_id();
            if !self.id_in_use(&id) {
                return id;
            }
        }
    }

    fn next_event(
        &self,
        action: &str,
        source: Option<Anchor>,
        params: MetadataMap,
        produced_nodes: Vec<NodeId>,
        produced_edges: Vec<EdgeId>,
    ) -> InteractionEvent {
        InteractionEvent {
            seq: self.last_seq() + 1,
            timestamp: now_seconds(),
            action: action.to_string(),
            source,
            params,
            produced_nodes,
            produced_edges,
        }
    }

    /// Checks that an anchor resolves to an existing node and in-bounds cell.
    pub fn check_anchor(&self, anchor: &Anchor) -> Result<()> {
        let node = self
            .nodes
            .get(anchor.node_id())
            .ok_or_else(|| CoreError::InvalidAnchor(format!("{anchor}: no such node")))?;
        if let Anchor::Cell { row, column, .. } = anchor {
            let (rows, cols) = (node.table.row_count(), node.table.column_count());
            if *row >= rows || *column >= cols {
                return Err(CoreError::InvalidAnchor(format!(
                    "{anchor}: out of bounds for a {rows}x{cols} table"
                )));
            }
        }
        Ok(())
    }

    /// Adds a node holding `table`.
    pub fn create_node(&mut self, kind: &str, title: &str, table: DataTable) -> Result<NodeId> {
        self.create_node_with_metadata(kind, title, table, MetadataMap::new())
    }

    pub fn create_node_with_metadata(
        &mut self,
        kind: &str,
        title: &str,
        table: DataTable,
        metadata: MetadataMap,
    ) -> Result<NodeId> {
        table.validate()?;
        let id = self.fresh_unused_id();
        let mut params = MetadataMap::new();
        params.insert(keys::KIND.into(), kind.into());
        params.insert(keys::TITLE.into(), title.into());
        params.insert(keys::TABLE.into(), canonical::to_canonical_string(&table));
        if !metadata.is_empty() {
            params.insert(keys::METADATA.into(), canonical::to_canonical_string(&metadata));
        }
        let event = self.next_event("create_node", None, params, vec![id.clone()], vec![]);
        self.apply(event, &ActionRegistry::new())?;
        Ok(id)
    }

    /// Runs a registered action on `source`, producing a child node and the
    /// spawn edge that links it to the anchor.
    pub fn interact(
        &mut self,
        registry: &ActionRegistry,
        source: Anchor,
        action: &str,
        params: MetadataMap,
    ) -> Result<(NodeId, EdgeId)> {
        if !registry.contains(action) {
            return Err(CoreError::UnknownAction(action.to_string()));
        }
        self.check_anchor(&source)?;
        let node_id = self.fresh_unused_id();
        let mut edge_id = self.fresh_unused_id();
        while edge_id == node_id {
            edge_id = self.fresh_unused_id();
        }
        let event = self.next_event(
            action,
            Some(source),
            params,
            vec![node_id.clone()],
            vec![edge_id.clone()],
        );
        self.apply(event, registry)?;
        Ok((node_id, edge_id))
    }

    pub fn add_reference_edge(
        &mut self,
        source: Anchor,
        target: Anchor,
        annotation: &str,
    ) -> Result<EdgeId> {
        self.add_reference_edge_with(source, target, annotation, true)
    }

    /// Reference edge with an explicit direction flag.
    pub fn add_reference_edge_with(
        &mut self,
        source: Anchor,
        target: Anchor,
        annotation: &str,
        directed: bool,
    ) -> Result<EdgeId> {
        self.check_anchor(&source)?;
        self.check_anchor(&target)?;
        let id = self.fresh_unused_id();
        let mut params = MetadataMap::new();
        params.insert(keys::TARGET.into(), canonical::to_canonical_string(&target));
        params.insert(keys::ANNOTATION.into(), annotation.into());
        params.insert(keys::DIRECTED.into(), directed.to_string());
        let event = self.next_event(
            "add_reference_edge",
            Some(source),
            params,
            vec![],
            vec![id.clone()],
        );
        self.apply(event, &ActionRegistry::new())?;
        Ok(id)
    }

    /// Replaces the annotation of a node, an edge, or the network itself.
    pub fn annotate(&mut self, target: &str, text: &str) -> Result<AnnotationTarget> {
        let kind = self.annotation_target(target)?;
        let mut params = MetadataMap::new();
        params.insert(keys::TARGET.into(), target.into());
        params.insert(keys::TEXT.into(), text.into());
        let event = self.next_event("annotate", None, params, vec![], vec![]);
        self.apply(event, &ActionRegistry::new())?;
        Ok(kind)
    }

    fn annotation_target(&self, target: &str) -> Result<AnnotationTarget> {
        if self.nodes.contains_key(target) {
            Ok(AnnotationTarget::Node)
        } else if self.edges.contains_key(target) {
            Ok(AnnotationTarget::Edge)
        } else if target == self.id {
            Ok(AnnotationTarget::Network)
        } else {
            Err(CoreError::UnknownId(target.to_string()))
        }
    }

    /// Removes a node with all incident edges and its position.
    pub fn delete_node(&mut self, node: &str) -> Result<()> {
        if !self.nodes.contains_key(node) {
            return Err(CoreError::UnknownId(node.to_string()));
        }
        let mut params = MetadataMap::new();
        params.insert(keys::NODE.into(), node.into());
        let event = self.next_event("delete_node", None, params, vec![], vec![]);
        self.apply(event, &ActionRegistry::new())
    }

    pub fn delete_edge(&mut self, edge: &str) -> Result<()> {
        if !self.edges.contains_key(edge) {
            return Err(CoreError::UnknownId(edge.to_string()));
        }
        let mut params = MetadataMap::new();
        params.insert(keys::EDGE.into(), edge.into());
        let event = self.next_event("delete_edge", None, params, vec![], vec![]);
        self.apply(event, &ActionRegistry::new())
    }

    /// Sets the layout position of a node.
    pub fn move_node(&mut self, node: &str, x: f64, y: f64) -> Result<()> {
        if !self.nodes.contains_key(node) {
            return Err(CoreError::UnknownId(node.to_string()));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(CoreError::InvalidPosition {
                node: node.to_string(),
                message: format!("({x}, {y}) is not finite"),
            });
        }
        let mut params = MetadataMap::new();
        params.insert(keys::NODE.into(), node.into());
        // Display for f64 is the shortest string that parses back to the same value.
        params.insert(keys::X.into(), x.to_string());
        params.insert(keys::Y.into(), y.to_string());
        let event = self.next_event("move_node", None, params, vec![], vec![]);
        self.apply(event, &ActionRegistry::new())
    }

    /// Applies one logged event. All checks run before anything is mutated,
    /// so a rejected event leaves the network unchanged.
    pub fn apply(&mut self, event: InteractionEvent, registry: &ActionRegistry) -> Result<()> {
        let expected = self.last_seq() + 1;
        if event.seq != expected {
            return Err(CoreError::SequenceGap {
                expected,
                found: event.seq,
            });
        }
        for id in event.produced_nodes.iter().chain(&event.produced_edges) {
            if self.id_in_use(id) {
                return Err(bad_event(event.seq, format!("produced id {id:?} already in use")));
            }
        }
        if let ([n], [e]) = (&event.produced_nodes[..], &event.produced_edges[..]) {
            if n == e {
                return Err(bad_event(event.seq, "node and edge share an id"));
            }
        }

        match event.action.as_str() {
            "create_node" => self.apply_create(&event)?,
            "add_reference_edge" => self.apply_reference(&event)?,
            "annotate" => {
                none_produced(&event)?;
                let target = param(&event, keys::TARGET)?;
                let text = param(&event, keys::TEXT)?.to_string();
                match self.annotation_target(target)? {
                    AnnotationTarget::Network => self.annotation = text,
                    AnnotationTarget::Node => self.nodes.get_mut(target).unwrap().annotation = text,
                    AnnotationTarget::Edge => self.edges.get_mut(target).unwrap().annotation = text,
                }
            }
            "delete_node" => {
                none_produced(&event)?;
                let node = param(&event, keys::NODE)?.to_string();
                if self.nodes.remove(&node).is_none() {
                    return Err(CoreError::UnknownId(node));
                }
                self.edges
                    .retain(|_, e| e.source.node_id() != node && e.target.node_id() != node);
                self.positions.remove(&node);
            }
            "delete_edge" => {
                none_produced(&event)?;
                let edge = param(&event, keys::EDGE)?;
                if self.edges.remove(edge).is_none() {
                    return Err(CoreError::UnknownId(edge.to_string()));
                }
            }
            "move_node" => {
                none_produced(&event)?;
                let node = param(&event, keys::NODE)?;
                if !self.nodes.contains_key(node) {
                    return Err(CoreError::UnknownId(node.to_string()));
                }
                let (x, y) = (parse_coord(&event, keys::X)?, parse_coord(&event, keys::Y)?);
                self.positions.insert(node.to_string(), (x, y));
            }
            _ => self.apply_action(&event, registry)?,
        }
        self.events.push(event);
        Ok(())
    }

    fn apply_create(&mut self, event: &InteractionEvent) -> Result<()> {
        if event.source.is_some() || !event.produced_edges.is_empty() {
            return Err(bad_event(event.seq, "create_node takes no source and produces no edge"));
        }
        let id = single(event, &event.produced_nodes, "node")?;
        let table: DataTable = serde_json::from_str(param(event, keys::TABLE)?)
            .map_err(|e| bad_event(event.seq, format!("table: {e}")))?;
        table.validate()?;
        let metadata: MetadataMap = match event.params.get(keys::METADATA) {
            Some(raw) => serde_json::from_str(raw)
                .map_err(|e| bad_event(event.seq, format!("metadata: {e}")))?,
            None => MetadataMap::new(),
        };
        let node = AppNode {
            id: id.to_string(),
            kind: param(event, keys::KIND)?.to_string(),
            title: param(event, keys::TITLE)?.to_string(),
            annotation: String::new(),
            table,
            metadata,
            created_seq: event.seq,
        };
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    fn apply_reference(&mut self, event: &InteractionEvent) -> Result<()> {
        if !event.produced_nodes.is_empty() {
            return Err(bad_event(event.seq, "reference edge produces no node"));
        }
        let id = single(event, &event.produced_edges, "edge")?;
        let source = event
            .source
            .clone()
            .ok_or_else(|| bad_event(event.seq, "reference edge needs a source anchor"))?;
        let target: Anchor = serde_json::from_str(param(event, keys::TARGET)?)
            .map_err(|e| bad_event(event.seq, format!("target: {e}")))?;
        let directed = match param(event, keys::DIRECTED)? {
            "true" => true,
            "false" => false,
            other => return Err(bad_event(event.seq, format!("directed flag {other:?}"))),
        };
        self.check_anchor(&source)?;
        self.check_anchor(&target)?;
        let edge = Edge {
            id: id.to_string(),
            source,
            target,
            kind: EdgeKind::Reference,
            directed,
            annotation: param(event, keys::ANNOTATION)?.to_string(),
        };
        self.edges.insert(edge.id.clone(), edge);
        Ok(())
    }

    fn apply_action(&mut self, event: &InteractionEvent, registry: &ActionRegistry) -> Result<()> {
        let handler = registry
            .get(&event.action)
            .ok_or_else(|| CoreError::UnknownAction(event.action.clone()))?;
        let anchor = event
            .source
            .as_ref()
            .ok_or_else(|| bad_event(event.seq, "interaction needs a source anchor"))?;
        self.check_anchor(anchor)?;
        let node_id = single(event, &event.produced_nodes, "node")?;
        let edge_id = single(event, &event.produced_edges, "edge")?;

        let source = &self.nodes[anchor.node_id()];
        let input = ActionInput {
            source,
            anchor,
            cell: source.anchored_cell(anchor),
            params: &event.params,
        };
        let output = handler(&input).map_err(|message| CoreError::ActionFailed {
            action: event.action.clone(),
            anchor: anchor.to_string(),
            message,
        })?;
        output.table.validate().map_err(|e| CoreError::ActionFailed {
            action: event.action.clone(),
            anchor: anchor.to_string(),
            message: format!("produced an invalid table: {e}"),
        })?;

        let child = AppNode {
            id: node_id.to_string(),
            kind: output.kind,
            title: output.title,
            annotation: String::new(),
            table: output.table,
            metadata: output.metadata,
            created_seq: event.seq,
        };
        let edge = Edge {
            id: edge_id.to_string(),
            source: anchor.clone(),
            target: Anchor::node(node_id),
            kind: EdgeKind::Spawn,
            directed: true,
            annotation: String::new(),
        };
        self.nodes.insert(child.id.clone(), child);
        self.edges.insert(edge.id.clone(), edge);
        Ok(())
    }

    /// Appends an event with an explicit timestamp. Used by stores that
    /// record their own clock.
    pub fn apply_at(
        &mut self,
        mut event: InteractionEvent,
        timestamp: DateTime<Utc>,
        registry: &ActionRegistry,
    ) -> Result<()> {
        event.timestamp = timestamp;
        self.apply(event, registry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{CellValue, ColumnKind};
    use crate::registry::ActionOutput;
    use crate::table::Column;

    fn smiles_table(rows: &[&str]) -> DataTable {
        let mut t = DataTable::new(vec![Column::new("smiles", ColumnKind::Structure)]);
        for s in rows {
            t.rows.push(vec![CellValue::structure(*s)]);
        }
        t
    }

    fn echo_registry() -> ActionRegistry {
        let mut reg = ActionRegistry::new();
        reg.register("echo", |input| {
            Ok(ActionOutput::new(
                "text",
                format!("from {}", input.source.title),
                DataTable::default(),
            ))
        })
        .unwrap();
        reg.register("fail", |_| Err("boom".to_string())).unwrap();
        reg
    }

    #[test]
    fn create_node_on_empty_network() {
        let mut net = KnowledgeNetwork::new("n");
        let id = net
            .create_node("structure-table", "compounds", smiles_table(&[]))
            .unwrap();
        let node = net.node(&id).unwrap();
        assert_eq!(node.table.row_count(), 0);
        assert_eq!(node.created_seq, 1);
        assert_eq!(net.events.len(), 1);
        assert_eq!(net.events[0].seq, 1);
        assert_eq!(net.events[0].action, "create_node");
    }

    #[test]
    fn fifty_eight_compound_table() {
        let rows: Vec<String> = (1..=58).map(|i| "C".repeat(i % 7 + 1)).collect();
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        let mut net = KnowledgeNetwork::new("n");
        let id = net
            .create_node("structure-table", "58 compounds", smiles_table(&refs))
            .unwrap();
        assert_eq!(net.node(&id).unwrap().table.row_count(), 58);
    }

    #[test]
    fn ragged_table_rejected_without_mutation() {
        let mut net = KnowledgeNetwork::new("n");
        let t = DataTable::new(vec![
            Column::new("a", ColumnKind::Text),
            Column::new("b", ColumnKind::Text),
            Column::new("c", ColumnKind::Text),
        ])
        .with_row(vec![CellValue::text("1"), CellValue::text("2")])
        .with_row(vec![CellValue::text("1"), CellValue::text("2"), CellValue::text("3")]);
        assert!(matches!(
            net.create_node("t", "t", t),
            Err(CoreError::InvalidTable { row: Some(0), .. })
        ));
        assert!(net.nodes.is_empty() && net.events.is_empty());
    }

    #[test]
    fn interact_spawns_child_and_edge() {
        let reg = echo_registry();
        let mut net = KnowledgeNetwork::new("n");
        let parent = net.create_node("structure-table", "p", smiles_table(&["C"])).unwrap();
        let (child, edge) = net
            .interact(&reg, Anchor::cell(&parent, 0, 0), "echo", MetadataMap::new())
            .unwrap();
        let e = net.edge(&edge).unwrap();
        assert_eq!(e.kind, EdgeKind::Spawn);
        assert!(e.directed);
        assert_eq!(e.target, Anchor::node(&child));
        assert_eq!(net.node(&child).unwrap().created_seq, 2);
        assert_eq!(net.spawn_parent(&child), Some(parent.as_str()));
        assert_eq!(net.events[1].produced_nodes, vec![child]);
    }

    #[test]
    fn rejected_interactions_leave_state_unchanged() {
        let reg = echo_registry();
        let mut net = KnowledgeNetwork::new("n");
        let parent = net.create_node("t", "p", smiles_table(&["C"])).unwrap();
        let before = net.clone();
        assert!(matches!(
            net.interact(&reg, Anchor::node(&parent), "frobnicate", MetadataMap::new()),
            Err(CoreError::UnknownAction(_))
        ));
        assert!(matches!(
            net.interact(&reg, Anchor::cell(&parent, 5, 0), "echo", MetadataMap::new()),
            Err(CoreError::InvalidAnchor(_))
        ));
        match net.interact(&reg, Anchor::node(&parent), "fail", MetadataMap::new()) {
            Err(CoreError::ActionFailed { action, anchor, .. }) => {
                assert_eq!(action, "fail");
                assert!(anchor.contains(&parent));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(net, before);
    }

    #[test]
    fn reference_edges_and_annotations() {
        let mut net = KnowledgeNetwork::new("n");
        let a = net.create_node("t", "a", smiles_table(&["C", "N"])).unwrap();
        let b = net.create_node("t", "b", smiles_table(&[])).unwrap();
        let e1 = net.add_reference_edge(Anchor::node(&a), Anchor::node(&b), "").unwrap();
        let e2 = net
            .add_reference_edge(Anchor::cell(&a, 1, 0), Anchor::node(&b), "cell to node")
            .unwrap();
        assert_eq!(net.edge(&e1).unwrap().kind, EdgeKind::Reference);
        assert_eq!(net.edge(&e2).unwrap().source, Anchor::cell(&a, 1, 0));
        assert!(net
            .add_reference_edge(Anchor::node("ghost"), Anchor::node(&b), "")
            .is_err());

        net.annotate(&e2, "MMP pair, pIC50 Δ=0.7").unwrap();
        assert_eq!(net.edge(&e2).unwrap().annotation, "MMP pair, pIC50 Δ=0.7");
        net.annotate(&a, "hits").unwrap();
        net.annotate(&a, "").unwrap();
        assert_eq!(net.node(&a).unwrap().annotation, "");
        assert_eq!(net.annotate("n", "session").unwrap(), AnnotationTarget::Network);
        assert!(matches!(net.annotate("missing", "x"), Err(CoreError::UnknownId(_))));
    }

    #[test]
    fn delete_node_cascades() {
        let reg = echo_registry();
        let mut net = KnowledgeNetwork::new("n");
        let a = net.create_node("t", "a", smiles_table(&["C"])).unwrap();
        let b = net.create_node("t", "b", smiles_table(&[])).unwrap();
        net.add_reference_edge(Anchor::node(&a), Anchor::node(&b), "").unwrap();
        let (c, _) = net.interact(&reg, Anchor::node(&a), "echo", MetadataMap::new()).unwrap();
        net.move_node(&a, 1.5, -2.0).unwrap();
        net.delete_node(&a).unwrap();
        assert!(net.edges.is_empty());
        assert!(net.positions.is_empty());
        assert!(net.node(&c).is_some());
        assert_eq!(net.spawn_parent(&c), None);
        assert_eq!(net.last_seq(), 6);
    }

    #[test]
    fn move_node_rejects_non_finite() {
        let mut net = KnowledgeNetwork::new("n");
        let a = net.create_node("t", "a", smiles_table(&[])).unwrap();
        assert!(net.move_node(&a, f64::NAN, 0.0).is_err());
        net.move_node(&a, 0.1, 1e300).unwrap();
        assert_eq!(net.positions[&a], (0.1, 1e300));
    }

    #[test]
    fn out_of_order_event_rejected() {
        let mut net = KnowledgeNetwork::new("n");
        net.create_node("t", "a", smiles_table(&[])).unwrap();
        let mut ev = net.events[0].clone();
        ev.seq = 3;
        ev.produced_nodes = vec!["other".into()];
        assert!(matches!(
            net.apply(ev, &ActionRegistry::new()),
            Err(CoreError::SequenceGap { expected: 2, found: 3 })
        ));
    }
}
