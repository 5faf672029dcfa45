use std::collections::BTreeMap;

use combine_core::{
    load, replay, save, Anchor, ActionOutput, ActionRegistry, CellValue, Column, ColumnKind,
    DataTable, EdgeKind, KnowledgeNetwork, MetadataMap,
};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn registry() -> ActionRegistry {
    let mut reg = ActionRegistry::new();
    reg.register("rows", |input| {
        let n: usize = input.param("n").unwrap_or("1").parse().map_err(|e| format!("{e}"))?;
        let mut t = DataTable::new(vec![
            Column::new("label", ColumnKind::Text),
            Column::new("value", ColumnKind::Number),
        ]);
        for i in 0..n {
            t.rows.push(vec![
                CellValue::text(format!("{}-{i}", input.source.title)),
                CellValue::number(i as f64 * 0.1),
            ]);
        }
        Ok(ActionOutput::new("table", format!("rows of {}", input.source.title), t))
    })
    .unwrap();
    reg.register("echo-cell", |input| {
        let cell = input.cell.cloned().unwrap_or(CellValue::Null);
        let kind = cell.kind().unwrap_or(ColumnKind::Text);
        let t = DataTable::new(vec![Column::new("cell", kind)]).with_row(vec![cell]);
        Ok(ActionOutput::new("viewer", "cell", t).with_meta("anchor", input.anchor.to_string()))
    })
    .unwrap();
    reg
}

fn random_table(rng: &mut ChaCha8Rng) -> DataTable {
    let rows = rng.random_range(0..4);
    let mut t = DataTable::new(vec![
        Column::new("smiles", ColumnKind::Structure),
        Column::new("pic50", ColumnKind::Number),
        Column::new("id", ColumnKind::Identifier),
    ]);
    for r in 0..rows {
        t.rows.push(vec![
            CellValue::structure(["C", "CCO", "c1ccccc1"][r % 3]),
            if rng.random_bool(0.2) {
                CellValue::Null
            } else {
                CellValue::number(rng.random_range(-10.0..10.0))
            },
            CellValue::identifier("chembl", format!("CHEMBL{}", rng.random_range(1..9999))),
        ]);
    }
    t
}

fn random_anchor(net: &KnowledgeNetwork, rng: &mut ChaCha8Rng) -> Option<Anchor> {
    let ids: Vec<&String> = net.nodes.keys().collect();
    let id = (*ids.choose(rng)?).clone();
    let t = &net.nodes[&id].table;
    if t.row_count() > 0 && rng.random_bool(0.5) {
        Some(Anchor::cell(
            id,
            rng.random_range(0..t.row_count()),
            rng.random_range(0..t.column_count()),
        ))
    } else {
        Some(Anchor::node(id))
    }
}

/// Applies a random valid operation sequence of up to `steps` operations.
fn random_network(seed: u64, steps: usize, reg: &ActionRegistry) -> KnowledgeNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = KnowledgeNetwork::new(format!("net-{seed}"));
    for _ in 0..steps {
        match rng.random_range(0..8) {
            0 | 1 => {
                let t = random_table(&mut rng);
                net.create_node("structure-table", "compounds", t).unwrap();
            }
            2 | 3 => {
                if let Some(a) = random_anchor(&net, &mut rng) {
                    let mut params = MetadataMap::new();
                    let action = if matches!(a, Anchor::Cell { .. }) { "echo-cell" } else { "rows" };
                    params.insert("n".into(), rng.random_range(0..3).to_string());
                    net.interact(reg, a, action, params).unwrap();
                }
            }
            4 => {
                if let (Some(a), Some(b)) = (random_anchor(&net, &mut rng), random_anchor(&net, &mut rng)) {
                    let directed = rng.random_bool(0.5);
                    net.add_reference_edge_with(a, b, "ref", directed).unwrap();
                }
            }
            5 => {
                let targets: Vec<String> = net.nodes.keys().chain(net.edges.keys()).cloned().collect();
                if let Some(t) = targets.choose(&mut rng) {
                    net.annotate(t, &format!("note {}", rng.random::<u16>())).unwrap();
                }
            }
            6 => {
                if let Some(a) = random_anchor(&net, &mut rng) {
                    let (x, y) = (rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
                    net.move_node(a.node_id(), x, y).unwrap();
                }
            }
            _ => {
                if rng.random_bool(0.3) {
                    if let Some(a) = random_anchor(&net, &mut rng) {
                        net.delete_node(a.node_id()).unwrap();
                    }
                } else if let Some(e) = net.edges.keys().next().cloned() {
                    net.delete_edge(&e).unwrap();
                }
            }
        }
    }
    net
}

#[test]
fn random_sequences_replay_byte_identical() {
    let reg = registry();
    for seed in 0..1000 {
        let net = random_network(seed, 1 + (seed as usize % 25), &reg);
        let replayed = replay(&net.id, &net.events, &reg).unwrap();
        assert_eq!(save(&replayed), save(&net), "seed {seed}");
    }
}

#[test]
fn save_load_save_is_byte_stable() {
    let reg = registry();
    for seed in 0..300 {
        let net = random_network(seed, 20, &reg);
        let bytes = save(&net);
        let loaded = load(&bytes).unwrap();
        assert_eq!(loaded, net, "seed {seed}");
        assert_eq!(save(&loaded), bytes, "seed {seed}");
    }
}

#[test]
fn spawn_forest_and_event_monotonicity_hold() {
    let reg = registry();
    for seed in 0..300 {
        let net = random_network(seed, 30, &reg);
        let mut incoming: BTreeMap<&str, usize> = BTreeMap::new();
        for e in net.edges.values().filter(|e| e.kind == EdgeKind::Spawn) {
            *incoming.entry(e.target.node_id()).or_default() += 1;
        }
        assert!(incoming.values().all(|&c| c == 1));
        for start in net.nodes.keys() {
            let mut seen = std::collections::BTreeSet::new();
            let mut cur = start.as_str();
            while let Some(p) = net.spawn_parent(cur) {
                assert!(seen.insert(cur), "cycle from {start}");
                cur = p;
            }
        }
        let seqs: Vec<u64> = net.events.iter().map(|e| e.seq).collect();
        assert_eq!(seqs, (1..=net.events.len() as u64).collect::<Vec<_>>());
        assert!(net.validate().is_valid(), "{}", net.validate());
    }
}

#[test]
fn self_and_parallel_edges_warn() {
    let mut net = KnowledgeNetwork::new("n");
    let a = net.create_node("t", "a", DataTable::default()).unwrap();
    let b = net.create_node("t", "b", DataTable::default()).unwrap();
    net.add_reference_edge(Anchor::node(&a), Anchor::node(&a), "").unwrap();
    net.add_reference_edge(Anchor::node(&a), Anchor::node(&b), "").unwrap();
    net.add_reference_edge(Anchor::node(&a), Anchor::node(&b), "").unwrap();
    let report = net.validate();
    assert!(report.is_valid());
    assert!(report.has_code("self-edge"));
    assert!(report.has_code("parallel-edge"));
}

#[test]
fn annotation_round_trips() {
    let mut net = KnowledgeNetwork::new("n");
    let a = net.create_node("t", "a", DataTable::default()).unwrap();
    let b = net.create_node("t", "b", DataTable::default()).unwrap();
    let e = net.add_reference_edge(Anchor::node(&a), Anchor::node(&b), "").unwrap();
    net.annotate(&e, "MMP pair, pIC50 Δ=0.7").unwrap();
    let loaded = load(&save(&net)).unwrap();
    assert_eq!(loaded.edges[&e].annotation, "MMP pair, pIC50 Δ=0.7");
}

#[derive(Debug, Clone)]
enum Mutation {
    DanglingNode(usize),
    CellOutOfBounds(usize),
    KindMismatch(usize),
}

fn mutation() -> impl Strategy<Value = Mutation> {
    prop_oneof![
        (0usize..64).prop_map(Mutation::DanglingNode),
        (0usize..64).prop_map(Mutation::CellOutOfBounds),
        (0usize..64).prop_map(Mutation::KindMismatch),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn validation_detects_injected_corruption(seed in 0u64..10_000, muts in prop::collection::vec(mutation(), 1..6)) {
        let reg = registry();
        let mut net = random_network(seed, 25, &reg);
        prop_assume!(!net.edges.is_empty());
        let mut expected = (0usize, 0usize, 0usize);
        let edge_ids: Vec<String> = net.edges.keys().cloned().collect();
        let mut touched = std::collections::BTreeSet::new();
        for m in muts {
            match m {
                Mutation::DanglingNode(i) | Mutation::CellOutOfBounds(i) => {
                    let id = &edge_ids[i % edge_ids.len()];
                    if !touched.insert(id.clone()) { continue; }
                    let edge = net.edges.get_mut(id).unwrap();
                    if matches!(m, Mutation::DanglingNode(_)) {
                        edge.source = Anchor::node(format!("ghost-{i}"));
                        expected.0 += 1;
                    } else {
                        edge.source = Anchor::cell(edge.source.node_id().to_string(), 10_000, 0);
                        expected.1 += 1;
                    }
                }
                Mutation::KindMismatch(i) => {
                    let ids: Vec<String> = net.nodes.keys().cloned().collect();
                    let node = net.nodes.get_mut(&ids[i % ids.len()]).unwrap();
                    let cols = node.table.column_count();
                    let rows = node.table.row_count();
                    if cols == 0 || rows == 0 { continue; }
                    let (r, c) = (i % rows, i % cols);
                    let replacement = match node.table.columns[c].kind {
                        ColumnKind::Number => CellValue::text("oops"),
                        _ => CellValue::number(1.0),
                    };
                    if !touched.insert(format!("{}/{r}/{c}", node.id)) { continue; }
                    let cell = node.table.cell_mut(r, c).unwrap();
                    *cell = replacement;
                    expected.2 += 1;
                }
            }
        }
        let report = net.validate();
        let count = |code: &str| report.errors().filter(|v| v.code == code).count();
        prop_assert_eq!(count("dangling-anchor"), expected.0);
        prop_assert_eq!(count("cell-out-of-bounds"), expected.1);
        prop_assert_eq!(count("table"), expected.2);
    }
}
