//! Interaction actions: what double-clicking a node or cell spawns.
//!
//! Handlers are pure functions of the source node and the event params.
//! Actions backed by a remote database get their records fetched by
//! [`prefetch`] before the interaction and stored in the params, so replay
//! never touches the network.

use combine_analysis::{
    calc_properties, chord_pairs, fingerprint, hcluster, heatmap_normalize, parse_smiles, similarity_matrix, tanimoto,
    Fingerprint, Linkage,
};
use combine_core::{
    ActionInput, ActionOutput, ActionRegistry, Alphabet, Anchor, CellValue, Column, ColumnKind, DataTable,
    KnowledgeNetwork, MetadataMap,
};
use combine_datasource::pdb::{image_url, is_pdb_id};
use combine_datasource::{ActivityRecord, CompoundRecord, Sources, TargetRecord, XrefRecord, DEFAULT_PCHEMBL_MIN};
use combine_grna::{design, parse_fasta, DnaSequence, Pam, SiteOptions};

use crate::error::ApiResult;

/// Param holding prefetched remote records as JSON.
pub const RECORDS: &str = "records";
pub const DEFAULT_CHORD_THRESHOLD: f64 = 0.8;
pub const DEFAULT_SIMILARITY_CUTOFF: u32 = 90;

type HandlerResult = Result<ActionOutput, String>;

/// Actions whose handlers read [`RECORDS`].
pub const REMOTE_ACTIONS: &[&str] = &["activities", "open-uniprot", "similar-compounds", "xrefs"];

pub fn build_registry(pdb_image_base: &str, default_linkage: Linkage) -> ActionRegistry {
    let mut reg = ActionRegistry::new();
    let image_base = pdb_image_base.to_string();
    let add = |reg: &mut ActionRegistry, name: &str, f: fn(&ActionInput<'_>) -> HandlerResult| {
        reg.register(name, f).expect("action names are not reserved");
    };
    reg.register("open-pdb-image", move |input| open_pdb_image(input, &image_base))
        .expect("action names are not reserved");
    reg.register("cluster", move |input| cluster(input, default_linkage))
        .expect("action names are not reserved");
    add(&mut reg, "properties", properties);
    add(&mut reg, "heatmap", heatmap);
    add(&mut reg, "similarity-chords", similarity_chords);
    add(&mut reg, "design-grna", design_grna);
    add(&mut reg, "open-uniprot", open_uniprot);
    add(&mut reg, "activities", activities);
    add(&mut reg, "similar-compounds", similar_compounds);
    add(&mut reg, "xrefs", xrefs);
    reg
}

/// Fetches the records a remote action needs unless the caller already
/// supplied them.
pub fn prefetch(
    net: &KnowledgeNetwork,
    anchor: &Anchor,
    action: &str,
    mut params: MetadataMap,
    sources: &Sources,
) -> ApiResult<MetadataMap> {
    if !REMOTE_ACTIONS.contains(&action) || params.contains_key(RECORDS) {
        return Ok(params);
    }
    // Bad anchors are reported by the interaction itself.
    let Some(cell) = net.node(anchor.node_id()).and_then(|n| n.anchored_cell(anchor)) else {
        return Ok(params);
    };
    let Some(key) = cell_key(cell) else {
        return Ok(params);
    };
    let json = match action {
        "activities" => {
            let min = match params.get("pchembl_min") {
                Some(v) => v.parse::<f64>().map_err(|_| {
                    crate::error::ApiError::bad_request(format!("pchembl_min {v:?} is not a number"))
                })?,
                None => DEFAULT_PCHEMBL_MIN,
            };
            to_json(&sources.chembl.fetch_activities(key, min)?)
        }
        "open-uniprot" => to_json(&sources.uniprot.fetch(key)?),
        "similar-compounds" => {
            let cutoff = match params.get("cutoff") {
                Some(v) => v
                    .parse::<u32>()
                    .map_err(|_| crate::error::ApiError::bad_request(format!("cutoff {v:?} is not an integer")))?,
                None => DEFAULT_SIMILARITY_CUTOFF,
            };
            to_json(&sources.chembl.similarity_search(key, cutoff)?)
        }
        "xrefs" => to_json(&sources.unichem.xrefs(key)?),
        _ => unreachable!("listed in REMOTE_ACTIONS"),
    };
    params.insert(RECORDS.into(), json);
    Ok(params)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records serialize")
}

fn records<T: serde::de::DeserializeOwned>(input: &ActionInput<'_>) -> Result<T, String> {
    let raw = input.param(RECORDS).ok_or("no fetched records in params")?;
    serde_json::from_str(raw).map_err(|e| format!("recorded records unreadable: {e}"))
}

/// The string a cell contributes as a lookup key.
fn cell_key(cell: &CellValue) -> Option<&str> {
    match cell {
        CellValue::Text { value } | CellValue::Identifier { value, .. } | CellValue::Sequence { value, .. } => {
            Some(value.trim())
        }
        CellValue::Structure { smiles } => Some(smiles.trim()),
        _ => None,
    }
}

fn anchored_key<'a>(input: &'a ActionInput<'_>) -> Result<&'a str, String> {
    let cell = input.cell.ok_or("this action needs a cell anchor")?;
    cell_key(cell).filter(|k| !k.is_empty()).ok_or_else(|| "the anchored cell holds no usable value".to_string())
}

/// Parsed structures of the source table (or of the anchored cell), with
/// their row numbers.
fn structures(input: &ActionInput<'_>) -> Result<Vec<(usize, String, Fingerprint)>, String> {
    let cells: Vec<(usize, &str)> = match (input.anchor, input.cell) {
        (Anchor::Cell { row, .. }, Some(CellValue::Structure { smiles })) => vec![(*row, smiles.as_str())],
        _ => {
            let table = &input.source.table;
            let col = table
                .columns
                .iter()
                .position(|c| c.kind == ColumnKind::Structure)
                .ok_or("source table has no structure column")?;
            (0..table.row_count())
                .filter_map(|r| match table.cell(r, col) {
                    Some(CellValue::Structure { smiles }) => Some((r, smiles.as_str())),
                    _ => None,
                })
                .collect()
        }
    };
    if cells.is_empty() {
        return Err("no structures to analyse".into());
    }
    cells
        .into_iter()
        .map(|(r, s)| {
            let m = parse_smiles(s).map_err(|e| format!("row {r}: {e}"))?;
            Ok((r, s.to_string(), fingerprint(&m)))
        })
        .collect()
}

fn num(v: f64) -> CellValue {
    CellValue::number(v)
}

fn opt_num(v: Option<f64>) -> CellValue {
    v.map_or(CellValue::Null, CellValue::number)
}

fn opt_text(v: Option<&str>) -> CellValue {
    v.map_or(CellValue::Null, CellValue::text)
}

fn table(columns: &[(&str, ColumnKind)]) -> DataTable {
    DataTable::new(columns.iter().map(|(n, k)| Column::new(*n, *k)).collect())
}

fn open_pdb_image(input: &ActionInput<'_>, image_base: &str) -> HandlerResult {
    let id = anchored_key(input)?.to_ascii_uppercase();
    if !is_pdb_id(&id) {
        return Err(format!("{id:?} is not a PDB id"));
    }
    let url = image_url(image_base, &id);
    let t = table(&[("pdb_id", ColumnKind::Identifier), ("image", ColumnKind::RemoteRef)])
        .with_row(vec![CellValue::identifier("pdb", &id), CellValue::lazy_ref(&url, "image/jpeg")]);
    Ok(ActionOutput::new("image", id, t).with_meta("source_url", url))
}

fn cluster(input: &ActionInput<'_>, default: Linkage) -> HandlerResult {
    let linkage = match input.param("linkage") {
        Some(l) => l.parse::<Linkage>().map_err(|e| e.to_string())?,
        None => default,
    };
    let items = structures(input)?;
    let fps: Vec<Fingerprint> = items.iter().map(|(_, _, f)| f.clone()).collect();
    let d = similarity_matrix(&fps).map_err(|e| e.to_string())?;
    let dendro = hcluster(&d, linkage).map_err(|e| e.to_string())?;
    let mut t = table(&[
        ("cluster", ColumnKind::Number),
        ("left", ColumnKind::Number),
        ("right", ColumnKind::Number),
        ("height", ColumnKind::Number),
        ("size", ColumnKind::Number),
    ]);
    for m in &dendro.merges {
        t.rows.push(vec![num(m.id as f64), num(m.a as f64), num(m.b as f64), num(m.height), num(m.size as f64)]);
    }
    let rows: Vec<String> = items.iter().map(|(r, _, _)| r.to_string()).collect();
    let order: Vec<String> = dendro.leaf_order().iter().map(|&i| items[i].0.to_string()).collect();
    Ok(ActionOutput::new("dendrogram", format!("clusters of {}", input.source.title), t)
        .with_meta("linkage", linkage_name(linkage))
        .with_meta("leaf_rows", rows.join(","))
        .with_meta("leaf_order", order.join(",")))
}

pub fn linkage_name(l: Linkage) -> &'static str {
    match l {
        Linkage::Single => "single",
        Linkage::Complete => "complete",
        Linkage::Average => "average",
    }
}

fn properties(input: &ActionInput<'_>) -> HandlerResult {
    let mut t = table(&[
        ("row", ColumnKind::Number),
        ("smiles", ColumnKind::Structure),
        ("molecular_weight", ColumnKind::Number),
        ("heavy_atoms", ColumnKind::Number),
        ("ring_bonds", ColumnKind::Number),
        ("n_plus_o", ColumnKind::Number),
        ("nh_plus_oh", ColumnKind::Number),
    ]);
    for (r, smiles, _) in structures(input)? {
        let m = parse_smiles(&smiles).map_err(|e| format!("row {r}: {e}"))?;
        let p = calc_properties(&m).map_err(|e| format!("row {r}: {e}"))?;
        t.rows.push(vec![
            num(r as f64),
            CellValue::structure(smiles),
            num(p.molecular_weight),
            num(p.heavy_atoms as f64),
            num(p.ring_bonds as f64),
            num(p.n_plus_o as f64),
            num(p.nh_plus_oh as f64),
        ]);
    }
    Ok(ActionOutput::new("property-table", format!("properties of {}", input.source.title), t))
}

fn heatmap(input: &ActionInput<'_>) -> HandlerResult {
    let src = &input.source.table;
    let numeric: Vec<usize> = (0..src.column_count()).filter(|&c| src.columns[c].kind == ColumnKind::Number).collect();
    if numeric.is_empty() {
        return Err("source table has no numeric columns".into());
    }
    let label = (0..src.column_count()).find(|&c| {
        matches!(src.columns[c].kind, ColumnKind::Text | ColumnKind::Identifier | ColumnKind::Structure)
    });
    let columns: Vec<Vec<Option<f64>>> = numeric
        .iter()
        .map(|&c| (0..src.row_count()).map(|r| src.cell(r, c).and_then(CellValue::as_number)).collect())
        .collect();
    let scaled = heatmap_normalize(&columns).map_err(|e| e.to_string())?;
    let mut cols: Vec<Column> = label.iter().map(|&c| src.columns[c].clone()).collect();
    cols.extend(numeric.iter().map(|&c| Column::new(src.columns[c].name.clone(), ColumnKind::Number)));
    let mut t = DataTable::new(cols);
    for r in 0..src.row_count() {
        let mut row: Vec<CellValue> = label.iter().map(|&c| src.cell(r, c).cloned().unwrap_or(CellValue::Null)).collect();
        row.extend(scaled.iter().map(|col| opt_num(col[r])));
        t.rows.push(row);
    }
    Ok(ActionOutput::new("heatmap", format!("heatmap of {}", input.source.title), t)
        .with_meta("ramp", "red-yellow-green"))
}

fn similarity_chords(input: &ActionInput<'_>) -> HandlerResult {
    let threshold = match input.param("threshold") {
        Some(v) => v.parse::<f64>().map_err(|_| format!("threshold {v:?} is not a number"))?,
        None => DEFAULT_CHORD_THRESHOLD,
    };
    let items = structures(input)?;
    let fps: Vec<Fingerprint> = items.iter().map(|(_, _, f)| f.clone()).collect();
    let pairs = chord_pairs(&fps, threshold).map_err(|e| e.to_string())?;
    let mut t = table(&[("source", ColumnKind::Number), ("target", ColumnKind::Number), ("tanimoto", ColumnKind::Number)]);
    for (i, j) in pairs {
        let s = tanimoto(&fps[i], &fps[j]).map_err(|e| e.to_string())?;
        t.rows.push(vec![num(items[i].0 as f64), num(items[j].0 as f64), num(s)]);
    }
    Ok(ActionOutput::new("chord-diagram", format!("similar pairs in {}", input.source.title), t)
        .with_meta("threshold", threshold.to_string()))
}

fn design_grna(input: &ActionInput<'_>) -> HandlerResult {
    let query = DnaSequence::new(input.source.title.clone(), anchored_key(input)?).map_err(|e| e.to_string())?;
    let reference = input.param("reference").ok_or("param \"reference\" (FASTA) is required")?;
    let refs = parse_fasta(reference).map_err(|e| format!("reference: {e}"))?;
    let mut opts = SiteOptions::default();
    if let Some(p) = input.param("pam") {
        opts.pam = p.parse::<Pam>().map_err(|e| e.to_string())?;
    }
    let reports = design(&query, &refs, &opts).map_err(|e| e.to_string())?;
    let mut t = table(&[
        ("position", ColumnKind::Number),
        ("strand", ColumnKind::Text),
        ("site", ColumnKind::Sequence),
        ("gc", ColumnKind::Number),
        ("one_mismatch", ColumnKind::Number),
        ("two_mismatches", ColumnKind::Number),
    ]);
    for r in &reports {
        t.rows.push(vec![
            num(r.site.position as f64),
            CellValue::text(r.site.strand.to_string()),
            CellValue::sequence(Alphabet::Dna, &r.site.sequence),
            num(r.site.gc),
            num(r.one_mismatch as f64),
            num(r.two_mismatches as f64),
        ]);
    }
    Ok(ActionOutput::new("grna-table", format!("gRNA sites of {}", input.source.title), t)
        .with_meta("pam", opts.pam.as_str()))
}

fn open_uniprot(input: &ActionInput<'_>) -> HandlerResult {
    anchored_key(input)?;
    let rec: TargetRecord = records(input)?;
    let t = table(&[
        ("accession", ColumnKind::Identifier),
        ("name", ColumnKind::Text),
        ("organism", ColumnKind::Text),
        ("sequence", ColumnKind::Sequence),
    ])
    .with_row(vec![
        CellValue::identifier("uniprot", &rec.accession),
        CellValue::text(&rec.protein_name),
        CellValue::text(&rec.organism),
        CellValue::sequence(Alphabet::Protein, &rec.sequence),
    ]);
    Ok(ActionOutput::new("sequence-viewer", rec.accession.clone(), t))
}

fn activities(input: &ActionInput<'_>) -> HandlerResult {
    let id = anchored_key(input)?;
    let recs: Vec<ActivityRecord> = records(input)?;
    let mut t = table(&[
        ("assay", ColumnKind::Identifier),
        ("target", ColumnKind::Identifier),
        ("type", ColumnKind::Text),
        ("value", ColumnKind::Number),
        ("unit", ColumnKind::Text),
        ("pchembl", ColumnKind::Number),
    ]);
    for a in &recs {
        t.rows.push(vec![
            CellValue::identifier("chembl", &a.assay_id),
            CellValue::identifier("chembl", &a.target_id),
            CellValue::text(&a.activity_type),
            opt_num(a.value),
            opt_text(a.unit.as_deref()),
            opt_num(a.pchembl),
        ]);
    }
    let mut out = ActionOutput::new("activity-table", format!("activities of {id}"), t);
    if let Some(min) = input.param("pchembl_min") {
        out = out.with_meta("pchembl_min", min);
    }
    Ok(out)
}

fn similar_compounds(input: &ActionInput<'_>) -> HandlerResult {
    anchored_key(input)?;
    let recs: Vec<CompoundRecord> = records(input)?;
    let mut t = table(&[
        ("chembl_id", ColumnKind::Identifier),
        ("smiles", ColumnKind::Structure),
        ("name", ColumnKind::Text),
        ("similarity", ColumnKind::Number),
    ]);
    for c in &recs {
        t.rows.push(vec![
            CellValue::identifier("chembl", &c.chembl_id),
            c.smiles.as_deref().map_or(CellValue::Null, CellValue::structure),
            opt_text(c.name.as_deref()),
            opt_num(c.similarity),
        ]);
    }
    Ok(ActionOutput::new("structure-table", format!("compounds similar to {}", input.source.title), t))
}

fn xrefs(input: &ActionInput<'_>) -> HandlerResult {
    let key = anchored_key(input)?;
    let recs: Vec<XrefRecord> = records(input)?;
    let mut t = table(&[("source", ColumnKind::Text), ("compound", ColumnKind::Identifier)]);
    for x in &recs {
        t.rows.push(vec![CellValue::text(&x.source_name), CellValue::identifier(x.source_name.to_lowercase(), &x.compound_id)]);
    }
    Ok(ActionOutput::new("xref-table", format!("cross-references of {key}"), t))
}
