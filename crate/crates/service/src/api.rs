//! REST endpoints.
//!
//! JSON bodies are written in the canonical form used for network
//! documents (sorted keys, shortest round-trip floats). Blocking work runs
//! on the blocking pool; mutations of one network are serialized by the
//! store.

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use combine_core::{canonical, replay_check, Anchor, DataTable, MetadataMap};
use combine_datasource::{HttpClient, Sources, DEFAULT_PCHEMBL_MIN};
use combine_tiles::{TileCoord, Viewport, MAX_ZOOM, TILE_SIZE};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::actions::{build_registry, linkage_name, prefetch, DEFAULT_SIMILARITY_CUTOFF};
use crate::config::{ServerConfig, DEFAULT_PAGE_LIMIT, MAX_PAGE_LIMIT};
use crate::error::{ApiError, ApiResult, ErrorCode};
use crate::grna_run::{self, GrnaRequest};
use crate::pyramids::{BuildRequest, PyramidStore};
use crate::store::{NetworkStore, Recovery};

pub struct AppState {
    pub config: ServerConfig,
    pub networks: NetworkStore,
    pub pyramids: PyramidStore,
    pub sources: Sources,
}

pub type SharedState = Arc<AppState>;

impl AppState {
    /// Opens the data directory, recovering stored networks.
    pub fn open(config: ServerConfig, http: Arc<HttpClient>) -> ApiResult<(Self, Vec<Recovery>)> {
        let problems = config.validate();
        if !problems.is_empty() {
            return Err(ApiError::new(ErrorCode::ValidationFailed, "invalid configuration")
                .with("problems", problems));
        }
        let registry = Arc::new(build_registry(&config.sources.pdb_image_base, config.default_linkage));
        let (networks, recoveries) = NetworkStore::open(&config.data_dir, registry)?;
        let pyramids = PyramidStore::open(&config.data_dir, config.tile_cache_size)?;
        let sources = Sources::with_client(&config.sources, http);
        Ok((AppState { config, networks, pyramids, sources }, recoveries))
    }
}

pub fn json_response<T: Serialize + ?Sized>(status: StatusCode, value: &T) -> Response {
    let body = canonical::to_canonical_string(value);
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok<T: Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, value)
}

fn created<T: Serialize>(value: &T) -> Response {
    json_response(StatusCode::CREATED, value)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

fn parse_body<T: DeserializeOwned>(bytes: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| {
        ApiError::bad_request(format!("request body: {e}")).with("line", e.line()).with("column", e.column())
    })
}

type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn params(q: Params) -> ApiResult<HashMap<String, String>> {
    q.map(|Query(m)| m).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn required<'a>(q: &'a HashMap<String, String>, key: &str) -> ApiResult<&'a str> {
    q.get(key)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("query parameter {key:?} is required")))
}

fn parsed<T: std::str::FromStr>(q: &HashMap<String, String>, key: &str) -> ApiResult<Option<T>> {
    q.get(key)
        .map(|v| v.parse::<T>().map_err(|_| ApiError::bad_request(format!("query parameter {key}={v:?} is malformed"))))
        .transpose()
}

fn page(q: &HashMap<String, String>) -> ApiResult<(usize, usize)> {
    let offset = parsed(q, "offset")?.unwrap_or(0);
    let limit: usize = parsed(q, "limit")?.unwrap_or(DEFAULT_PAGE_LIMIT);
    if limit == 0 || limit > MAX_PAGE_LIMIT {
        return Err(ApiError::bad_request(format!("limit must be in 1..={MAX_PAGE_LIMIT}")));
    }
    Ok((offset, limit))
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/health", get(|| async { ok(&json!({"status": "ok"})) }))
        .route("/config", get(config_info))
        .route("/networks", post(create_network).get(list_networks))
        .route("/networks/import", post(import_network))
        .route("/networks/{id}", get(get_network).delete(delete_network))
        .route("/networks/{id}/nodes", post(add_node))
        .route("/networks/{id}/nodes/{node}", axum::routing::delete(delete_node))
        .route("/networks/{id}/nodes/{node}/position", post(move_node))
        .route("/networks/{id}/interact", post(interact))
        .route("/networks/{id}/edges", post(add_edge))
        .route("/networks/{id}/edges/{edge}", axum::routing::delete(delete_edge))
        .route("/networks/{id}/annotate", post(annotate))
        .route("/networks/{id}/events", get(events))
        .route("/networks/{id}/replay-check", post(replay_check_handler))
        .route("/pyramids", post(build_pyramid).get(list_pyramids))
        .route("/pyramids/{id}/manifest", get(manifest))
        .route("/pyramids/{id}/viewport", get(viewport))
        .route("/pyramids/{id}/tiles/{z}/{x}/{y}", get(tile))
        .route("/datasource/chembl/similarity", get(chembl_similarity))
        .route("/datasource/chembl/activities", get(chembl_activities))
        .route("/datasource/unichem/{inchikey}", get(unichem))
        .route("/datasource/uniprot/{accession}", get(uniprot))
        .route("/datasource/pdb/{id}", get(pdb))
        .route("/grna", post(grna))
        .fallback(|| async { ApiError::new(ErrorCode::RouteNotFound, "no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(ErrorCode::MethodNotAllowed, "method not allowed on this endpoint")
        })
        .with_state(state)
}

async fn config_info(State(s): State<SharedState>) -> Response {
    let c = &s.config;
    ok(&json!({
        "lod_threshold": c.lod_threshold,
        "tile_size": TILE_SIZE,
        "max_zoom": MAX_ZOOM,
        "offline": c.sources.offline,
        "default_linkage": linkage_name(c.default_linkage),
        "actions": s.networks.registry().names().collect::<Vec<_>>(),
    }))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CreateNetwork {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    annotation: String,
}

async fn create_network(State(s): State<SharedState>, body: Bytes) -> ApiResult<Response> {
    let req: CreateNetwork = if body.iter().all(u8::is_ascii_whitespace) { CreateNetwork::default() } else { parse_body(&body)? };
    let id = blocking(move || s.networks.create(req.id, &req.annotation)).await?;
    Ok(created(&json!({ "id": id })))
}

async fn import_network(State(s): State<SharedState>, body: Bytes) -> ApiResult<Response> {
    let id = blocking(move || s.networks.import(&body)).await?;
    Ok(created(&json!({ "id": id })))
}

async fn list_networks(State(s): State<SharedState>, q: Params) -> ApiResult<Response> {
    let (offset, limit) = page(&params(q)?)?;
    let (total, items) = blocking(move || Ok(s.networks.list(offset, limit))).await?;
    Ok(ok(&json!({ "total": total, "offset": offset, "limit": limit, "networks": items })))
}

async fn get_network(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    let bytes = blocking(move || s.networks.document(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn delete_network(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    blocking(move || s.networks.delete(&id)).await?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AddNode {
    kind: String,
    title: String,
    #[serde(default)]
    table: DataTable,
    #[serde(default)]
    metadata: MetadataMap,
}

async fn add_node(State(s): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let req: AddNode = parse_body(&body)?;
    let (node, seq) = blocking(move || {
        s.networks.mutate(&id, |net, _| {
            let node = net.create_node_with_metadata(&req.kind, &req.title, req.table, req.metadata)?;
            Ok((node, net.last_seq()))
        })
    })
    .await?;
    Ok(created(&json!({ "node": node, "seq": seq })))
}

async fn delete_node(State(s): State<SharedState>, Path((id, node)): Path<(String, String)>) -> ApiResult<Response> {
    let seq = blocking(move || s.networks.mutate(&id, |net, _| Ok(net.delete_node(&node).map(|_| net.last_seq())?))).await?;
    Ok(ok(&json!({ "seq": seq })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Position {
    x: f64,
    y: f64,
}

async fn move_node(
    State(s): State<SharedState>,
    Path((id, node)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Response> {
    let p: Position = parse_body(&body)?;
    let seq =
        blocking(move || s.networks.mutate(&id, |net, _| Ok(net.move_node(&node, p.x, p.y).map(|_| net.last_seq())?)))
            .await?;
    Ok(ok(&json!({ "seq": seq })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Interact {
    anchor: Anchor,
    action: String,
    #[serde(default)]
    params: MetadataMap,
}

async fn interact(State(s): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let req: Interact = parse_body(&body)?;
    let state = s.clone();
    let out = blocking(move || {
        state.networks.mutate(&id, |net, reg| {
            if !reg.contains(&req.action) {
                return Err(combine_core::CoreError::UnknownAction(req.action.clone()).into());
            }
            net.check_anchor(&req.anchor)?;
            let params = prefetch(net, &req.anchor, &req.action, req.params, &state.sources)?;
            let (node, edge) = net.interact(reg, req.anchor, &req.action, params)?;
            Ok(json!({ "node": net.nodes[&node], "edge": net.edges[&edge], "seq": net.last_seq() }))
        })
    })
    .await?;
    Ok(created(&out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AddEdge {
    source: Anchor,
    target: Anchor,
    #[serde(default)]
    annotation: String,
    #[serde(default = "yes")]
    directed: bool,
}

fn yes() -> bool {
    true
}

async fn add_edge(State(s): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let req: AddEdge = parse_body(&body)?;
    let (edge, seq) = blocking(move || {
        s.networks.mutate(&id, |net, _| {
            let e = net.add_reference_edge_with(req.source, req.target, &req.annotation, req.directed)?;
            Ok((e, net.last_seq()))
        })
    })
    .await?;
    Ok(created(&json!({ "edge": edge, "seq": seq })))
}

async fn delete_edge(State(s): State<SharedState>, Path((id, edge)): Path<(String, String)>) -> ApiResult<Response> {
    let seq = blocking(move || s.networks.mutate(&id, |net, _| Ok(net.delete_edge(&edge).map(|_| net.last_seq())?))).await?;
    Ok(ok(&json!({ "seq": seq })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Annotate {
    target: String,
    text: String,
}

async fn annotate(State(s): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let req: Annotate = parse_body(&body)?;
    let seq =
        blocking(move || s.networks.mutate(&id, |net, _| Ok(net.annotate(&req.target, &req.text).map(|_| net.last_seq())?)))
            .await?;
    Ok(ok(&json!({ "seq": seq })))
}

/// Events after the `after` cursor (a seq), paged by offset and limit.
async fn events(State(s): State<SharedState>, Path(id): Path<String>, q: Params) -> ApiResult<Response> {
    let q = params(q)?;
    let (offset, limit) = page(&q)?;
    let after: u64 = parsed(&q, "after")?.unwrap_or(0);
    let body = blocking(move || {
        s.networks.read(&id, |net| {
            let tail: Vec<_> = net.events.iter().filter(|e| e.seq > after).collect();
            let items: Vec<_> = tail.iter().skip(offset).take(limit).collect();
            json!({
                "total": tail.len(),
                "offset": offset,
                "limit": limit,
                "last_seq": net.last_seq(),
                "events": items,
            })
        })
    })
    .await?;
    Ok(ok(&body))
}

async fn replay_check_handler(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    let check = blocking(move || {
        let net = s.networks.get(&id)?;
        let net = net.lock().unwrap().clone();
        Ok(replay_check(&net, s.networks.registry())?)
    })
    .await?;
    Ok(ok(&json!({
        "verdict": if check.equal { "equal" } else { "different" },
        "original_bytes": check.original_len,
        "replayed_bytes": check.replayed_len,
        "first_difference": check.first_difference,
    })))
}

async fn build_pyramid(State(s): State<SharedState>, body: Bytes) -> ApiResult<Response> {
    let req: BuildRequest = parse_body(&body)?;
    let m = blocking(move || s.pyramids.build(&req)).await?;
    Ok(created(&json!({ "id": m.id, "manifest": m })))
}

async fn list_pyramids(State(s): State<SharedState>) -> Response {
    ok(&json!({ "pyramids": s.pyramids.ids() }))
}

async fn manifest(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    Ok(ok(&s.pyramids.manifest(&id)?))
}

fn coord(part: &str, what: &str) -> ApiResult<u64> {
    part.parse::<u64>().map_err(|_| ApiError::bad_request(format!("tile {what} {part:?} is not a number")))
}

async fn tile(
    State(s): State<SharedState>,
    Path((id, z, x, y)): Path<(String, String, String, String)>,
) -> ApiResult<Response> {
    let y = y
        .strip_suffix(".png")
        .ok_or_else(|| ApiError::new(ErrorCode::RouteNotFound, "tile paths end in .png"))?;
    let (z, x, y) = (coord(&z, "z")?, coord(&x, "x")?, coord(y, "y")?);
    let max = u32::MAX as u64;
    if z > MAX_ZOOM as u64 || x > max || y > max {
        return Err(ApiError::new(ErrorCode::TileOutOfRange, format!("tile {z}/{x}/{y} is outside zoom 0..={MAX_ZOOM}"))
            .with("z", z)
            .with("x", x)
            .with("y", y));
    }
    let c = TileCoord::new(z as u8, x as u32, y as u32);
    let bytes = blocking(move || s.pyramids.tile(&id, c)).await?;
    Ok((
        [(header::CONTENT_TYPE, "image/png"), (header::CACHE_CONTROL, "public, max-age=31536000, immutable")],
        Body::from(bytes.as_ref().clone()),
    )
        .into_response())
}

async fn viewport(State(s): State<SharedState>, Path(id): Path<String>, q: Params) -> ApiResult<Response> {
    let q = params(q)?;
    let num = |k: &str| -> ApiResult<f64> {
        parsed::<f64>(&q, k)?.ok_or_else(|| ApiError::bad_request(format!("query parameter {k:?} is required")))
    };
    let vp = Viewport {
        center: (num("cx")?, num("cy")?),
        width: parsed(&q, "width")?.unwrap_or(TILE_SIZE),
        height: parsed(&q, "height")?.unwrap_or(TILE_SIZE),
        z: parsed(&q, "z")?.unwrap_or(0),
    };
    let tiles = s.pyramids.viewport(&id, &vp)?;
    Ok(ok(&json!({ "tiles": tiles })))
}

async fn chembl_similarity(State(s): State<SharedState>, q: Params) -> ApiResult<Response> {
    let q = params(q)?;
    let smiles = required(&q, "smiles")?.to_string();
    let cutoff = parsed(&q, "cutoff")?.unwrap_or(DEFAULT_SIMILARITY_CUTOFF);
    let hits = blocking(move || Ok(s.sources.chembl.similarity_search(&smiles, cutoff)?)).await?;
    Ok(ok(&json!({ "compounds": hits })))
}

async fn chembl_activities(State(s): State<SharedState>, q: Params) -> ApiResult<Response> {
    let q = params(q)?;
    let id = required(&q, "id")?.to_string();
    let min = parsed(&q, "pchembl_min")?.unwrap_or(DEFAULT_PCHEMBL_MIN);
    let acts = blocking(move || Ok(s.sources.chembl.fetch_activities(&id, min)?)).await?;
    let targets = combine_datasource::active_targets(&acts);
    Ok(ok(&json!({ "pchembl_min": min, "activities": acts, "targets": targets })))
}

async fn unichem(State(s): State<SharedState>, Path(key): Path<String>) -> ApiResult<Response> {
    let refs = blocking(move || Ok(s.sources.unichem.xrefs(&key)?)).await?;
    Ok(ok(&json!({ "xrefs": refs })))
}

async fn uniprot(State(s): State<SharedState>, Path(acc): Path<String>) -> ApiResult<Response> {
    let rec = blocking(move || Ok(s.sources.uniprot.fetch(&acc)?)).await?;
    Ok(ok(&rec))
}

async fn pdb(State(s): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    let entry = blocking(move || Ok(s.sources.pdb.fetch(&id)?)).await?;
    Ok(ok(&entry))
}

async fn grna(body: Bytes) -> ApiResult<Response> {
    let req: GrnaRequest = parse_body(&body)?;
    let resp = blocking(move || grna_run::run(&req)).await?;
    Ok(ok(&resp))
}

/// Binds and serves until interrupted.
pub async fn serve(state: SharedState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(state.config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
