#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use combine_core::{CellValue, Column, ColumnKind, DataTable};
use combine_datasource::{bundled_fixtures_dir, Config, FailingTransport, HttpClient};
use combine_service::{router, AppState, ServerConfig, SharedState};
use http_body_util::BodyExt;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

pub struct TestApp {
    pub router: Router,
    pub state: SharedState,
    /// Counts live calls; offline mode must leave it at zero.
    pub live: Arc<FailingTransport>,
    pub dir: TempDir,
}

pub fn app() -> TestApp {
    let dir = tempfile::tempdir().unwrap();
    let (router, state, live) = app_at(dir.path());
    TestApp { router, state, live, dir }
}

pub fn app_at(path: &Path) -> (Router, SharedState, Arc<FailingTransport>) {
    let sources = Config::offline(bundled_fixtures_dir());
    let config = ServerConfig::new(path, sources.clone());
    let live = Arc::new(FailingTransport::new());
    let http = Arc::new(HttpClient::from_config_with(&sources, live.clone()).unwrap());
    let (state, _) = AppState::open(config, http).unwrap();
    let state = Arc::new(state);
    (router(state.clone()), state, live)
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn code(&self) -> String {
        self.json()["code"].as_str().unwrap_or_default().to_string()
    }
}

pub async fn call(router: &Router, method: Method, uri: &str, body: Option<&Value>) -> Reply {
    let body = match body {
        Some(v) => Body::from(serde_json::to_vec(v).unwrap()),
        None => Body::empty(),
    };
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body)
        .unwrap();
    let resp = router.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp.headers().get("content-type").map(|v| v.to_str().unwrap().to_string());
    let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, content_type, body }
}

pub async fn get(router: &Router, uri: &str) -> Reply {
    call(router, Method::GET, uri, None).await
}

pub async fn post(router: &Router, uri: &str, body: &Value) -> Reply {
    call(router, Method::POST, uri, Some(body)).await
}

/// Four compounds with an identifier, a structure and a numeric column.
pub fn compounds() -> DataTable {
    let mut t = DataTable::new(vec![
        Column::new("id", ColumnKind::Identifier),
        Column::new("smiles", ColumnKind::Structure),
        Column::new("pic50", ColumnKind::Number),
    ]);
    let rows = [
        ("CHEMBL25", "CC(=O)Oc1ccccc1C(=O)O", 7.1),
        ("CHEMBL277500", "c1ccccc1", 5.0),
        ("CHEMBL9113", "Cc1ccccc1", 6.5),
        ("CHEMBL545", "CCO", 4.0),
    ];
    for (id, smiles, p) in rows {
        t.rows.push(vec![
            CellValue::identifier("chembl", id),
            CellValue::structure(smiles),
            CellValue::number(p),
        ]);
    }
    t
}

pub fn node_body(table: &DataTable) -> Value {
    serde_json::json!({ "kind": "structure-table", "title": "compounds", "table": table })
}

/// Small graph as edge-list text: a ring of `n` nodes with chords.
pub fn ring_edges(n: usize) -> String {
    let mut s = String::new();
    for i in 0..n {
        s.push_str(&format!("{} {}\n", i, (i + 1) % n));
        if i % 3 == 0 {
            s.push_str(&format!("{} {} 2.5\n", i, (i + n / 2) % n));
        }
    }
    s
}
