//! Recorded request/response pairs, one JSON document per request.
//!
//! A document holds the request descriptor, the status and the body as
//! `body` (UTF-8 text), `body_json` (embedded JSON, serialized with sorted
//! keys) or `body_base64`. Files are named `<descriptor hash>.json`, but
//! lookup goes by the descriptor inside each file.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};
use crate::request::{Request, Response};
use crate::transport::Transport;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureDoc {
    pub request: String,
    pub status: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_json: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_base64: Option<String>,
    /// Free-form provenance note.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FixtureDoc {
    pub fn from_response(req: &Request, resp: &Response) -> Self {
        let (body, body_base64) = match std::str::from_utf8(&resp.body) {
            Ok(s) => (Some(s.to_string()), None),
            Err(_) => (None, Some(base64::engine::general_purpose::STANDARD.encode(&resp.body))),
        };
        FixtureDoc {
            request: req.descriptor(),
            status: resp.status,
            content_type: None,
            body,
            body_json: None,
            body_base64,
            note: None,
        }
    }

    pub fn response(&self) -> Result<Response> {
        let body = match (&self.body, &self.body_json, &self.body_base64) {
            (Some(s), None, None) => s.clone().into_bytes(),
            (None, Some(v), None) => serde_json::to_vec(v).expect("JSON values serialize"),
            (None, None, Some(b)) => base64::engine::general_purpose::STANDARD
                .decode(b)
                .map_err(|e| DataError::Fixture(format!("{}: bad base64: {e}", self.request)))?,
            (None, None, None) => Vec::new(),
            _ => return Err(DataError::Fixture(format!("{}: more than one body field", self.request))),
        };
        Ok(Response { status: self.status, body })
    }

    /// The request the descriptor names.
    pub fn parsed_request(&self) -> Result<Request> {
        match self.request.split_once(' ') {
            Some(("GET", url)) => Request::get(url),
            _ => Err(DataError::Fixture(format!("unsupported descriptor {:?}", self.request))),
        }
    }
}

/// Read-only fixture lookup; unrecorded requests are errors.
pub struct FixtureStore {
    dir: PathBuf,
    entries: HashMap<String, FixtureDoc>,
}

impl FixtureStore {
    /// Loads every `*.json` document under `dir`. A missing directory is an
    /// empty store.
    pub fn open(dir: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        for (path, doc) in read_docs(dir)? {
            let key = doc.parsed_request()?.key();
            if entries.insert(key, doc).is_some() {
                return Err(DataError::Fixture(format!("{} repeats an earlier request", path.display())));
            }
        }
        Ok(FixtureStore { dir: dir.to_path_buf(), entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn lookup(&self, req: &Request) -> Result<Response> {
        self.entries
            .get(&req.key())
            .ok_or_else(|| DataError::UnrecordedFixture(req.descriptor()))?
            .response()
    }
}

impl Transport for FixtureStore {
    fn execute(&self, req: &Request) -> Result<Response> {
        self.lookup(req)
    }
}

fn read_docs(dir: &Path) -> Result<Vec<(PathBuf, FixtureDoc)>> {
    let io = |e: std::io::Error| DataError::Fixture(format!("{}: {e}", dir.display()));
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(io)?;
            let doc = serde_json::from_str(&text)
                .map_err(|e| DataError::Fixture(format!("{}: {e}", p.display())))?;
            Ok((p, doc))
        })
        .collect()
}

/// Problems found by [`verify_dir`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureIssue {
    pub file: PathBuf,
    pub message: String,
}

/// Checks that every document parses, decodes, and sits in the file named
/// after its descriptor hash. With `fix`, misnamed files are renamed.
pub fn verify_dir(dir: &Path, fix: bool) -> Result<Vec<FixtureIssue>> {
    let mut issues = Vec::new();
    for (path, doc) in read_docs(dir)? {
        let req = match doc.parsed_request() {
            Ok(r) => r,
            Err(e) => {
                issues.push(FixtureIssue { file: path, message: e.to_string() });
                continue;
            }
        };
        if let Err(e) = doc.response() {
            issues.push(FixtureIssue { file: path.clone(), message: e.to_string() });
        }
        let expected = dir.join(format!("{}.json", req.key()));
        if path != expected {
            if fix {
                std::fs::rename(&path, &expected).map_err(|e| DataError::Fixture(e.to_string()))?;
            } else {
                issues.push(FixtureIssue {
                    file: path,
                    message: format!("should be named {}", expected.file_name().unwrap().to_string_lossy()),
                });
            }
        }
    }
    Ok(issues)
}

/// Forwards to another transport and writes each exchange as a fixture.
pub struct RecordingTransport<T> {
    inner: T,
    dir: PathBuf,
    written: Mutex<Vec<PathBuf>>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn new(inner: T, dir: impl Into<PathBuf>) -> Self {
        RecordingTransport { inner, dir: dir.into(), written: Mutex::new(Vec::new()) }
    }

    pub fn written(&self) -> Vec<PathBuf> {
        self.written.lock().unwrap().clone()
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn execute(&self, req: &Request) -> Result<Response> {
        let resp = self.inner.execute(req)?;
        let doc = FixtureDoc::from_response(req, &resp);
        let path = self.dir.join(format!("{}.json", req.key()));
        let write = || -> std::io::Result<()> {
            std::fs::create_dir_all(&self.dir)?;
            std::fs::write(&path, serde_json::to_string_pretty(&doc).expect("fixtures serialize"))
        };
        write().map_err(|e| DataError::Fixture(format!("{}: {e}", path.display())))?;
        self.written.lock().unwrap().push(path);
        Ok(resp)
    }
}
