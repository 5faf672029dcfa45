//! Durable network storage.
//!
//! Each network lives in `networks/<id>/` as an append-only `events.jsonl`
//! log and a `network.combine.json` snapshot. A mutation appends its events
//! to the log (synced) before the snapshot is rewritten, so a crash between
//! the two is repaired on open by replaying the log tail onto the snapshot.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use combine_core::{load, save, ActionRegistry, InteractionEvent, KnowledgeNetwork};
use serde::Serialize;

use crate::error::{ApiError, ApiResult, ErrorCode};

pub const LOG_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "network.combine.json";

pub type Shared = Arc<Mutex<KnowledgeNetwork>>;

pub struct NetworkStore {
    root: PathBuf,
    registry: Arc<ActionRegistry>,
    nets: RwLock<BTreeMap<String, Shared>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkSummary {
    pub id: String,
    pub annotation: String,
    pub nodes: usize,
    pub edges: usize,
    pub events: usize,
}

/// What recovery did for one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    pub id: String,
    pub replayed: usize,
    pub torn_tail: bool,
}

/// Ids double as directory names.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn check_id(id: &str) -> ApiResult<()> {
    if valid_id(id) {
        Ok(())
    } else {
        Err(ApiError::bad_request(format!("network id {id:?} must be 1-64 letters, digits, '-' or '_'")))
    }
}

fn not_found(id: &str) -> ApiError {
    ApiError::new(ErrorCode::NetworkNotFound, format!("no network {id:?}")).with("id", id)
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn append_events(path: &Path, events: &[InteractionEvent]) -> std::io::Result<()> {
    let mut buf = Vec::new();
    for e in events {
        serde_json::to_writer(&mut buf, e).map_err(std::io::Error::other)?;
        buf.push(b'\n');
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&buf)?;
    f.sync_data()
}

/// Complete log lines. A final line without its newline is a torn write and
/// is dropped.
fn read_log(path: &Path) -> ApiResult<(Vec<InteractionEvent>, bool)> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), false)),
        Err(e) => return Err(ApiError::storage(format!("{}: {e}", path.display()))),
    };
    let torn = !text.is_empty() && !text.ends_with('\n');
    let complete = if torn { &text[..text.rfind('\n').map_or(0, |i| i + 1)] } else { &text[..] };
    let events = complete
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| ApiError::storage(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect::<ApiResult<_>>()?;
    Ok((events, torn))
}

impl NetworkStore {
    /// Opens the store, recovering every network found under `root`.
    pub fn open(root: impl Into<PathBuf>, registry: Arc<ActionRegistry>) -> ApiResult<(Self, Vec<Recovery>)> {
        let root = root.into();
        let dir = root.join("networks");
        fs::create_dir_all(&dir).map_err(ApiError::storage)?;
        let store = NetworkStore { root, registry, nets: RwLock::new(BTreeMap::new()) };
        let mut recoveries = Vec::new();
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(ApiError::storage)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        entries.sort();
        for path in entries {
            let Some(id) = path.file_name().and_then(|n| n.to_str()).filter(|n| valid_id(n)).map(String::from) else {
                continue;
            };
            let (net, rec) = store.recover(&id)?;
            if rec.replayed > 0 || rec.torn_tail {
                recoveries.push(rec);
            }
            store.nets.write().unwrap().insert(id, Arc::new(Mutex::new(net)));
        }
        Ok((store, recoveries))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn registry(&self) -> &ActionRegistry {
        &self.registry
    }

    fn dir(&self, id: &str) -> PathBuf {
        self.root.join("networks").join(id)
    }

    fn recover(&self, id: &str) -> ApiResult<(KnowledgeNetwork, Recovery)> {
        let dir = self.dir(id);
        let snapshot = dir.join(SNAPSHOT_FILE);
        let mut net = match fs::read(&snapshot) {
            Ok(bytes) => load(&bytes).map_err(|e| ApiError::storage(format!("{}: {e}", snapshot.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => KnowledgeNetwork::new(id),
            Err(e) => return Err(ApiError::storage(e)),
        };
        let (events, torn) = read_log(&dir.join(LOG_FILE))?;
        let mut replayed = 0;
        let base = net.last_seq();
        for event in events.into_iter().filter(|e| e.seq > base) {
            net.apply(event, &self.registry)
                .map_err(|e| ApiError::storage(format!("recovering {id}: {e}")))?;
            replayed += 1;
        }
        if torn {
            // Rewrite the log without the torn line so later appends stay parseable.
            let mut buf = Vec::new();
            for e in &net.events {
                serde_json::to_writer(&mut buf, e).map_err(ApiError::storage)?;
                buf.push(b'\n');
            }
            write_atomic(&dir.join(LOG_FILE), &buf).map_err(ApiError::storage)?;
        }
        if replayed > 0 {
            write_atomic(&snapshot, &save(&net)).map_err(ApiError::storage)?;
        }
        Ok((net, Recovery { id: id.to_string(), replayed, torn_tail: torn }))
    }

    fn persist_new(&self, net: &KnowledgeNetwork) -> ApiResult<()> {
        let dir = self.dir(&net.id);
        fs::create_dir_all(&dir).map_err(ApiError::storage)?;
        let log = dir.join(LOG_FILE);
        File::create(&log).map_err(ApiError::storage)?;
        append_events(&log, &net.events).map_err(ApiError::storage)?;
        write_atomic(&dir.join(SNAPSHOT_FILE), &save(net)).map_err(ApiError::storage)
    }

    fn insert_new(&self, net: KnowledgeNetwork) -> ApiResult<String> {
        let mut nets = self.nets.write().unwrap();
        if nets.contains_key(&net.id) {
            return Err(ApiError::new(ErrorCode::NetworkExists, format!("network {:?} already exists", net.id))
                .with("id", net.id.clone()));
        }
        self.persist_new(&net)?;
        let id = net.id.clone();
        nets.insert(id.clone(), Arc::new(Mutex::new(net)));
        Ok(id)
    }

    /// A new empty network. A non-empty annotation is recorded as its first
    /// event.
    pub fn create(&self, id: Option<String>, annotation: &str) -> ApiResult<String> {
        let id = id.unwrap_or_else(combine_core::fresh_id);
        check_id(&id)?;
        let mut net = KnowledgeNetwork::new(&id);
        if !annotation.is_empty() {
            net.annotate(&id, annotation)?;
        }
        self.insert_new(net)
    }

    /// Stores a validated document under its own id.
    pub fn import(&self, bytes: &[u8]) -> ApiResult<String> {
        let net = load(bytes)?;
        check_id(&net.id)?;
        self.insert_new(net)
    }

    pub fn get(&self, id: &str) -> ApiResult<Shared> {
        self.nets.read().unwrap().get(id).cloned().ok_or_else(|| not_found(id))
    }

    /// Canonical document bytes.
    pub fn document(&self, id: &str) -> ApiResult<Vec<u8>> {
        let net = self.get(id)?;
        let net = net.lock().unwrap();
        Ok(save(&net))
    }

    pub fn read<T>(&self, id: &str, f: impl FnOnce(&KnowledgeNetwork) -> T) -> ApiResult<T> {
        let net = self.get(id)?;
        let net = net.lock().unwrap();
        Ok(f(&net))
    }

    /// Runs `f` on a copy of the network and commits it only if `f`
    /// succeeds: new events go to the log first, then the snapshot.
    pub fn mutate<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut KnowledgeNetwork, &ActionRegistry) -> ApiResult<T>,
    ) -> ApiResult<T> {
        let shared = self.get(id)?;
        let mut net = shared.lock().unwrap();
        let mut work = net.clone();
        let out = f(&mut work, &self.registry)?;
        let new = &work.events[net.events.len()..];
        if !new.is_empty() {
            let dir = self.dir(id);
            append_events(&dir.join(LOG_FILE), new).map_err(ApiError::storage)?;
            write_atomic(&dir.join(SNAPSHOT_FILE), &save(&work)).map_err(ApiError::storage)?;
        }
        *net = work;
        Ok(out)
    }

    pub fn delete(&self, id: &str) -> ApiResult<()> {
        let mut nets = self.nets.write().unwrap();
        let shared = nets.remove(id).ok_or_else(|| not_found(id))?;
        // Wait out any in-flight mutation before removing its files.
        let _guard = shared.lock().unwrap();
        fs::remove_dir_all(self.dir(id)).map_err(ApiError::storage)
    }

    pub fn list(&self, offset: usize, limit: usize) -> (usize, Vec<NetworkSummary>) {
        let nets = self.nets.read().unwrap();
        let page = nets
            .values()
            .skip(offset)
            .take(limit)
            .map(|n| {
                let n = n.lock().unwrap();
                NetworkSummary {
                    id: n.id.clone(),
                    annotation: n.annotation.clone(),
                    nodes: n.nodes.len(),
                    edges: n.edges.len(),
                    events: n.events.len(),
                }
            })
            .collect();
        (nets.len(), page)
    }
}
