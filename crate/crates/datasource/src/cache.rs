//! On-disk response cache keyed by request hash.

use std::path::PathBuf;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::request::{Request, Response};

#[derive(Serialize, Deserialize)]
struct Entry {
    stored_at: u64,
    status: u16,
    body_base64: String,
}

pub struct DiskCache {
    dir: PathBuf,
    ttl: Duration,
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>, ttl: Duration) -> Self {
        DiskCache { dir: dir.into(), ttl }
    }

    fn path(&self, req: &Request) -> PathBuf {
        self.dir.join(format!("{}.json", req.key()))
    }

    /// A stored response younger than the TTL. Unreadable entries count as
    /// misses.
    pub fn get(&self, req: &Request) -> Option<Response> {
        self.get_at(req, now_secs())
    }

    fn get_at(&self, req: &Request, now: u64) -> Option<Response> {
        let text = std::fs::read_to_string(self.path(req)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        if now.saturating_sub(entry.stored_at) > self.ttl.as_secs() {
            return None;
        }
        let body = base64::engine::general_purpose::STANDARD.decode(entry.body_base64).ok()?;
        Some(Response { status: entry.status, body })
    }

    /// Best effort; a failed write only loses the cache entry.
    pub fn put(&self, req: &Request, resp: &Response) {
        self.put_at(req, resp, now_secs());
    }

    fn put_at(&self, req: &Request, resp: &Response, now: u64) {
        let entry = Entry {
            stored_at: now,
            status: resp.status,
            body_base64: base64::engine::general_purpose::STANDARD.encode(&resp.body),
        };
        let tmp = self.dir.join(format!(".{}.tmp", req.key()));
        let _ = std::fs::create_dir_all(&self.dir)
            .and_then(|_| std::fs::write(&tmp, serde_json::to_vec(&entry).expect("entries serialize")))
            .and_then(|_| std::fs::rename(&tmp, self.path(req)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expiry() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path(), Duration::from_secs(100));
        let req = Request::get("https://h.example/a").unwrap();
        cache.put_at(&req, &Response::ok("x"), 1_000);
        assert_eq!(cache.get_at(&req, 1_050), Some(Response::ok("x")));
        assert_eq!(cache.get_at(&req, 1_101), None);
        assert_eq!(cache.get_at(&Request::get("https://h.example/b").unwrap(), 1_000), None);
    }
}
