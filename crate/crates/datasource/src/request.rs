use sha2::{Digest, Sha256};
use url::Url;

use crate::error::{DataError, Result};

/// A GET request in normalized form: query parameters sorted so equal
/// requests compare and hash equal however they were built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Request {
    pub method: String,
    url: Url,
}

impl Request {
    pub fn get(url: &str) -> Result<Self> {
        let parsed = Url::parse(url).map_err(|e| DataError::Validation(format!("bad URL {url:?}: {e}")))?;
        Ok(Self::from_url(parsed))
    }

    /// Joins `base`, the path segments (percent-encoded individually) and
    /// query pairs.
    pub fn build(base: &str, segments: &[&str], query: &[(&str, &str)]) -> Result<Self> {
        let mut url = Url::parse(base).map_err(|e| DataError::Validation(format!("bad base URL {base:?}: {e}")))?;
        {
            let mut path = url
                .path_segments_mut()
                .map_err(|_| DataError::Validation(format!("base URL {base:?} cannot take a path")))?;
            path.pop_if_empty();
            for s in segments {
                path.push(s);
            }
        }
        if !query.is_empty() {
            url.query_pairs_mut().extend_pairs(query);
        }
        Ok(Self::from_url(url))
    }

    fn from_url(mut url: Url) -> Self {
        let mut pairs: Vec<(String, String)> = url.query_pairs().into_owned().collect();
        pairs.sort();
        if pairs.is_empty() {
            url.set_query(None);
        } else {
            url.query_pairs_mut().clear().extend_pairs(pairs);
        }
        url.set_fragment(None);
        Request { method: "GET".into(), url }
    }

    pub fn url(&self) -> &str {
        self.url.as_str()
    }

    pub fn host(&self) -> String {
        let host = self.url.host_str().unwrap_or("");
        match self.url.port() {
            Some(p) => format!("{host}:{p}"),
            None => host.to_string(),
        }
    }

    /// `METHOD URL` with sorted query.
    pub fn descriptor(&self) -> String {
        format!("{} {}", self.method, self.url)
    }

    /// SHA-256 of the descriptor, hex encoded.
    pub fn key(&self) -> String {
        hex::encode(Sha256::digest(self.descriptor().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
}

impl Response {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        Response { status: 200, body: body.into() }
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}
