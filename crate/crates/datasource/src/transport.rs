//! Ways of turning a [`Request`] into a [`Response`].

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use crate::error::{DataError, Result};
use crate::request::{Request, Response};

pub trait Transport: Send + Sync {
    fn execute(&self, req: &Request) -> Result<Response>;
}

/// Live HTTP via reqwest's blocking client.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .user_agent(concat!("combine/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| DataError::Transport { url: String::new(), message: e.to_string() })?;
        Ok(HttpTransport { client })
    }
}

impl Transport for HttpTransport {
    fn execute(&self, req: &Request) -> Result<Response> {
        let fail = |e: reqwest::Error| DataError::Transport { url: req.url().to_string(), message: e.to_string() };
        let resp = self.client.get(req.url()).send().map_err(fail)?;
        let status = resp.status().as_u16();
        let body = resp.bytes().map_err(fail)?.to_vec();
        Ok(Response { status, body })
    }
}

/// Refuses every request and counts attempts. Stands in for the network
/// wherever a live call would be a bug.
#[derive(Default)]
pub struct FailingTransport {
    attempts: AtomicUsize,
}

impl FailingTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn attempts(&self) -> usize {
        self.attempts.load(Ordering::SeqCst)
    }
}

impl Transport for FailingTransport {
    fn execute(&self, req: &Request) -> Result<Response> {
        self.attempts.fetch_add(1, Ordering::SeqCst);
        Err(DataError::Transport { url: req.url().to_string(), message: "network access is disabled".into() })
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn execute(&self, req: &Request) -> Result<Response> {
        (**self).execute(req)
    }
}
