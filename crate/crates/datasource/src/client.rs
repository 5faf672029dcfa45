//! Shared HTTP front end: caches, per-host limits, retries and the
//! offline switch.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use crate::cache::DiskCache;
use crate::config::Config;
use crate::error::{DataError, Result};
use crate::fixtures::FixtureStore;
use crate::limiter::HostLimiter;
use crate::request::{Request, Response};
use crate::transport::{HttpTransport, Transport};

pub const MAX_IN_FLIGHT_PER_HOST: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay: Duration::from_millis(500) }
    }
}

enum Backend {
    Live { transport: Box<dyn Transport>, limiter: HostLimiter, retry: RetryPolicy, disk: Option<DiskCache> },
    Fixtures(FixtureStore),
}

pub struct HttpClient {
    backend: Backend,
    memory: Mutex<HashMap<String, Response>>,
}

impl HttpClient {
    /// Live client over `transport` with default limits and retries.
    pub fn live(transport: impl Transport + 'static) -> Self {
        HttpClient {
            backend: Backend::Live {
                transport: Box::new(transport),
                limiter: HostLimiter::new(MAX_IN_FLIGHT_PER_HOST, Duration::ZERO),
                retry: RetryPolicy::default(),
                disk: None,
            },
            memory: Mutex::new(HashMap::new()),
        }
    }

    /// Serves every request from recorded fixtures.
    pub fn offline(store: FixtureStore) -> Self {
        HttpClient { backend: Backend::Fixtures(store), memory: Mutex::new(HashMap::new()) }
    }

    /// Offline mode reads `config.fixtures_dir`; otherwise requests go out
    /// over HTTP.
    pub fn from_config(config: &Config) -> Result<Self> {
        if config.offline {
            return Self::from_config_with(config, crate::transport::FailingTransport::new());
        }
        Self::from_config_with(config, HttpTransport::new(Duration::from_secs(30))?)
    }

    /// Like [`HttpClient::from_config`] with a caller-supplied live
    /// transport, which offline mode never uses.
    pub fn from_config_with(config: &Config, live: impl Transport + 'static) -> Result<Self> {
        if config.offline {
            return Ok(Self::offline(FixtureStore::open(&config.fixtures_dir)?));
        }
        let mut client = Self::live(live).with_limits(MAX_IN_FLIGHT_PER_HOST, config.request_spacing);
        if let Some(dir) = &config.cache_dir {
            client = client.with_disk_cache(DiskCache::new(dir, config.cache_ttl));
        }
        Ok(client)
    }

    pub fn with_retry(mut self, policy: RetryPolicy) -> Self {
        if let Backend::Live { retry, .. } = &mut self.backend {
            *retry = policy;
        }
        self
    }

    pub fn with_limits(mut self, max_in_flight: usize, spacing: Duration) -> Self {
        if let Backend::Live { limiter, .. } = &mut self.backend {
            *limiter = HostLimiter::new(max_in_flight, spacing);
        }
        self
    }

    pub fn with_disk_cache(mut self, cache: DiskCache) -> Self {
        if let Backend::Live { disk, .. } = &mut self.backend {
            *disk = Some(cache);
        }
        self
    }

    pub fn is_offline(&self) -> bool {
        matches!(self.backend, Backend::Fixtures(_))
    }

    /// Successful response for `req`, from cache when possible. 404 maps to
    /// [`DataError::NotFound`], other non-2xx codes to [`DataError::Status`].
    pub fn get(&self, req: &Request) -> Result<Response> {
        let key = req.key();
        if let Some(hit) = self.memory.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let resp = match &self.backend {
            Backend::Fixtures(store) => store.lookup(req)?,
            Backend::Live { transport, limiter, retry, disk } => {
                if let Some(hit) = disk.as_ref().and_then(|d| d.get(req)) {
                    hit
                } else {
                    let resp = Self::with_retries(req, transport.as_ref(), limiter, retry)?;
                    if let (Some(d), true) = (disk, resp.is_success()) {
                        d.put(req, &resp);
                    }
                    resp
                }
            }
        };
        match resp.status {
            s if (200..300).contains(&s) => {
                self.memory.lock().unwrap().insert(key, resp.clone());
                Ok(resp)
            }
            404 => Err(DataError::NotFound(req.url().to_string())),
            status => Err(DataError::Status { url: req.url().to_string(), status }),
        }
    }

    fn with_retries(
        req: &Request,
        transport: &dyn Transport,
        limiter: &HostLimiter,
        retry: &RetryPolicy,
    ) -> Result<Response> {
        let host = req.host();
        let mut delay = retry.base_delay;
        let mut attempt = 1;
        loop {
            let result = {
                let _permit = limiter.acquire(&host);
                transport.execute(req)
            };
            let retryable = match &result {
                Err(e) => e.is_transport(),
                Ok(r) => r.status >= 500,
            };
            if !retryable || attempt >= retry.attempts {
                return result;
            }
            std::thread::sleep(delay);
            delay *= 2;
            attempt += 1;
        }
    }
}

impl combine_core::Fetcher for HttpClient {
    fn fetch(&self, url: &str) -> std::result::Result<Vec<u8>, String> {
        let req = Request::get(url).map_err(|e| e.to_string())?;
        self.get(&req).map(|r| r.body).map_err(|e| e.to_string())
    }
}
