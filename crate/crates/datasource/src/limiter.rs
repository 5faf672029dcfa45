//! Per-host concurrency cap with minimum spacing between request starts.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

#[derive(Default)]
struct HostState {
    in_flight: usize,
    next_start: Option<Instant>,
}

pub struct HostLimiter {
    max_in_flight: usize,
    spacing: Duration,
    hosts: Mutex<HashMap<String, HostState>>,
    freed: Condvar,
}

/// Holds one in-flight slot until dropped.
pub struct Permit<'a> {
    limiter: &'a HostLimiter,
    host: String,
}

impl HostLimiter {
    pub fn new(max_in_flight: usize, spacing: Duration) -> Self {
        HostLimiter {
            max_in_flight: max_in_flight.max(1),
            spacing,
            hosts: Mutex::new(HashMap::new()),
            freed: Condvar::new(),
        }
    }

    /// Blocks until a slot is free for `host` and its start time has come.
    pub fn acquire(&self, host: &str) -> Permit<'_> {
        let start = {
            let mut hosts = self.hosts.lock().unwrap();
            loop {
                let state = hosts.entry(host.to_string()).or_default();
                if state.in_flight < self.max_in_flight {
                    break;
                }
                hosts = self.freed.wait(hosts).unwrap();
            }
            let state = hosts.get_mut(host).unwrap();
            state.in_flight += 1;
            let now = Instant::now();
            let start = state.next_start.map_or(now, |t| t.max(now));
            state.next_start = Some(start + self.spacing);
            start
        };
        let now = Instant::now();
        if start > now {
            std::thread::sleep(start - now);
        }
        Permit { limiter: self, host: host.to_string() }
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut hosts = self.limiter.hosts.lock().unwrap();
        if let Some(s) = hosts.get_mut(&self.host) {
            s.in_flight -= 1;
        }
        self.limiter.freed.notify_all();
    }
}
