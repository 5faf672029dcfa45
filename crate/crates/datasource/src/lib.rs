//! Clients for public chemistry and biology databases.
//!
//! All clients share one [`HttpClient`], which caches responses, limits
//! concurrent requests per host and retries transient failures. With
//! `COMBINE_OFFLINE=1` every request is answered from recorded fixtures
//! and nothing goes over the network.

pub mod cache;
pub mod chembl;
pub mod client;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod limiter;
pub mod parse;
pub mod pdb;
pub mod request;
pub mod transport;
pub mod unichem;
pub mod uniprot;

use std::sync::Arc;

pub use chembl::{active_targets, ActivityRecord, ChemblClient, CompoundRecord, Threshold, DEFAULT_PCHEMBL_MIN};
pub use client::{HttpClient, RetryPolicy, MAX_IN_FLIGHT_PER_HOST};
pub use config::{bundled_fixtures_dir, Config};
pub use error::{DataError, Result};
pub use fixtures::{verify_dir, FixtureDoc, FixtureStore, RecordingTransport};
pub use pdb::{PdbClient, PdbEntry};
pub use request::{Request, Response};
pub use transport::{FailingTransport, HttpTransport, Transport};
pub use unichem::{UnichemClient, XrefRecord};
pub use uniprot::{TargetRecord, UniprotClient};

/// One client per database over a shared HTTP front end.
pub struct Sources {
    pub http: Arc<HttpClient>,
    pub chembl: ChemblClient,
    pub unichem: UnichemClient,
    pub uniprot: UniprotClient,
    pub pdb: PdbClient,
}

impl Sources {
    pub fn from_config(config: &Config) -> Result<Self> {
        Ok(Self::with_client(config, Arc::new(HttpClient::from_config(config)?)))
    }

    pub fn with_client(config: &Config, http: Arc<HttpClient>) -> Self {
        Sources {
            chembl: ChemblClient::new(http.clone(), &config.chembl_base),
            unichem: UnichemClient::new(http.clone(), &config.unichem_base),
            uniprot: UniprotClient::new(http.clone(), &config.uniprot_base),
            pdb: PdbClient::new(http.clone(), &config.pdb_base, &config.pdb_image_base),
            http,
        }
    }
}
