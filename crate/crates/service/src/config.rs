//! Server configuration, validated before anything starts.

use std::net::SocketAddr;
use std::path::PathBuf;

use combine_analysis::Linkage;
use combine_datasource::Config as SourceConfig;
use combine_tiles::DEFAULT_STATIC_THRESHOLD;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";
pub const DEFAULT_TILE_CACHE: usize = 4096;
pub const DEFAULT_PAGE_LIMIT: usize = 100;
pub const MAX_PAGE_LIMIT: usize = 10_000;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub listen: SocketAddr,
    pub data_dir: PathBuf,
    pub sources: SourceConfig,
    /// Encoded tiles kept in memory.
    pub tile_cache_size: usize,
    /// On-screen node size below which clients draw thumbnails.
    pub lod_threshold: f64,
    pub default_linkage: Linkage,
}

impl ServerConfig {
    pub fn new(data_dir: impl Into<PathBuf>, sources: SourceConfig) -> Self {
        ServerConfig {
            listen: DEFAULT_LISTEN.parse().expect("default address parses"),
            data_dir: data_dir.into(),
            sources,
            tile_cache_size: DEFAULT_TILE_CACHE,
            lod_threshold: DEFAULT_STATIC_THRESHOLD,
            default_linkage: Linkage::Average,
        }
    }

    /// Every problem found, empty when the configuration is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.tile_cache_size == 0 {
            problems.push("tile cache size must be at least 1".to_string());
        }
        if !(self.lod_threshold.is_finite() && self.lod_threshold > 0.0) {
            problems.push(format!("LOD threshold {} must be a positive number", self.lod_threshold));
        }
        if self.data_dir.exists() && !self.data_dir.is_dir() {
            problems.push(format!("data directory {} is not a directory", self.data_dir.display()));
        }
        let s = &self.sources;
        for (name, base) in [
            ("ChEMBL", &s.chembl_base),
            ("UniChem", &s.unichem_base),
            ("UniProt", &s.uniprot_base),
            ("PDB", &s.pdb_base),
            ("PDB image", &s.pdb_image_base),
        ] {
            if !(base.starts_with("http://") || base.starts_with("https://")) {
                problems.push(format!("{name} base URL {base:?} is not an http(s) URL"));
            }
        }
        if s.offline && !s.fixtures_dir.is_dir() {
            problems.push(format!("offline mode needs a fixture directory; {} is missing", s.fixtures_dir.display()));
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collects_every_problem() {
        let mut c = ServerConfig::new("/nonexistent-combine-data", SourceConfig::offline("/nonexistent-fixtures"));
        c.tile_cache_size = 0;
        c.lod_threshold = f64::NAN;
        c.sources.chembl_base = "ftp://x".into();
        assert_eq!(c.validate().len(), 4, "{:?}", c.validate());
        let ok = ServerConfig::new("/nonexistent-combine-data", SourceConfig::default());
        assert!(ok.validate().is_empty());
    }
}
