use std::path::PathBuf;
use std::time::Duration;

pub const DEFAULT_CHEMBL_BASE: &str = "https://www.ebi.ac.uk/chembl/api/data";
pub const DEFAULT_UNICHEM_BASE: &str = "https://www.ebi.ac.uk/unichem";
pub const DEFAULT_UNIPROT_BASE: &str = "https://rest.uniprot.org";
pub const DEFAULT_PDB_BASE: &str = "https://data.rcsb.org";
pub const DEFAULT_PDB_IMAGE_BASE: &str = "https://cdn.rcsb.org/images/structures";
pub const DEFAULT_CACHE_TTL: Duration = Duration::from_secs(7 * 24 * 3600);

/// Endpoints, cache and mode for all clients.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub chembl_base: String,
    pub unichem_base: String,
    pub uniprot_base: String,
    pub pdb_base: String,
    pub pdb_image_base: String,
    pub cache_dir: Option<PathBuf>,
    pub cache_ttl: Duration,
    pub fixtures_dir: PathBuf,
    /// Minimum gap between request starts to one host.
    pub request_spacing: Duration,
    /// Serve every request from fixtures; never touch the network.
    pub offline: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            chembl_base: DEFAULT_CHEMBL_BASE.into(),
            unichem_base: DEFAULT_UNICHEM_BASE.into(),
            uniprot_base: DEFAULT_UNIPROT_BASE.into(),
            pdb_base: DEFAULT_PDB_BASE.into(),
            pdb_image_base: DEFAULT_PDB_IMAGE_BASE.into(),
            cache_dir: None,
            cache_ttl: DEFAULT_CACHE_TTL,
            fixtures_dir: bundled_fixtures_dir(),
            request_spacing: Duration::from_millis(100),
            offline: false,
        }
    }
}

/// Fixtures shipped with this crate.
pub fn bundled_fixtures_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))
}

impl Config {
    pub fn from_env() -> Self {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Self {
        let mut c = Config::default();
        let set = |slot: &mut String, key: &str| {
            if let Some(v) = get(key).filter(|v| !v.is_empty()) {
                *slot = v.trim_end_matches('/').to_string();
            }
        };
        set(&mut c.chembl_base, "COMBINE_CHEMBL_BASE");
        set(&mut c.unichem_base, "COMBINE_UNICHEM_BASE");
        set(&mut c.uniprot_base, "COMBINE_UNIPROT_BASE");
        set(&mut c.pdb_base, "COMBINE_PDB_BASE");
        set(&mut c.pdb_image_base, "COMBINE_PDB_IMAGE_BASE");
        if let Some(v) = get("COMBINE_CACHE_DIR").filter(|v| !v.is_empty()) {
            c.cache_dir = Some(v.into());
        }
        if let Some(v) = get("COMBINE_FIXTURES_DIR").filter(|v| !v.is_empty()) {
            c.fixtures_dir = v.into();
        }
        c.offline = matches!(get("COMBINE_OFFLINE").as_deref(), Some("1" | "true" | "yes"));
        c
    }

    /// Offline configuration over the given fixture directory.
    pub fn offline(fixtures_dir: impl Into<PathBuf>) -> Self {
        Config { fixtures_dir: fixtures_dir.into(), offline: true, ..Config::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn lookup_overrides() {
        let env: HashMap<&str, &str> = [
            ("COMBINE_CHEMBL_BASE", "http://localhost:9/chembl/"),
            ("COMBINE_OFFLINE", "1"),
            ("COMBINE_CACHE_DIR", "/tmp/c"),
        ]
        .into();
        let c = Config::from_lookup(|k| env.get(k).map(|v| v.to_string()));
        assert_eq!(c.chembl_base, "http://localhost:9/chembl");
        assert!(c.offline);
        assert_eq!(c.cache_dir, Some(PathBuf::from("/tmp/c")));
        assert_eq!(c.uniprot_base, DEFAULT_UNIPROT_BASE);
        assert!(!Config::from_lookup(|_| None).offline);
    }
}
