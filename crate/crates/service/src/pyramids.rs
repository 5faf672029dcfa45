//! Tile pyramids on disk, served through an in-memory LRU cache.

use std::collections::{BTreeMap, HashMap};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use combine_analysis::parse_edge_list;
use combine_tiles::{
    build_pyramid, force_layout, import_layout, read_manifest, tile_path, tiles_for_viewport, Manifest, Palette,
    PyramidOptions, TileCoord, TilePyramid, Viewport, MANIFEST_FILE, MAX_ZOOM,
};
use lru::LruCache;
use serde::Deserialize;

use crate::error::{ApiError, ApiResult, ErrorCode};

pub const DEFAULT_LAYOUT_ITERATIONS: usize = 200;

/// Inputs of a pyramid build. Node `i` of the edge list is named `"i"` in
/// the layout and category map.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildRequest {
    /// `u v [weight]` lines.
    pub edges: String,
    /// `id x y` lines; a force-directed layout is computed when absent.
    #[serde(default)]
    pub layout: Option<String>,
    #[serde(default)]
    pub use_mst: bool,
    #[serde(default)]
    pub categories: BTreeMap<String, String>,
    #[serde(default)]
    pub palette: Palette,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub iterations: Option<usize>,
    /// Node count when it exceeds the largest id in the edge list.
    #[serde(default)]
    pub nodes: Option<usize>,
}

/// Renders the pyramid described by `req`.
pub fn build(req: &BuildRequest) -> ApiResult<TilePyramid> {
    let mut graph = parse_edge_list(&req.edges)?;
    if let Some(n) = req.nodes {
        if n < graph.nodes {
            return Err(ApiError::new(
                ErrorCode::ValidationFailed,
                format!("node count {n} is below the {} nodes the edge list uses", graph.nodes),
            ));
        }
        graph.nodes = n;
    }
    let positions = match &req.layout {
        Some(text) => import_layout(text)?.points_for_nodes(graph.nodes)?,
        None => force_layout(&graph, req.seed, req.iterations.unwrap_or(DEFAULT_LAYOUT_ITERATIONS))?.points,
    };
    let categories: Vec<Option<String>> = (0..graph.nodes).map(|i| req.categories.get(&i.to_string()).cloned()).collect();
    let options = PyramidOptions { use_mst: req.use_mst, ..PyramidOptions::default() };
    Ok(build_pyramid(&graph, &positions, &categories, &req.palette, options)?)
}

fn not_found(id: &str) -> ApiError {
    ApiError::new(ErrorCode::PyramidNotFound, format!("no pyramid {id:?}")).with("id", id)
}

fn out_of_range(c: &TileCoord, max_zoom: u8) -> ApiError {
    ApiError::new(ErrorCode::TileOutOfRange, format!("tile {}/{}/{} is outside zoom 0..={max_zoom}", c.z, c.x, c.y))
        .with("z", c.z)
        .with("x", c.x)
        .with("y", c.y)
}

pub struct PyramidStore {
    root: PathBuf,
    manifests: RwLock<HashMap<String, Manifest>>,
    cache: Mutex<LruCache<(String, TileCoord), Arc<Vec<u8>>>>,
}

impl PyramidStore {
    pub fn open(root: impl Into<PathBuf>, cache_size: usize) -> ApiResult<Self> {
        let root = root.into().join("pyramids");
        std::fs::create_dir_all(&root).map_err(ApiError::storage)?;
        let mut manifests = HashMap::new();
        for entry in std::fs::read_dir(&root).map_err(ApiError::storage)? {
            let path = entry.map_err(ApiError::storage)?.path();
            if path.join(MANIFEST_FILE).is_file() {
                let m = read_manifest(&path)?;
                manifests.insert(m.id.clone(), m);
            }
        }
        let cap = NonZeroUsize::new(cache_size.max(1)).unwrap();
        Ok(PyramidStore { root, manifests: RwLock::new(manifests), cache: Mutex::new(LruCache::new(cap)) })
    }

    fn dir(&self, id: &str) -> PathBuf {
        self.root.join(id)
    }

    /// Builds and stores a pyramid. Pyramids are content-addressed, so a
    /// repeated build returns the existing one.
    pub fn build(&self, req: &BuildRequest) -> ApiResult<Manifest> {
        let pyramid = build(req)?;
        self.insert(&pyramid)
    }

    pub fn insert(&self, pyramid: &TilePyramid) -> ApiResult<Manifest> {
        let m = pyramid.manifest.clone();
        if self.manifests.read().unwrap().contains_key(&m.id) {
            return Ok(m);
        }
        let tmp = self.root.join(format!(".{}.partial", m.id));
        let _ = std::fs::remove_dir_all(&tmp);
        pyramid.write_to(&tmp)?;
        let dir = self.dir(&m.id);
        if !dir.exists() {
            std::fs::rename(&tmp, &dir).map_err(ApiError::storage)?;
        } else {
            let _ = std::fs::remove_dir_all(&tmp);
        }
        self.manifests.write().unwrap().insert(m.id.clone(), m.clone());
        Ok(m)
    }

    pub fn manifest(&self, id: &str) -> ApiResult<Manifest> {
        self.manifests.read().unwrap().get(id).cloned().ok_or_else(|| not_found(id))
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.manifests.read().unwrap().keys().cloned().collect();
        ids.sort();
        ids
    }

    /// Encoded PNG bytes of one tile.
    pub fn tile(&self, id: &str, c: TileCoord) -> ApiResult<Arc<Vec<u8>>> {
        let m = self.manifest(id)?;
        if c.z > m.max_zoom || c.z > MAX_ZOOM || !c.is_valid() {
            return Err(out_of_range(&c, m.max_zoom));
        }
        let key = (id.to_string(), c.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let bytes = Arc::new(std::fs::read(tile_path(&self.dir(id), &c)).map_err(ApiError::storage)?);
        self.cache.lock().unwrap().put(key, bytes.clone());
        Ok(bytes)
    }

    /// The tiles a viewport needs, in (z, x, y) order.
    pub fn viewport(&self, id: &str, vp: &Viewport) -> ApiResult<Vec<TileCoord>> {
        let m = self.manifest(id)?;
        if vp.z > m.max_zoom {
            return Err(out_of_range(&TileCoord::new(vp.z, 0, 0), m.max_zoom));
        }
        Ok(tiles_for_viewport(vp, &m.bbox).into_iter().collect())
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}
