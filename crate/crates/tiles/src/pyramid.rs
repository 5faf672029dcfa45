//! Multi-level tile pyramids and their on-disk form.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use combine_analysis::{mst, WeightedGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, TileError};
use crate::projection::{level_side, tiles_per_axis, BBox, MARGIN, MAX_ZOOM, TILE_SIZE};
use crate::raster::{
    level_coords, LevelScene, Palette, Rgb, RgbImage, TileCoord, BACKGROUND, DEFAULT_NODE_COLOR,
    EDGE_COLOR,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SIDE_LAW: &str = "256*2^z";
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PyramidOptions {
    /// Draw only a minimum spanning forest of the edges.
    pub use_mst: bool,
    pub max_zoom: u8,
}

impl Default for PyramidOptions {
    fn default() -> Self {
        PyramidOptions { use_mst: false, max_zoom: MAX_ZOOM }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub id: String,
    pub tile_size: u32,
    pub min_zoom: u8,
    pub max_zoom: u8,
    pub side_law: String,
    pub level_sides: Vec<u32>,
    pub tile_counts: Vec<u64>,
    pub total_tiles: u64,
    pub bbox: BBox,
    pub margin: f64,
    pub palette: Palette,
    pub default_color: Rgb,
    pub background: Rgb,
    pub edge_color: Rgb,
    pub nodes: usize,
    pub input_edges: usize,
    pub drawn_edges: usize,
    pub use_mst: bool,
    pub encoding: String,
    /// SHA-256 over raw RGB rows of every tile, in tile order.
    pub checksum: String,
}

/// Encoded tiles in tile order plus the manifest describing them.
#[derive(Debug, Clone)]
pub struct TilePyramid {
    pub manifest: Manifest,
    tiles: Vec<Arc<Vec<u8>>>,
}

/// Position of a tile in level-then-row-major order.
pub fn tile_index(c: &TileCoord) -> usize {
    let before: usize = (0..c.z).map(|k| 1usize << (2 * k)).sum();
    before + c.y as usize * tiles_per_axis(c.z) as usize + c.x as usize
}

impl TilePyramid {
    pub fn tile(&self, c: &TileCoord) -> Option<&[u8]> {
        if !c.is_valid() || c.z > self.manifest.max_zoom {
            return None;
        }
        self.tiles.get(tile_index(c)).map(|t| t.as_slice())
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn coords(&self) -> impl Iterator<Item = TileCoord> {
        (0..=self.manifest.max_zoom).flat_map(level_coords)
    }

    /// Writes `manifest.json` and `tiles/{z}/{x}/{y}.png` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for c in self.coords() {
            let path = tile_path(dir, &c);
            std::fs::create_dir_all(path.parent().unwrap())?;
            std::fs::write(&path, self.tile(&c).unwrap())?;
        }
        let text = serde_json::to_string_pretty(&self.manifest).map_err(|e| TileError::Manifest(e.to_string()))?;
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(())
    }
}

pub fn tile_path(dir: &Path, c: &TileCoord) -> PathBuf {
    dir.join("tiles").join(c.z.to_string()).join(c.x.to_string()).join(format!("{}.png", c.y))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    serde_json::from_str(&text).map_err(|e| TileError::Manifest(e.to_string()))
}

/// Recomputes the checksum of a pyramid directory from its PNG files.
pub fn verify_dir(dir: &Path) -> Result<bool> {
    let manifest = read_manifest(dir)?;
    let mut hasher = Sha256::new();
    for z in 0..=manifest.max_zoom {
        for c in level_coords(z) {
            let img = RgbImage::decode_png(&std::fs::read(tile_path(dir, &c))?)?;
            hasher.update(&img.data);
        }
    }
    Ok(hex::encode(hasher.finalize()) == manifest.checksum)
}

/// Renders every level of the drawing and cuts it into tiles.
///
/// `positions[i]` and `categories[i]` belong to graph node `i`; categories
/// missing from the palette get the default gray.
pub fn build_pyramid(
    graph: &WeightedGraph,
    positions: &[(f64, f64)],
    categories: &[Option<String>],
    palette: &Palette,
    options: PyramidOptions,
) -> Result<TilePyramid> {
    if options.max_zoom > MAX_ZOOM {
        return Err(TileError::ZoomOutOfRange(options.max_zoom));
    }
    if positions.len() < graph.nodes {
        return Err(TileError::MissingPosition(positions.len().to_string()));
    }
    let positions = &positions[..graph.nodes];
    if let Some(i) = positions.iter().position(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(TileError::NonFinite(i.to_string()));
    }
    let edges: Vec<(usize, usize)> = if options.use_mst {
        let keep = mst(graph);
        graph.edges.iter().filter(|e| keep.binary_search(&e.id).is_ok()).map(|e| (e.u, e.v)).collect()
    } else {
        graph.edges.iter().map(|e| (e.u, e.v)).collect()
    };
    let colors: Vec<Rgb> = (0..graph.nodes)
        .map(|i| {
            categories
                .get(i)
                .and_then(|c| c.as_ref())
                .and_then(|c| palette.get(c))
                .copied()
                .unwrap_or(DEFAULT_NODE_COLOR)
        })
        .collect();
    let bbox = BBox::of_points(positions);

    let white = RgbImage::filled(TILE_SIZE, TILE_SIZE, BACKGROUND);
    let white_png = Arc::new(white.encode_png()?);
    let mut hasher = Sha256::new();
    let mut tiles = Vec::new();
    for z in 0..=options.max_zoom {
        let scene = LevelScene::new(z, &bbox, positions, &colors, &edges)?;
        let bins = scene.bin();
        let coords: Vec<TileCoord> = level_coords(z).collect();
        for chunk in coords.chunks(CHUNK) {
            let rendered: Vec<Option<(RgbImage, Vec<u8>)>> = chunk
                .par_iter()
                .map(|c| {
                    scene
                        .render_tile(&bins, c.x, c.y)
                        .map(|img| img.encode_png().map(|png| (img, png)))
                        .transpose()
                })
                .collect::<Result<_>>()?;
            for r in rendered {
                match r {
                    Some((img, png)) => {
                        hasher.update(&img.data);
                        tiles.push(Arc::new(png));
                    }
                    None => {
                        hasher.update(&white.data);
                        tiles.push(Arc::clone(&white_png));
                    }
                }
            }
        }
    }
    let checksum = hex::encode(hasher.finalize());
    let levels = 0..=options.max_zoom;
    let tile_counts: Vec<u64> = levels.clone().map(|z| 1u64 << (2 * z)).collect();
    let manifest = Manifest {
        id: checksum[..16].to_string(),
        tile_size: TILE_SIZE,
        min_zoom: 0,
        max_zoom: options.max_zoom,
        side_law: SIDE_LAW.into(),
        level_sides: levels.map(level_side).collect(),
        total_tiles: tile_counts.iter().sum(),
        tile_counts,
        bbox,
        margin: MARGIN,
        palette: palette.clone(),
        default_color: DEFAULT_NODE_COLOR,
        background: BACKGROUND,
        edge_color: EDGE_COLOR,
        nodes: graph.nodes,
        input_edges: graph.edges.len(),
        drawn_edges: edges.len(),
        use_mst: options.use_mst,
        encoding: "png-rgb8".into(),
        checksum,
    };
    Ok(TilePyramid { manifest, tiles })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_order() {
        assert_eq!(tile_index(&TileCoord::new(0, 0, 0)), 0);
        assert_eq!(tile_index(&TileCoord::new(1, 0, 0)), 1);
        assert_eq!(tile_index(&TileCoord::new(1, 1, 1)), 4);
        assert_eq!(tile_index(&TileCoord::new(2, 0, 0)), 5);
        assert_eq!(tile_index(&TileCoord::new(6, 63, 63)), 5460);
    }

    #[test]
    fn small_pyramid() {
        let g = WeightedGraph::new(1);
        let p = build_pyramid(&g, &[(0.0, 0.0)], &[None], &Palette::new(), PyramidOptions { use_mst: false, max_zoom: 2 })
            .unwrap();
        assert_eq!(p.tile_count(), 21);
        assert_eq!(p.manifest.total_tiles, 21);
        assert_eq!(p.manifest.level_sides, vec![256, 512, 1024]);
    }
}
