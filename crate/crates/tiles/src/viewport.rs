//! Which tiles a viewer needs for its current view.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::projection::{tiles_per_axis, world_to_pixel_f64, BBox, MAX_ZOOM, TILE_SIZE};
use crate::raster::TileCoord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    /// World coordinates of the view center.
    pub center: (f64, f64),
    /// Screen size in pixels.
    pub width: u32,
    pub height: u32,
    pub z: u8,
}

/// Tiles meeting the viewport, grown by one tile on every side and clipped
/// to the level.
pub fn tiles_for_viewport(vp: &Viewport, bbox: &BBox) -> BTreeSet<TileCoord> {
    let (cx, cy) = world_to_pixel_f64(bbox, vp.z.min(MAX_ZOOM), vp.center);
    let left = cx - vp.width as f64 / 2.0;
    let top = cy - vp.height as f64 / 2.0;
    tiles_for_pixel_rect(vp.z, left, top, vp.width as f64, vp.height as f64)
}

/// Same selection for a half-open pixel rectangle `[left, left+w) x [top, top+h)`.
pub fn tiles_for_pixel_rect(z: u8, left: f64, top: f64, w: f64, h: f64) -> BTreeSet<TileCoord> {
    let mut out = BTreeSet::new();
    if z > MAX_ZOOM || !(w > 0.0 && h > 0.0) || !left.is_finite() || !top.is_finite() {
        return out;
    }
    let ts = TILE_SIZE as f64;
    let last = tiles_per_axis(z) as i64 - 1;
    let span = |lo: f64, len: f64| {
        // Last covered tile is ceil(end / ts) - 1; the margin adds one.
        let first = (lo / ts).floor() as i64 - 1;
        let end = ((lo + len) / ts).ceil() as i64;
        (first.max(0), end.min(last))
    };
    let (x0, x1) = span(left, w);
    let (y0, y1) = span(top, h);
    for y in y0..=y1 {
        for x in x0..=x1 {
            out.insert(TileCoord::new(z, x as u32, y as u32));
        }
    }
    out
}
