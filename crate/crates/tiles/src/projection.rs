//! World to level-pixel mapping.

use serde::{Deserialize, Serialize};

pub const TILE_SIZE: u32 = 256;
pub const MAX_ZOOM: u8 = 6;
/// Fraction of the level side left blank on every edge.
pub const MARGIN: f64 = 0.02;

/// Side in pixels of the level-`z` image.
pub fn level_side(z: u8) -> u32 {
    TILE_SIZE << z
}

/// Tiles per axis at level `z`.
pub fn tiles_per_axis(z: u8) -> u32 {
    1 << z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        BBox { min_x, min_y, max_x, max_y }
    }

    /// Bounding box of the points; the origin when there are none.
    pub fn of_points(points: &[(f64, f64)]) -> Self {
        if points.is_empty() {
            return BBox::new(0.0, 0.0, 0.0, 0.0);
        }
        points.iter().fold(
            BBox::new(f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |b, &(x, y)| BBox::new(b.min_x.min(x), b.min_y.min(y), b.max_x.max(x), b.max_y.max(y)),
        )
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.width() <= 0.0 && self.height() <= 0.0
    }
}

/// Unrounded level-pixel position. The longer bbox axis fills the area
/// inside the margin; the shorter one is centered.
pub fn world_to_pixel_f64(bbox: &BBox, z: u8, (x, y): (f64, f64)) -> (f64, f64) {
    let side = level_side(z) as f64;
    if bbox.is_degenerate() {
        return (side / 2.0, side / 2.0);
    }
    let margin = MARGIN * side;
    let usable = side - 2.0 * margin;
    let (w, h) = (bbox.width(), bbox.height());
    let scale = usable / w.max(h);
    let pad_x = (usable - w * scale) / 2.0;
    let pad_y = (usable - h * scale) / 2.0;
    (
        margin + pad_x + (x - bbox.min_x) * scale,
        margin + pad_y + (y - bbox.min_y) * scale,
    )
}

/// Inverse of [`world_to_pixel_f64`].
pub fn pixel_to_world(bbox: &BBox, z: u8, (px, py): (f64, f64)) -> (f64, f64) {
    if bbox.is_degenerate() {
        return bbox.center();
    }
    let side = level_side(z) as f64;
    let margin = MARGIN * side;
    let usable = side - 2.0 * margin;
    let (w, h) = (bbox.width(), bbox.height());
    let scale = usable / w.max(h);
    let pad_x = (usable - w * scale) / 2.0;
    let pad_y = (usable - h * scale) / 2.0;
    (
        bbox.min_x + (px - margin - pad_x) / scale,
        bbox.min_y + (py - margin - pad_y) / scale,
    )
}

/// Integer pixel, rounding half away from zero.
pub fn world_to_pixel(bbox: &BBox, z: u8, point: (f64, f64)) -> (i64, i64) {
    let (x, y) = world_to_pixel_f64(bbox, z, point);
    (x.round() as i64, y.round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_maps_to_middle() {
        let b = BBox::new(-3.0, 10.0, 5.0, 11.0);
        assert_eq!(world_to_pixel(&b, 0, b.center()), (128, 128));
    }

    #[test]
    fn scale_law() {
        let b = BBox::new(-3.0, 10.0, 5.0, 11.0);
        for z in 0..MAX_ZOOM {
            let p = (1.234, 10.77);
            let (a, c) = (world_to_pixel_f64(&b, z, p), world_to_pixel_f64(&b, z + 1, p));
            assert_eq!((2.0 * a.0, 2.0 * a.1), c);
        }
    }

    #[test]
    fn square_corner_at_zoom_three() {
        let b = BBox::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(world_to_pixel(&b, 3, (0.0, 0.0)), (41, 41));
        assert_eq!(world_to_pixel(&b, 3, (1.0, 1.0)), (2048 - 41, 2048 - 41));
    }

    #[test]
    fn degenerate_goes_to_center() {
        let b = BBox::new(2.0, 2.0, 2.0, 2.0);
        assert_eq!(world_to_pixel(&b, 2, (2.0, 2.0)), (512, 512));
        assert_eq!(world_to_pixel(&b, 2, (99.0, -4.0)), (512, 512));
    }

    #[test]
    fn inverse_round_trip() {
        let b = BBox::new(-3.0, 10.0, 5.0, 11.0);
        let p = (0.5, 10.25);
        let back = pixel_to_world(&b, 4, world_to_pixel_f64(&b, 4, p));
        assert!((back.0 - p.0).abs() < 1e-12 && (back.1 - p.1).abs() < 1e-12);
    }
}
