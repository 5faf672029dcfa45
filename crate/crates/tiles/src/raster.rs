//! Deterministic software rasterizer for node-link drawings.
//!
//! Every primitive draws into a [`Canvas`] covering some window of the
//! level image, so a tile rendered alone is bit-identical to the same
//! region cut from a full level render.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TileError};
use crate::projection::{level_side, tiles_per_axis, world_to_pixel, BBox, MAX_ZOOM, TILE_SIZE};

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [255, 255, 255];
pub const EDGE_COLOR: Rgb = [200, 200, 200];
pub const DEFAULT_NODE_COLOR: Rgb = [128, 128, 128];

/// Category name to node color.
pub type Palette = BTreeMap<String, Rgb>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TileCoord {
    pub z: u8,
    pub x: u32,
    pub y: u32,
}

impl TileCoord {
    pub fn new(z: u8, x: u32, y: u32) -> Self {
        TileCoord { z, x, y }
    }

    pub fn is_valid(&self) -> bool {
        self.z <= MAX_ZOOM && self.x < tiles_per_axis(self.z) && self.y < tiles_per_axis(self.z)
    }
}

/// All tiles of a level in row-major order.
pub fn level_coords(z: u8) -> impl Iterator<Item = TileCoord> {
    let n = tiles_per_axis(z);
    (0..n).flat_map(move |y| (0..n).map(move |x| TileCoord::new(z, x, y)))
}

/// Packed 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        let data = color.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        RgbImage { width, height, data }
    }

    pub fn pixel(&self, x: u32, y: u32) -> Rgb {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn is_uniform(&self, color: Rgb) -> bool {
        self.data.chunks_exact(3).all(|p| p == color)
    }

    /// Copies a `w`x`h` block starting at `(x0, y0)`.
    pub fn crop(&self, x0: u32, y0: u32, w: u32, h: u32) -> RgbImage {
        let mut data = Vec::with_capacity(w as usize * h as usize * 3);
        for y in y0..y0 + h {
            let start = (y as usize * self.width as usize + x0 as usize) * 3;
            data.extend_from_slice(&self.data[start..start + w as usize * 3]);
        }
        RgbImage { width: w, height: h, data }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let mut enc = png::Encoder::new(&mut out, self.width, self.height);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| TileError::Png(e.to_string()))?;
        writer.write_image_data(&self.data).map_err(|e| TileError::Png(e.to_string()))?;
        writer.finish().map_err(|e| TileError::Png(e.to_string()))?;
        Ok(out)
    }

    pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
        let dec = png::Decoder::new(std::io::Cursor::new(bytes));
        let mut reader = dec.read_info().map_err(|e| TileError::Png(e.to_string()))?;
        let size = reader.output_buffer_size().ok_or_else(|| TileError::Png("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf).map_err(|e| TileError::Png(e.to_string()))?;
        if info.color_type != png::ColorType::Rgb || info.bit_depth != png::BitDepth::Eight {
            return Err(TileError::Png(format!("unexpected format {:?}/{:?}", info.color_type, info.bit_depth)));
        }
        buf.truncate(info.buffer_size());
        Ok(RgbImage { width: info.width, height: info.height, data: buf })
    }
}

/// An image standing for the window `[x0, x0+w) x [y0, y0+h)` of a larger
/// level. Writes outside the window are dropped.
pub struct Canvas {
    pub x0: i64,
    pub y0: i64,
    pub image: RgbImage,
}

impl Canvas {
    pub fn new(x0: i64, y0: i64, w: u32, h: u32) -> Self {
        Canvas { x0, y0, image: RgbImage::filled(w, h, BACKGROUND) }
    }

    fn x1(&self) -> i64 {
        self.x0 + self.image.width as i64 - 1
    }

    fn y1(&self) -> i64 {
        self.y0 + self.image.height as i64 - 1
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x < self.x0 || y < self.y0 || x > self.x1() || y > self.y1() {
            return;
        }
        let i = ((y - self.y0) as usize * self.image.width as usize + (x - self.x0) as usize) * 3;
        self.image.data[i..i + 3].copy_from_slice(&c);
    }

    /// One-pixel segment. Only the part inside the window is visited.
    pub fn line(&mut self, a: (i64, i64), b: (i64, i64), c: Rgb) {
        let seg = Segment::new(a, b);
        let (lo, hi) = if seg.x_major() {
            (self.x0, self.x1())
        } else if seg.sy >= 0 {
            (self.y0, self.y1())
        } else {
            (-self.y1(), -self.y0)
        };
        let base = if seg.x_major() { seg.x0 } else { seg.sy * seg.y0 };
        let t0 = (lo - base).max(0);
        let t1 = (hi - base).min(seg.steps());
        for t in t0..=t1 {
            let (x, y) = seg.at(t);
            self.put(x, y, c);
        }
    }

    /// Filled disc of pixels within Euclidean distance `r` of the center.
    pub fn disc(&mut self, (cx, cy): (i64, i64), r: i64, c: Rgb) {
        let (ya, yb) = ((cy - r).max(self.y0), (cy + r).min(self.y1()));
        let (xa, xb) = ((cx - r).max(self.x0), (cx + r).min(self.x1()));
        for y in ya..=yb {
            for x in xa..=xb {
                let (dx, dy) = (x - cx, y - cy);
                if dx * dx + dy * dy <= r * r {
                    self.put(x, y, c);
                }
            }
        }
    }
}

/// Bresenham segment in closed form: along the major axis, the minor
/// coordinate at step `t` is the ideal line rounded half up. Endpoints are
/// ordered so drawing does not depend on direction.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    x0: i64,
    y0: i64,
    dx: i64,
    ady: i64,
    sy: i64,
}

impl Segment {
    pub fn new(a: (i64, i64), b: (i64, i64)) -> Self {
        let (p, q) = if a <= b { (a, b) } else { (b, a) };
        let dy = q.1 - p.1;
        Segment { x0: p.0, y0: p.1, dx: q.0 - p.0, ady: dy.abs(), sy: if dy < 0 { -1 } else { 1 } }
    }

    fn x_major(&self) -> bool {
        self.dx >= self.ady
    }

    /// Index of the last pixel.
    pub fn steps(&self) -> i64 {
        self.dx.max(self.ady)
    }

    pub fn at(&self, t: i64) -> (i64, i64) {
        if self.steps() == 0 {
            return (self.x0, self.y0);
        }
        if self.x_major() {
            (self.x0 + t, self.y0 + self.sy * ((2 * t * self.ady + self.dx) / (2 * self.dx)))
        } else {
            (self.x0 + (2 * t * self.dx + self.ady) / (2 * self.ady), self.y0 + self.sy * t)
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..=self.steps()).map(|t| self.at(t))
    }

    /// Tiles (in tile units) containing at least one pixel of the segment.
    pub fn tiles(&self, tiles_per_axis: u32) -> Vec<(u32, u32)> {
        let ts = TILE_SIZE as i64;
        let n = tiles_per_axis as i64;
        let mut out = Vec::new();
        let steps = self.steps();
        // Split the major axis at tile boundaries; the minor coordinate is
        // monotone, so each piece spans a contiguous run of tiles.
        let major_start = if self.x_major() { self.x0 } else { self.y0 };
        let dir = if self.x_major() { 1 } else { self.sy };
        let mut t = 0;
        while t <= steps {
            let m = major_start + dir * t;
            let tile = m.div_euclid(ts);
            let boundary = if dir > 0 { (tile + 1) * ts - 1 } else { tile * ts };
            let t_end = ((boundary - major_start) * dir).min(steps);
            let (a, b) = (self.at(t), self.at(t_end));
            let (lo, hi) = if self.x_major() {
                (a.1.min(b.1), a.1.max(b.1))
            } else {
                (a.0.min(b.0), a.0.max(b.0))
            };
            for minor in lo.div_euclid(ts)..=hi.div_euclid(ts) {
                let (tx, ty) = if self.x_major() { (tile, minor) } else { (minor, tile) };
                if (0..n).contains(&tx) && (0..n).contains(&ty) {
                    out.push((tx as u32, ty as u32));
                }
            }
            t = t_end + 1;
        }
        out
    }
}

/// Disc radius in pixels at level `z`.
pub fn node_radius(z: u8) -> i64 {
    (z as i64).max(1)
}

/// A drawing projected to one zoom level.
#[derive(Debug, Clone)]
pub struct LevelScene {
    pub z: u8,
    pub nodes: Vec<(i64, i64)>,
    pub colors: Vec<Rgb>,
    pub edges: Vec<(usize, usize)>,
}

impl LevelScene {
    pub fn new(
        z: u8,
        bbox: &BBox,
        positions: &[(f64, f64)],
        colors: &[Rgb],
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        if z > MAX_ZOOM {
            return Err(TileError::ZoomOutOfRange(z));
        }
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= positions.len() {
                    return Err(TileError::EdgeEndpoint(w));
                }
            }
        }
        Ok(LevelScene {
            z,
            nodes: positions.iter().map(|&p| world_to_pixel(bbox, z, p)).collect(),
            colors: colors.to_vec(),
            edges: edges.to_vec(),
        })
    }

    fn color(&self, i: usize) -> Rgb {
        self.colors.get(i).copied().unwrap_or(DEFAULT_NODE_COLOR)
    }

    /// Draws the listed edges, then the listed nodes, in the given order.
    pub fn draw(&self, canvas: &mut Canvas, edges: &[usize], nodes: &[usize]) {
        for &e in edges {
            let (u, v) = self.edges[e];
            canvas.line(self.nodes[u], self.nodes[v], EDGE_COLOR);
        }
        let r = node_radius(self.z);
        for &i in nodes {
            canvas.disc(self.nodes[i], r, self.color(i));
        }
    }

    /// Edge and node indices touching each tile, in ascending order.
    pub fn bin(&self) -> TileBins {
        let n = tiles_per_axis(self.z);
        let mut bins = TileBins::default();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            for t in Segment::new(self.nodes[u], self.nodes[v]).tiles(n) {
                let list = &mut bins.edges.entry(t).or_default();
                if list.last() != Some(&e) {
                    list.push(e);
                }
            }
        }
        let r = node_radius(self.z);
        let ts = TILE_SIZE as i64;
        let clamp = |v: i64| v.div_euclid(ts).clamp(0, n as i64 - 1) as u32;
        for (i, &(x, y)) in self.nodes.iter().enumerate() {
            for ty in clamp(y - r)..=clamp(y + r) {
                for tx in clamp(x - r)..=clamp(x + r) {
                    bins.nodes.entry((tx, ty)).or_default().push(i);
                }
            }
        }
        bins
    }

    pub fn render_tile(&self, bins: &TileBins, x: u32, y: u32) -> Option<RgbImage> {
        let key = (x, y);
        let (edges, nodes) = (bins.edges.get(&key), bins.nodes.get(&key));
        if edges.is_none() && nodes.is_none() {
            return None;
        }
        let ts = TILE_SIZE as i64;
        let mut canvas = Canvas::new(x as i64 * ts, y as i64 * ts, TILE_SIZE, TILE_SIZE);
        self.draw(
            &mut canvas,
            edges.map(Vec::as_slice).unwrap_or(&[]),
            nodes.map(Vec::as_slice).unwrap_or(&[]),
        );
        Some(canvas.image)
    }
}

#[derive(Debug, Clone, Default)]
pub struct TileBins {
    pub edges: BTreeMap<(u32, u32), Vec<usize>>,
    pub nodes: BTreeMap<(u32, u32), Vec<usize>>,
}

/// Full level image. Memory grows with 4^z; pyramid builds render tile by
/// tile instead.
pub fn rasterize_level(
    positions: &[(f64, f64)],
    edges: &[(usize, usize)],
    colors: &[Rgb],
    bbox: &BBox,
    z: u8,
) -> Result<RgbImage> {
    let scene = LevelScene::new(z, bbox, positions, colors, edges)?;
    let side = level_side(z);
    let mut canvas = Canvas::new(0, 0, side, side);
    let all_edges: Vec<usize> = (0..edges.len()).collect();
    let all_nodes: Vec<usize> = (0..positions.len()).collect();
    scene.draw(&mut canvas, &all_edges, &all_nodes);
    Ok(canvas.image)
}

/// Splits a level image into tiles, row by row.
pub fn cut_tiles(image: &RgbImage, z: u8) -> Result<Vec<(TileCoord, RgbImage)>> {
    if z > MAX_ZOOM {
        return Err(TileError::ZoomOutOfRange(z));
    }
    let side = level_side(z);
    if image.width != side || image.height != side {
        return Err(TileError::DimensionMismatch { width: image.width, height: image.height, expected: side });
    }
    Ok(level_coords(z)
        .map(|c| {
            let img = image.crop(c.x * TILE_SIZE, c.y * TILE_SIZE, TILE_SIZE, TILE_SIZE);
            (c, img)
        })
        .collect())
}

/// Inverse of [`cut_tiles`].
pub fn assemble(tiles: &[(TileCoord, RgbImage)], z: u8) -> RgbImage {
    let side = level_side(z);
    let mut out = RgbImage::filled(side, side, BACKGROUND);
    for (c, img) in tiles {
        for row in 0..TILE_SIZE {
            let src = (row * TILE_SIZE * 3) as usize;
            let dst = (((c.y * TILE_SIZE + row) * side + c.x * TILE_SIZE) * 3) as usize;
            out.data[dst..dst + TILE_SIZE as usize * 3]
                .copy_from_slice(&img.data[src..src + TILE_SIZE as usize * 3]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_endpoints_and_direction_independence() {
        let cases = [((0, 0), (10, 3)), ((5, 5), (5, -7)), ((3, 9), (-4, 2)), ((2, 2), (2, 2))];
        for (a, b) in cases {
            let s = Segment::new(a, b);
            let pts: Vec<_> = s.pixels().collect();
            assert!(pts.contains(&a) && pts.contains(&b));
            let rev: Vec<_> = Segment::new(b, a).pixels().collect();
            assert_eq!(pts, rev);
        }
    }

    #[test]
    fn line_clipping_matches_unclipped() {
        let mut full = Canvas::new(0, 0, 64, 64);
        full.line((3, 60), (61, 2), [0, 0, 0]);
        let mut part = Canvas::new(20, 20, 16, 16);
        part.line((3, 60), (61, 2), [0, 0, 0]);
        assert_eq!(part.image, full.image.crop(20, 20, 16, 16));
    }

    #[test]
    fn empty_level_is_white() {
        let img = rasterize_level(&[], &[], &[], &BBox::of_points(&[]), 0).unwrap();
        assert_eq!((img.width, img.height), (256, 256));
        assert!(img.is_uniform(BACKGROUND));
    }

    #[test]
    fn png_round_trip() {
        let mut c = Canvas::new(0, 0, 32, 16);
        c.disc((5, 5), 3, [1, 2, 3]);
        let back = RgbImage::decode_png(&c.image.encode_png().unwrap()).unwrap();
        assert_eq!(back, c.image);
    }

    #[test]
    fn cut_rejects_wrong_size() {
        let img = RgbImage::filled(100, 100, BACKGROUND);
        assert!(matches!(cut_tiles(&img, 0), Err(TileError::DimensionMismatch { .. })));
    }
}
