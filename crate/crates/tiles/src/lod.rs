//! Level-of-detail choice for app nodes drawn inside a network view.

use serde::{Deserialize, Serialize};

/// Nodes smaller than this on screen are shown as static images.
pub const DEFAULT_STATIC_THRESHOLD: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenRect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl ScreenRect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        ScreenRect { x, y, w, h }
    }

    /// Positive-area overlap; rectangles that only touch do not intersect.
    pub fn intersects(&self, o: &ScreenRect) -> bool {
        self.x < o.x + o.w && o.x < self.x + self.w && self.y < o.y + o.h && o.y < self.y + self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LodDecision {
    Skip,
    StaticImage,
    Interactive,
}

pub fn lod_decide(node: &ScreenRect, viewport: &ScreenRect) -> LodDecision {
    lod_decide_with(node, viewport, DEFAULT_STATIC_THRESHOLD)
}

pub fn lod_decide_with(node: &ScreenRect, viewport: &ScreenRect, threshold: f64) -> LodDecision {
    if !node.intersects(viewport) {
        LodDecision::Skip
    } else if node.w.max(node.h) < threshold {
        LodDecision::StaticImage
    } else {
        LodDecision::Interactive
    }
}
