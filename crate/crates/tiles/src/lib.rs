//! Tile pyramids for browsing networks too large to draw live.

pub mod error;
pub mod layout;
pub mod lod;
pub mod projection;
pub mod pyramid;
pub mod raster;
pub mod viewport;

pub use error::{Result, TileError};
pub use layout::{export_layout, force_layout, import_layout, Layout, MAX_LAYOUT_NODES};
pub use lod::{lod_decide, lod_decide_with, LodDecision, ScreenRect, DEFAULT_STATIC_THRESHOLD};
pub use projection::{
    level_side, pixel_to_world, tiles_per_axis, world_to_pixel, world_to_pixel_f64, BBox, MAX_ZOOM,
    TILE_SIZE,
};
pub use pyramid::{
    build_pyramid, read_manifest, tile_index, tile_path, verify_dir, Manifest, PyramidOptions,
    TilePyramid, MANIFEST_FILE,
};
pub use raster::{
    assemble, cut_tiles, level_coords, rasterize_level, LevelScene, Palette, Rgb, RgbImage,
    TileCoord, BACKGROUND, DEFAULT_NODE_COLOR, EDGE_COLOR,
};
pub use viewport::{tiles_for_pixel_rect, tiles_for_viewport, Viewport};
