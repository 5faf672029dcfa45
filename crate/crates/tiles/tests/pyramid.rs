use std::collections::BTreeSet;

use combine_analysis::{parse_edge_list, WeightedGraph};
use combine_tiles::raster::Segment;
use combine_tiles::*;
use proptest::prelude::*;
use sha2::{Digest, Sha256};

/// Bresenham with an incremental error term, one octant family at a time.
fn incremental_line(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (p, q) = if a <= b { (a, b) } else { (b, a) };
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let sy = if dy < 0 { -1 } else { 1 };
    let ady = dy.abs();
    let mut out = Vec::new();
    if dx >= ady {
        let (mut y, mut err) = (p.1, dx);
        for x in p.0..=q.0 {
            out.push((x, y));
            err += 2 * ady;
            if dx > 0 && err >= 2 * dx {
                y += sy;
                err -= 2 * dx;
            }
        }
    } else {
        let (mut x, mut err) = (p.0, ady);
        for t in 0..=ady {
            out.push((x, p.1 + sy * t));
            err += 2 * dx;
            if err >= 2 * ady {
                x += 1;
                err -= 2 * ady;
            }
        }
    }
    out
}

fn random_scene(seed: u64, n: usize, m: usize) -> (WeightedGraph, Vec<(f64, f64)>, Vec<Option<String>>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut g = WeightedGraph::new(n);
    for _ in 0..m {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            g.add_edge(u, v, rng.random_range(0.0..1.0)).unwrap();
        }
    }
    let pos = (0..n).map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-5.0..5.0))).collect();
    let cats = (0..n)
        .map(|i| match i % 3 {
            0 => Some("kinase".to_string()),
            1 => Some("gpcr".to_string()),
            _ => None,
        })
        .collect();
    (g, pos, cats)
}

fn palette() -> Palette {
    [("kinase".to_string(), [200, 30, 30]), ("gpcr".to_string(), [30, 30, 200])].into()
}

fn colors(cats: &[Option<String>]) -> Vec<Rgb> {
    let p = palette();
    cats.iter().map(|c| c.as_ref().and_then(|c| p.get(c)).copied().unwrap_or(DEFAULT_NODE_COLOR)).collect()
}

fn edge_pairs(g: &WeightedGraph) -> Vec<(usize, usize)> {
    g.edges.iter().map(|e| (e.u, e.v)).collect()
}

#[test]
fn level_sides_and_tile_counts() {
    let sides: Vec<u32> = (0..=6).map(level_side).collect();
    assert_eq!(sides, vec![256, 512, 1024, 2048, 4096, 8192, 16384]);
    let counts: Vec<usize> = (0..=6).map(|z| level_coords(z).count()).collect();
    assert_eq!(counts, vec![1, 4, 16, 64, 256, 1024, 4096]);
    assert_eq!(counts.iter().sum::<usize>(), 5461);
    for z in 0..=4 {
        let img = RgbImage::filled(level_side(z), level_side(z), BACKGROUND);
        assert_eq!(cut_tiles(&img, z).unwrap().len(), 1 << (2 * z));
    }
}

#[test]
fn tiles_reassemble_and_match_per_tile_rendering() {
    for seed in 0..6 {
        let (g, pos, cats) = random_scene(seed, 40, 60);
        let bbox = BBox::of_points(&pos);
        for z in 0..=3 {
            let img = rasterize_level(&pos, &edge_pairs(&g), &colors(&cats), &bbox, z).unwrap();
            assert_eq!((img.width, img.height), (level_side(z), level_side(z)));
            let tiles = cut_tiles(&img, z).unwrap();
            assert_eq!(assemble(&tiles, z), img);
            let scene = LevelScene::new(z, &bbox, &pos, &colors(&cats), &edge_pairs(&g)).unwrap();
            let bins = scene.bin();
            for (c, tile) in &tiles {
                let alone = scene
                    .render_tile(&bins, c.x, c.y)
                    .unwrap_or_else(|| RgbImage::filled(TILE_SIZE, TILE_SIZE, BACKGROUND));
                assert_eq!(&alone, tile, "seed {seed} tile {c:?}");
            }
        }
    }
}

#[test]
fn pyramid_checksum_matches_independent_recomputation() {
    let (g, pos, cats) = random_scene(9, 30, 50);
    let opts = PyramidOptions { use_mst: false, max_zoom: 3 };
    let p = build_pyramid(&g, &pos, &cats, &palette(), opts).unwrap();
    let bbox = BBox::of_points(&pos);
    let mut h = Sha256::new();
    for z in 0..=3 {
        let img = rasterize_level(&pos, &edge_pairs(&g), &colors(&cats), &bbox, z).unwrap();
        for (c, tile) in cut_tiles(&img, z).unwrap() {
            h.update(&tile.data);
            assert_eq!(RgbImage::decode_png(p.tile(&c).unwrap()).unwrap(), tile);
        }
    }
    assert_eq!(p.manifest.checksum, hex::encode(h.finalize()));
}

#[test]
fn full_pyramid_for_single_node() {
    let g = WeightedGraph::new(1);
    let a = build_pyramid(&g, &[(3.0, 4.0)], &[None], &Palette::new(), PyramidOptions::default()).unwrap();
    assert_eq!(a.tile_count(), 5461);
    assert_eq!(a.manifest.total_tiles, 5461);
    assert_eq!(a.manifest.level_sides[4], 4096);
    assert_eq!(a.manifest.side_law, "256*2^z");
    let non_white = a
        .coords()
        .filter(|c| !RgbImage::decode_png(a.tile(c).unwrap()).unwrap().is_uniform(BACKGROUND))
        .count();
    // The single disc sits at the level center, touching at most 4 tiles.
    assert!((1..=4 * 7).contains(&non_white), "{non_white}");
    let b = build_pyramid(&g, &[(3.0, 4.0)], &[None], &Palette::new(), PyramidOptions::default()).unwrap();
    assert_eq!(a.manifest.checksum, b.manifest.checksum);
}

#[test]
fn mst_option_drops_triangle_edge() {
    let g = parse_edge_list("0 1 1\n1 2 2\n0 2 3\n").unwrap();
    let pos = [(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)];
    let cats = [None, None, None];
    let opts = |use_mst| PyramidOptions { use_mst, max_zoom: 2 };
    let full = build_pyramid(&g, &pos, &cats, &Palette::new(), opts(false)).unwrap();
    let reduced = build_pyramid(&g, &pos, &cats, &Palette::new(), opts(true)).unwrap();
    assert_eq!(full.manifest.drawn_edges, 3);
    assert_eq!(reduced.manifest.drawn_edges, 2);
    assert_ne!(full.manifest.checksum, reduced.manifest.checksum);
    let bbox = BBox::of_points(&pos);
    let expected = rasterize_level(&pos, &[(0, 1), (1, 2)], &[], &bbox, 2).unwrap();
    let tiles: Vec<_> = level_coords(2)
        .map(|c| {
            let img = RgbImage::decode_png(reduced.tile(&c).unwrap()).unwrap();
            (c, img)
        })
        .collect();
    assert_eq!(assemble(&tiles, 2), expected);
}

#[test]
fn pyramid_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (g, pos, cats) = random_scene(2, 10, 12);
    let p = build_pyramid(&g, &pos, &cats, &palette(), PyramidOptions { use_mst: true, max_zoom: 2 }).unwrap();
    p.write_to(dir.path()).unwrap();
    assert_eq!(read_manifest(dir.path()).unwrap(), p.manifest);
    assert!(dir.path().join("tiles/2/3/1.png").exists());
    assert!(verify_dir(dir.path()).unwrap());
    std::fs::copy(dir.path().join("tiles/0/0/0.png"), dir.path().join("tiles/1/0/0.png")).unwrap();
    assert!(!verify_dir(dir.path()).unwrap());
}

#[test]
fn missing_positions_rejected() {
    let g = parse_edge_list("0 1\n").unwrap();
    assert!(matches!(
        build_pyramid(&g, &[(0.0, 0.0)], &[], &Palette::new(), PyramidOptions::default()),
        Err(TileError::MissingPosition(_))
    ));
    assert!(matches!(
        build_pyramid(&g, &[(0.0, 0.0), (f64::NAN, 1.0)], &[], &Palette::new(), PyramidOptions::default()),
        Err(TileError::NonFinite(_))
    ));
}

#[test]
fn layout_is_bitwise_deterministic() {
    let (g, _, _) = random_scene(4, 60, 120);
    let a = force_layout(&g, 7, 80).unwrap();
    let b = force_layout(&g, 7, 80).unwrap();
    let bits = |l: &Layout| l.points.iter().map(|p| (p.0.to_bits(), p.1.to_bits())).collect::<Vec<_>>();
    assert_eq!(bits(&a), bits(&b));
    assert_ne!(bits(&a), bits(&force_layout(&g, 8, 80).unwrap()));
    assert!(a.points.iter().all(|p| p.0.is_finite() && p.1.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_form_line_matches_incremental(a in (-300i64..300, -300i64..300), b in (-300i64..300, -300i64..300)) {
        let seg: Vec<_> = Segment::new(a, b).pixels().collect();
        prop_assert_eq!(seg, incremental_line(a, b));
    }

    #[test]
    fn segment_tiles_match_pixel_tiles(a in (0i64..1024, 0i64..1024), b in (0i64..1024, 0i64..1024)) {
        let s = Segment::new(a, b);
        let expected: BTreeSet<(u32, u32)> = s.pixels().map(|(x, y)| ((x / 256) as u32, (y / 256) as u32)).collect();
        let got: BTreeSet<(u32, u32)> = s.tiles(4).into_iter().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn layout_export_import_identity(points in prop::collection::vec((-1e9f64..1e9, -1e9f64..1e9), 0..40)) {
        let layout = Layout { ids: (0..points.len()).map(|i| format!("n{i}")).collect(), points };
        let back = import_layout(&export_layout(&layout).unwrap()).unwrap();
        prop_assert_eq!(back, layout);
    }

    #[test]
    fn viewport_tiles_valid_and_translate(z in 0u8..=6, left in -600.0f64..17000.0, top in -600.0f64..17000.0,
                                          w in 1.0f64..2000.0, h in 1.0f64..2000.0) {
        let set = tiles_for_pixel_rect(z, left, top, w, h);
        prop_assert!(set.iter().all(|c| c.is_valid() && c.z == z));
        let n = tiles_per_axis(z) as f64 * 256.0;
        // Away from the level border, moving one tile right shifts by one.
        if left >= 512.0 && top >= 256.0 && left + w + 768.0 <= n && top + h + 256.0 <= n {
            let moved = tiles_for_pixel_rect(z, left + 256.0, top, w, h);
            let shifted: BTreeSet<TileCoord> = set.iter().map(|c| TileCoord::new(z, c.x + 1, c.y)).collect();
            prop_assert_eq!(moved, shifted);
        }
    }

    #[test]
    fn lod_monotone_in_size(x in -500.0f64..1500.0, y in -500.0f64..1500.0, w in 0.0f64..400.0, h in 0.0f64..400.0, grow in 1.0f64..10.0) {
        let vp = ScreenRect::new(0.0, 0.0, 1024.0, 768.0);
        let small = ScreenRect::new(x, y, w, h);
        let big = ScreenRect::new(x, y, w * grow, h * grow);
        if lod_decide(&small, &vp) == LodDecision::Interactive {
            prop_assert_eq!(lod_decide(&big, &vp), LodDecision::Interactive);
        }
    }
}
