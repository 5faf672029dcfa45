//! Node positions: in-process force-directed layout and the `id x y`
//! text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use combine_analysis::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TileError};

/// Largest graph laid out in process. Bigger networks come with an
/// external layout.
pub const MAX_LAYOUT_NODES: usize = 50_000;

/// World coordinates in node order, each with an id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    pub ids: Vec<String>,
    pub points: Vec<(f64, f64)>,
}

impl Layout {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<(f64, f64)> {
        self.ids.iter().position(|x| x == id).map(|i| self.points[i])
    }

    /// Positions for graph nodes `0..n`, looked up by their decimal ids.
    pub fn points_for_nodes(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        let index: BTreeMap<&str, (f64, f64)> =
            self.ids.iter().map(String::as_str).zip(self.points.iter().copied()).collect();
        (0..n)
            .map(|i| {
                let id = i.to_string();
                index.get(id.as_str()).copied().ok_or(TileError::MissingPosition(id))
            })
            .collect()
    }
}

/// Fruchterman-Reingold layout from a seeded circular start. Output depends
/// only on the graph, seed and iteration count.
pub fn force_layout(g: &WeightedGraph, seed: u64, iterations: usize) -> Result<Layout> {
    let n = g.nodes;
    if n > MAX_LAYOUT_NODES {
        return Err(TileError::LayoutTooLarge { nodes: n, limit: MAX_LAYOUT_NODES });
    }
    let ids = (0..n).map(|i| i.to_string()).collect();
    if n == 0 {
        return Ok(Layout::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = (n as f64).sqrt();
    let tau = 2.0 * std::f64::consts::PI;
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let jitter: f64 = rng.random_range(0.0..0.5);
            let angle = tau * (i as f64 + jitter) / n as f64;
            (radius * libm::cos(angle), radius * libm::sin(angle))
        })
        .collect();

    let k = 1.0;
    let start_temp = 0.1 * radius.max(1.0);
    let mut disp = vec![(0.0f64, 0.0f64); n];
    for it in 0..iterations {
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..n {
            for j in i + 1..n {
                let (mut dx, mut dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
                let mut d2 = dx * dx + dy * dy;
                if d2 < 1e-18 {
                    // Coincident nodes: separate along a fixed direction.
                    dx = 1e-6;
                    dy = 0.0;
                    d2 = 1e-12;
                }
                let f = k * k / d2;
                disp[i].0 += dx * f;
                disp[i].1 += dy * f;
                disp[j].0 -= dx * f;
                disp[j].1 -= dy * f;
            }
        }
        for e in &g.edges {
            let (dx, dy) = (pos[e.u].0 - pos[e.v].0, pos[e.u].1 - pos[e.v].1);
            let d = (dx * dx + dy * dy).sqrt();
            let f = d / k;
            disp[e.u].0 -= dx * f;
            disp[e.u].1 -= dy * f;
            disp[e.v].0 += dx * f;
            disp[e.v].1 += dy * f;
        }
        let temp = start_temp * (1.0 - it as f64 / iterations as f64);
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = (d.0 * d.0 + d.1 * d.1).sqrt();
            if len > 0.0 {
                let step = len.min(temp) / len;
                p.0 += d.0 * step;
                p.1 += d.1 * step;
            }
        }
    }
    let cx = pos.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = pos.iter().map(|p| p.1).sum::<f64>() / n as f64;
    for p in &mut pos {
        p.0 -= cx;
        p.1 -= cy;
    }
    Ok(Layout { ids, points: pos })
}

/// Parses `id x y` lines; blank lines and `#` comments are skipped.
pub fn import_layout(text: &str) -> Result<Layout> {
    let mut out = Layout::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| TileError::LayoutParse { line: line_no, message };
        if fields.len() != 3 {
            return Err(err(format!("expected `id x y`, found {} fields", fields.len())));
        }
        let coord = |s: &str| -> Result<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(format!("bad coordinate {s:?}"))),
            }
        };
        let (x, y) = (coord(fields[1])?, coord(fields[2])?);
        if seen.insert(fields[0].to_string(), line_no).is_some() {
            return Err(TileError::DuplicateId { id: fields[0].to_string(), line: line_no });
        }
        out.ids.push(fields[0].to_string());
        out.points.push((x, y));
    }
    Ok(out)
}

/// Writes one `id x y` line per node with round-trip float formatting.
pub fn export_layout(layout: &Layout) -> Result<String> {
    let mut s = String::new();
    for (id, (x, y)) in layout.ids.iter().zip(&layout.points) {
        if id.is_empty() || id.contains(char::is_whitespace) || id.starts_with('#') {
            return Err(TileError::LayoutParse { line: 0, message: format!("id {id:?} cannot be written") });
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(TileError::NonFinite(id.clone()));
        }
        writeln!(s, "{id} {x} {y}").unwrap();
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use combine_analysis::parse_edge_list;

    #[test]
    fn single_node_at_origin() {
        let l = force_layout(&WeightedGraph::new(1), 1, 50).unwrap();
        assert_eq!(l.points, vec![(0.0, 0.0)]);
    }

    #[test]
    fn pair_symmetric_about_origin() {
        let g = parse_edge_list("0 1\n").unwrap();
        let l = force_layout(&g, 42, 100).unwrap();
        let (a, b) = (l.points[0], l.points[1]);
        assert!((a.0 + b.0).abs() < 1e-9 && (a.1 + b.1).abs() < 1e-9);
        assert!(a != b);
    }

    #[test]
    fn guard_on_size() {
        let err = force_layout(&WeightedGraph::new(MAX_LAYOUT_NODES + 1), 0, 1).unwrap_err();
        assert!(err.to_string().contains("import"));
    }

    #[test]
    fn import_basic_and_duplicates() {
        let l = import_layout("a 0 0\nb 1 1").unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.get("b"), Some((1.0, 1.0)));
        match import_layout("a 0 0\n# c\na 1 1\n") {
            Err(TileError::DuplicateId { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(import_layout("a 0\n"), Err(TileError::LayoutParse { line: 1, .. })));
        assert!(matches!(import_layout("a 0 inf\n"), Err(TileError::LayoutParse { .. })));
    }
}
