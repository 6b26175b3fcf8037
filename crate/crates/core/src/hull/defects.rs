use serde::{Deserialize, Serialize};

use super::Hull;
use crate::contour::{Contour, Point};

/// A cavity between two consecutive hull anchors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Defect {
    pub start_idx: usize,
    pub end_idx: usize,
    /// Contour index of the point farthest from the start-end chord.
    pub far_idx: usize,
    /// Perpendicular distance from the far point to the chord, in pixels.
    pub depth: f64,
}

impl Defect {
    pub fn points(&self, c: &Contour) -> (Point, Point, Point) {
        (c[self.start_idx], c[self.end_idx], c[self.far_idx])
    }
}

/// One defect per hull edge that bounds a cavity, at the deepest contour point.
///
/// Contour points strictly between consecutive hull indices (wrapping past the
/// end of the contour) are scanned; the first point at maximal distance wins.
/// Edges with no interior points, with coincident anchors, or whose interior
/// points all lie on the chord produce nothing.
pub fn convexity_defects(c: &Contour, h: &Hull) -> Vec<Defect> {
    let idx = h.indices();
    let n = c.len();
    if idx.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for k in 0..idx.len() {
        let (start_idx, end_idx) = (idx[k], idx[(k + 1) % idx.len()]);
        let (a, b) = (c[start_idx], c[end_idx]);
        if a == b {
            continue;
        }
        let (dx, dy) = ((b.x - a.x) as i64, (b.y - a.y) as i64);
        let chord = ((dx * dx + dy * dy) as f64).sqrt();

        let gap = (end_idx + n - start_idx) % n;
        let mut best: Option<(usize, i64)> = None;
        for step in 1..gap {
            let i = (start_idx + step) % n;
            let p = c[i];
            let twice_area = (dx * (p.y - a.y) as i64 - dy * (p.x - a.x) as i64).abs();
            if best.is_none_or(|(_, d)| twice_area > d) {
                best = Some((i, twice_area));
            }
        }
        if let Some((far_idx, twice_area)) = best {
            if twice_area > 0 {
                out.push(Defect {
                    start_idx,
                    end_idx,
                    far_idx,
                    depth: twice_area as f64 / chord,
                });
            }
        }
    }
    out
}
