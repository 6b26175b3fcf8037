//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use handsign::contour::{Contour, Point};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn pt(x: i32, y: i32) -> Point {
    Point::new(x, y)
}

pub fn contour_of(points: &[(i32, i32)]) -> Contour {
    Contour::new(points.iter().map(|&(x, y)| pt(x, y)).collect()).unwrap()
}

fn cross(o: Point, a: Point, b: Point) -> i64 {
    (a.x as i64 - o.x as i64) * (b.y as i64 - o.y as i64) - (a.y as i64 - o.y as i64) * (b.x as i64 - o.x as i64)
}

/// Extreme points of a set: the endpoints of every pair that has all other
/// points on one side or on the segment between them. O(n^3).
pub fn brute_force_hull(points: &[Point]) -> BTreeSet<Point> {
    let distinct: Vec<Point> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if distinct.len() <= 2 {
        return distinct.into_iter().collect();
    }
    let within = |a: Point, b: Point, p: Point| {
        p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    };
    let mut out = BTreeSet::new();
    for &a in &distinct {
        for &b in &distinct {
            if a == b {
                continue;
            }
            let edge = distinct.iter().all(|&p| {
                let c = cross(a, b, p);
                c > 0 || (c == 0 && within(a, b, p))
            });
            if edge {
                out.insert(a);
                out.insert(b);
            }
        }
    }
    // All collinear: only the two extremes bound the set.
    if out.is_empty() {
        let lo = *distinct.first().unwrap();
        let hi = *distinct.last().unwrap();
        out.insert(lo);
        out.insert(hi);
    }
    out
}

/// Deepest contour point strictly between two contour indices, walking
/// forward with wrap-around. Distance is |cross| / chord in plain f64.
/// Returns the first index reaching the maximum and that maximum.
pub fn exhaustive_deepest(c: &Contour, start: usize, end: usize) -> Option<(usize, f64)> {
    let n = c.len();
    let (a, b) = (c[start], c[end]);
    let (ax, ay, bx, by) = (a.x as f64, a.y as f64, b.x as f64, b.y as f64);
    let chord = (bx - ax).hypot(by - ay);
    let mut best: Option<(usize, f64)> = None;
    let mut i = (start + 1) % n;
    while i != end {
        let p = c[i];
        let d = ((bx - ax) * (p.y as f64 - ay) - (by - ay) * (p.x as f64 - ax)).abs() / chord;
        if best.is_none_or(|(_, bd)| d > bd) {
            best = Some((i, d));
        }
        i = (i + 1) % n;
    }
    best
}

/// Angle at `far` from the cosine rule with exact integer squared side lengths.
pub fn cosine_rule_deg(start: Point, end: Point, far: Point) -> f64 {
    let sq = |p: Point, q: Point| {
        let (dx, dy) = (p.x as i64 - q.x as i64, p.y as i64 - q.y as i64);
        dx * dx + dy * dy
    };
    let a2 = sq(start, end);
    let b2 = sq(far, start);
    let c2 = sq(far, end);
    let num = (b2 + c2 - a2) as f64;
    let den = 2.0 * ((b2 as f64) * (c2 as f64)).sqrt();
    (num / den).clamp(-1.0, 1.0).acos().to_degrees()
}

fn orient(a: Point, b: Point, c: Point) -> i64 {
    cross(a, b, c).signum()
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    (o1 * o2 < 0 && o3 * o4 < 0) || on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

pub fn is_simple(p: &[Point]) -> bool {
    let n = p.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if p[i] == p[j] {
                return false;
            }
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && segments_touch(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Random simple star-shaped polygon around `center` with radii in `[0.3, 1] * scale`.
pub fn random_simple_polygon(rng: &mut ChaCha8Rng, scale: f64, center: (i32, i32)) -> Vec<Point> {
    loop {
        let n = rng.random_range(3..24);
        let mut raw: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.3..1.0)))
            .collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pts: Vec<Point> = raw
            .iter()
            .map(|&(t, r)| {
                let a = t * std::f64::consts::TAU;
                pt(
                    center.0 + (scale * r * a.cos()).round() as i32,
                    center.1 + (scale * r * a.sin()).round() as i32,
                )
            })
            .collect();
        pts.dedup();
        if is_simple(&pts) && handsign::contour::signed_double_area(&pts) != 0 {
            return pts;
        }
    }
}

/// Rectangle `[0, w] x [0, h]` with rectangular notches cut down from its top
/// edge, listed counter-clockwise on screen starting at the top-left corner.
pub fn random_notched_polygon(rng: &mut ChaCha8Rng) -> Vec<Point> {
    let w = rng.random_range(80..400);
    let h = rng.random_range(60..300);
    // Notch boundaries: strictly increasing x values inside (0, w).
    let slots = rng.random_range(0..6usize);
    let mut xs: Vec<i32> = (0..slots * 2).map(|_| rng.random_range(1..w)).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() % 2 == 1 {
        xs.pop();
    }
    let mut pts = vec![pt(0, 0), pt(0, h), pt(w, h), pt(w, 0)];
    // Walk the top edge right to left, dipping into each notch.
    for pair in xs.chunks_exact(2).rev() {
        let depth = rng.random_range(1..h);
        let (l, r) = (pair[0], pair[1]);
        pts.push(pt(r, 0));
        pts.push(pt(r, depth));
        pts.push(pt(l, depth));
        pts.push(pt(l, 0));
    }
    pts.dedup();
    pts
}

/// Scanline rasterization: the count and centroid of the unit pixels whose
/// centres fall inside the polygon.
pub fn scanline_centroid(poly: &[Point]) -> (f64, f64, f64) {
    let ys = poly.iter().map(|p| p.y);
    let (ymin, ymax) = (ys.clone().min().unwrap(), ys.max().unwrap());
    let (mut count, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64);
    let mut xs = Vec::new();
    for y in ymin..ymax {
        let yc = y as f64 + 0.5;
        xs.clear();
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (y0, y1) = (p.y as f64, q.y as f64);
            if (y0 <= yc) != (y1 <= yc) {
                xs.push(p.x as f64 + (yc - y0) / (y1 - y0) * (q.x as f64 - p.x as f64));
            }
        }
        xs.sort_by(f64::total_cmp);
        for span in xs.chunks_exact(2) {
            let lo = (span[0] - 0.5).ceil() as i64;
            let hi = (span[1] - 0.5).floor() as i64;
            if hi < lo {
                continue;
            }
            let k = (hi - lo + 1) as f64;
            count += k;
            // Sum of pixel centres lo+0.5 ..= hi+0.5.
            sx += k * ((lo + hi) as f64 / 2.0 + 0.5);
            sy += k * yc;
        }
    }
    (count, sx / count, sy / count)
}
