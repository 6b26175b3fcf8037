//! Convex hull, convexity defects and the minimum enclosing circle.

mod circle;
mod defects;

pub use circle::{min_enclosing_circle, min_enclosing_circle_f64, Circle};
pub use defects::{convexity_defects, Defect};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{Contour, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HullError {
    #[error("no points to enclose")]
    NoPoints,
}

/// Convex hull as indices into the owning contour, in contour order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hull {
    indices: Vec<usize>,
}

impl Hull {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn points(&self, c: &Contour) -> Vec<Point> {
        self.indices.iter().map(|&i| c[i]).collect()
    }

    /// Shoelace area of the hull polygon.
    pub fn area(&self, c: &Contour) -> f64 {
        crate::contour::signed_double_area(&self.points(c)).unsigned_abs() as f64 / 2.0
    }
}

pub(crate) fn cross(o: Point, a: Point, b: Point) -> i64 {
    (a.x - o.x) as i64 * (b.y - o.y) as i64 - (a.y - o.y) as i64 * (b.x - o.x) as i64
}

/// Andrew's monotone chain over the distinct contour points.
///
/// Collinear boundary points are dropped. Each hull vertex maps back to the
/// first contour index holding that coordinate, and the indices are returned
/// sorted so they follow the contour's traversal.
pub fn convex_hull(c: &Contour) -> Hull {
    let mut first_index: HashMap<Point, usize> = HashMap::with_capacity(c.len());
    for (i, &p) in c.points().iter().enumerate() {
        first_index.entry(p).or_insert(i);
    }
    let mut pts: Vec<Point> = first_index.keys().copied().collect();
    pts.sort_unstable();

    let vertices = monotone_chain(&pts);
    let mut indices: Vec<usize> = vertices.iter().map(|p| first_index[p]).collect();
    indices.sort_unstable();
    Hull { indices }
}

/// Hull vertices of sorted, distinct points, counter-clockwise in a y-up frame.
fn monotone_chain(sorted: &[Point]) -> Vec<Point> {
    if sorted.len() <= 2 {
        return sorted.to_vec();
    }
    let mut lower: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in sorted {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(sorted.len());
    for &p in sorted.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn contour(points: &[(i32, i32)]) -> Contour {
        Contour::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    /// O(n^3) oracle: a pair is a hull edge when every other point sits on one
    /// side of it or on the closed segment between the pair.
    pub(crate) fn brute_force_hull(points: &[Point]) -> BTreeSet<Point> {
        let distinct: Vec<Point> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if distinct.len() <= 2 {
            return distinct.into_iter().collect();
        }
        let mut out = BTreeSet::new();
        for &p in &distinct {
            for &q in &distinct {
                if p == q {
                    continue;
                }
                let edge = distinct.iter().all(|&r| {
                    let c = cross(p, q, r);
                    if c != 0 {
                        return c > 0;
                    }
                    let t = (r.x - p.x) as i64 * (q.x - p.x) as i64 + (r.y - p.y) as i64 * (q.y - p.y) as i64;
                    let len2 = (q.x - p.x) as i64 * (q.x - p.x) as i64 + (q.y - p.y) as i64 * (q.y - p.y) as i64;
                    (0..=len2).contains(&t)
                });
                if edge {
                    out.insert(p);
                    out.insert(q);
                }
            }
        }
        out
    }

    #[test]
    fn square_with_center() {
        let c = contour(&[(0, 0), (5, 5), (10, 0), (10, 10), (0, 10)]);
        let h = convex_hull(&c);
        assert_eq!(h.indices(), &[0, 2, 3, 4]);
    }

    #[test]
    fn collinear_points_keep_endpoints() {
        let h = convex_hull(&contour(&[(0, 0), (1, 0), (2, 0)]));
        assert_eq!(h.indices(), &[0, 2]);
    }

    #[test]
    fn single_and_duplicate_points() {
        assert_eq!(convex_hull(&contour(&[(3, 3)])).indices(), &[0]);
        assert_eq!(convex_hull(&contour(&[(3, 3), (3, 3)])).indices(), &[0]);
        assert_eq!(convex_hull(&contour(&[(0, 0), (4, 1), (0, 0)])).indices(), &[0, 1]);
    }

    #[test]
    fn hull_area_of_square() {
        let c = contour(&[(0, 0), (5, 5), (10, 0), (10, 10), (0, 10)]);
        assert_eq!(convex_hull(&c).area(&c), 100.0);
    }

    proptest! {
        #[test]
        fn monotone_chain_matches_brute_force(
            raw in proptest::collection::vec((-50i32..50, -50i32..50), 1..40)
        ) {
            let c = contour(&raw);
            let h = convex_hull(&c);
            let got: BTreeSet<Point> = h.points(&c).into_iter().collect();
            prop_assert_eq!(got, brute_force_hull(c.points()));
        }
    }
}
