use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HullError;
use crate::contour::Point;

const EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) <= self.radius + slack
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    fn from_two(a: [f64; 2], b: [f64; 2]) -> Self {
        let center = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        Self {
            center,
            radius: (a[0] - center[0]).hypot(a[1] - center[1]),
        }
    }

    /// Circumcircle, or the widest diametral circle when the points are collinear.
    fn from_three(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Self {
        let (bx, by) = (b[0] - a[0], b[1] - a[1]);
        let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
        let d = 2.0 * (bx * cy - by * cx);
        if d.abs() < 1e-12 {
            let candidates = [Self::from_two(a, b), Self::from_two(a, c), Self::from_two(b, c)];
            return candidates
                .into_iter()
                .max_by(|p, q| p.radius.total_cmp(&q.radius))
                .expect("three candidates");
        }
        let b2 = bx * bx + by * by;
        let c2 = cx * cx + cy * cy;
        let ux = (cy * b2 - by * c2) / d;
        let uy = (bx * c2 - cx * b2) / d;
        Self {
            center: [a[0] + ux, a[1] + uy],
            radius: ux.hypot(uy),
        }
    }
}

/// Smallest circle enclosing every point.
pub fn min_enclosing_circle(points: &[Point]) -> Result<Circle, HullError> {
    let pts: Vec<[f64; 2]> = points.iter().map(|p| p.to_f64()).collect();
    min_enclosing_circle_f64(&pts)
}

/// Welzl's algorithm in its iterative form over a seeded shuffle, so the
/// expected running time is linear and the output is reproducible.
pub fn min_enclosing_circle_f64(points: &[[f64; 2]]) -> Result<Circle, HullError> {
    if points.is_empty() {
        return Err(HullError::NoPoints);
    }
    let mut pts = points.to_vec();
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));

    let mut circle = Circle {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if circle.contains(pts[i], EPS) {
            continue;
        }
        circle = Circle {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if circle.contains(pts[j], EPS) {
                continue;
            }
            circle = Circle::from_two(pts[i], pts[j]);
            for k in 0..j {
                if !circle.contains(pts[k], EPS) {
                    circle = Circle::from_three(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    Ok(circle)
}
