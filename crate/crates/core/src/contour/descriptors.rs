use serde::{Deserialize, Serialize};

use super::{Contour, ContourError, Point};

/// Twice the signed shoelace area, exact in integers.
///
/// Negative for outlines that run counter-clockwise on screen (y down).
pub fn signed_double_area(points: &[Point]) -> i64 {
    if points.len() < 3 {
        return 0;
    }
    let n = points.len();
    (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p.x as i64 * q.y as i64 - q.x as i64 * p.y as i64
        })
        .sum()
}

/// Absolute shoelace area of the contour polygon; zero below three points.
pub fn contour_area(c: &Contour) -> f64 {
    signed_double_area(c.points()).unsigned_abs() as f64 / 2.0
}

/// Closed-polygon arc length, including the edge from the last point back to the first.
pub fn contour_perimeter(c: &Contour) -> f64 {
    let p = c.points();
    if p.len() < 2 {
        return 0.0;
    }
    (0..p.len())
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % p.len()]);
            ((b.x - a.x) as f64).hypot((b.y - a.y) as f64)
        })
        .sum()
}

/// Spatial moments of the filled contour polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub mu20: f64,
    pub mu11: f64,
    pub mu02: f64,
}

impl Moments {
    pub fn centroid(&self) -> (f64, f64) {
        (self.m10 / self.m00, self.m01 / self.m00)
    }
}

/// Raw and central moments by Green's theorem, accumulated edge by edge.
///
/// Sums are normalized to the polygon's orientation so `m00` is the unsigned
/// shoelace area and matches [`contour_area`] bit for bit.
pub fn moments(c: &Contour) -> Result<Moments, ContourError> {
    let p = c.points();
    if p.len() < 3 {
        return Err(ContourError::DegenerateContour("fewer than 3 points"));
    }
    let double_area = signed_double_area(p);
    if double_area == 0 {
        return Err(ContourError::DegenerateContour("zero area"));
    }
    let sign = double_area.signum() as f64;

    // Sums run in coordinates relative to the first vertex, which keeps the
    // central moments free of the cancellation far-from-origin shapes suffer.
    let (ox, oy) = (p[0].x as i64, p[0].y as i64);
    let local = |q: Point| [(q.x as i64 - ox) as f64, (q.y as i64 - oy) as f64];
    let (mut m10, mut m01, mut m20, mut m11, mut m02) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..p.len() {
        let [x0, y0] = local(p[i]);
        let [x1, y1] = local(p[(i + 1) % p.len()]);
        let cross = x0 * y1 - x1 * y0;
        m10 += cross * (x0 + x1);
        m01 += cross * (y0 + y1);
        m20 += cross * (x0 * x0 + x0 * x1 + x1 * x1);
        m11 += cross * (2.0 * x0 * y0 + x0 * y1 + x1 * y0 + 2.0 * x1 * y1);
        m02 += cross * (y0 * y0 + y0 * y1 + y1 * y1);
    }
    let m00 = double_area.unsigned_abs() as f64 / 2.0;
    let m10 = sign * m10 / 6.0;
    let m01 = sign * m01 / 6.0;
    let m20 = sign * m20 / 12.0;
    let m11 = sign * m11 / 24.0;
    let m02 = sign * m02 / 12.0;

    let (cx, cy) = (m10 / m00, m01 / m00);
    Ok(Moments {
        m00,
        m10: m10 + ox as f64 * m00,
        m01: m01 + oy as f64 * m00,
        mu20: (m20 - cx * m10).max(0.0),
        mu11: m11 - cx * m01,
        mu02: (m02 - cy * m01).max(0.0),
    })
}

/// Principal-axis angle in degrees, in `[0, 180)`.
///
/// Measured in image coordinates, so a shape elongated toward the lower right
/// reads as a small positive angle. Isotropic shapes report 0.
pub fn orientation(m: &Moments) -> f64 {
    let scale = (m.mu20 + m.mu02).abs().max(f64::MIN_POSITIVE);
    let diff = m.mu20 - m.mu02;
    if m.mu11.abs() <= 1e-12 * scale && diff.abs() <= 1e-12 * scale {
        return 0.0;
    }
    let deg = (0.5 * (2.0 * m.mu11).atan2(diff)).to_degrees();
    let wrapped = if deg < 0.0 { deg + 180.0 } else { deg };
    if wrapped >= 180.0 {
        0.0
    } else {
        wrapped
    }
}

/// Axis-aligned extent of the contour's points.
///
/// Width and height are coordinate spans (`max - min`), the same polygon
/// convention the shoelace area uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingRect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

pub fn bounding_rect(c: &Contour) -> BoundingRect {
    let p = c.points();
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (p[0].x, p[0].y, p[0].x, p[0].y);
    for q in &p[1..] {
        min_x = min_x.min(q.x);
        max_x = max_x.max(q.x);
        min_y = min_y.min(q.y);
        max_y = max_y.max(q.y);
    }
    BoundingRect {
        x: min_x,
        y: min_y,
        w: max_x - min_x,
        h: max_y - min_y,
    }
}

/// Descriptor vector the letter rules read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourFeatures {
    pub area: f64,
    pub perimeter: f64,
    /// Contour area over hull area.
    pub solidity: f64,
    /// Bounding width over bounding height.
    pub aspect_ratio: f64,
    pub orientation_deg: f64,
    /// Diameter of the circle with the same area.
    pub equiv_diameter: f64,
    pub bounding_rect: BoundingRect,
    pub defect_count: usize,
    pub centroid: [f64; 2],
    pub moments: Moments,
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN hull areas must be rejected
pub fn features(
    c: &Contour,
    hull_area: f64,
    defect_count: usize,
) -> Result<ContourFeatures, ContourError> {
    let area = contour_area(c);
    if area <= 0.0 {
        return Err(ContourError::DegenerateContour("zero area"));
    }
    if !(hull_area > 0.0) {
        return Err(ContourError::DegenerateContour("hull area must be positive"));
    }
    let rect = bounding_rect(c);
    if rect.h == 0 {
        return Err(ContourError::DegenerateContour("zero-height bounding rectangle"));
    }
    let m = moments(c)?;
    let (cx, cy) = m.centroid();
    Ok(ContourFeatures {
        area,
        perimeter: contour_perimeter(c),
        solidity: (area / hull_area).min(1.0),
        aspect_ratio: rect.w as f64 / rect.h as f64,
        orientation_deg: orientation(&m),
        equiv_diameter: (4.0 * area / std::f64::consts::PI).sqrt(),
        bounding_rect: rect,
        defect_count,
        centroid: [cx, cy],
        moments: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn contour(points: &[(i32, i32)]) -> Contour {
        Contour::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    /// Fan triangulation from the first vertex, signed triangle areas summed.
    fn fan_area(points: &[(i32, i32)]) -> f64 {
        let (ox, oy) = (points[0].0 as f64, points[0].1 as f64);
        let mut acc = 0.0;
        for w in points[1..].windows(2) {
            let (ax, ay) = (w[0].0 as f64 - ox, w[0].1 as f64 - oy);
            let (bx, by) = (w[1].0 as f64 - ox, w[1].1 as f64 - oy);
            acc += 0.5 * (ax * by - bx * ay);
        }
        acc.abs()
    }

    /// Pixel-sum moments of a polygon sampled on a `1/step` grid.
    pub(crate) fn rasterized_moments(points: &[(f64, f64)], step: f64) -> (f64, f64, f64, f64, f64, f64) {
        let xs = points.iter().map(|p| p.0);
        let ys = points.iter().map(|p| p.1);
        let (x0, x1) = (xs.clone().fold(f64::MAX, f64::min), xs.fold(f64::MIN, f64::max));
        let (y0, y1) = (ys.clone().fold(f64::MAX, f64::min), ys.fold(f64::MIN, f64::max));
        let (mut m00, mut m10, mut m01) = (0.0, 0.0, 0.0);
        let mut samples = Vec::new();
        let mut y = y0 + step / 2.0;
        while y < y1 {
            let mut x = x0 + step / 2.0;
            while x < x1 {
                if point_in_polygon(points, x, y) {
                    m00 += 1.0;
                    m10 += x;
                    m01 += y;
                    samples.push((x, y));
                }
                x += step;
            }
            y += step;
        }
        let (cx, cy) = (m10 / m00, m01 / m00);
        let (mut mu20, mut mu11, mut mu02) = (0.0, 0.0, 0.0);
        for (x, y) in samples {
            mu20 += (x - cx).powi(2);
            mu11 += (x - cx) * (y - cy);
            mu02 += (y - cy).powi(2);
        }
        let a = step * step;
        (m00 * a, cx, cy, mu20 * a, mu11 * a, mu02 * a)
    }

    pub(crate) fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
        let mut inside = false;
        let n = poly.len();
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = poly[i];
            let (xj, yj) = poly[j];
            if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    #[test]
    fn area_of_unit_square_and_triangle() {
        assert_eq!(contour_area(&contour(&[(0, 0), (1, 0), (1, 1), (0, 1)])), 1.0);
        assert_eq!(contour_area(&contour(&[(0, 0), (4, 0), (0, 3)])), 6.0);
        assert_eq!(contour_area(&contour(&[(0, 0), (4, 0)])), 0.0);
    }

    #[test]
    fn perimeter_cases() {
        assert_eq!(contour_perimeter(&contour(&[(0, 0), (1, 0), (1, 1), (0, 1)])), 4.0);
        assert_eq!(contour_perimeter(&contour(&[(0, 0), (3, 4)])), 10.0);
        assert_eq!(contour_perimeter(&contour(&[(5, 5)])), 0.0);
    }

    #[test]
    fn staircase_perimeter_matches_direct_sum() {
        // Diagonal run out and straight back: k diagonal steps then one long edge home.
        let k = 7;
        let mut pts: Vec<(i32, i32)> = (0..=k).map(|i| (i, i)).collect();
        pts.push((k, 0));
        let c = contour(&pts);
        let direct = k as f64 * 2f64.sqrt() + k as f64 + k as f64;
        assert!((contour_perimeter(&c) - direct).abs() < 1e-12);
    }

    #[test]
    fn unit_square_moments() {
        let m = moments(&contour(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        assert_eq!(m.m00, 1.0);
        assert_eq!(m.centroid(), (0.5, 0.5));
    }

    #[test]
    fn rectangle_centroid_and_symmetry() {
        let m = moments(&contour(&[(2, 4), (12, 4), (12, 10), (2, 10)])).unwrap();
        assert_eq!(m.centroid(), (7.0, 7.0));
        assert!(m.mu11.abs() < 1e-9);
        // w^3 h / 12 and w h^3 / 12 for a 10x6 box.
        assert!((m.mu20 - 500.0).abs() < 1e-9);
        assert!((m.mu02 - 180.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_moments() {
        assert!(moments(&contour(&[(0, 0), (1, 1)])).is_err());
        assert!(moments(&contour(&[(0, 0), (1, 1), (2, 2)])).is_err());
    }

    #[test]
    fn orientation_of_wide_rectangle_is_zero() {
        let m = moments(&contour(&[(0, 0), (40, 0), (40, 10), (0, 10)])).unwrap();
        assert_eq!(orientation(&m), 0.0);
        let tall = moments(&contour(&[(0, 0), (10, 0), (10, 40), (0, 40)])).unwrap();
        assert!((orientation(&tall) - 90.0).abs() < 1e-9);
    }

    #[test]
    fn orientation_of_rotated_rectangle_matches_pixel_sum() {
        // 120x30 rectangle rotated +45 degrees about the origin.
        let (c, s) = (45f64.to_radians().cos(), 45f64.to_radians().sin());
        let corners = [(-60.0, -15.0), (60.0, -15.0), (60.0, 15.0), (-60.0, 15.0)];
        let rotated: Vec<(f64, f64)> = corners
            .iter()
            .map(|&(x, y)| (200.0 + x * c - y * s, 200.0 + x * s + y * c))
            .collect();
        let (_, _, _, mu20, mu11, mu02) = rasterized_moments(&rotated, 0.5);
        let oracle = (0.5 * (2.0 * mu11).atan2(mu20 - mu02)).to_degrees();
        assert!((oracle - 45.0).abs() < 0.5);

        let ipts: Vec<(i32, i32)> = rotated.iter().map(|&(x, y)| (x.round() as i32, y.round() as i32)).collect();
        let m = moments(&contour(&ipts)).unwrap();
        assert!((orientation(&m) - 45.0).abs() < 0.5);
    }

    #[test]
    fn orientation_isotropic_fallback() {
        let disc: Vec<(i32, i32)> = (0..360)
            .map(|i| {
                let t = (i as f64).to_radians();
                ((1000.0 * t.cos()).round() as i32, (1000.0 * t.sin()).round() as i32)
            })
            .collect();
        let square = moments(&contour(&[(0, 0), (10, 0), (10, 10), (0, 10)])).unwrap();
        assert_eq!(orientation(&square), 0.0);
        let m = moments(&contour(&disc)).unwrap();
        let o = orientation(&m);
        // Rounded vertices leave a tiny anisotropy; it must not land near the wrap point.
        assert!(o == 0.0 || (m.mu20 - m.mu02).abs() / (m.mu20 + m.mu02) < 1e-4);
        let exact = Moments { m00: 1.0, m10: 0.0, m01: 0.0, mu20: 2.0, mu11: 0.0, mu02: 2.0 };
        assert_eq!(orientation(&exact), 0.0);
    }

    #[test]
    fn square_features() {
        let c = contour(&[(0, 0), (20, 0), (20, 20), (0, 20)]);
        let f = features(&c, contour_area(&c), 0).unwrap();
        assert_eq!(f.solidity, 1.0);
        assert_eq!(f.aspect_ratio, 1.0);
        assert_eq!(f.bounding_rect, BoundingRect { x: 0, y: 0, w: 20, h: 20 });
        assert!((f.equiv_diameter - (4.0 * 400.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn plus_sign_solidity() {
        let plus = [
            (10, 0), (20, 0), (20, 10), (30, 10), (30, 20), (20, 20),
            (20, 30), (10, 30), (10, 20), (0, 20), (0, 10), (10, 10),
        ];
        let hull = [(10, 0), (20, 0), (30, 10), (30, 20), (20, 30), (10, 30), (0, 20), (0, 10)];
        let c = contour(&plus);
        let (area, hull_area) = (fan_area(&plus), fan_area(&hull));
        assert_eq!(area, 500.0);
        assert_eq!(hull_area, 700.0);
        let f = features(&c, hull_area, 0).unwrap();
        assert!((f.solidity - area / hull_area).abs() < 1e-12);
    }

    #[test]
    fn disc_equivalent_diameter() {
        let r = 500.0;
        let pts: Vec<(i32, i32)> = (0..360)
            .map(|i| {
                let t = (i as f64).to_radians();
                ((r * t.cos()).round() as i32, (r * t.sin()).round() as i32)
            })
            .collect();
        let c = contour(&pts);
        let f = features(&c, contour_area(&c), 0).unwrap();
        assert!((f.equiv_diameter - 2.0 * r).abs() / (2.0 * r) < 0.02);
    }

    #[test]
    fn features_reject_degenerate_input() {
        let line = contour(&[(0, 0), (5, 0), (9, 0)]);
        assert!(features(&line, 1.0, 0).is_err());
        let sq = contour(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert!(features(&sq, 0.0, 0).is_err());
    }

    /// Star-shaped polygon: sorted angles, random radii.
    pub(crate) fn arb_star_polygon(min_scale: f64) -> impl Strategy<Value = Vec<(i32, i32)>> {
        (
            proptest::collection::vec((0.0f64..1.0, 0.3f64..1.0), 3..24),
            min_scale..(min_scale * 3.0),
        )
            .prop_map(|(raw, scale)| {
                let mut v = raw;
                v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let mut out: Vec<(i32, i32)> = v
                    .iter()
                    .map(|&(t, r)| {
                        let a = t * std::f64::consts::TAU;
                        ((scale * r * a.cos()).round() as i32 + 1000, (scale * r * a.sin()).round() as i32 + 1000)
                    })
                    .collect();
                out.dedup();
                out
            })
            .prop_filter("simple polygon", |p| p.len() >= 3 && is_simple(p))
    }

    fn orient(a: (i32, i32), b: (i32, i32), c: (i32, i32)) -> i64 {
        let (ax, ay, bx, by, cx, cy) = (a.0 as i64, a.1 as i64, b.0 as i64, b.1 as i64, c.0 as i64, c.1 as i64);
        ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)).signum()
    }

    fn on_segment(a: (i32, i32), b: (i32, i32), p: (i32, i32)) -> bool {
        orient(a, b, p) == 0
            && p.0 >= a.0.min(b.0)
            && p.0 <= a.0.max(b.0)
            && p.1 >= a.1.min(b.1)
            && p.1 <= a.1.max(b.1)
    }

    fn segments_touch(a: (i32, i32), b: (i32, i32), c: (i32, i32), d: (i32, i32)) -> bool {
        let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
        (o1 * o2 < 0 && o3 * o4 < 0)
            || on_segment(a, b, c)
            || on_segment(a, b, d)
            || on_segment(c, d, a)
            || on_segment(c, d, b)
    }

    /// No two non-adjacent edges touch and no vertex repeats.
    pub(crate) fn is_simple(p: &[(i32, i32)]) -> bool {
        let n = p.len();
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

    proptest! {
        #[test]
        fn shoelace_matches_fan_triangulation(poly in arb_star_polygon(50.0)) {
            prop_assume!(poly.len() >= 3);
            let c = contour(&poly);
            prop_assert!((contour_area(&c) - fan_area(&poly)).abs() < 1e-6);
        }

        #[test]
        fn area_equals_m00_exactly(poly in arb_star_polygon(20.0)) {
            let c = contour(&poly);
            prop_assume!(contour_area(&c) > 0.0);
            prop_assert_eq!(contour_area(&c), moments(&c).unwrap().m00);
        }

        #[test]
        fn central_moments_satisfy_cauchy_schwarz(poly in arb_star_polygon(20.0)) {
            let c = contour(&poly);
            prop_assume!(contour_area(&c) > 0.0);
            let m = moments(&c).unwrap();
            prop_assert!(m.mu20 >= 0.0 && m.mu02 >= 0.0);
            prop_assert!(m.mu11 * m.mu11 <= m.mu20 * m.mu02 * (1.0 + 1e-9) + 1e-6);
        }

        #[test]
        fn orientation_in_range(poly in arb_star_polygon(20.0)) {
            let c = contour(&poly);
            prop_assume!(contour_area(&c) > 0.0);
            let o = orientation(&moments(&c).unwrap());
            prop_assert!((0.0..180.0).contains(&o));
        }
    }
}
