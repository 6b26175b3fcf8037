use super::{contour_area, Contour, ContourError, Point};
use crate::imaging::BinaryMask;

// Moore neighbourhood, indexed so that increasing index turns counter-clockwise
// on screen (y down): E, NE, N, NW, W, SW, S, SE.
const NEIGHBOURS: [(i32, i32); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

fn direction_index(dx: i32, dy: i32) -> usize {
    NEIGHBOURS
        .iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack pixel must be a Moore neighbour")
}

/// Outer border of every 8-connected foreground component.
///
/// Contours are emitted in raster order of each component's first pixel. Each
/// one starts at that pixel and runs counter-clockwise as drawn on screen, which
/// makes its signed shoelace area in raw (y-down) coordinates negative. Holes
/// are never traced.
pub fn trace_contours(mask: &BinaryMask) -> Vec<Contour> {
    let (w, h) = (mask.width(), mask.height());
    let labels = label_components(mask);
    let mut traced = vec![false; labels.count];
    let mut contours = Vec::new();

    for y in 0..h {
        for x in 0..w {
            let Some(label) = labels.at(x, y, w) else {
                continue;
            };
            if traced[label] {
                continue;
            }
            traced[label] = true;
            contours.push(trace_outer(mask, Point::new(x as i32, y as i32)));
        }
    }
    contours
}

/// Moore-neighbour tracing from the raster-first pixel of a component.
///
/// The west neighbour of such a pixel is always background, which seeds the
/// backtrack. Tracing stops when the walk is about to repeat its first move
/// from the start pixel, so single-pixel-wide spurs are walked out and back.
fn trace_outer(mask: &BinaryMask, start: Point) -> Contour {
    let step = |current: Point, backtrack: Point| -> Option<(Point, Point)> {
        let k = direction_index(backtrack.x - current.x, backtrack.y - current.y);
        for i in 1..=8 {
            let (dx, dy) = NEIGHBOURS[(k + i) % 8];
            let candidate = Point::new(current.x + dx, current.y + dy);
            if mask.get_signed(candidate.x as i64, candidate.y as i64) {
                let (bx, by) = NEIGHBOURS[(k + i - 1) % 8];
                return Some((candidate, Point::new(current.x + bx, current.y + by)));
            }
        }
        None
    };

    let west = Point::new(start.x - 1, start.y);
    let Some((first_next, first_back)) = step(start, west) else {
        return Contour::new(vec![start]).expect("non-empty");
    };

    let mut points = vec![start];
    let (mut current, mut backtrack) = (first_next, first_back);
    loop {
        let (next, back) = step(current, backtrack).expect("current pixel has a neighbour");
        if current == start && next == first_next {
            break;
        }
        points.push(current);
        current = next;
        backtrack = back;
    }
    Contour::new(points).expect("non-empty")
}

struct Labels {
    ids: Vec<u32>,
    count: usize,
}

impl Labels {
    const NONE: u32 = u32::MAX;

    fn at(&self, x: usize, y: usize, w: usize) -> Option<usize> {
        match self.ids[y * w + x] {
            Self::NONE => None,
            id => Some(id as usize),
        }
    }
}

/// 8-connected component labelling by iterative flood fill.
fn label_components(mask: &BinaryMask) -> Labels {
    let (w, h) = (mask.width(), mask.height());
    let mut ids = vec![Labels::NONE; w * h];
    let mut count = 0usize;
    let mut stack = Vec::new();

    for seed in 0..w * h {
        if !mask.bits()[seed] || ids[seed] != Labels::NONE {
            continue;
        }
        let id = count as u32;
        count += 1;
        ids[seed] = id;
        stack.push(seed);
        while let Some(idx) = stack.pop() {
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for &(dx, dy) in &NEIGHBOURS {
                let (nx, ny) = (x + dx as i64, y + dy as i64);
                if !mask.get_signed(nx, ny) {
                    continue;
                }
                let n = ny as usize * w + nx as usize;
                if ids[n] == Labels::NONE {
                    ids[n] = id;
                    stack.push(n);
                }
            }
        }
    }
    Labels { ids, count }
}

/// The contour with the largest shoelace area; the earliest one wins ties.
pub fn largest_contour(contours: &[Contour]) -> Result<&Contour, ContourError> {
    let mut best: Option<(&Contour, f64)> = None;
    for c in contours {
        let area = contour_area(c);
        match best {
            Some((_, a)) if area <= a => {}
            _ => best = Some((c, area)),
        }
    }
    best.map(|(c, _)| c).ok_or(ContourError::NoContour)
}
