//! Synthetic hand silhouettes for tests, demos and calibration.
//!
//! Every fixture is a 640x480 frame with a bright hand on a dark background,
//! built from polygons so that a specific rule of the default table fires.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::Letter;
use crate::imaging::GrayImage;

pub const FRAME_WIDTH: usize = 640;
pub const FRAME_HEIGHT: usize = 480;
pub const HAND: u8 = 230;
pub const BACKGROUND: u8 = 25;

/// Fill a polygon with the even-odd rule, sampling at pixel centres.
pub fn fill_polygon(img: &mut GrayImage, poly: &[[f64; 2]], value: u8) {
    if poly.len() < 3 {
        return;
    }
    let (w, h) = (img.width(), img.height());
    let mut xs = Vec::new();
    for y in 0..h {
        let yc = y as f64 + 0.5;
        xs.clear();
        for i in 0..poly.len() {
            let [x0, y0] = poly[i];
            let [x1, y1] = poly[(i + 1) % poly.len()];
            if (y0 <= yc) != (y1 <= yc) {
                xs.push(x0 + (yc - y0) / (y1 - y0) * (x1 - x0));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let start = (pair[0] - 0.5).ceil().max(0.0) as usize;
            let end = (pair[1] - 0.5).floor();
            if end < 0.0 {
                continue;
            }
            for x in start..=(end as usize).min(w - 1) {
                img.set(x, y, value);
            }
        }
    }
}

pub fn fill_disk(img: &mut GrayImage, center: [f64; 2], radius: f64, value: u8) {
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (dx, dy) = (x as f64 + 0.5 - center[0], y as f64 + 0.5 - center[1]);
            if dx * dx + dy * dy <= radius * radius {
                img.set(x, y, value);
            }
        }
    }
}

/// Rotate points about `pivot` by `deg` degrees in image coordinates
/// (positive turns +x toward +y, clockwise on screen).
pub fn rotate(poly: &[[f64; 2]], pivot: [f64; 2], deg: f64) -> Vec<[f64; 2]> {
    let (s, c) = deg.to_radians().sin_cos();
    poly.iter()
        .map(|&[x, y]| {
            let (dx, dy) = (x - pivot[0], y - pivot[1]);
            [pivot[0] + dx * c - dy * s, pivot[1] + dx * s + dy * c]
        })
        .collect()
}

fn blank() -> GrayImage {
    GrayImage::filled(FRAME_WIDTH, FRAME_HEIGHT, BACKGROUND).expect("fixed frame size")
}

fn polygon_frame(poly: &[[f64; 2]]) -> GrayImage {
    let mut img = blank();
    fill_polygon(&mut img, poly, HAND);
    img
}

/// Bar of the given length and width centred on `center`, long axis at `deg`.
pub fn bar(center: [f64; 2], length: f64, width: f64, deg: f64) -> Vec<[f64; 2]> {
    let (l, w) = (length / 2.0, width / 2.0);
    let rect = [
        [center[0] - l, center[1] - w],
        [center[0] + l, center[1] - w],
        [center[0] + l, center[1] + w],
        [center[0] - l, center[1] + w],
    ];
    rotate(&rect, center, deg)
}

/// Palm with straight fingers fanning out of its top edge.
///
/// Fingers sit side by side, each `finger_width` wide, and adjacent fingers
/// diverge by `spread_deg`. The angle a gap subtends at its apex, measured to
/// the outer fingertip corners, is about `spread + 2 atan(width / length)`.
/// The palm widens toward the wrist so the outer finger-palm junctions are
/// obtuse.
#[derive(Debug, Clone, PartialEq)]
pub struct FanHand {
    pub fingers: usize,
    pub spread_deg: f64,
    pub finger_length: f64,
    pub finger_width: f64,
    pub palm_height: f64,
    /// Extra palm width on each side at the wrist.
    pub palm_flare: f64,
    /// Rotation of the whole hand about its palm centre.
    pub tilt_deg: f64,
    pub center: [f64; 2],
}

impl FanHand {
    pub fn polygon(&self) -> Vec<[f64; 2]> {
        let n = self.fingers.max(1);
        let half = self.finger_width * n as f64 / 2.0;
        let [cx, cy] = self.center;
        let top = cy - self.palm_height / 2.0;
        let bottom = cy + self.palm_height / 2.0;

        // Finger k points `dir_k` degrees from vertical, clockwise positive.
        let mid = (n as f64 - 1.0) / 2.0;
        let dir = |k: usize| (k as f64 - mid) * self.spread_deg;
        let unit = |deg: f64| {
            let r = deg.to_radians();
            [r.sin(), -r.cos()]
        };

        let mut poly = vec![[cx - half - self.palm_flare, bottom], [cx + half + self.palm_flare, bottom]];
        // Walk the top edge right to left so the outline stays simple.
        for k in (0..n).rev() {
            let base_l = [cx - half + k as f64 * self.finger_width, top];
            let base_r = [base_l[0] + self.finger_width, top];
            let u = unit(dir(k));
            let tip_r = [base_r[0] + u[0] * self.finger_length, base_r[1] + u[1] * self.finger_length];
            let tip_l = [base_l[0] + u[0] * self.finger_length, base_l[1] + u[1] * self.finger_length];
            if k == n - 1 {
                poly.push(base_r);
            }
            poly.push(tip_r);
            poly.push(tip_l);
            poly.push(base_l);
        }
        rotate(&poly, self.center, self.tilt_deg)
    }

    pub fn render(&self) -> GrayImage {
        polygon_frame(&self.polygon())
    }
}

fn fan(fingers: usize, spread_deg: f64, tilt_deg: f64) -> FanHand {
    FanHand {
        fingers,
        spread_deg,
        finger_length: 230.0,
        finger_width: 34.0,
        palm_height: 130.0,
        palm_flare: 30.0,
        tilt_deg,
        center: [320.0, 360.0],
    }
}

/// The fixture for a letter, built so that the default rule table picks it.
pub fn letter_fixture(letter: Letter) -> GrayImage {
    match letter {
        // Closed fist: a disk fills its enclosing circle.
        Letter::A => {
            let mut img = blank();
            fill_disk(&mut img, [320.0, 240.0], 110.0, HAND);
            img
        }
        // Flat palm filling most of the frame.
        Letter::B => polygon_frame(&[[60.0, 80.0], [580.0, 80.0], [580.0, 400.0], [60.0, 400.0]]),
        Letter::C => fan(2, 36.0, 0.0).render(),
        // Index finger up over a wide, heavy palm whose shoulders slope away.
        Letter::D => {
            let poly = [
                [170.0, 460.0],
                [470.0, 460.0],
                [470.0, 330.0],
                [327.0, 290.0],
                [327.0, 30.0],
                [313.0, 30.0],
                [313.0, 290.0],
                [170.0, 330.0],
            ];
            polygon_frame(&rotate(&poly, [320.0, 380.0], 6.0))
        }
        Letter::F => fan(3, 22.0, 40.0).render(),
        Letter::H => polygon_frame(&bar([320.0, 240.0], 320.0, 40.0, 34.0)),
        Letter::I => polygon_frame(&bar([320.0, 240.0], 300.0, 40.0, -6.0)),
        Letter::J => polygon_frame(&bar([320.0, 240.0], 300.0, 60.0, 130.0)),
        Letter::L => fan(2, 11.0, 0.0).render(),
        // Upright hand with wide, obtuse cuts that lower solidity without
        // producing a counted defect.
        Letter::U => {
            let poly = [
                [270.0, 440.0],
                [370.0, 440.0],
                [370.0, 330.0],
                [344.0, 270.0],
                [370.0, 210.0],
                [370.0, 60.0],
                [320.0, 90.0],
                [270.0, 60.0],
                [270.0, 210.0],
                [296.0, 270.0],
                [270.0, 330.0],
            ];
            polygon_frame(&poly)
        }
        // Long, narrow fingers held almost parallel.
        Letter::V => FanHand {
            finger_length: 300.0,
            finger_width: 14.0,
            palm_height: 100.0,
            center: [320.0, 380.0],
            ..fan(2, 2.0, 0.0)
        }
        .render(),
        Letter::W => fan(3, 22.0, 0.0).render(),
        Letter::Y => fan(2, 61.0, 0.0).render(),
    }
}

pub fn background_fixture() -> GrayImage {
    blank()
}

/// Isolated bright pixels that the denoiser and the area gate must reject.
pub fn speckle_fixture(seed: u64) -> GrayImage {
    let mut img = blank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for y in (1..FRAME_HEIGHT - 1).step_by(3) {
        for x in (1..FRAME_WIDTH - 1).step_by(3) {
            if rng.random_bool(0.3) {
                img.set(x, y, HAND);
            }
        }
    }
    img
}

/// A named frame together with the letter it should produce.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub expected: Option<Letter>,
    pub image: GrayImage,
}

/// One fixture per supported letter followed by the background and speckle frames.
pub fn fixture_corpus() -> Vec<Fixture> {
    let mut out: Vec<Fixture> = Letter::ALL
        .iter()
        .map(|&l| Fixture {
            name: format!("{}_fixture", l.as_char().to_ascii_lowercase()),
            expected: Some(l),
            image: letter_fixture(l),
        })
        .collect();
    out.push(Fixture {
        name: "background".into(),
        expected: None,
        image: background_fixture(),
    });
    out.push(Fixture {
        name: "speckle".into(),
        expected: None,
        image: speckle_fixture(7),
    });
    out
}
