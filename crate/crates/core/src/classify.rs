//! Defect angles, significant-defect counting and the letter decision table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{contour_area, Contour, ContourFeatures, Point};
use crate::hull::{Circle, Defect};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("triangle has coincident vertices")]
    DegeneratePoints,
}

/// Letters the rule table can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
    D,
    F,
    H,
    I,
    J,
    L,
    U,
    V,
    W,
    Y,
}

impl Letter {
    pub const ALL: [Letter; 13] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::F,
        Letter::H,
        Letter::I,
        Letter::J,
        Letter::L,
        Letter::U,
        Letter::V,
        Letter::W,
        Letter::Y,
    ];

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
            Letter::D => 'D',
            Letter::F => 'F',
            Letter::H => 'H',
            Letter::I => 'I',
            Letter::J => 'J',
            Letter::L => 'L',
            Letter::U => 'U',
            Letter::V => 'V',
            Letter::W => 'W',
            Letter::Y => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Letter::ALL
            .into_iter()
            .find(|l| l.as_char() == c.to_ascii_uppercase())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Letter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::from_char(c).ok_or_else(|| format!("unsupported letter {s:?}")),
            _ => Err(format!("expected a single letter, got {s:?}")),
        }
    }
}

/// Wire form of an optional letter: the uppercase letter or `"unknown"`.
pub fn letter_label(letter: Option<Letter>) -> String {
    letter.map_or_else(|| "unknown".to_string(), |l| l.to_string())
}

/// Parse a wire label back into an optional letter.
pub fn parse_letter_label(s: &str) -> Result<Option<Letter>, String> {
    if s.trim().eq_ignore_ascii_case("unknown") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Which branch of the decision procedure fired.
///
/// The identifier also records where the branch's angle came from: the
/// deepest defect's triangle angle or the figure orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum RuleId {
    NoHand,
    ZeroCircleRatio,
    ZeroAreaFraction,
    ZeroOrientationI,
    ZeroOrientationAspectD,
    ZeroOrientationAspectH,
    ZeroSolidityU,
    ZeroOrientationJ,
    ZeroUnmatched,
    OneDefectAngleV,
    OneDefectAngleL,
    OneDefectAngleC,
    OneDefectAngleY,
    OneDefectAngleGap,
    TwoOrientationF,
    TwoOrientationW,
    TooManyDefects,
}

impl RuleId {
    pub const ALL: [RuleId; 17] = [
        RuleId::NoHand,
        RuleId::ZeroCircleRatio,
        RuleId::ZeroAreaFraction,
        RuleId::ZeroOrientationI,
        RuleId::ZeroOrientationAspectD,
        RuleId::ZeroOrientationAspectH,
        RuleId::ZeroSolidityU,
        RuleId::ZeroOrientationJ,
        RuleId::ZeroUnmatched,
        RuleId::OneDefectAngleV,
        RuleId::OneDefectAngleL,
        RuleId::OneDefectAngleC,
        RuleId::OneDefectAngleY,
        RuleId::OneDefectAngleGap,
        RuleId::TwoOrientationF,
        RuleId::TwoOrientationW,
        RuleId::TooManyDefects,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::NoHand => "none.no_hand",
            RuleId::ZeroCircleRatio => "zero.circle_ratio.A",
            RuleId::ZeroAreaFraction => "zero.area_fraction.B",
            RuleId::ZeroOrientationI => "zero.orientation.I",
            RuleId::ZeroOrientationAspectD => "zero.orientation_aspect.D",
            RuleId::ZeroOrientationAspectH => "zero.orientation_aspect.H",
            RuleId::ZeroSolidityU => "zero.solidity.U",
            RuleId::ZeroOrientationJ => "zero.orientation.J",
            RuleId::ZeroUnmatched => "zero.unmatched",
            RuleId::OneDefectAngleV => "one.defect_angle.V",
            RuleId::OneDefectAngleL => "one.defect_angle.L",
            RuleId::OneDefectAngleC => "one.defect_angle.C",
            RuleId::OneDefectAngleY => "one.defect_angle.Y",
            RuleId::OneDefectAngleGap => "one.defect_angle.gap",
            RuleId::TwoOrientationF => "two.orientation.F",
            RuleId::TwoOrientationW => "two.orientation.W",
            RuleId::TooManyDefects => "many.unsupported",
        }
    }
}

impl From<RuleId> for &'static str {
    fn from(r: RuleId) -> Self {
        r.as_str()
    }
}

impl TryFrom<String> for RuleId {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown rule id {s:?}"))
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inclusive angle interval in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub min: f64,
    pub max: f64,
}

impl AngleRange {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

/// Every tunable threshold of the decision procedure.
///
/// Angle defaults come from the published angle table; the aspect, solidity,
/// circle and area thresholds are calibration values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleTable {
    /// One defect: V below this angle.
    pub v_max: f64,
    pub l_range: AngleRange,
    pub c_range: AngleRange,
    /// One defect: Y above this angle.
    pub y_min: f64,
    /// Two defects: F above this angle, W otherwise.
    pub f_min: f64,
    /// Zero defects: I when the angle lies in `[i_min, 180)`.
    pub i_min: f64,
    pub d_max: f64,
    pub d_aspect_max: f64,
    pub h_range: AngleRange,
    pub h_aspect_min: f64,
    pub u_solidity: AngleRange,
    pub j_max: f64,
    /// Letter A: largest allowed `(circle area - contour area) / circle area`.
    pub a_tol: f64,
    /// Letter B: smallest contour area as a fraction of the frame.
    pub b_fraction: f64,
}

impl Default for RuleTable {
    fn default() -> Self {
        Self {
            v_max: 10.0,
            l_range: AngleRange::new(20.0, 35.0),
            c_range: AngleRange::new(40.0, 66.0),
            y_min: 66.0,
            f_min: 100.0,
            i_min: 169.0,
            d_max: 20.0,
            d_aspect_max: 0.8,
            h_range: AngleRange::new(30.0, 100.0),
            h_aspect_min: 1.2,
            u_solidity: AngleRange::new(0.85, 0.95),
            j_max: 168.0,
            a_tol: 0.15,
            b_fraction: 0.35,
        }
    }
}

impl RuleTable {
    /// Check the ordering and range constraints every table must satisfy.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN bounds must fail
    pub fn validate(&self) -> Result<(), String> {
        for (name, r) in [
            ("l_range", self.l_range),
            ("c_range", self.c_range),
            ("h_range", self.h_range),
            ("u_solidity", self.u_solidity),
        ] {
            if !(r.min <= r.max) {
                return Err(format!("{name}: min {} exceeds max {}", r.min, r.max));
            }
        }
        if !(self.a_tol > 0.0 && self.a_tol < 1.0) {
            return Err(format!("a_tol {} must lie in (0, 1)", self.a_tol));
        }
        if !(0.0..=1.0).contains(&self.b_fraction) {
            return Err(format!("b_fraction {} must lie in [0, 1]", self.b_fraction));
        }
        if !(0.0..=1.0).contains(&self.u_solidity.min) || !(0.0..=1.0).contains(&self.u_solidity.max) {
            return Err("u_solidity bounds must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// The outcome of one frame's classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LetterDecision {
    pub letter: Option<Letter>,
    pub defect_count: usize,
    pub rule_id: RuleId,
    pub angle_deg: f64,
    pub features: Option<ContourFeatures>,
}

impl LetterDecision {
    pub fn no_hand() -> Self {
        Self {
            letter: None,
            defect_count: 0,
            rule_id: RuleId::NoHand,
            angle_deg: 0.0,
            features: None,
        }
    }
}

fn triangle_angle_raw(start: [f64; 2], end: [f64; 2], far: [f64; 2]) -> Result<f64, ClassifyError> {
    let u = [start[0] - far[0], start[1] - far[1]];
    let v = [end[0] - far[0], end[1] - far[1]];
    let a2 = (end[0] - start[0]).powi(2) + (end[1] - start[1]).powi(2);
    let b2 = u[0] * u[0] + u[1] * u[1];
    let c2 = v[0] * v[0] + v[1] * v[1];
    if a2 == 0.0 || b2 == 0.0 || c2 == 0.0 {
        return Err(ClassifyError::DegeneratePoints);
    }
    // b^2 + c^2 - a^2 = 2 (u . v) and 4 b^2 c^2 - (b^2 + c^2 - a^2)^2 = 4 (u x v)^2,
    // so arccos((b^2 + c^2 - a^2) / 2bc) = atan2(|u x v|, u . v) without the
    // cancellation arccos suffers near 0 and 180 degrees.
    let dot = u[0] * v[0] + u[1] * v[1];
    if dot == 0.0 {
        return Ok(90.0);
    }
    let cross = (u[0] * v[1] - u[1] * v[0]).abs();
    Ok(cross.atan2(dot).to_degrees())
}

/// Angle at `far` of the triangle `(start, end, far)` by the cosine rule, in degrees.
///
/// Side `a` joins start and end, `b` joins far and start, `c` joins end and far.
pub fn triangle_angle(start: Point, end: Point, far: Point) -> Result<f64, ClassifyError> {
    triangle_angle_raw(start.to_f64(), end.to_f64(), far.to_f64())
}

/// [`triangle_angle`] for real-valued coordinates.
pub fn triangle_angle_f64(start: [f64; 2], end: [f64; 2], far: [f64; 2]) -> Result<f64, ClassifyError> {
    triangle_angle_raw(start, end, far)
}

/// Whether the angle at `far` is at most a right angle, decided exactly.
///
/// Equivalent to `b^2 + c^2 - a^2 >= 0` in integer arithmetic.
pub fn is_acute_or_right(start: Point, end: Point, far: Point) -> bool {
    let u = (start.x as i64 - far.x as i64, start.y as i64 - far.y as i64);
    let v = (end.x as i64 - far.x as i64, end.y as i64 - far.y as i64);
    u.0 * v.0 + u.1 * v.1 >= 0
}

/// Result of [`count_significant_defects`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignificantDefects {
    pub count: usize,
    /// Triangle angle of the deepest counted defect, if any was counted.
    pub deepest_angle: Option<f64>,
    /// Indices into the input slice of the defects that were counted.
    pub counted: Vec<usize>,
}

/// Count defects at least `depth_min` deep whose far-point angle is at most 90 degrees.
pub fn count_significant_defects(defects: &[Defect], c: &Contour, depth_min: f64) -> SignificantDefects {
    let mut counted = Vec::new();
    let mut deepest: Option<(f64, f64)> = None;
    for (i, d) in defects.iter().enumerate() {
        if d.depth < depth_min {
            continue;
        }
        let (start, end, far) = d.points(c);
        if !is_acute_or_right(start, end, far) {
            continue;
        }
        let Ok(angle) = triangle_angle(start, end, far) else {
            continue;
        };
        counted.push(i);
        if deepest.is_none_or(|(depth, _)| d.depth > depth) {
            deepest = Some((d.depth, angle));
        }
    }
    SignificantDefects {
        count: counted.len(),
        deepest_angle: deepest.map(|(_, a)| a),
        counted,
    }
}

/// Closed-fist test: the contour nearly fills its minimum enclosing circle.
pub fn is_letter_a(c: &Contour, circle: &Circle, tol: f64) -> bool {
    let circle_area = circle.area();
    if circle_area <= 0.0 {
        return false;
    }
    (circle_area - contour_area(c)) / circle_area <= tol
}

/// Flat-hand test: a defect-free contour covering a large share of the frame.
pub fn is_letter_b(features: &ContourFeatures, frame_area: f64, min_fraction: f64) -> bool {
    features.defect_count == 0 && features.area / frame_area >= min_fraction
}

/// Map one frame's measurements onto a letter.
///
/// `angle_deg` is the deepest significant defect's triangle angle in the
/// one-defect branch and the figure orientation otherwise.
pub fn classify(
    features: &ContourFeatures,
    defect_count: usize,
    angle_deg: f64,
    a_match: bool,
    b_match: bool,
    rules: &RuleTable,
) -> LetterDecision {
    let (letter, rule_id) = decide(features, defect_count, angle_deg, a_match, b_match, rules);
    LetterDecision {
        letter,
        defect_count,
        rule_id,
        angle_deg,
        features: Some(features.clone()),
    }
}

fn decide(
    features: &ContourFeatures,
    defect_count: usize,
    angle: f64,
    a_match: bool,
    b_match: bool,
    r: &RuleTable,
) -> (Option<Letter>, RuleId) {
    match defect_count {
        0 => {
            if a_match {
                (Some(Letter::A), RuleId::ZeroCircleRatio)
            } else if b_match {
                (Some(Letter::B), RuleId::ZeroAreaFraction)
            } else if (r.i_min..180.0).contains(&angle) {
                (Some(Letter::I), RuleId::ZeroOrientationI)
            } else if angle < r.d_max && features.aspect_ratio < r.d_aspect_max {
                (Some(Letter::D), RuleId::ZeroOrientationAspectD)
            } else if r.h_range.contains(angle) && features.aspect_ratio > r.h_aspect_min {
                (Some(Letter::H), RuleId::ZeroOrientationAspectH)
            } else if r.u_solidity.contains(features.solidity) {
                (Some(Letter::U), RuleId::ZeroSolidityU)
            } else if angle < r.j_max {
                (Some(Letter::J), RuleId::ZeroOrientationJ)
            } else {
                (None, RuleId::ZeroUnmatched)
            }
        }
        1 => {
            if angle < r.v_max {
                (Some(Letter::V), RuleId::OneDefectAngleV)
            } else if r.l_range.contains(angle) {
                (Some(Letter::L), RuleId::OneDefectAngleL)
            } else if r.c_range.contains(angle) {
                (Some(Letter::C), RuleId::OneDefectAngleC)
            } else if angle > r.y_min {
                (Some(Letter::Y), RuleId::OneDefectAngleY)
            } else {
                (None, RuleId::OneDefectAngleGap)
            }
        }
        2 => {
            if angle > r.f_min {
                (Some(Letter::F), RuleId::TwoOrientationF)
            } else {
                (Some(Letter::W), RuleId::TwoOrientationW)
            }
        }
        _ => (None, RuleId::TooManyDefects),
    }
}
