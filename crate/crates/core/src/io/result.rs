//! JSON wire form of a frame result.

use serde::{Deserialize, Serialize};

use crate::classify::{letter_label, RuleId};
use crate::contour::{BoundingRect, ContourFeatures, Point};
use crate::pipeline::{FrameResult, SessionMetrics, StageTimings};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturesDocument {
    pub area: f64,
    pub perimeter: f64,
    pub solidity: f64,
    pub aspect_ratio: f64,
    pub orientation_deg: f64,
    pub equiv_diameter: f64,
    pub bounding_rect: BoundingRect,
}

impl From<&ContourFeatures> for FeaturesDocument {
    fn from(f: &ContourFeatures) -> Self {
        Self {
            area: f.area,
            perimeter: f.perimeter,
            solidity: f.solidity,
            aspect_ratio: f.aspect_ratio,
            orientation_deg: f.orientation_deg,
            equiv_diameter: f.equiv_diameter,
            bounding_rect: f.bounding_rect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectDocument {
    pub start: Point,
    pub end: Point,
    pub far: Point,
    pub depth: f64,
    /// Whether the angle test counted this defect.
    pub counted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub contour: Vec<Point>,
    pub hull: Vec<Point>,
    pub defects: Vec<DefectDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    /// Uppercase letter or `"unknown"`.
    pub letter: String,
    pub rule_id: RuleId,
    pub defect_count: usize,
    /// Absent when no hand was found.
    pub angle_deg: Option<f64>,
    pub threshold: u8,
    pub features: Option<FeaturesDocument>,
    pub overlay: Overlay,
    pub timings: StageTimings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_letter: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<SessionMetrics>,
}

impl ResultDocument {
    pub fn from_frame(r: &FrameResult) -> Self {
        let d = &r.decision;
        let defects = match &r.contour {
            Some(c) => r
                .defects
                .iter()
                .zip(&r.counted)
                .map(|(def, &counted)| {
                    let (start, end, far) = def.points(c);
                    DefectDocument {
                        start,
                        end,
                        far,
                        depth: def.depth,
                        counted,
                    }
                })
                .collect(),
            None => Vec::new(),
        };
        Self {
            schema_version: SCHEMA_VERSION,
            letter: letter_label(d.letter),
            rule_id: d.rule_id,
            defect_count: d.defect_count,
            angle_deg: d.features.as_ref().map(|_| d.angle_deg),
            threshold: r.threshold,
            features: d.features.as_ref().map(FeaturesDocument::from),
            overlay: Overlay {
                contour: r.contour.as_ref().map(|c| c.points().to_vec()).unwrap_or_default(),
                hull: r.hull_points.clone(),
                defects,
            },
            timings: r.timings,
            stable_letter: None,
            metrics: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
