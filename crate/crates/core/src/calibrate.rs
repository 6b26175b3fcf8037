//! Grid search over the calibration thresholds of the rule table.
//!
//! Frames are measured once; every grid point then only reruns the depth
//! filter, angle test and decision table. Candidates are ranked by exact-match
//! accuracy, then by strictness (how far each parameter sits toward the side
//! that leaves more inputs Unknown), then by closeness to the base value on
//! axes without a strict side. Remaining ties keep the earliest grid point.

use std::fmt;

use crate::classify::{Letter, RuleTable};
use crate::imaging::{GrayImage, ImagingError};
use crate::io::Config;
use crate::pipeline::{analyze_frame, decide_frame, FrameGeometry, PipelineConfig, StageTimings};

/// A tunable threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    ATol,
    BFraction,
    DepthMin,
    DMax,
    DAspectMax,
    HAspectMin,
    USolidityMin,
    USolidityMax,
    IMin,
    JMax,
}

/// Which direction of a parameter widens the Unknown region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strict {
    Lower,
    Higher,
    Neither,
}

impl Param {
    pub fn key(self) -> &'static str {
        match self {
            Param::ATol => "classify.a_tol",
            Param::BFraction => "classify.b_fraction",
            Param::DepthMin => "defects.depth_min",
            Param::DMax => "classify.d_max",
            Param::DAspectMax => "classify.d_aspect_max",
            Param::HAspectMin => "classify.h_aspect_min",
            Param::USolidityMin => "classify.u_solidity_min",
            Param::USolidityMax => "classify.u_solidity_max",
            Param::IMin => "classify.i_min",
            Param::JMax => "classify.j_max",
        }
    }

    pub fn strict(self) -> Strict {
        match self {
            Param::ATol | Param::DMax | Param::DAspectMax | Param::USolidityMax | Param::JMax => {
                Strict::Lower
            }
            Param::BFraction | Param::HAspectMin | Param::USolidityMin | Param::IMin => Strict::Higher,
            Param::DepthMin => Strict::Neither,
        }
    }

    pub fn get(self, rules: &RuleTable, pipeline: &PipelineConfig) -> f64 {
        match self {
            Param::ATol => rules.a_tol,
            Param::BFraction => rules.b_fraction,
            Param::DepthMin => pipeline.depth_min,
            Param::DMax => rules.d_max,
            Param::DAspectMax => rules.d_aspect_max,
            Param::HAspectMin => rules.h_aspect_min,
            Param::USolidityMin => rules.u_solidity.min,
            Param::USolidityMax => rules.u_solidity.max,
            Param::IMin => rules.i_min,
            Param::JMax => rules.j_max,
        }
    }

    pub fn set(self, rules: &mut RuleTable, pipeline: &mut PipelineConfig, v: f64) {
        match self {
            Param::ATol => rules.a_tol = v,
            Param::BFraction => rules.b_fraction = v,
            Param::DepthMin => pipeline.depth_min = v,
            Param::DMax => rules.d_max = v,
            Param::DAspectMax => rules.d_aspect_max = v,
            Param::HAspectMin => rules.h_aspect_min = v,
            Param::USolidityMin => rules.u_solidity.min = v,
            Param::USolidityMax => rules.u_solidity.max = v,
            Param::IMin => rules.i_min = v,
            Param::JMax => rules.j_max = v,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: Param, values: &[f64]) -> Self {
        Self {
            param,
            values: values.to_vec(),
        }
    }
}

/// The default search space.
pub fn default_grid() -> Vec<Axis> {
    vec![
        Axis::new(Param::ATol, &[0.05, 0.10, 0.15, 0.20, 0.25]),
        Axis::new(Param::BFraction, &[0.25, 0.30, 0.35, 0.40, 0.45]),
        Axis::new(Param::DepthMin, &[6.0, 8.0, 10.0, 12.0, 15.0]),
        Axis::new(Param::DAspectMax, &[0.7, 0.8, 0.9]),
        Axis::new(Param::HAspectMin, &[1.1, 1.2, 1.3]),
        Axis::new(Param::USolidityMin, &[0.80, 0.85, 0.90]),
    ]
}

/// A measured frame and the letter it should produce.
#[derive(Debug, Clone)]
pub struct Sample {
    pub name: String,
    pub expected: Option<Letter>,
    pub geometry: FrameGeometry,
}

impl Sample {
    pub fn measure(
        name: impl Into<String>,
        expected: Option<Letter>,
        img: &GrayImage,
        pipeline: &PipelineConfig,
    ) -> Result<Self, ImagingError> {
        let geometry = analyze_frame(img, pipeline, &mut StageTimings::default())?;
        Ok(Self {
            name: name.into(),
            expected,
            geometry,
        })
    }
}

/// Label encoded in a file name: the text before the first `_`, `-` or `.`,
/// either a single supported letter (any case) or `unknown`.
pub fn label_from_file_name(name: &str) -> Option<Option<Letter>> {
    let prefix = name.split(['_', '-', '.']).next()?;
    if prefix.eq_ignore_ascii_case("unknown") {
        return Some(None);
    }
    let mut chars = prefix.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Letter::from_char(c.to_ascii_uppercase()).map(Some),
        _ => None,
    }
}

/// Number of samples the configuration classifies exactly.
pub fn correct_count(samples: &[Sample], rules: &RuleTable, pipeline: &PipelineConfig) -> usize {
    samples
        .iter()
        .filter(|s| {
            let r = decide_frame(&s.geometry, rules, pipeline, &mut StageTimings::default());
            r.decision.letter == s.expected
        })
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub config: Config,
    pub correct: usize,
    pub total: usize,
    /// Correct count of the starting configuration.
    pub baseline_correct: usize,
    pub evaluated: usize,
}

impl Calibration {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

fn strictness(axis: &Axis, idx: usize) -> usize {
    match axis.param.strict() {
        Strict::Higher => idx,
        Strict::Lower => axis.values.len() - 1 - idx,
        Strict::Neither => 0,
    }
}

fn base_distance(axis: &Axis, idx: usize, base: f64) -> f64 {
    match axis.param.strict() {
        Strict::Neither => (axis.values[idx] - base).abs(),
        _ => 0.0,
    }
}

/// Exhaustive search over the Cartesian product of `grid`, starting from `base`.
pub fn calibrate(samples: &[Sample], base: &Config, grid: &[Axis]) -> Calibration {
    let baseline_correct = correct_count(samples, &base.rules, &base.pipeline);
    let bases: Vec<f64> = grid
        .iter()
        .map(|a| a.param.get(&base.rules, &base.pipeline))
        .collect();

    let mut idx = vec![0usize; grid.len()];
    let mut best: Option<(usize, usize, f64, Vec<usize>)> = None;
    let mut evaluated = 0;
    let mut rules = base.rules.clone();
    let mut pipeline = base.pipeline.clone();

    if grid.iter().all(|a| !a.values.is_empty()) {
        'grid: loop {
            for (a, &i) in grid.iter().zip(&idx) {
                a.param.set(&mut rules, &mut pipeline, a.values[i]);
            }
            evaluated += 1;
            if rules.validate().is_ok() {
                let correct = correct_count(samples, &rules, &pipeline);
                let strict: usize = grid.iter().zip(&idx).map(|(a, &i)| strictness(a, i)).sum();
                let dist: f64 = grid
                    .iter()
                    .zip(&idx)
                    .zip(&bases)
                    .map(|((a, &i), &b)| base_distance(a, i, b))
                    .sum();
                let better = match &best {
                    None => true,
                    Some((c, s, d, _)) => {
                        (correct, strict) > (*c, *s) || ((correct, strict) == (*c, *s) && dist < *d)
                    }
                };
                if better {
                    best = Some((correct, strict, dist, idx.clone()));
                }
            }
            // Advance the odometer, last axis fastest.
            let mut k = grid.len();
            loop {
                if k == 0 {
                    break 'grid;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < grid[k].values.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    let mut config = base.clone();
    let mut correct = baseline_correct;
    if let Some((c, _, _, best_idx)) = best {
        // Never hand back something worse than the starting point.
        if c >= baseline_correct {
            for (a, &i) in grid.iter().zip(&best_idx) {
                a.param.set(&mut config.rules, &mut config.pipeline, a.values[i]);
            }
            correct = c;
        }
    }
    Calibration {
        config,
        correct,
        total: samples.len(),
        baseline_correct,
        evaluated,
    }
}
