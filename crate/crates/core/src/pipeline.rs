//! Frame-to-letter orchestration, temporal debouncing and the trial metric.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classify::{
    classify, count_significant_defects, is_letter_a, is_letter_b, Letter, LetterDecision,
    RuleTable,
};
use crate::contour::{contour_area, features, largest_contour, trace_contours, Contour, Point};
use crate::hull::{convex_hull, convexity_defects, min_enclosing_circle, Circle, Defect, Hull};
use crate::imaging::{binarize_fixed, binarize_otsu, denoise_n, GrayImage, ImagingError};

/// Frame height at which `depth_min` is expressed; other heights scale linearly.
pub const REFERENCE_HEIGHT: f64 = 480.0;

/// Standard trial duration the actual-output metric is normalized by, in seconds.
pub const STANDARD_TRIAL_SECONDS: f64 = 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdMode {
    Otsu,
    Fixed(u8),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub threshold: ThresholdMode,
    /// Threshold used when Otsu sees a uniform frame; `None` surfaces the error.
    pub fallback_threshold: Option<u8>,
    /// Treat dark pixels as the hand.
    pub invert: bool,
    pub denoise_passes: u8,
    /// Minimum defect depth in pixels at [`REFERENCE_HEIGHT`].
    pub depth_min: f64,
    /// Debounce window length.
    pub window: usize,
    /// Smallest accepted hand contour as a fraction of the frame area.
    pub min_area_fraction: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdMode::Otsu,
            fallback_threshold: Some(128),
            invert: false,
            denoise_passes: 1,
            depth_min: 10.0,
            window: 5,
            min_area_fraction: 0.01,
        }
    }
}

impl PipelineConfig {
    /// `depth_min` rescaled to a frame of the given height.
    pub fn depth_min_for_height(&self, height: usize) -> f64 {
        self.depth_min * height as f64 / REFERENCE_HEIGHT
    }
}

/// Elapsed microseconds per stage. Stages a frame never reached stay at zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub binarize_us: u64,
    pub denoise_us: u64,
    pub trace_us: u64,
    pub select_us: u64,
    pub hull_us: u64,
    pub defects_us: u64,
    pub features_us: u64,
    pub classify_us: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub decision: LetterDecision,
    /// Threshold the binarizer applied.
    pub threshold: u8,
    /// Hand outline, absent when no contour passed the area gate.
    pub contour: Option<Contour>,
    pub hull_points: Vec<Point>,
    /// Defects at least `depth_min` deep, indices into `contour`.
    pub defects: Vec<Defect>,
    /// Which entries of `defects` were counted by the angle test.
    pub counted: Vec<bool>,
    pub timings: StageTimings,
}

/// Rule-independent geometry of one frame's hand contour.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGeometry {
    pub width: usize,
    pub height: usize,
    pub threshold: u8,
    pub contour: Option<HandGeometry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandGeometry {
    pub contour: Contour,
    pub hull: Hull,
    pub hull_area: f64,
    pub circle: Circle,
    /// Every defect before the depth filter.
    pub defects: Vec<Defect>,
}

fn elapsed_us(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

/// Binarize, clean, trace and measure one frame up to its raw defects.
pub fn analyze_frame(
    img: &GrayImage,
    config: &PipelineConfig,
    timings: &mut StageTimings,
) -> Result<FrameGeometry, ImagingError> {
    let t = Instant::now();
    let (mask, threshold) = match config.threshold {
        ThresholdMode::Fixed(v) => (binarize_fixed(img, v), v),
        ThresholdMode::Otsu => match binarize_otsu(img) {
            Ok(r) => r,
            Err(ImagingError::UniformImage(_)) if config.fallback_threshold.is_some() => {
                let v = config.fallback_threshold.unwrap_or_default();
                (binarize_fixed(img, v), v)
            }
            Err(e) => return Err(e),
        },
    };
    let mask = if config.invert { mask.inverted() } else { mask };
    timings.binarize_us = elapsed_us(t);

    let t = Instant::now();
    let mask = denoise_n(&mask, config.denoise_passes);
    timings.denoise_us = elapsed_us(t);

    let t = Instant::now();
    let contours = trace_contours(&mask);
    timings.trace_us = elapsed_us(t);

    let t = Instant::now();
    let min_area = config.min_area_fraction * (img.width() * img.height()) as f64;
    let hand = largest_contour(&contours)
        .ok()
        .filter(|c| contour_area(c) >= min_area && contour_area(c) > 0.0)
        .cloned();
    timings.select_us = elapsed_us(t);

    let Some(contour) = hand else {
        return Ok(FrameGeometry {
            width: img.width(),
            height: img.height(),
            threshold,
            contour: None,
        });
    };

    let t = Instant::now();
    let hull = convex_hull(&contour);
    let hull_area = hull.area(&contour);
    let circle = min_enclosing_circle(contour.points()).expect("contour is non-empty");
    timings.hull_us = elapsed_us(t);

    let t = Instant::now();
    let defects = convexity_defects(&contour, &hull);
    timings.defects_us = elapsed_us(t);

    Ok(FrameGeometry {
        width: img.width(),
        height: img.height(),
        threshold,
        contour: Some(HandGeometry {
            contour,
            hull,
            hull_area,
            circle,
            defects,
        }),
    })
}

/// Apply the depth filter, angle test and decision table to measured geometry.
pub fn decide_frame(
    geometry: &FrameGeometry,
    rules: &RuleTable,
    config: &PipelineConfig,
    timings: &mut StageTimings,
) -> FrameResult {
    let Some(hand) = &geometry.contour else {
        return FrameResult {
            decision: LetterDecision::no_hand(),
            threshold: geometry.threshold,
            contour: None,
            hull_points: Vec::new(),
            defects: Vec::new(),
            counted: Vec::new(),
            timings: *timings,
        };
    };

    let t = Instant::now();
    let depth_min = config.depth_min_for_height(geometry.height);
    let kept: Vec<Defect> = hand
        .defects
        .iter()
        .copied()
        .filter(|d| d.depth >= depth_min)
        .collect();
    let significant = count_significant_defects(&kept, &hand.contour, depth_min);
    let feats = features(&hand.contour, hand.hull_area, significant.count);
    timings.features_us = elapsed_us(t);

    let Ok(feats) = feats else {
        return FrameResult {
            decision: LetterDecision::no_hand(),
            threshold: geometry.threshold,
            contour: None,
            hull_points: Vec::new(),
            defects: Vec::new(),
            counted: Vec::new(),
            timings: *timings,
        };
    };

    let t = Instant::now();
    let angle = match significant.count {
        0 | 2 => feats.orientation_deg,
        _ => significant.deepest_angle.unwrap_or(feats.orientation_deg),
    };
    let a_match = significant.count == 0 && is_letter_a(&hand.contour, &hand.circle, rules.a_tol);
    let frame_area = (geometry.width * geometry.height) as f64;
    let b_match = is_letter_b(&feats, frame_area, rules.b_fraction);
    let decision = classify(&feats, significant.count, angle, a_match, b_match, rules);
    timings.classify_us = elapsed_us(t);

    let mut counted = vec![false; kept.len()];
    for &i in &significant.counted {
        counted[i] = true;
    }
    FrameResult {
        decision,
        threshold: geometry.threshold,
        hull_points: hand.hull.points(&hand.contour),
        contour: Some(hand.contour.clone()),
        defects: kept,
        counted,
        timings: *timings,
    }
}

/// Run one grayscale frame through the whole recognition pipeline.
pub fn process_frame(
    img: &GrayImage,
    rules: &RuleTable,
    config: &PipelineConfig,
) -> Result<FrameResult, ImagingError> {
    let mut timings = StageTimings::default();
    let geometry = analyze_frame(img, config, &mut timings)?;
    Ok(decide_frame(&geometry, rules, config, &mut timings))
}

/// Sliding window of recent per-frame letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DebounceState {
    window: VecDeque<Option<Letter>>,
    capacity: usize,
    last_emitted: Option<Letter>,
}

impl DebounceState {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        Self {
            window: VecDeque::with_capacity(capacity),
            capacity,
            last_emitted: None,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn last_emitted(&self) -> Option<Letter> {
        self.last_emitted
    }

    pub fn window(&self) -> impl Iterator<Item = Option<Letter>> + '_ {
        self.window.iter().copied()
    }
}

/// Push one frame's letter; returns a letter once all window slots agree on it
/// and it differs from the previous emission.
pub fn debounce(state: &mut DebounceState, letter: Option<Letter>) -> Option<Letter> {
    if state.window.len() == state.capacity {
        state.window.pop_front();
    }
    state.window.push_back(letter);
    if state.window.len() < state.capacity {
        return None;
    }
    let candidate = state.window[0]?;
    if state.window.iter().any(|&l| l != Some(candidate)) || state.last_emitted == Some(candidate) {
        return None;
    }
    state.last_emitted = Some(candidate);
    Some(candidate)
}

/// Actual output: elapsed seconds as a percentage of the seven-second standard.
pub fn actual_output(elapsed_seconds: f64) -> f64 {
    elapsed_seconds / STANDARD_TRIAL_SECONDS * 100.0
}

/// A debounced letter ready for the text and audio channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLetterEvent {
    pub letter: Letter,
    /// Zero-based index of the frame that completed the window.
    pub frame_index: u64,
    /// Seconds since the session started.
    pub elapsed_s: f64,
    /// Seconds since the session started or the previous emission.
    pub interval_s: f64,
}

/// Per-session counters.
///
/// `elapsed_to_first_emit` is wall-clock (or scripted) time from session start
/// to the first stable letter; `a_o` is its actual-output percentage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub frames_processed: u64,
    pub recognitions_emitted: u64,
    pub elapsed_to_first_emit: Option<f64>,
    pub a_o: Option<f64>,
}

/// Debounce state and metrics for one stream of frames.
#[derive(Debug, Clone)]
pub struct RecognitionSession {
    debounce: DebounceState,
    metrics: SessionMetrics,
    last_emit_s: f64,
}

impl RecognitionSession {
    pub fn new(window: usize) -> Self {
        Self {
            debounce: DebounceState::new(window),
            metrics: SessionMetrics::default(),
            last_emit_s: 0.0,
        }
    }

    /// Record one frame's letter observed `elapsed_s` seconds into the session.
    pub fn observe(&mut self, letter: Option<Letter>, elapsed_s: f64) -> Option<StableLetterEvent> {
        let frame_index = self.metrics.frames_processed;
        self.metrics.frames_processed += 1;
        let letter = debounce(&mut self.debounce, letter)?;

        self.metrics.recognitions_emitted += 1;
        if self.metrics.elapsed_to_first_emit.is_none() {
            self.metrics.elapsed_to_first_emit = Some(elapsed_s);
            self.metrics.a_o = Some(actual_output(elapsed_s));
        }
        let event = StableLetterEvent {
            letter,
            frame_index,
            elapsed_s,
            interval_s: elapsed_s - self.last_emit_s,
        };
        self.last_emit_s = elapsed_s;
        Some(event)
    }

    pub fn metrics(&self) -> &SessionMetrics {
        &self.metrics
    }

    pub fn debounce_state(&self) -> &DebounceState {
        &self.debounce
    }
}
