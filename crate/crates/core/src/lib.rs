//! Fingerspelling recognition from hand silhouettes.
//!
//! A frame is binarized, its largest outer contour traced, and the convex
//! hull, convexity defects and shape descriptors of that contour are fed to a
//! rule table that names one of thirteen letters or declines. A debouncer
//! turns the per-frame stream into stable letter events.

pub mod calibrate;
pub mod classify;
pub mod contour;
pub mod hull;
pub mod imaging;
pub mod io;
pub mod pipeline;
#[cfg(feature = "server")]
pub mod service;
#[cfg(feature = "server")]
pub mod cli;
pub mod synth;

pub use classify::{Letter, LetterDecision, RuleId, RuleTable};
pub use imaging::GrayImage;
pub use pipeline::{process_frame, PipelineConfig, RecognitionSession, StableLetterEvent};
