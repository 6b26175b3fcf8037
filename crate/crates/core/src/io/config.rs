//! `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored, unknown keys are rejected, and
//! every absent key keeps its default. [`Config::to_text`] writes a file that
//! parses back to the same configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use super::hook::{HookConfig, HookMode, LETTER_PLACEHOLDER};
use crate::classify::RuleTable;
use crate::pipeline::{PipelineConfig, ThresholdMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    TypeMismatch {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("line {line}: `{key}` {message}")]
    RangeViolation {
        line: usize,
        key: String,
        message: String,
    },
    #[error("config is not valid UTF-8")]
    Encoding,
}

/// HTTP service settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub session_idle_secs: u64,
    pub max_body_bytes: usize,
    /// Allowed CORS origin; `*` allows any.
    pub cors_origin: String,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            session_idle_secs: 60,
            max_body_bytes: 4 * 1024 * 1024,
            cors_origin: "*".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub pipeline: PipelineConfig,
    pub rules: RuleTable,
    pub hook: HookConfig,
    pub service: ServiceConfig,
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn mismatch(&self, expected: &'static str) -> ConfigError {
        ConfigError::TypeMismatch {
            line: self.line,
            key: self.key.to_string(),
            value: self.value.to_string(),
            expected,
        }
    }

    fn range(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::RangeViolation {
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn float(&self) -> Result<f64, ConfigError> {
        self.value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.mismatch("a number"))
    }

    fn float_in(&self, lo: f64, hi: f64, open: bool) -> Result<f64, ConfigError> {
        let v = self.float()?;
        let ok = if open { v > lo && v < hi } else { v >= lo && v <= hi };
        if ok {
            Ok(v)
        } else if open {
            Err(self.range(format!("must lie in ({lo}, {hi})")))
        } else {
            Err(self.range(format!("must lie in [{lo}, {hi}]")))
        }
    }

    fn angle(&self) -> Result<f64, ConfigError> {
        self.float_in(0.0, 180.0, false)
    }

    fn uint(&self) -> Result<u64, ConfigError> {
        self.value
            .parse::<u64>()
            .map_err(|_| self.mismatch("a non-negative integer"))
    }

    fn uint_in(&self, lo: u64, hi: u64) -> Result<u64, ConfigError> {
        let v = self.uint()?;
        if (lo..=hi).contains(&v) {
            Ok(v)
        } else {
            Err(self.range(format!("must lie in [{lo}, {hi}]")))
        }
    }

    fn boolean(&self) -> Result<bool, ConfigError> {
        match self.value {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.mismatch("true or false")),
        }
    }

    fn text(&self) -> String {
        let v = self.value;
        if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
            v[1..v.len() - 1].to_string()
        } else {
            v.to_string()
        }
    }
}

/// Parse a configuration file.
pub fn load_config(bytes: &[u8]) -> Result<Config, ConfigError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ConfigError::Encoding)?;
    let mut cfg = Config::default();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        apply(&mut cfg, &Entry { line, key, value })?;
    }

    let r = &cfg.rules;
    for (name, range) in [
        ("classify.l_range", r.l_range),
        ("classify.c_range", r.c_range),
        ("classify.h_range", r.h_range),
        ("classify.u_solidity", r.u_solidity),
    ] {
        if range.min > range.max {
            return Err(ConfigError::RangeViolation {
                line: last_line,
                key: name.to_string(),
                message: format!("min {} exceeds max {}", range.min, range.max),
            });
        }
    }
    cfg.hook.validate().map_err(|message| ConfigError::RangeViolation {
        line: last_line,
        key: "hook".to_string(),
        message,
    })?;
    Ok(cfg)
}

fn apply(cfg: &mut Config, e: &Entry<'_>) -> Result<(), ConfigError> {
    let p = &mut cfg.pipeline;
    let r = &mut cfg.rules;
    match e.key {
        "threshold.mode" => {
            p.threshold = match e.value {
                "otsu" => ThresholdMode::Otsu,
                "fixed" => ThresholdMode::Fixed(match p.threshold {
                    ThresholdMode::Fixed(v) => v,
                    ThresholdMode::Otsu => 128,
                }),
                _ => return Err(e.mismatch("otsu or fixed")),
            }
        }
        "threshold.value" => p.threshold = ThresholdMode::Fixed(e.uint_in(0, 255)? as u8),
        "threshold.fallback" => {
            p.fallback_threshold = match e.value {
                "none" => None,
                _ => Some(e.uint_in(0, 255)? as u8),
            }
        }
        "threshold.invert" => p.invert = e.boolean()?,
        "denoise.passes" => p.denoise_passes = e.uint_in(0, 3)? as u8,
        "defects.depth_min" => p.depth_min = e.float_in(0.0, f64::MAX, false)?,
        "debounce.window" => p.window = e.uint_in(1, 1000)? as usize,
        "pipeline.min_area_fraction" => p.min_area_fraction = e.float_in(0.0, 1.0, false)?,

        "classify.v_max" => r.v_max = e.angle()?,
        "classify.l_min" => r.l_range.min = e.angle()?,
        "classify.l_max" => r.l_range.max = e.angle()?,
        "classify.c_min" => r.c_range.min = e.angle()?,
        "classify.c_max" => r.c_range.max = e.angle()?,
        "classify.y_min" => r.y_min = e.angle()?,
        "classify.f_min" => r.f_min = e.angle()?,
        "classify.i_min" => r.i_min = e.angle()?,
        "classify.d_max" => r.d_max = e.angle()?,
        "classify.d_aspect_max" => r.d_aspect_max = e.float_in(0.0, f64::MAX, false)?,
        "classify.h_min" => r.h_range.min = e.angle()?,
        "classify.h_max" => r.h_range.max = e.angle()?,
        "classify.h_aspect_min" => r.h_aspect_min = e.float_in(0.0, f64::MAX, false)?,
        "classify.u_solidity_min" => r.u_solidity.min = e.float_in(0.0, 1.0, false)?,
        "classify.u_solidity_max" => r.u_solidity.max = e.float_in(0.0, 1.0, false)?,
        "classify.j_max" => r.j_max = e.angle()?,
        "classify.a_tol" => r.a_tol = e.float_in(0.0, 1.0, true)?,
        "classify.b_fraction" => r.b_fraction = e.float_in(0.0, 1.0, false)?,

        "hook.mode" => {
            cfg.hook.mode = match e.value {
                "none" => HookMode::None,
                "file" => HookMode::File,
                "command" => HookMode::Command,
                "both" => HookMode::Both,
                _ => return Err(e.mismatch("none, file, command or both")),
            }
        }
        "hook.file" => cfg.hook.letter_file = Some(PathBuf::from(e.text())),
        "hook.command" => {
            let t = e.text();
            if t.matches(LETTER_PLACEHOLDER).count() != 1 {
                return Err(e.range(format!("must contain {LETTER_PLACEHOLDER} exactly once")));
            }
            cfg.hook.command_template = Some(t);
        }

        "service.session_idle_secs" => cfg.service.session_idle_secs = e.uint_in(1, 86_400)?,
        "service.max_body_bytes" => cfg.service.max_body_bytes = e.uint_in(1, 1 << 30)? as usize,
        "service.cors_origin" => cfg.service.cors_origin = e.text(),

        _ => {
            return Err(ConfigError::UnknownKey {
                line: e.line,
                key: e.key.to_string(),
            })
        }
    }
    Ok(())
}

impl Config {
    /// Serialize every key, in the format [`load_config`] reads.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.pipeline;
        let r = &self.rules;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        match p.threshold {
            ThresholdMode::Otsu => kv("threshold.mode", "otsu".into()),
            ThresholdMode::Fixed(v) => {
                kv("threshold.mode", "fixed".into());
                kv("threshold.value", v.to_string());
            }
        }
        kv(
            "threshold.fallback",
            p.fallback_threshold.map_or("none".into(), |v| v.to_string()),
        );
        kv("threshold.invert", p.invert.to_string());
        kv("denoise.passes", p.denoise_passes.to_string());
        kv("defects.depth_min", fmt_f(p.depth_min));
        kv("debounce.window", p.window.to_string());
        kv("pipeline.min_area_fraction", fmt_f(p.min_area_fraction));

        kv("classify.v_max", fmt_f(r.v_max));
        kv("classify.l_min", fmt_f(r.l_range.min));
        kv("classify.l_max", fmt_f(r.l_range.max));
        kv("classify.c_min", fmt_f(r.c_range.min));
        kv("classify.c_max", fmt_f(r.c_range.max));
        kv("classify.y_min", fmt_f(r.y_min));
        kv("classify.f_min", fmt_f(r.f_min));
        kv("classify.i_min", fmt_f(r.i_min));
        kv("classify.d_max", fmt_f(r.d_max));
        kv("classify.d_aspect_max", fmt_f(r.d_aspect_max));
        kv("classify.h_min", fmt_f(r.h_range.min));
        kv("classify.h_max", fmt_f(r.h_range.max));
        kv("classify.h_aspect_min", fmt_f(r.h_aspect_min));
        kv("classify.u_solidity_min", fmt_f(r.u_solidity.min));
        kv("classify.u_solidity_max", fmt_f(r.u_solidity.max));
        kv("classify.j_max", fmt_f(r.j_max));
        kv("classify.a_tol", fmt_f(r.a_tol));
        kv("classify.b_fraction", fmt_f(r.b_fraction));

        let mode = match self.hook.mode {
            HookMode::None => "none",
            HookMode::File => "file",
            HookMode::Command => "command",
            HookMode::Both => "both",
        };
        kv("hook.mode", mode.into());
        if let Some(path) = &self.hook.letter_file {
            kv("hook.file", format!("\"{}\"", path.display()));
        }
        if let Some(cmd) = &self.hook.command_template {
            kv("hook.command", format!("\"{cmd}\""));
        }

        kv("service.session_idle_secs", self.service.session_idle_secs.to_string());
        kv("service.max_body_bytes", self.service.max_body_bytes.to_string());
        kv("service.cors_origin", format!("\"{}\"", self.service.cors_origin));
        s
    }
}

/// Shortest representation that parses back to the same `f64`.
fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::AngleRange;

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(load_config(b"").unwrap(), Config::default());
        assert_eq!(load_config(b"# only a comment\n\n").unwrap(), Config::default());
    }

    #[test]
    fn a_tol_out_of_range() {
        assert!(matches!(
            load_config(b"classify.a_tol = 1.5"),
            Err(ConfigError::RangeViolation { line: 1, .. })
        ));
    }

    #[test]
    fn window_override() {
        let cfg = load_config(b"debounce.window = 3\n").unwrap();
        assert_eq!(cfg.pipeline.window, 3);
        let mut expected = Config::default();
        expected.pipeline.window = 3;
        assert_eq!(cfg, expected);
    }

    #[test]
    fn unknown_key_rejected() {
        assert_eq!(
            load_config(b"\nclassify.z_max = 3"),
            Err(ConfigError::UnknownKey { line: 2, key: "classify.z_max".into() })
        );
    }

    #[test]
    fn type_mismatch() {
        assert!(matches!(
            load_config(b"debounce.window = five"),
            Err(ConfigError::TypeMismatch { .. })
        ));
        assert!(matches!(
            load_config(b"threshold.invert = yes"),
            Err(ConfigError::TypeMismatch { .. })
        ));
        assert!(matches!(load_config(b"no equals sign"), Err(ConfigError::Syntax { line: 1 })));
    }

    #[test]
    fn inverted_ranges_rejected() {
        assert!(matches!(
            load_config(b"classify.l_min = 50\nclassify.l_max = 30"),
            Err(ConfigError::RangeViolation { .. })
        ));
    }

    #[test]
    fn command_template_needs_one_placeholder() {
        assert!(load_config(b"hook.mode = command\nhook.command = \"say {letter}\"").is_ok());
        assert!(matches!(
            load_config(b"hook.command = say"),
            Err(ConfigError::RangeViolation { .. })
        ));
        // Command mode without a template.
        assert!(load_config(b"hook.mode = command").is_err());
    }

    #[test]
    fn to_text_roundtrips() {
        let mut cfg = Config::default();
        cfg.pipeline.threshold = ThresholdMode::Fixed(90);
        cfg.pipeline.fallback_threshold = None;
        cfg.pipeline.invert = true;
        cfg.rules.a_tol = 0.123456789;
        cfg.rules.u_solidity = AngleRange::new(0.8, 0.97);
        cfg.hook.mode = HookMode::Both;
        cfg.hook.letter_file = Some("/tmp/letter dir/letter.txt".into());
        cfg.hook.command_template = Some("espeak {letter}".into());
        cfg.service.cors_origin = "http://localhost:5173".into();
        assert_eq!(load_config(cfg.to_text().as_bytes()).unwrap(), cfg);
        assert_eq!(load_config(Config::default().to_text().as_bytes()).unwrap(), Config::default());
    }
}
