//! Letter hooks: the letter file and the external command.
//!
//! The letter file always holds exactly two bytes, the letter and a newline.
//! It is replaced by rename so a reader sees either the old letter or the new
//! one. Commands run detached and are never waited on by the caller.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::Letter;
use crate::pipeline::StableLetterEvent;

/// Token in a command template that is replaced by the letter.
pub const LETTER_PLACEHOLDER: &str = "{letter}";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HookMode {
    #[default]
    None,
    File,
    Command,
    Both,
}

impl HookMode {
    pub fn writes_file(self) -> bool {
        matches!(self, HookMode::File | HookMode::Both)
    }

    pub fn runs_command(self) -> bool {
        matches!(self, HookMode::Command | HookMode::Both)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HookConfig {
    pub mode: HookMode,
    pub letter_file: Option<PathBuf>,
    /// Whitespace-separated program and arguments, e.g. `espeak {letter}`.
    pub command_template: Option<String>,
}

impl HookConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.mode.writes_file() && self.letter_file.is_none() {
            return Err("file mode needs a letter file path".into());
        }
        if self.mode.runs_command() {
            let Some(t) = &self.command_template else {
                return Err("command mode needs a command template".into());
            };
            if t.matches(LETTER_PLACEHOLDER).count() != 1 {
                return Err(format!("command template must contain {LETTER_PLACEHOLDER} exactly once"));
            }
            if t.split_whitespace().next().is_none() {
                return Err("command template is empty".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HookError {
    #[error("writing {path}: {message}")]
    FileWriteFailed { path: String, message: String },
    #[error("spawning `{program}`: {message}")]
    CommandSpawnFailed { program: String, message: String },
}

/// Result per channel; `None` when the mode skips that channel.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HookOutcome {
    pub file: Option<Result<(), HookError>>,
    pub command: Option<Result<(), HookError>>,
}

impl HookOutcome {
    pub fn is_ok(&self) -> bool {
        !matches!(self.file, Some(Err(_))) && !matches!(self.command, Some(Err(_)))
    }
}

pub fn emit_letter(event: &StableLetterEvent, hook: &HookConfig) -> HookOutcome {
    let mut outcome = HookOutcome::default();
    if hook.mode.writes_file() {
        outcome.file = Some(match &hook.letter_file {
            Some(path) => write_letter_file(path, event.letter),
            None => Err(HookError::FileWriteFailed {
                path: String::new(),
                message: "no letter file configured".into(),
            }),
        });
    }
    if hook.mode.runs_command() {
        outcome.command = Some(match &hook.command_template {
            Some(t) => spawn_command(t, event.letter),
            None => Err(HookError::CommandSpawnFailed {
                program: String::new(),
                message: "no command template configured".into(),
            }),
        });
    }
    outcome
}

/// Replace `path` with `"<letter>\n"` through a temporary file in the same directory.
pub fn write_letter_file(path: &Path, letter: Letter) -> Result<(), HookError> {
    let fail = |e: std::io::Error| HookError::FileWriteFailed {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(&[letter.as_char() as u8, b'\n']).map_err(fail)?;
    tmp.as_file().sync_data().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Expand the template and start it without waiting for it to finish.
pub fn spawn_command(template: &str, letter: Letter) -> Result<(), HookError> {
    let letter = letter.as_char().to_string();
    let mut words = template
        .split_whitespace()
        .map(|w| w.replace(LETTER_PLACEHOLDER, &letter));
    let program = words.next().ok_or_else(|| HookError::CommandSpawnFailed {
        program: String::new(),
        message: "empty command template".into(),
    })?;
    let mut child = Command::new(&program)
        .args(words)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| HookError::CommandSpawnFailed {
            program: program.clone(),
            message: e.to_string(),
        })?;
    // Reap in the background so finished hooks do not linger as zombies.
    std::thread::spawn(move || {
        let _ = child.wait();
    });
    Ok(())
}
