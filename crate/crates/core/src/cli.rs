//! Command-line entry points.
//!
//! Exit status is 0 on success (including an Unknown decision), 2 when an
//! input cannot be read or decoded, a directory has nothing to process, or a
//! port cannot be bound, and 3 for invalid flags or configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::calibrate::{calibrate, default_grid, label_from_file_name, Sample};
use crate::classify::{letter_label, parse_letter_label, Letter};
use crate::imaging::GrayImage;
use crate::io::{
    decode_image, emit_letter, encode_pgm, encode_png_gray, load_config, Config, HookMode,
    ResultDocument, LETTER_PLACEHOLDER,
};
use crate::pipeline::{process_frame, RecognitionSession, SessionMetrics, StageTimings, ThresholdMode};
use crate::service::{self, AppState};
use crate::synth::fixture_corpus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "handsign", version, about = "Recognize fingerspelled letters in hand silhouettes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a single PGM or PNG frame.
    Recognize {
        path: PathBuf,
        /// Print only the letter (or `unknown`).
        #[arg(long)]
        brief: bool,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Run a directory of frames, in file-name order, as one debounced session.
    Batch {
        dir: PathBuf,
        /// Frame rate used to timestamp frames; frame i is at (i + 1) / fps seconds.
        #[arg(long, default_value_t = 15.0, value_parser = positive_f64)]
        fps: f64,
        /// File with one expected label per frame, in the same order.
        #[arg(long)]
        expected: Option<PathBuf>,
        /// Print a text table instead of JSON.
        #[arg(long)]
        brief: bool,
        /// Zero the per-stage timings so output is reproducible.
        #[arg(long)]
        no_timings: bool,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory served under /ui/.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Grid-search calibration thresholds on frames labelled by file-name prefix.
    Calibrate {
        dir: PathBuf,
        /// Write the tuned configuration here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: PipelineFlags,
    },
    /// Write the synthetic fixture corpus to a directory.
    Fixtures {
        dir: PathBuf,
        /// Write PNG instead of PGM.
        #[arg(long)]
        png: bool,
    },
}

#[derive(Debug, Clone, Args)]
struct PipelineFlags {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed binarization threshold.
    #[arg(long, value_parser = clap::value_parser!(u8), conflicts_with = "otsu")]
    threshold: Option<u8>,
    /// Pick the threshold with Otsu's method (the default).
    #[arg(long)]
    otsu: bool,
    /// Treat dark pixels as the hand.
    #[arg(long)]
    invert: bool,
    /// Debounce window length.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1000))]
    window: Option<u64>,
    /// Overwrite this file with each stable letter.
    #[arg(long)]
    hook_file: Option<PathBuf>,
    /// Run this command for each stable letter; `{letter}` is replaced.
    #[arg(long)]
    hook_cmd: Option<String>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// A failure with the exit status it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

type CliResult = Result<(), Failure>;

impl PipelineFlags {
    fn resolve(&self) -> Result<Config, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let bytes = std::fs::read(path)
                    .map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))?;
                load_config(&bytes).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
            }
            None => Config::default(),
        };
        if let Some(t) = self.threshold {
            cfg.pipeline.threshold = ThresholdMode::Fixed(t);
        }
        if self.otsu {
            cfg.pipeline.threshold = ThresholdMode::Otsu;
        }
        if self.invert {
            cfg.pipeline.invert = true;
        }
        if let Some(k) = self.window {
            cfg.pipeline.window = k as usize;
        }
        if let Some(path) = &self.hook_file {
            cfg.hook.letter_file = Some(path.clone());
            cfg.hook.mode = if cfg.hook.mode.runs_command() { HookMode::Both } else { HookMode::File };
        }
        if let Some(cmd) = &self.hook_cmd {
            if cmd.matches(LETTER_PLACEHOLDER).count() != 1 {
                return Err(Failure::usage(format!(
                    "--hook-cmd must contain {LETTER_PLACEHOLDER} exactly once"
                )));
            }
            cfg.hook.command_template = Some(cmd.clone());
            cfg.hook.mode = if cfg.hook.mode.writes_file() { HookMode::Both } else { HookMode::Command };
        }
        cfg.hook.validate().map_err(Failure::usage)?;
        cfg.rules.validate().map_err(Failure::usage)?;
        Ok(cfg)
    }
}

/// Parse `std::env::args_os` and run; returns the process exit status.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Recognize { path, brief, flags } => cmd_recognize(&path, brief, &flags),
        Command::Batch {
            dir,
            fps,
            expected,
            brief,
            no_timings,
            flags,
        } => cmd_batch(&dir, fps, expected.as_deref(), brief, no_timings, &flags),
        Command::Serve {
            port,
            host,
            ui_dir,
            flags,
        } => cmd_serve(&host, port, ui_dir, &flags),
        Command::Calibrate { dir, out, flags } => cmd_calibrate(&dir, out.as_deref(), &flags),
        Command::Fixtures { dir, png } => cmd_fixtures(&dir, png),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read_image(path: &Path) -> Result<GrayImage, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))?;
    decode_image(&bytes).map_err(|e| Failure::input(format!("decoding {}: {e}", path.display())))
}

fn recognize_image(img: &GrayImage, cfg: &Config, path: &Path) -> Result<ResultDocument, Failure> {
    let r = process_frame(img, &cfg.rules, &cfg.pipeline)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(ResultDocument::from_frame(&r))
}

fn print_stdout(text: &str) -> CliResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::input(format!("writing output: {e}")))
}

fn cmd_recognize(path: &Path, brief: bool, flags: &PipelineFlags) -> CliResult {
    let cfg = flags.resolve()?;
    let img = read_image(path)?;
    let doc = recognize_image(&img, &cfg, path)?;
    if brief {
        print_stdout(&format!("{}\n", doc.letter))
    } else {
        print_stdout(&format!("{}\n", doc.to_json()))
    }
}

/// Image files in `dir`, sorted by file name.
fn image_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::input(format!("reading {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| x.eq_ignore_ascii_case("pgm") || x.eq_ignore_ascii_case("png"))
        })
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchFrame {
    pub file: String,
    pub t: f64,
    pub result: ResultDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchEmit {
    pub letter: String,
    pub file: String,
    pub frame_index: u64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub window: usize,
    pub fps: f64,
    pub frames: Vec<BatchFrame>,
    pub emits: Vec<BatchEmit>,
    pub metrics: SessionMetrics,
    pub accuracy: Option<Accuracy>,
}

fn read_expected(path: &Path, frames: usize) -> Result<Vec<Option<Letter>>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("reading {}: {e}", path.display())))?;
    let labels = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_letter_label(l).map_err(|e| Failure::usage(format!("{}: {e}", path.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    if labels.len() != frames {
        return Err(Failure::usage(format!(
            "{} lists {} labels for {} frames",
            path.display(),
            labels.len(),
            frames
        )));
    }
    Ok(labels)
}

fn cmd_batch(
    dir: &Path,
    fps: f64,
    expected: Option<&Path>,
    brief: bool,
    no_timings: bool,
    flags: &PipelineFlags,
) -> CliResult {
    let cfg = flags.resolve()?;
    let files = image_files(dir)?;
    if files.is_empty() {
        return Err(Failure::input(format!("no .pgm or .png frames in {}", dir.display())));
    }
    let expected = expected.map(|p| read_expected(p, files.len())).transpose()?;

    let mut session = RecognitionSession::new(cfg.pipeline.window);
    let mut frames = Vec::with_capacity(files.len());
    let mut emits = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let img = read_image(path)?;
        let mut doc = recognize_image(&img, &cfg, path)?;
        if no_timings {
            doc.timings = StageTimings::default();
        }
        let t = (i + 1) as f64 / fps;
        let letter = parse_letter_label(&doc.letter).unwrap_or(None);
        if let Some(event) = session.observe(letter, t) {
            doc.stable_letter = Some(letter_label(Some(event.letter)));
            emits.push(BatchEmit {
                letter: letter_label(Some(event.letter)),
                file: file_name(path),
                frame_index: event.frame_index,
                elapsed_s: event.elapsed_s,
            });
            let outcome = emit_letter(&event, &cfg.hook);
            for err in [outcome.file, outcome.command].into_iter().flatten().filter_map(Result::err) {
                eprintln!("warning: {err}");
            }
        }
        frames.push(BatchFrame {
            file: file_name(path),
            t,
            result: doc,
        });
    }

    let accuracy = expected.map(|labels| {
        let correct = frames
            .iter()
            .zip(&labels)
            .filter(|(f, &l)| f.result.letter == letter_label(l))
            .count();
        Accuracy {
            correct,
            total: labels.len(),
            percent: correct as f64 / labels.len() as f64 * 100.0,
        }
    });
    let report = BatchReport {
        window: cfg.pipeline.window,
        fps,
        frames,
        emits,
        metrics: session.metrics().clone(),
        accuracy,
    };

    if brief {
        print_stdout(&batch_table(&report))
    } else {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::input(e.to_string()))?;
        print_stdout(&format!("{json}\n"))
    }
}

fn batch_table(report: &BatchReport) -> String {
    use std::fmt::Write as _;
    let width = report.frames.iter().map(|f| f.file.len()).max().unwrap_or(4).max(4);
    let mut s = String::new();
    let _ = writeln!(s, "{:width$}  {:>8}  {:8}  stable", "file", "t", "letter");
    for f in &report.frames {
        let stable = f.result.stable_letter.as_deref().unwrap_or("");
        let line = format!("{:width$}  {:>8.3}  {:8}  {}", f.file, f.t, f.result.letter, stable);
        let _ = writeln!(s, "{}", line.trim_end());
    }
    let emitted: Vec<String> = report
        .emits
        .iter()
        .map(|e| format!("{}@{:.3}s", e.letter, e.elapsed_s))
        .collect();
    let _ = writeln!(s, "emits: {}", if emitted.is_empty() { "none".into() } else { emitted.join(" ") });
    match report.metrics.a_o {
        Some(a) => {
            let _ = writeln!(s, "a_o: {a:.2}");
        }
        None => {
            let _ = writeln!(s, "a_o: none");
        }
    }
    if let Some(acc) = &report.accuracy {
        let _ = writeln!(s, "accuracy: {:.1}% ({}/{})", acc.percent, acc.correct, acc.total);
    }
    s
}

fn cmd_serve(host: &str, port: u16, ui_dir: Option<PathBuf>, flags: &PipelineFlags) -> CliResult {
    let cfg = flags.resolve()?;
    let listener = std::net::TcpListener::bind((host, port))
        .map_err(|e| Failure::input(format!("binding {host}:{port}: {e}")))?;
    listener
        .set_nonblocking(true)
        .map_err(|e| Failure::input(e.to_string()))?;
    let addr = listener.local_addr().map_err(|e| Failure::input(e.to_string()))?;

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::input(format!("starting runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::from_std(listener).map_err(|e| Failure::input(e.to_string()))?;
        let app = service::router_with_ui(AppState::new(cfg), ui_dir);
        print_stdout(&format!("listening on http://{addr}\n"))?;
        service::serve(listener, app, shutdown_signal())
            .await
            .map_err(|e| Failure::input(format!("serving: {e}")))
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    {
        let term = async {
            match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
                Ok(mut s) => {
                    s.recv().await;
                }
                Err(_) => std::future::pending::<()>().await,
            }
        };
        tokio::select! {
            _ = ctrl_c => {},
            _ = term => {},
        }
    }
    #[cfg(not(unix))]
    ctrl_c.await;
}

fn cmd_calibrate(dir: &Path, out: Option<&Path>, flags: &PipelineFlags) -> CliResult {
    let base = flags.resolve()?;
    let mut samples = Vec::new();
    for path in image_files(dir)? {
        let name = file_name(&path);
        let Some(expected) = label_from_file_name(&name) else {
            continue;
        };
        let img = read_image(&path)?;
        let sample = Sample::measure(name, expected, &img, &base.pipeline)
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(Failure::input(format!("no labelled frames in {}", dir.display())));
    }
    let cal = calibrate(&samples, &base, &default_grid());
    eprintln!(
        "calibrated on {} frames: {}/{} correct (baseline {}/{}), {} grid points",
        cal.total, cal.correct, cal.total, cal.baseline_correct, cal.total, cal.evaluated
    );
    let text = cal.config.to_text();
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("writing {}: {e}", path.display()))),
        None => print_stdout(&text),
    }
}

fn cmd_fixtures(dir: &Path, png: bool) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("creating {}: {e}", dir.display())))?;
    for f in fixture_corpus() {
        let name = match f.expected {
            Some(_) => f.name.clone(),
            None => format!("unknown_{}", f.name),
        };
        let (bytes, ext) = if png {
            (encode_png_gray(&f.image), "png")
        } else {
            (encode_pgm(&f.image), "pgm")
        };
        let path = dir.join(format!("{name}.{ext}"));
        std::fs::write(&path, bytes).map_err(|e| Failure::input(format!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}
