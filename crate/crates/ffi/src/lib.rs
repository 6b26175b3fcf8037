//! C ABI for the handsign recognizer.
//!
//! Engines and sessions are opaque heap handles. Every fallible call returns an
//! [`HsStatus`]; on failure a description of the most recent error on the
//! calling thread is available from [`hs_last_error`]. Strings handed out by
//! the library must be released with [`hs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use handsign::io::{decode_image, emit_letter, load_config, Config, ResultDocument};
use handsign::pipeline::{process_frame, FrameResult};
use handsign::{GrayImage, Letter, RecognitionSession};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    InvalidImage = 3,
    InvalidConfig = 4,
    Internal = 5,
    Panic = 6,
}

/// Recognizer configuration shared by any number of calls and sessions.
pub struct HsEngine {
    config: Config,
}

/// Debounce state and metrics for one frame stream.
pub struct HsSession {
    inner: RecognitionSession,
}

/// Per-frame outcome. Letters are ASCII capitals, or 0 for none.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsFrame {
    pub letter: u8,
    pub defect_count: u32,
    pub angle_deg: f64,
    pub threshold: u8,
    /// Letter the session emitted on this frame; always 0 outside sessions.
    pub stable_letter: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsMetrics {
    pub frames_processed: u64,
    pub recognitions_emitted: u64,
    /// Actual output on the 7-second scale, NaN until the first emission.
    pub a_o: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn guard(f: impl FnOnce() -> Result<(), (HsStatus, String)>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside handsign");
            HsStatus::Panic
        }
    }
}

fn null(what: &str) -> (HsStatus, String) {
    (HsStatus::NullArgument, format!("{what} is null"))
}

fn letter_byte(letter: Option<Letter>) -> u8 {
    letter.map_or(0, |l| l.as_char() as u8)
}

/// Copies a `width * height` row-major buffer whose rows start `stride` bytes apart.
unsafe fn gray_from_raw(
    pixels: *const u8,
    width: u32,
    height: u32,
    stride: u32,
) -> Result<GrayImage, (HsStatus, String)> {
    if pixels.is_null() {
        return Err(null("pixels"));
    }
    let (w, h, s) = (width as usize, height as usize, stride as usize);
    if w == 0 || h == 0 {
        return Err((HsStatus::InvalidImage, format!("image is {w}x{h}")));
    }
    if s < w {
        return Err((HsStatus::InvalidArgument, format!("stride {s} is less than width {w}")));
    }
    let mut data = Vec::with_capacity(w * h);
    for row in 0..h {
        data.extend_from_slice(std::slice::from_raw_parts(pixels.add(row * s), w));
    }
    GrayImage::new(w, h, data).map_err(|e| (HsStatus::InvalidImage, e.to_string()))
}

fn run(engine: &HsEngine, img: &GrayImage) -> Result<FrameResult, (HsStatus, String)> {
    let cfg = &engine.config;
    process_frame(img, &cfg.rules, &cfg.pipeline).map_err(|e| (HsStatus::InvalidImage, e.to_string()))
}

fn frame_of(r: &FrameResult) -> HsFrame {
    HsFrame {
        letter: letter_byte(r.decision.letter),
        defect_count: r.decision.defect_count as u32,
        angle_deg: r.decision.angle_deg,
        threshold: r.threshold,
        stable_letter: 0,
    }
}

fn hand_out(text: String, out: *mut *mut c_char) -> Result<(), (HsStatus, String)> {
    let s = CString::new(text).map_err(|e| (HsStatus::Internal, e.to_string()))?;
    unsafe { *out = s.into_raw() };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hs_status_str(status: HsStatus) -> *const c_char {
    let s: &'static str = match status {
        HsStatus::Ok => "ok\0",
        HsStatus::NullArgument => "null argument\0",
        HsStatus::InvalidArgument => "invalid argument\0",
        HsStatus::InvalidImage => "invalid image\0",
        HsStatus::InvalidConfig => "invalid configuration\0",
        HsStatus::Internal => "internal error\0",
        HsStatus::Panic => "panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Engine with the default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hs_engine_new(out: *mut *mut HsEngine) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(HsEngine { config: Config::default() }));
        Ok(())
    })
}

/// Engine from configuration text in the `key = value` format.
///
/// # Safety
/// `text` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_engine_from_config(
    text: *const u8,
    len: usize,
    out: *mut *mut HsEngine,
) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if text.is_null() && len > 0 {
            return Err(null("text"));
        }
        let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(text, len) };
        let config = load_config(bytes).map_err(|e| (HsStatus::InvalidConfig, e.to_string()))?;
        *out = Box::into_raw(Box::new(HsEngine { config }));
        Ok(())
    })
}

/// # Safety
/// `engine` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_engine_free(engine: *mut HsEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Classify one 8-bit grayscale frame.
///
/// # Safety
/// `pixels` must cover `height` rows of `stride` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_recognize(
    engine: *const HsEngine,
    pixels: *const u8,
    width: u32,
    height: u32,
    stride: u32,
    out: *mut HsFrame,
) -> HsStatus {
    guard(|| {
        let engine = engine.as_ref().ok_or_else(|| null("engine"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let img = gray_from_raw(pixels, width, height, stride)?;
        *out = frame_of(&run(engine, &img)?);
        Ok(())
    })
}

/// Classify a PGM or PNG file image and return the full result document as JSON.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; `out_json` must be writable.
/// The returned string must be released with [`hs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hs_recognize_encoded_json(
    engine: *const HsEngine,
    bytes: *const u8,
    len: usize,
    out_json: *mut *mut c_char,
) -> HsStatus {
    guard(|| {
        let engine = engine.as_ref().ok_or_else(|| null("engine"))?;
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let img = decode_image(std::slice::from_raw_parts(bytes, len))
            .map_err(|e| (HsStatus::InvalidImage, e.to_string()))?;
        let doc = ResultDocument::from_frame(&run(engine, &img)?);
        hand_out(doc.to_json(), out_json)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Session emitting a letter after `window` identical consecutive frames (1 to 1000).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_session_new(window: u32, out: *mut *mut HsSession) -> HsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(1..=1000).contains(&window) {
            return Err((HsStatus::InvalidArgument, format!("window {window} outside 1..=1000")));
        }
        *out = Box::into_raw(Box::new(HsSession {
            inner: RecognitionSession::new(window as usize),
        }));
        Ok(())
    })
}

/// Classify a frame captured `t_seconds` after the session began and feed it
/// to the debouncer. Runs the engine's letter hook when a letter is emitted.
///
/// # Safety
/// Handles must be live; `pixels` as for [`hs_recognize`]; `out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hs_session_push(
    session: *mut HsSession,
    engine: *const HsEngine,
    pixels: *const u8,
    width: u32,
    height: u32,
    stride: u32,
    t_seconds: f64,
    out: *mut HsFrame,
) -> HsStatus {
    guard(|| {
        let session = session.as_mut().ok_or_else(|| null("session"))?;
        let engine = engine.as_ref().ok_or_else(|| null("engine"))?;
        if !t_seconds.is_finite() || t_seconds < 0.0 {
            return Err((HsStatus::InvalidArgument, format!("t_seconds {t_seconds}")));
        }
        let img = gray_from_raw(pixels, width, height, stride)?;
        let result = run(engine, &img)?;
        let mut frame = frame_of(&result);
        if let Some(event) = session.inner.observe(result.decision.letter, t_seconds) {
            frame.stable_letter = letter_byte(Some(event.letter));
            emit_letter(&event, &engine.config.hook);
        }
        if let Some(out) = out.as_mut() {
            *out = frame;
        }
        Ok(())
    })
}

/// # Safety
/// `session` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hs_session_metrics(session: *const HsSession, out: *mut HsMetrics) -> HsStatus {
    guard(|| {
        let session = session.as_ref().ok_or_else(|| null("session"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = session.inner.metrics();
        *out = HsMetrics {
            frames_processed: m.frames_processed,
            recognitions_emitted: m.recognitions_emitted,
            a_o: m.a_o.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// # Safety
/// `session` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_session_free(session: *mut HsSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Borrow the last error as a Rust string, for tests and Rust callers.
pub fn last_error_message() -> Option<String> {
    let p = hs_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}
