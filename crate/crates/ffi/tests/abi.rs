use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use handsign::io::encode_pgm;
use handsign::synth::{background_fixture, letter_fixture};
use handsign::{GrayImage, Letter};
use handsign_ffi::*;

fn engine() -> *mut HsEngine {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hs_engine_new(&mut e) }, HsStatus::Ok);
    e
}

fn recognize(e: *const HsEngine, img: &GrayImage) -> HsFrame {
    let mut out = HsFrame { letter: 0, defect_count: 0, angle_deg: 0.0, threshold: 0, stable_letter: 0 };
    let status = unsafe {
        hs_recognize(e, img.data().as_ptr(), img.width() as u32, img.height() as u32, img.width() as u32, &mut out)
    };
    assert_eq!(status, HsStatus::Ok, "{:?}", last_error_message());
    out
}

#[test]
fn recognizes_every_fixture_letter() {
    let e = engine();
    for letter in Letter::ALL {
        let f = recognize(e, &letter_fixture(letter));
        assert_eq!(f.letter, letter.as_char() as u8);
        assert_eq!(f.stable_letter, 0);
    }
    assert_eq!(recognize(e, &background_fixture()).letter, 0);
    unsafe { hs_engine_free(e) };
}

#[test]
fn strided_buffer_matches_packed() {
    let e = engine();
    let img = letter_fixture(Letter::W);
    let (w, h) = (img.width(), img.height());
    let stride = w + 13;
    let mut padded = vec![7u8; stride * h];
    for y in 0..h {
        padded[y * stride..y * stride + w].copy_from_slice(&img.data()[y * w..(y + 1) * w]);
    }
    let mut out = recognize(e, &img);
    let packed = out;
    let status = unsafe { hs_recognize(e, padded.as_ptr(), w as u32, h as u32, stride as u32, &mut out) };
    assert_eq!(status, HsStatus::Ok);
    assert_eq!(out, packed);
    unsafe { hs_engine_free(e) };
}

#[test]
fn encoded_json_round_trips() {
    let e = engine();
    let bytes = encode_pgm(&letter_fixture(Letter::Y));
    let mut json = ptr::null_mut();
    let status = unsafe { hs_recognize_encoded_json(e, bytes.as_ptr(), bytes.len(), &mut json) };
    assert_eq!(status, HsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { hs_string_free(json) };
    let doc = handsign::io::ResultDocument::from_json(&text).unwrap();
    assert_eq!(doc.letter, "Y");

    let garbage = b"GIF89a";
    let status = unsafe { hs_recognize_encoded_json(e, garbage.as_ptr(), garbage.len(), &mut json) };
    assert_eq!(status, HsStatus::InvalidImage);
    unsafe { hs_engine_free(e) };
}

#[test]
fn errors_are_codes_with_messages() {
    let mut out = HsFrame { letter: 0, defect_count: 0, angle_deg: 0.0, threshold: 0, stable_letter: 0 };
    let px = [0u8; 4];
    let status = unsafe { hs_recognize(ptr::null(), px.as_ptr(), 2, 2, 2, &mut out) };
    assert_eq!(status, HsStatus::NullArgument);
    assert_eq!(last_error_message().as_deref(), Some("engine is null"));

    let e = engine();
    let status = unsafe { hs_recognize(e, px.as_ptr(), 2, 2, 1, &mut out) };
    assert_eq!(status, HsStatus::InvalidArgument);
    let status = unsafe { hs_recognize(e, px.as_ptr(), 0, 2, 2, &mut out) };
    assert_eq!(status, HsStatus::InvalidImage);
    assert_eq!(unsafe { hs_engine_new(ptr::null_mut()) }, HsStatus::NullArgument);

    let msg = unsafe { CStr::from_ptr(hs_status_str(HsStatus::InvalidConfig)) };
    assert_eq!(msg.to_str().unwrap(), "invalid configuration");
    unsafe { hs_engine_free(e) };
    unsafe { hs_engine_free(ptr::null_mut()) };
    unsafe { hs_string_free(ptr::null_mut()) };
}

#[test]
fn engine_from_config_text() {
    let mut e = ptr::null_mut();
    let text = b"classify.v_max = 5.0\n";
    assert_eq!(unsafe { hs_engine_from_config(text.as_ptr(), text.len(), &mut e) }, HsStatus::Ok);
    // The V fixture's angle lies between 5 and 10 degrees, so it now falls in the gap.
    assert_eq!(recognize(e, &letter_fixture(Letter::V)).letter, 0);
    unsafe { hs_engine_free(e) };

    let bad = b"classify.nope = 1\n";
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hs_engine_from_config(bad.as_ptr(), bad.len(), &mut e) }, HsStatus::InvalidConfig);
    assert!(e.is_null());
    assert!(last_error_message().unwrap().contains("nope"));
}

#[test]
fn session_debounces_and_writes_hook_file() {
    let dir = tempfile::tempdir().unwrap();
    let letter_file = dir.path().join("letter.txt");
    let text = format!("hook.mode = file\nhook.file = {}\n", letter_file.display());
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hs_engine_from_config(text.as_ptr(), text.len(), &mut e) }, HsStatus::Ok);

    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hs_session_new(3, &mut s) }, HsStatus::Ok);
    let img = letter_fixture(Letter::L);
    let mut emitted = Vec::new();
    for i in 1..=4 {
        let mut f = HsFrame { letter: 0, defect_count: 0, angle_deg: 0.0, threshold: 0, stable_letter: 0 };
        let status = unsafe {
            hs_session_push(s, e, img.data().as_ptr(), 640, 480, 640, i as f64 * 0.5, &mut f)
        };
        assert_eq!(status, HsStatus::Ok);
        emitted.push(f.stable_letter);
    }
    assert_eq!(emitted, [0, 0, b'L', 0]);
    assert_eq!(std::fs::read(&letter_file).unwrap(), b"L\n");

    let mut m = HsMetrics { frames_processed: 0, recognitions_emitted: 0, a_o: 0.0 };
    assert_eq!(unsafe { hs_session_metrics(s, &mut m) }, HsStatus::Ok);
    assert_eq!((m.frames_processed, m.recognitions_emitted), (4, 1));
    assert!((m.a_o - 1.5 / 7.0 * 100.0).abs() < 1e-12);

    let status = unsafe { hs_session_push(s, e, img.data().as_ptr(), 640, 480, 640, f64::NAN, ptr::null_mut()) };
    assert_eq!(status, HsStatus::InvalidArgument);
    unsafe {
        hs_session_free(s);
        hs_engine_free(e);
    }
}

#[test]
fn fresh_session_reports_nan_output() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hs_session_new(1001, &mut s) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_session_new(1, &mut s) }, HsStatus::Ok);
    let mut m = HsMetrics { frames_processed: 9, recognitions_emitted: 9, a_o: 0.0 };
    assert_eq!(unsafe { hs_session_metrics(s, &mut m) }, HsStatus::Ok);
    assert_eq!(m.frames_processed, 0);
    assert!(m.a_o.is_nan());
    unsafe { hs_session_free(s) };
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[cfg(unix)]
#[test]
fn c_program_links_against_header_and_static_library() {
    let lib = target_dir().join("libhandsign_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());

    let frame = dir.path().join("c.pgm");
    std::fs::write(&frame, encode_pgm(&letter_fixture(Letter::C))).unwrap();
    let out = Command::new(&exe).arg(&frame).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // Second frame at 3.5 s completes the window of two.
    let expected = format!("{} C C 3 50.0\n", env!("CARGO_PKG_VERSION"));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}
