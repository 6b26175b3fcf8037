use thiserror::Error;

use crate::imaging::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgmError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM data truncated: expected {expected} bytes, found {actual}")]
    TruncatedData { expected: usize, actual: usize },
    #[error("unsupported PGM maxval {0} (binary 8-bit only)")]
    UnsupportedMaxval(u32),
}

/// Decode a binary `P5` graymap with `maxval <= 255`.
///
/// Samples are rescaled to the full 0-255 range when `maxval < 255`. Bytes past
/// the raster are ignored.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let mut pos = 0usize;
    if bytes.get(0..2) != Some(b"P5") {
        return Err(PgmError::MalformedHeader("missing P5 magic".into()));
    }
    pos += 2;

    let mut fields = [0u32; 3];
    for (i, field) in fields.iter_mut().enumerate() {
        skip_whitespace_and_comments(bytes, &mut pos);
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(PgmError::MalformedHeader(format!("expected header field {}", i + 1)));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| PgmError::MalformedHeader(format!("field {text:?} out of range")))?;
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PgmError::MalformedHeader("missing whitespace before raster".into())),
    }

    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let expected = width as usize * height as usize;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(PgmError::TruncatedData {
            expected,
            actual: raster.len(),
        });
    }
    let data = raster[..expected]
        .iter()
        .map(|&v| {
            if maxval == 255 {
                v
            } else {
                ((v.min(maxval as u8) as u32 * 255 + maxval / 2) / maxval) as u8
            }
        })
        .collect();
    GrayImage::new(width as usize, height as usize, data)
        .map_err(|e| PgmError::MalformedHeader(e.to_string()))
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b'#' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
}

/// Encode as binary `P5` with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}
