use std::io::Cursor;

use png::{BitDepth, ColorType, Transformations};
use thiserror::Error;

use crate::imaging::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PngError {
    #[error("unsupported PNG: {0}")]
    UnsupportedPng(String),
    #[error("undecodable PNG: {0}")]
    Decode(String),
}

/// Integer Rec. 601 luma: `0.299 R + 0.587 G + 0.114 B`, rounded half-up.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Decode an 8-bit (or palette / sub-byte gray) non-interlaced PNG to grayscale.
///
/// Colour inputs go through [`luma`]; alpha is ignored.
pub fn decode_png_gray(bytes: &[u8]) -> Result<GrayImage, PngError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| PngError::Decode(e.to_string()))?;

    let info = reader.info();
    if info.interlaced {
        return Err(PngError::UnsupportedPng("interlaced images".into()));
    }
    if info.bit_depth == BitDepth::Sixteen {
        return Err(PngError::UnsupportedPng("16-bit samples".into()));
    }
    let (width, height) = (info.width as usize, info.height as usize);

    let size = reader
        .output_buffer_size()
        .ok_or_else(|| PngError::UnsupportedPng("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| PngError::Decode(e.to_string()))?;
    if frame.bit_depth != BitDepth::Eight {
        return Err(PngError::UnsupportedPng(format!("{:?} output depth", frame.bit_depth)));
    }

    let channels = match frame.color_type {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => {
            return Err(PngError::UnsupportedPng("unexpanded palette".into()));
        }
    };
    let mut data = Vec::with_capacity(width * height);
    for row in buf.chunks(frame.line_size).take(height) {
        for px in row[..width * channels].chunks_exact(channels) {
            data.push(match channels {
                1 | 2 => px[0],
                _ => luma(px[0], px[1], px[2]),
            });
        }
    }
    GrayImage::new(width, height, data).map_err(|e| PngError::Decode(e.to_string()))
}

/// Encode as an 8-bit grayscale PNG.
pub fn encode_png_gray(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_color(ColorType::Grayscale);
        encoder.set_depth(BitDepth::Eight);
        let mut writer = encoder.write_header().expect("in-memory PNG header");
        writer.write_image_data(img.data()).expect("in-memory PNG data");
    }
    out
}
