//! Image decoding, result documents, letter hooks and configuration.

mod config;
mod hook;
mod pgm;
mod png_gray;
mod result;

pub use config::{load_config, Config, ConfigError, ServiceConfig};
pub use hook::{
    emit_letter, spawn_command, write_letter_file, HookConfig, HookError, HookMode, HookOutcome,
    LETTER_PLACEHOLDER,
};
pub use pgm::{decode_pgm, encode_pgm, PgmError};
pub use png_gray::{decode_png_gray, encode_png_gray, luma, PngError};
pub use result::{DefectDocument, FeaturesDocument, Overlay, ResultDocument, SCHEMA_VERSION};

use thiserror::Error;

use crate::imaging::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("empty image data")]
    Empty,
    #[error("unrecognized image format")]
    UnknownFormat,
    #[error(transparent)]
    Pgm(#[from] PgmError),
    #[error(transparent)]
    Png(#[from] PngError),
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

/// Decode a binary PGM or a PNG, chosen by magic bytes.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage, DecodeError> {
    if bytes.is_empty() {
        Err(DecodeError::Empty)
    } else if bytes.starts_with(PNG_MAGIC) {
        Ok(decode_png_gray(bytes)?)
    } else if bytes.starts_with(b"P") {
        Ok(decode_pgm(bytes)?)
    } else {
        Err(DecodeError::UnknownFormat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sniffs_both_formats() {
        let img = GrayImage::new(2, 1, vec![3, 250]).unwrap();
        assert_eq!(decode_image(&encode_pgm(&img)).unwrap(), img);
        assert_eq!(decode_image(&encode_png_gray(&img)).unwrap(), img);
        assert_eq!(decode_image(b""), Err(DecodeError::Empty));
        assert_eq!(decode_image(b"GIF89a"), Err(DecodeError::UnknownFormat));
    }
}
