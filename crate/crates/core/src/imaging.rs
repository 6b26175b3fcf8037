//! Grayscale frames and their binarization into hand/background masks.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImagingError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    /// Every pixel has the same intensity, so there is no class split to optimize.
    #[error("image is uniform (every pixel equals {0})")]
    UniformImage(u8),
}

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(ImagingError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// An image filled with one intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImagingError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }
}

/// Row-major foreground mask; `true` marks hand pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if bits.len() != expected {
            return Err(ImagingError::LengthMismatch {
                expected,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self, ImagingError> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Bounds-checked lookup; anything outside the grid is background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.bits[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Swap foreground and background.
    pub fn inverted(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Foreground wherever intensity is at or above `threshold`.
pub fn binarize_fixed(img: &GrayImage, threshold: u8) -> BinaryMask {
    BinaryMask {
        width: img.width,
        height: img.height,
        bits: img.data.iter().map(|&v| v >= threshold).collect(),
    }
}

/// Otsu's method over the 256-bin histogram.
///
/// Candidate threshold `t` splits pixels into `< t` and `>= t`; the returned
/// threshold maximizes the between-class variance, with ties going to the
/// lowest `t`.
pub fn binarize_otsu(img: &GrayImage) -> Result<(BinaryMask, u8), ImagingError> {
    let threshold = otsu_threshold(img)?;
    Ok((binarize_fixed(img, threshold), threshold))
}

pub fn otsu_threshold(img: &GrayImage) -> Result<u8, ImagingError> {
    let first = img.data[0];
    if img.data.iter().all(|&v| v == first) {
        return Err(ImagingError::UniformImage(first));
    }

    let mut histogram = [0u64; 256];
    for &v in &img.data {
        histogram[v as usize] += 1;
    }
    let total = img.data.len() as f64;
    let total_sum: f64 = histogram
        .iter()
        .enumerate()
        .map(|(v, &n)| v as f64 * n as f64)
        .sum();

    // Running sums describe the background class {v < t}.
    let mut below_count = 0.0;
    let mut below_sum = 0.0;
    let mut best_t = 0u8;
    let mut best_var = -1.0f64;
    for t in 0..=255usize {
        if t > 0 {
            below_count += histogram[t - 1] as f64;
            below_sum += (t - 1) as f64 * histogram[t - 1] as f64;
        }
        let above_count = total - below_count;
        let var = if below_count == 0.0 || above_count == 0.0 {
            0.0
        } else {
            let mean_below = below_sum / below_count;
            let mean_above = (total_sum - below_sum) / above_count;
            let w0 = below_count / total;
            let w1 = above_count / total;
            w0 * w1 * (mean_below - mean_above).powi(2)
        };
        // Relative slack so float noise cannot break a true tie away from the lowest t.
        if var > best_var + 1e-9 * best_var.abs().max(1.0) {
            best_var = var;
            best_t = t as u8;
        }
    }
    Ok(best_t)
}

/// One pass of a 3x3 majority filter.
///
/// Only in-bounds cells vote, so pixels at the frame edge see fewer
/// neighbours; an exact tie keeps the pixel's current value.
pub fn denoise(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut out = mask.clone();
    for y in 0..h {
        for x in 0..w {
            let mut votes = 0i32;
            let mut cells = 0i32;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    cells += 1;
                    if mask.bits[(ny * w + nx) as usize] {
                        votes += 1;
                    }
                }
            }
            let idx = (y * w + x) as usize;
            out.bits[idx] = match (2 * votes).cmp(&cells) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => mask.bits[idx],
            };
        }
    }
    out
}

/// Apply [`denoise`] `passes` times.
pub fn denoise_n(mask: &BinaryMask, passes: u8) -> BinaryMask {
    let mut out = mask.clone();
    for _ in 0..passes {
        out = denoise(&out);
    }
    out
}
