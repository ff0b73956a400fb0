use std::path::Path;

use crate::error::{Result, StcaError};

/// Binary PGM (P5, maxval 255); values are clamped to [0, 1] and rounded.
pub fn encode_pgm(image: &[f64], height: usize, width: usize) -> Result<Vec<u8>> {
    if height * width != image.len() || image.is_empty() {
        return Err(StcaError::shape(format!(
            "{height}x{width} image from {} values",
            image.len()
        )));
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(image.iter().map(|&v| {
        let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        (v * 255.0).round() as u8
    }));
    Ok(out)
}

pub fn write_pgm(image: &[f64], shape_hint: Option<(usize, usize)>, path: &Path) -> Result<()> {
    let (h, w) = shape_hint.ok_or_else(|| StcaError::param("PGM output needs an image shape"))?;
    let bytes = encode_pgm(image, h, w)?;
    std::fs::write(path, bytes).map_err(|e| StcaError::io(path, e))
}

/// Places equally tall row-major images side by side.
pub fn hconcat(images: &[&[f64]], height: usize, width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(images.len() * height * width);
    for r in 0..height {
        for img in images {
            out.extend_from_slice(&img[r * width..(r + 1) * width]);
        }
    }
    out
}
