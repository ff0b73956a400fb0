//! IDX reader (big-endian headers, unsigned byte payloads) for MNIST.

use std::path::Path;

use super::Dataset;
use crate::error::{FormatErrorKind, Result, StcaError};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or_else(|| StcaError::format(FormatErrorKind::Truncated, bytes.len() as u64, format!("reading {what}")))
}

/// Returns `(rows, cols, pixel rows)` with raw byte pixels.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, Vec<Vec<u8>>)> {
    let magic = be_u32(bytes, 0, "magic")?;
    if magic != IMAGE_MAGIC {
        return Err(StcaError::format(
            FormatErrorKind::BadMagic,
            0,
            format!("expected 2051 (0x00000803), found {magic}"),
        ));
    }
    let count = be_u32(bytes, 4, "image count")? as usize;
    let rows = be_u32(bytes, 8, "row count")? as usize;
    let cols = be_u32(bytes, 12, "column count")? as usize;
    if rows == 0 || cols == 0 {
        return Err(StcaError::format(FormatErrorKind::DimensionMismatch, 8, "zero image dimension"));
    }
    let size = rows * cols;
    let expected = 16 + count * size;
    if bytes.len() < expected {
        return Err(StcaError::format(
            FormatErrorKind::Truncated,
            bytes.len() as u64,
            format!("{count} images of {rows}x{cols} need {expected} bytes"),
        ));
    }
    if bytes.len() > expected {
        return Err(StcaError::format(
            FormatErrorKind::DimensionMismatch,
            expected as u64,
            format!("{} bytes beyond the declared {count} images", bytes.len() - expected),
        ));
    }
    let images = bytes[16..].chunks_exact(size).map(<[u8]>::to_vec).collect();
    Ok((rows, cols, images))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0, "magic")?;
    if magic != LABEL_MAGIC {
        return Err(StcaError::format(
            FormatErrorKind::BadMagic,
            0,
            format!("expected 2049 (0x00000801), found {magic}"),
        ));
    }
    let count = be_u32(bytes, 4, "label count")? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(StcaError::format(
            FormatErrorKind::Truncated,
            bytes.len() as u64,
            format!("{count} labels need {expected} bytes"),
        ));
    }
    if bytes.len() > expected {
        return Err(StcaError::format(
            FormatErrorKind::DimensionMismatch,
            expected as u64,
            "trailing bytes after labels",
        ));
    }
    Ok(bytes[8..].to_vec())
}

/// Loads an image file (and optionally its labels), scaling pixels to [0, 1].
pub fn load_mnist_idx(images_path: &Path, labels_path: Option<&Path>) -> Result<Dataset> {
    let bytes = std::fs::read(images_path).map_err(|e| StcaError::io(images_path, e))?;
    let (rows, cols, images) = parse_idx_images(&bytes)?;
    let samples = images
        .iter()
        .map(|img| img.iter().map(|&p| f64::from(p) / 255.0).collect())
        .collect();
    let mut data = Dataset::new(samples, Some((rows, cols)), format!("idx:{}", images_path.display()))?;
    if let Some(lp) = labels_path {
        let lbytes = std::fs::read(lp).map_err(|e| StcaError::io(lp, e))?;
        let labels = parse_idx_labels(&lbytes)?;
        if labels.len() != data.len() {
            return Err(StcaError::format(
                FormatErrorKind::DimensionMismatch,
                4,
                format!("{} labels for {} images", labels.len(), data.len()),
            ));
        }
        data.labels = Some(labels);
    }
    Ok(data)
}

pub fn encode_idx_images(rows: usize, cols: usize, images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for v in [IMAGE_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        assert_eq!(img.len(), rows * cols);
        out.extend_from_slice(img);
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
