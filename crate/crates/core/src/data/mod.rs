//! Data sources and file formats: synthetic Gaussian draws, MNIST IDX files,
//! PGM images and plain CSV vectors.

mod gaussian;
mod idx;
mod pgm;

use std::path::Path;

use crate::error::{FormatErrorKind, Result, StcaError};
use crate::fmt::format_g;

pub use gaussian::gen_gaussian;
pub use idx::{encode_idx_images, encode_idx_labels, load_mnist_idx, parse_idx_images, parse_idx_labels};
pub use pgm::{encode_pgm, hconcat, write_pgm};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Vec<f64>>,
    /// `(height, width)` for image data.
    pub shape_hint: Option<(usize, usize)>,
    pub source_tag: String,
    pub labels: Option<Vec<u8>>,
}

impl Dataset {
    pub fn new(samples: Vec<Vec<f64>>, shape_hint: Option<(usize, usize)>, source_tag: impl Into<String>) -> Result<Self> {
        let dim = samples.first().map_or(0, Vec::len);
        if samples.iter().any(|s| s.len() != dim) {
            return Err(StcaError::shape("dataset samples differ in length"));
        }
        if samples.iter().flatten().any(|v| !v.is_finite()) {
            return Err(StcaError::param("dataset contains non-finite values"));
        }
        Ok(Dataset {
            samples,
            shape_hint,
            source_tag: source_tag.into(),
            labels: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Average over coordinates of each coordinate's variance across samples.
    pub fn per_coordinate_variance(&self) -> f64 {
        let (count, dim) = (self.len(), self.dim());
        if count < 2 || dim == 0 {
            return 0.0;
        }
        let mut mean = vec![0.0; dim];
        for s in &self.samples {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= count as f64);
        let mut var = 0.0;
        for s in &self.samples {
            for (m, v) in mean.iter().zip(s) {
                var += (v - m) * (v - m);
            }
        }
        var / ((count - 1) * dim) as f64
    }
}

/// Reads every number in a comma/whitespace separated file as one vector.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| StcaError::io(path, e))?;
    parse_vector(&text)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut offset = 0u64;
    for line in text.split_inclusive('\n') {
        let content = line.trim();
        if !(content.is_empty() || content.starts_with('#')) {
            for tok in content.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                let v: f64 = tok.parse().map_err(|_| {
                    StcaError::format(FormatErrorKind::Invalid, offset, format!("not a number: {tok:?}"))
                })?;
                if !v.is_finite() {
                    return Err(StcaError::format(FormatErrorKind::Invalid, offset, "non-finite value"));
                }
                values.push(v);
            }
        }
        offset += line.len() as u64;
    }
    if values.is_empty() {
        return Err(StcaError::format(FormatErrorKind::Truncated, 0, "no values found"));
    }
    Ok(values)
}

/// One value per line in `%.10g` form.
pub fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(values.len() * 14);
    for v in values {
        out.push_str(&format_g(*v, 10));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| StcaError::io(path, e))
}
