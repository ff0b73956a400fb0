//! `STCADEC1` model files.
//!
//! `"STCADEC1" | input_len u64 | layer_count u64 | descriptors | parameters`,
//! each descriptor a tag byte (0 dense, 1 conv2d, 2 relu, 3 tanh, 4 reshape)
//! followed by its u64 fields (dense: in, out; conv2d: in_channels,
//! out_channels, kernel; reshape: h, w, c). Parameters follow as f64 in
//! declaration order, weights before biases. Everything little-endian.

use std::path::Path;

use super::{DecoderModel, LayerSpec};
use crate::error::{FormatErrorKind, Result, StcaError};

pub const DECODER_MAGIC: &[u8; 8] = b"STCADEC1";

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(StcaError::format(
                FormatErrorKind::Truncated,
                self.pos as u64,
                format!("reading {what}"),
            ));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u64(&mut self, what: &str) -> Result<usize> {
        let b = self.take(8, what)?;
        Ok(u64::from_le_bytes(b.try_into().unwrap()) as usize)
    }
}

impl DecoderModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(DECODER_MAGIC);
        let put = |out: &mut Vec<u8>, v: usize| out.extend_from_slice(&(v as u64).to_le_bytes());
        put(&mut out, self.input_len);
        put(&mut out, self.layers.len());
        for layer in &self.layers {
            match layer.spec {
                LayerSpec::Dense { input, output } => {
                    out.push(0);
                    put(&mut out, input);
                    put(&mut out, output);
                }
                LayerSpec::Conv2d {
                    in_channels,
                    out_channels,
                    kernel,
                } => {
                    out.push(1);
                    put(&mut out, in_channels);
                    put(&mut out, out_channels);
                    put(&mut out, kernel);
                }
                LayerSpec::Relu => out.push(2),
                LayerSpec::Tanh => out.push(3),
                LayerSpec::Reshape { h, w, c } => {
                    out.push(4);
                    put(&mut out, h);
                    put(&mut out, w);
                    put(&mut out, c);
                }
            }
        }
        for v in self.parameters() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8, "magic")? != DECODER_MAGIC {
            return Err(StcaError::format(FormatErrorKind::BadMagic, 0, "expected STCADEC1"));
        }
        let input_len = r.u64("input length")?;
        let count = r.u64("layer count")?;
        let mut arch = Vec::new();
        for _ in 0..count {
            let at = r.pos as u64;
            let tag = r.take(1, "layer tag")?[0];
            arch.push(match tag {
                0 => LayerSpec::Dense {
                    input: r.u64("dense input")?,
                    output: r.u64("dense output")?,
                },
                1 => LayerSpec::Conv2d {
                    in_channels: r.u64("conv in_channels")?,
                    out_channels: r.u64("conv out_channels")?,
                    kernel: r.u64("conv kernel")?,
                },
                2 => LayerSpec::Relu,
                3 => LayerSpec::Tanh,
                4 => LayerSpec::Reshape {
                    h: r.u64("reshape h")?,
                    w: r.u64("reshape w")?,
                    c: r.u64("reshape c")?,
                },
                other => {
                    return Err(StcaError::format(
                        FormatErrorKind::Invalid,
                        at,
                        format!("unknown layer tag {other}"),
                    ))
                }
            });
        }
        let header_end = r.pos as u64;
        let mut model = DecoderModel::zeroed(&arch, input_len)
            .map_err(|e| StcaError::format(FormatErrorKind::DimensionMismatch, header_end, e.to_string()))?;
        let expected = model.parameter_count();
        let remaining = bytes.len() - r.pos;
        if remaining != expected * 8 {
            let kind = if remaining < expected * 8 {
                FormatErrorKind::Truncated
            } else {
                FormatErrorKind::DimensionMismatch
            };
            return Err(StcaError::format(
                kind,
                bytes.len() as u64,
                format!("expected {expected} parameters after the descriptors"),
            ));
        }
        let params: Vec<f64> = bytes[r.pos..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if params.iter().any(|v| !v.is_finite()) {
            return Err(StcaError::format(FormatErrorKind::Invalid, header_end, "non-finite parameter"));
        }
        model.set_parameters(&params)?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| StcaError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| StcaError::io(path, e))?;
        DecoderModel::from_bytes(&bytes)
    }
}
