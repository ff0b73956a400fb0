//! The known-model parameters shared by enrolment, attacks and authorized
//! decoding, plus their `STCAPACK` binary file form.
//!
//! Layout (all integers u64 little-endian, all reals f64 little-endian):
//! `"STCAPACK" | n | d | m | s_x | s_ns | W (d×n, row-major) | A (m×d, row-major)`.

use std::path::Path;

use crate::codec::{self, ProtectedTemplate, StcaParams, TernaryCode};
use crate::error::{FormatErrorKind, Result, StcaError};
use crate::linalg::{dct_matrix, gaussian_projection, Matrix};
use crate::seed::SeedSpec;

pub const PACK_MAGIC: &[u8; 8] = b"STCAPACK";

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPack {
    w: Matrix,
    a: Matrix,
    params: StcaParams,
    b: Matrix,
}

impl ProjectionPack {
    pub fn new(w: Matrix, a: Matrix, params: StcaParams) -> Result<Self> {
        params.validate()?;
        if w.cols() != params.n || a.cols() != w.rows() || a.rows() != params.m {
            return Err(StcaError::shape(format!(
                "pack chain n={} -> W {}x{} -> A {}x{} -> m={} is inconsistent",
                params.n,
                w.rows(),
                w.cols(),
                a.rows(),
                a.cols(),
                params.m
            )));
        }
        let b = a.matmul(&w)?;
        Ok(ProjectionPack { w, a, params, b })
    }

    /// DCT transform and a Gaussian projection drawn from `seed`.
    pub fn generate(params: StcaParams, seed: &SeedSpec) -> Result<Self> {
        params.validate()?;
        let w = dct_matrix(params.n)?;
        let a = gaussian_projection(params.m, params.n, params.n, seed)?;
        ProjectionPack::new(w, a, params)
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    /// The composed map `A·W`.
    pub fn composed(&self) -> &Matrix {
        &self.b
    }

    pub fn params(&self) -> &StcaParams {
        &self.params
    }

    /// Same mappers, different sparsity settings.
    pub fn with_sparsity(&self, s_x: usize, s_ns: usize) -> Result<Self> {
        let params = StcaParams::new(self.params.m, self.params.n, s_x, s_ns)?;
        Ok(ProjectionPack {
            params,
            ..self.clone()
        })
    }

    pub fn protect(&self, x: &[f64], seed: &SeedSpec) -> Result<(ProtectedTemplate, TernaryCode)> {
        codec::protect(x, &self.w, &self.a, &self.params, seed)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48 + 8 * (self.w.as_slice().len() + self.a.as_slice().len()));
        out.extend_from_slice(PACK_MAGIC);
        for v in [
            self.params.n,
            self.w.rows(),
            self.params.m,
            self.params.s_x,
            self.params.s_ns,
        ] {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
        for v in self.w.as_slice().iter().chain(self.a.as_slice()) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(StcaError::format(FormatErrorKind::Truncated, bytes.len() as u64, "pack magic"));
        }
        if &bytes[..8] != PACK_MAGIC {
            return Err(StcaError::format(FormatErrorKind::BadMagic, 0, "expected STCAPACK"));
        }
        if bytes.len() < 48 {
            return Err(StcaError::format(FormatErrorKind::Truncated, bytes.len() as u64, "pack header"));
        }
        let field = |i: usize| -> usize {
            let off = 8 + 8 * i;
            u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()) as usize
        };
        let (n, d, m, s_x, s_ns) = (field(0), field(1), field(2), field(3), field(4));
        let count = d
            .checked_mul(n)
            .and_then(|wn| m.checked_mul(d).and_then(|an| wn.checked_add(an)))
            .and_then(|c| c.checked_mul(8))
            .ok_or_else(|| StcaError::format(FormatErrorKind::DimensionMismatch, 8, "dimensions overflow"))?;
        let expected = 48 + count;
        if bytes.len() < expected {
            return Err(StcaError::format(
                FormatErrorKind::Truncated,
                bytes.len() as u64,
                format!("payload needs {expected} bytes"),
            ));
        }
        if bytes.len() > expected {
            return Err(StcaError::format(
                FormatErrorKind::DimensionMismatch,
                expected as u64,
                "trailing bytes after payload",
            ));
        }
        let floats: Vec<f64> = bytes[48..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let (wv, av) = floats.split_at(d * n);
        let params = StcaParams { m, n, s_x, s_ns };
        let err = |e: StcaError| StcaError::format(FormatErrorKind::Invalid, 8, e.to_string());
        let w = Matrix::new(d, n, wv.to_vec()).map_err(err)?;
        let a = Matrix::new(m, d, av.to_vec()).map_err(err)?;
        ProjectionPack::new(w, a, params).map_err(err)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| StcaError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| StcaError::io(path, e))?;
        ProjectionPack::from_bytes(&bytes)
    }
}
