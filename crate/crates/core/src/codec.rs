//! Sparse ternary coding with ambiguization.
//!
//! A source vector `x` is mapped through the orthonormal transform `W` and the
//! random projection `A`; the `s_x` largest-magnitude projections keep their
//! sign and everything else becomes zero. Ambiguization then writes random
//! ±1 symbols onto `s_ns` positions of the zero set, so the public template
//! carries `s_x + s_ns` symbols that look alike.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StcaError};
use crate::linalg::Matrix;
use crate::seed::SeedSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StcaParams {
    /// Code length (rows of `A`).
    pub m: usize,
    /// Source dimension.
    pub n: usize,
    pub s_x: usize,
    pub s_ns: usize,
}

impl StcaParams {
    pub fn new(m: usize, n: usize, s_x: usize, s_ns: usize) -> Result<Self> {
        let p = StcaParams { m, n, s_x, s_ns };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(StcaError::param(format!(
                "dimensions must be positive (m={}, n={})",
                self.m, self.n
            )));
        }
        if self.s_x == 0 || self.s_x > self.m {
            return Err(StcaError::param(format!(
                "s_x must lie in [1, m={}], got {}",
                self.m, self.s_x
            )));
        }
        if self.s_ns > self.m - self.s_x {
            return Err(StcaError::param(format!(
                "s_ns={} exceeds the support complement m - s_x = {}",
                self.s_ns,
                self.m - self.s_x
            )));
        }
        Ok(())
    }

    /// Fraction of code positions carrying signal symbols.
    pub fn alpha(&self) -> f64 {
        self.s_x as f64 / self.m as f64
    }
}

macro_rules! ternary_vector {
    ($name:ident) => {
        impl $name {
            /// Builds from raw symbols; anything outside {-1, 0, 1} is rejected.
            pub fn from_symbols(symbols: Vec<i8>) -> Result<Self> {
                if let Some(i) = symbols.iter().position(|s| !(-1..=1).contains(s)) {
                    return Err(StcaError::param(format!(
                        "symbol {} at position {i} is not ternary",
                        symbols[i]
                    )));
                }
                Ok($name(symbols))
            }

            pub fn symbols(&self) -> &[i8] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// Number of nonzero symbols.
            pub fn weight(&self) -> usize {
                self.0.iter().filter(|&&s| s != 0).count()
            }

            /// Sorted nonzero positions.
            pub fn support(&self) -> Vec<usize> {
                self.0
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &s)| (s != 0).then_some(i))
                    .collect()
            }

            pub fn to_real(&self) -> Vec<f64> {
                self.0.iter().map(|&s| f64::from(s)).collect()
            }

            /// One character per symbol over `-`, `0`, `+`.
            pub fn to_text(&self) -> String {
                self.0
                    .iter()
                    .map(|&s| match s {
                        -1 => '-',
                        0 => '0',
                        _ => '+',
                    })
                    .collect()
            }

            pub fn from_text(text: &str) -> Result<Self> {
                let line = text.trim_end_matches(['\n', '\r']);
                let symbols = line
                    .chars()
                    .enumerate()
                    .map(|(i, c)| match c {
                        '-' => Ok(-1),
                        '0' => Ok(0),
                        '+' => Ok(1),
                        other => Err(StcaError::format(
                            crate::error::FormatErrorKind::Invalid,
                            i as u64,
                            format!("unexpected character {other:?} in ternary code"),
                        )),
                    })
                    .collect::<Result<Vec<i8>>>()?;
                if symbols.is_empty() {
                    return Err(StcaError::format(
                        crate::error::FormatErrorKind::Truncated,
                        0,
                        "empty ternary code",
                    ));
                }
                Ok($name(symbols))
            }
        }
    };
}

/// Clean sparse ternary code `u`; kept private by the enrolling party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryCode(Vec<i8>);

/// Public template `u_a`: signal symbols plus ambiguization symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProtectedTemplate(Vec<i8>);

ternary_vector!(TernaryCode);
ternary_vector!(ProtectedTemplate);

impl From<TernaryCode> for ProtectedTemplate {
    fn from(code: TernaryCode) -> Self {
        ProtectedTemplate(code.0)
    }
}

impl ProtectedTemplate {
    /// Keeps the symbols on `support` and zeroes the rest.
    pub fn restrict(&self, support: &[usize]) -> Result<TernaryCode> {
        let mut out = vec![0i8; self.0.len()];
        for &i in support {
            let s = *self.0.get(i).ok_or_else(|| {
                StcaError::shape(format!("support index {i} outside code of length {}", self.0.len()))
            })?;
            out[i] = s;
        }
        Ok(TernaryCode(out))
    }
}

/// Positions of the `k` largest `|v_i|` among the nonzero entries, ties broken
/// by lowest index, returned in ascending order.
pub fn top_k_support(v: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0.0).collect();
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Keeps `sign(v_i)` at the `s_x` largest magnitudes. Fewer symbols are
/// produced only when `v` has fewer than `s_x` nonzero entries.
pub fn ternarize(v: &[f64], s_x: usize) -> Result<TernaryCode> {
    if v.is_empty() {
        return Err(StcaError::param("cannot ternarize an empty vector"));
    }
    if s_x == 0 || s_x > v.len() {
        return Err(StcaError::param(format!(
            "s_x must lie in [1, {}], got {s_x}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(StcaError::param("non-finite projection value"));
    }
    let mut symbols = vec![0i8; v.len()];
    for i in top_k_support(v, s_x) {
        symbols[i] = if v[i] > 0.0 { 1 } else { -1 };
    }
    Ok(TernaryCode(symbols))
}

/// Writes `s_ns` equiprobable ±1 symbols onto positions drawn uniformly
/// without replacement from the zero set of `u`.
pub fn ambiguize(u: &TernaryCode, s_ns: usize, seed: &SeedSpec) -> Result<ProtectedTemplate> {
    let complement: Vec<usize> = (0..u.len()).filter(|&i| u.0[i] == 0).collect();
    if s_ns > complement.len() {
        return Err(StcaError::param(format!(
            "s_ns={s_ns} exceeds the {} available zero positions",
            complement.len()
        )));
    }
    let mut symbols = u.0.clone();
    if s_ns == 0 {
        return Ok(ProtectedTemplate(symbols));
    }
    let mut rng = seed.rng();
    let picks = index::sample(&mut rng, complement.len(), s_ns);
    for p in picks.iter() {
        symbols[complement[p]] = if rng.random_bool(0.5) { 1 } else { -1 };
    }
    Ok(ProtectedTemplate(symbols))
}

/// The projection `A·(W·x)` that the ternary code is taken from.
pub fn project(x: &[f64], w: &Matrix, a: &Matrix) -> Result<Vec<f64>> {
    if w.cols() != x.len() {
        return Err(StcaError::shape(format!(
            "transform expects length {}, source has {}",
            w.cols(),
            x.len()
        )));
    }
    if a.cols() != w.rows() {
        return Err(StcaError::shape(format!(
            "projection expects length {}, transform yields {}",
            a.cols(),
            w.rows()
        )));
    }
    a.matvec(&w.matvec(x)?)
}

/// Full enrolment: returns the public template and the clean code.
pub fn protect(
    x: &[f64],
    w: &Matrix,
    a: &Matrix,
    params: &StcaParams,
    seed: &SeedSpec,
) -> Result<(ProtectedTemplate, TernaryCode)> {
    params.validate()?;
    if x.len() != params.n || a.rows() != params.m {
        return Err(StcaError::shape(format!(
            "params declare n={}, m={} but source has {} and projection {} rows",
            params.n,
            params.m,
            x.len(),
            a.rows()
        )));
    }
    let v = project(x, w, a)?;
    let u = ternarize(&v, params.s_x)?;
    let u_a = ambiguize(&u, params.s_ns, seed)?;
    Ok((u_a, u))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 || q >= 1.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Bits per source dimension: `(m/n)·[H_b(α) + α]` with `α = s_x/m`; the
/// support pattern costs `H_b(α)` per position and each symbol one sign bit.
pub fn code_rate(params: &StcaParams) -> f64 {
    if params.s_x == 0 || params.m == 0 || params.n == 0 {
        return 0.0;
    }
    let alpha = params.alpha();
    params.m as f64 / params.n as f64 * (binary_entropy(alpha) + alpha)
}
