//! Dense linear algebra substrate: row-major matrices, the orthonormal DCT-II,
//! seeded Gaussian projections and a ridge solver built on LU with partial
//! pivoting.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, StcaError};
use crate::seed::SeedSpec;

/// Systems whose 1-norm condition estimate exceeds this are reported singular.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(StcaError::shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(StcaError::param(format!("non-finite matrix entry at {i}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// `self · x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(StcaError::shape(format!(
                "matvec: {}x{} matrix with vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.data.chunks_exact(self.cols).map(|row| dot(row, x)).collect())
    }

    /// `selfᵀ · y`.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.rows {
            return Err(StcaError::shape(format!(
                "transposed matvec: {}x{} matrix with vector of length {}",
                self.rows,
                self.cols,
                y.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (row, &yr) in self.data.chunks_exact(self.cols).zip(y) {
            if yr != 0.0 {
                axpy(yr, row, &mut out);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(StcaError::shape(format!(
                "matmul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            1.0,
            (&self.data, self.cols as isize, 1),
            (&other.data, other.cols as isize, 1),
            0.0,
            (&mut out.data, other.cols as isize, 1),
        );
        Ok(out)
    }

    /// `selfᵀ · self`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut out = Matrix::zeros(n, n);
        gemm(
            n,
            self.rows,
            n,
            1.0,
            (&self.data, 1, self.cols as isize),
            (&self.data, self.cols as isize, 1),
            0.0,
            (&mut out.data, n as isize, 1),
        );
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Strided general matrix multiply `C = alpha·A·B + beta·C` with
/// `A: m×k`, `B: k×n`, each operand given as `(slice, row_stride, col_stride)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: (&[f64], isize, isize),
    b: (&[f64], isize, isize),
    beta: f64,
    c: (&mut [f64], isize, isize),
) {
    if m == 0 || n == 0 {
        return;
    }
    let extent = |rows: usize, cols: usize, rs: isize, cs: isize| {
        if rows == 0 || cols == 0 {
            0
        } else {
            (rows - 1) * rs as usize + (cols - 1) * cs as usize + 1
        }
    };
    assert!(a.0.len() >= extent(m, k, a.1, a.2));
    assert!(b.0.len() >= extent(k, n, b.1, b.2));
    assert!(c.0.len() >= extent(m, n, c.1, c.2));
    // SAFETY: the asserts above keep every strided access inside its slice,
    // and `c` is a unique borrow that cannot alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.0.as_ptr(),
            a.1,
            a.2,
            b.0.as_ptr(),
            b.1,
            b.2,
            beta,
            c.0.as_mut_ptr(),
            c.1,
            c.2,
        );
    }
}

/// Orthonormal DCT-II matrix: row `k` holds basis vector
/// `c_k · cos(π (2i + 1) k / 2n)` with `c_0 = √(1/n)` and `c_k = √(2/n)`.
pub fn dct_matrix(n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(StcaError::param("DCT dimension must be at least 1"));
    }
    let nf = n as f64;
    let c0 = (1.0 / nf).sqrt();
    let ck = (2.0 / nf).sqrt();
    Ok(Matrix::from_fn(n, n, |k, i| {
        let scale = if k == 0 { c0 } else { ck };
        let angle = std::f64::consts::PI * ((2 * i + 1) * k) as f64 / (2.0 * nf);
        scale * angle.cos()
    }))
}

/// `m×d` matrix of i.i.d. `N(0, 1/n)` entries drawn from `seed`'s stream.
pub fn gaussian_projection(m: usize, d: usize, n: usize, seed: &SeedSpec) -> Result<Matrix> {
    if m == 0 || d == 0 || n == 0 {
        return Err(StcaError::param(format!(
            "projection dimensions must be positive (m={m}, d={d}, n={n})"
        )));
    }
    let std = 1.0 / (n as f64).sqrt();
    let mut rng = seed.rng();
    let data = (0..m * d)
        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(Matrix { rows: m, cols: d, data })
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct LuFactor {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    norm1: f64,
}

impl LuFactor {
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(StcaError::shape(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let norm1 = a.norm1();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(StcaError::Singular {
                    condition: f64::INFINITY,
                    threshold: CONDITION_LIMIT,
                });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n + k + 1..k * n + n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *x -= factor * u;
                    }
                }
            }
        }
        Ok(LuFactor { n, lu, perm, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            x[i] -= dot(row, &x[..i]);
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            x[i] = (x[i] - dot(row, &x[i + 1..])) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ w = b, Lᵀ v = w, x = Pᵀ v.
        let mut w = b.to_vec();
        for i in 0..n {
            let mut s = w[i];
            for j in 0..i {
                s -= self.lu[j * n + i] * w[j];
            }
            w[i] = s / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = w[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i] * w[j];
            }
            w[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Hager–Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.abs()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if zmax <= dot(&z, &x) {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        if !estimate.is_finite() {
            return f64::INFINITY;
        }
        self.norm1 * estimate
    }
}

/// Factored ridge operator `u ↦ (BᵀB + λI)⁻¹ Bᵀ u` for a fixed `B`.
///
/// Factoring once lets Monte-Carlo sweeps reuse the same solve across trials.
#[derive(Debug, Clone)]
pub struct RidgeSolver {
    b: Matrix,
    lambda: f64,
    lu: LuFactor,
    condition: f64,
}

impl RidgeSolver {
    pub fn new(b: Matrix, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(StcaError::param(format!("ridge weight must be >= 0, got {lambda}")));
        }
        let mut normal = b.gram();
        for i in 0..normal.rows {
            normal.data[i * normal.cols + i] += lambda;
        }
        let lu = LuFactor::new(&normal)?;
        let condition = lu.condition_estimate();
        if !(condition <= CONDITION_LIMIT) {
            return Err(StcaError::Singular {
                condition,
                threshold: CONDITION_LIMIT,
            });
        }
        Ok(RidgeSolver {
            b,
            lambda,
            lu,
            condition,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn operator(&self) -> &Matrix {
        &self.b
    }

    pub fn solve(&self, u: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.b.matvec_t(u)?;
        Ok(self.lu.solve(&rhs))
    }
}

/// One-shot `x̂ = (BᵀB + λI)⁻¹ Bᵀ u`.
pub fn ridge_solve(b: &Matrix, u: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if u.len() != b.rows {
        return Err(StcaError::shape(format!(
            "ridge: operator has {} rows, right-hand side has {}",
            b.rows,
            u.len()
        )));
    }
    RidgeSolver::new(b.clone(), lambda)?.solve(u)
}
