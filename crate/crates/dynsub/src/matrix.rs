//! Minimal dense square-matrix support for the log-determinant objective:
//! construction, pivoted-elimination determinants, and a Jacobi eigenvalue
//! routine used only for optional kernel validation.

use std::fmt;

/// Default cap on the dimension accepted by [`determinant`].
pub const DETERMINANT_DIM_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixError {
    /// Rows of unequal length, or a non-square row/column count.
    Shape { rows: usize, cols: usize },
    DimensionCap { dim: usize, cap: usize },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::Shape { rows, cols } => {
                write!(f, "matrix is not square: {rows} rows, {cols} columns")
            }
            MatrixError::DimensionCap { dim, cap } => {
                write!(f, "matrix dimension {dim} exceeds cap {cap}")
            }
        }
    }
}

impl std::error::Error for MatrixError {}

/// Dense row-major square matrix of real entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        for row in &rows {
            if row.len() != dim {
                return Err(MatrixError::Shape { rows: dim, cols: row.len() });
            }
        }
        Ok(Self { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Principal submatrix indexed by `rows` (taken in the given order).
    pub fn principal_submatrix(&self, rows: &[usize]) -> Matrix {
        let m = rows.len();
        let mut out = Matrix::zero(m);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }
}

/// Determinant by Gaussian elimination with partial pivoting. The 0x0
/// matrix has determinant 1 (empty-product convention).
pub fn determinant(m: &Matrix) -> Result<f64, MatrixError> {
    determinant_capped(m, DETERMINANT_DIM_CAP)
}

pub fn determinant_capped(m: &Matrix, cap: usize) -> Result<f64, MatrixError> {
    let n = m.dim;
    if n > cap {
        return Err(MatrixError::DimensionCap { dim: n, cap });
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut a = m.data.clone();
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = r;
            }
        }
        if pivot_abs == 0.0 {
            return Ok(0.0);
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= factor * a[col * n + j];
            }
        }
    }
    Ok(det)
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
/// Quadratic-to-cubic cost; intended for validation passes, not hot paths.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.dim;
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.data.clone();
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a[idx(i, j)] * a[idx(i, j)];
            }
        }
        if off.sqrt() < 1e-12 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[idx(i, i)]).collect()
}
