//! Dense row-major matrices and the normalization primitives shared by every metric.

use crate::error::{Error, Result};

/// Centered rows with a Euclidean norm below this are treated as zero rows.
pub const ROW_NORM_EPS: f64 = 1e-12;

/// A dense `rows × cols` matrix of finite `f64` values in row-major order.
///
/// Rows are tokens (or batch samples), columns are feature (or category) dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, checking the shape and that every value is finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!(
                "matrix must have at least one row and one column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::diag(&vec![1.0; n])
    }

    /// Square matrix with `values` on the diagonal.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = vec![0.0; self.data.len()];
        for (i, row) in self.row_iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[j * self.rows + i] = v;
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data: out,
        }
    }

    /// Multiplies every element by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Matrix> {
        Matrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    /// Largest absolute element.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Square root of the sum of squared elements.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `AᵀA` (cols × cols), accumulated row by row so the inner loop stays contiguous.
    pub fn gram_cols(&self) -> Matrix {
        let n = self.cols;
        let mut g = vec![0.0; n * n];
        for row in self.row_iter() {
            for (i, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let target = &mut g[i * n + i..(i + 1) * n];
                for (t, &b) in target.iter_mut().zip(&row[i..]) {
                    *t += a * b;
                }
            }
        }
        mirror_upper(&mut g, n);
        Matrix {
            rows: n,
            cols: n,
            data: g,
        }
    }

    /// `AAᵀ` (rows × rows).
    pub fn gram_rows(&self) -> Matrix {
        let n = self.rows;
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            let ri = self.row(i);
            for j in i..n {
                g[i * n + j] = dot(ri, self.row(j));
            }
        }
        mirror_upper(&mut g, n);
        Matrix {
            rows: n,
            cols: n,
            data: g,
        }
    }

    /// The smaller of `AᵀA` and `AAᵀ`; both share their nonzero eigenvalues.
    pub fn smaller_gram(&self) -> Matrix {
        if self.cols <= self.rows {
            self.gram_cols()
        } else {
            self.gram_rows()
        }
    }
}

fn mirror_upper(g: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            g[i * n + j] = g[j * n + i];
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column means: `μ_j = (1/m) Σ_i X_ij`.
pub fn mean_embedding(x: &Matrix) -> Vec<f64> {
    let mut mean = vec![0.0; x.cols];
    for row in x.row_iter() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let scale = 1.0 / x.rows as f64;
    mean.iter_mut().for_each(|m| *m *= scale);
    mean
}

/// Subtracts the mean embedding from every row and scales each row to unit length.
///
/// Rows whose centered norm falls below [`ROW_NORM_EPS`] come back as zero rows.
pub fn center_and_row_normalize(x: &Matrix) -> Matrix {
    let mean = mean_embedding(x);
    let mut data = Vec::with_capacity(x.data.len());
    for row in x.row_iter() {
        let start = data.len();
        data.extend(row.iter().zip(&mean).map(|(v, m)| v - m));
        let centered = &mut data[start..];
        let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < ROW_NORM_EPS {
            centered.iter_mut().for_each(|v| *v = 0.0);
        } else {
            let inv = 1.0 / norm;
            centered.iter_mut().for_each(|v| *v *= inv);
        }
    }
    Matrix {
        rows: x.rows,
        cols: x.cols,
        data,
    }
}

/// Euclidean norm of every column.
pub fn column_l2_norms(x: &Matrix) -> Vec<f64> {
    let mut sums = vec![0.0; x.cols];
    for row in x.row_iter() {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v * v;
        }
    }
    sums.into_iter().map(f64::sqrt).collect()
}
