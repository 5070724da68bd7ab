//! Dense row-major matrices and the handful of operations every solver needs.
//!
//! Products use a fixed summation order (left to right over the inner index),
//! so the same inputs give bit-identical outputs on every run and platform.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Deref;
use std::path::Path;

use crate::error::{shape_err, Error, Result};

/// Dense real matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Mat {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape_err!(
                "{} values supplied for a {}x{} matrix",
                data.len(),
                rows,
                cols
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite value {} at flat index {}",
                data[pos], pos
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(shape_err!("row {} has {} entries, expected {}", i, r.len(), cols));
            }
            data.extend_from_slice(r);
        }
        Mat::from_vec(rows.len(), cols, data)
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat> {
        matmul(self, other)
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: f64) -> Mat {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        Mat::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    fn zip_with(&self, other: &Mat, f: impl Fn(f64, f64) -> f64) -> Result<Mat> {
        if self.shape() != other.shape() {
            return Err(shape_err!(
                "elementwise op on {}x{} and {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Mat::from_vec_unchecked(self.rows, self.cols, data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Writes the plain-text format: a `rows cols` header followed by one
    /// line per row with 17 significant digits per value.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line = self
                .row(i)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Mat> {
        let mut lines = input.lines();
        let header = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Parse("empty matrix file".into())),
            }
        };
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("header must be `rows cols`, got {header:?}")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i} of {rows}")))??;
            let before = data.len();
            for tok in line.split_whitespace() {
                let v = tok
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}: bad value {tok:?}: {e}")))?;
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(Error::Parse(format!(
                    "row {i} has {} values, expected {cols}",
                    data.len() - before
                )));
            }
        }
        Mat::from_vec(rows, cols, data)
    }

    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| with_path(e, path))?);
        self.write_text(&mut out)?;
        out.flush().map_err(|e| with_path(e, path))?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Mat> {
        let path = path.as_ref();
        Mat::read_text(BufReader::new(File::open(path).map_err(|e| with_path(e, path))?))
    }
}

fn with_path(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// A matrix whose entries are all `>= 0`.
#[derive(Clone, PartialEq)]
pub struct NonNegMat(Mat);

impl NonNegMat {
    pub fn new(m: Mat) -> Result<Self> {
        if let Some(pos) = m.data.iter().position(|&v| v < 0.0) {
            return Err(Error::Argument(format!(
                "negative entry {} at ({}, {})",
                m.data[pos],
                pos / m.cols.max(1),
                pos % m.cols.max(1)
            )));
        }
        Ok(NonNegMat(m))
    }

    pub(crate) fn from_mat_unchecked(m: Mat) -> Self {
        debug_assert!(m.data.iter().all(|&v| v >= 0.0));
        NonNegMat(m)
    }

    pub fn as_mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }
}

impl Deref for NonNegMat {
    type Target = Mat;

    fn deref(&self) -> &Mat {
        &self.0
    }
}

impl fmt::Debug for NonNegMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NonNeg{:?}", self.0)
    }
}

/// Matrix product `a * b`.
pub fn matmul(a: &Mat, b: &Mat) -> Result<Mat> {
    if a.cols != b.rows {
        return Err(shape_err!(
            "matmul of {}x{} by {}x{}",
            a.rows,
            a.cols,
            b.rows,
            b.cols
        ));
    }
    let mut c = Mat::zeros(a.rows, b.cols);
    // i-p-j order accumulates every c[i][j] over p ascending, starting from zero.
    for i in 0..a.rows {
        let a_row = a.row(i);
        let c_row = &mut c.data[i * b.cols..(i + 1) * b.cols];
        for (p, &a_ip) in a_row.iter().enumerate() {
            let b_row = &b.data[p * b.cols..(p + 1) * b.cols];
            for (c_ij, &b_pj) in c_row.iter_mut().zip(b_row) {
                *c_ij += a_ip * b_pj;
            }
        }
    }
    Ok(c)
}

/// Elementwise `max(0, x)`.
pub fn clamp_nonneg(a: &Mat) -> NonNegMat {
    NonNegMat(a.map(|v| v.max(0.0)))
}

/// Frobenius norm `||X - W H||_F` (not squared).
pub fn reconstruction_error(x: &Mat, w: &Mat, h: &Mat) -> Result<f64> {
    check_factor_shapes(x, w, h)?;
    Ok(x.sub(&matmul(w, h)?)?.frobenius_norm())
}

/// `||X - W H||_F / ||X||_F`; falls back to the absolute error when `X == 0`.
pub fn relative_error(x: &Mat, w: &Mat, h: &Mat) -> Result<f64> {
    let err = reconstruction_error(x, w, h)?;
    let norm = x.frobenius_norm();
    Ok(if norm > 0.0 { err / norm } else { err })
}

pub(crate) fn check_factor_shapes(x: &Mat, w: &Mat, h: &Mat) -> Result<()> {
    if w.rows != x.rows || h.cols != x.cols || w.cols != h.rows {
        return Err(shape_err!(
            "X is {}x{}, W is {}x{}, H is {}x{}",
            x.rows,
            x.cols,
            w.rows,
            w.cols,
            h.rows,
            h.cols
        ));
    }
    Ok(())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}
