//! Self-contained dense linear algebra.
//!
//! Row-major matrices and vectors over `f64`, with the three factorizations
//! everything else is built on: LU with partial pivoting, cyclic Jacobi
//! symmetric eigendecomposition, and one-sided Jacobi SVD. Problem sizes in
//! this crate are small, so the routines favor transparency over speed.
//!
//! All tolerances are relative where the input provides a natural scale,
//! with an absolute floor of [`ABS_TOL_FLOOR`].

mod eig;
mod lu;
mod svd;

pub use eig::{min_sym_eigenvalue, sym_eig, EigDecomp};
pub use lu::{lu_factor, lu_solve, LuFactors};
pub use svd::{svd, SvdDecomp};

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Relative pivot threshold below which LU elimination reports a singular matrix.
pub const PIVOT_REL_TOL: f64 = 1e-12;
/// Absolute floor applied where a relative tolerance would otherwise vanish.
pub const ABS_TOL_FLOOR: f64 = 1e-14;
/// Sweep cap for the Jacobi eigenvalue and singular value iterations.
pub const JACOBI_SWEEP_CAP: usize = 50;
/// Relative off-diagonal tolerance for Jacobi convergence.
pub const JACOBI_OFF_DIAG_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand shapes are incompatible for the requested operation.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// A pivot fell below the singularity threshold.
    SingularMatrix,
    /// Symmetry check failed; `asym` is the max-norm of `A − Aᵀ`.
    NotSymmetric { asym: f64 },
    /// Jacobi iteration did not reach the off-diagonal tolerance.
    NoConvergence { sweeps: usize },
    /// A NaN or infinity was admitted into an operation.
    NonFinite,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "expected a square matrix, got {rows}x{cols}")
            }
            LinalgError::SingularMatrix => write!(f, "matrix is singular to working precision"),
            LinalgError::NotSymmetric { asym } => {
                write!(f, "matrix is not symmetric (max asymmetry {asym:e})")
            }
            LinalgError::NoConvergence { sweeps } => {
                write!(f, "Jacobi iteration did not converge within {sweeps} sweeps")
            }
            LinalgError::NonFinite => write!(f, "non-finite value encountered"),
        }
    }
}

impl std::error::Error for LinalgError {}

// ── Vector ──────────────────────────────────────────────────────────

/// Dense real vector with value semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn new(data: Vec<f64>) -> Self {
        Vector { data }
    }

    pub fn from_slice(entries: &[f64]) -> Self {
        Vector { data: entries.to_vec() }
    }

    pub fn zeros(n: usize) -> Self {
        Vector { data: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    /// Max-norm `max_i |x_i|`.
    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "add: length mismatch");
        Vector::new(self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "sub: length mismatch");
        Vector::new(self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector::new(self.data.iter().map(|a| a * s).collect())
    }
}

// ── Mat ─────────────────────────────────────────────────────────────

/// Dense real matrix, row-major, with value semantics.
///
/// # Example
///
/// ```
/// use gippa_core::linalg::{lu_solve, Mat, Vector};
///
/// let a = Mat::new(2, 2, vec![2.0, 0.0, 0.0, 4.0]);
/// let x = lu_solve(&a, &Vector::from_slice(&[2.0, 8.0])).unwrap();
/// assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Build from row-major entries. Panics when `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "Mat::new: entry count mismatch");
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "Mat::from_rows: ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Mat::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Rectangular matrix with `entries` on the main diagonal, zero elsewhere.
    pub fn rect_diag(rows: usize, cols: usize, entries: &[f64]) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for (i, &d) in entries.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = d;
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn require_finite(&self) -> Result<(), LinalgError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(LinalgError::NonFinite)
        }
    }

    pub(crate) fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        let mut out = Vector::zeros(self.rows);
        for i in 0..self.rows {
            out[i] = self.row(i).iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    /// `A·v`, panicking on shape mismatch. For internal use after dimensions
    /// have been validated once at an API boundary.
    pub(crate) fn apply(&self, v: &Vector) -> Vector {
        self.mul_vec(v).expect("apply: dimension mismatch")
    }

    pub fn add(&self, other: &Mat) -> Result<Mat, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Mat::new(self.rows, self.cols, data))
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Mat::new(self.rows, self.cols, data))
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat::new(self.rows, self.cols, self.data.iter().map(|a| a * s).collect())
    }

    /// Symmetric part `(A + Aᵀ)/2` of a square matrix.
    pub fn sym_part(&self) -> Result<Mat, LinalgError> {
        self.require_square()?;
        let mut s = Mat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        Ok(s)
    }

    /// Entrywise max-norm `max_ij |a_ij|`.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Spectral norm, computed as the largest singular value.
    pub fn norm2(&self) -> Result<f64, LinalgError> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(0.0);
        }
        Ok(svd(self)?.sigma[0])
    }

    /// Determinant via LU elimination with partial pivoting.
    ///
    /// Elimination is carried through even when a pivot is tiny, so a
    /// singular matrix yields a determinant that is zero up to rounding
    /// rather than an error.
    pub fn determinant(&self) -> Result<f64, LinalgError> {
        self.require_square()?;
        self.require_finite()?;
        Ok(lu::determinant_impl(self))
    }

    /// Max-norm of `A − Aᵀ`, as a symmetry measure.
    pub fn asymmetry(&self) -> Result<f64, LinalgError> {
        self.require_square()?;
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.rows {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Ok(worst)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}
