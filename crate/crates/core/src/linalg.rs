//! Small dense linear algebra.
//!
//! Matrices here are at most a few dozen rows wide, so everything is a plain
//! row-major buffer and the algorithms favour accuracy over speed.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn neg<T: Real>(a: &[T]) -> Vec<T> {
    a.iter().map(|&x| -x).collect()
}

/// `a + s * b`
pub fn axpy<T: Real>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
}

pub fn unit_vector<T: Real>(dim: usize, axis: usize) -> Vec<T> {
    let mut e = vec![T::zero(); dim];
    e[axis] = T::one();
    e
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds the matrix whose columns are `cols`.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn outer(a: &[T], b: &[T]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y;
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "shape mismatch in mul_vec");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).unwrap())
                .unwrap_or(col);
            if a[(pivot, col)] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[(col, col)];
            det = det * p;
            for i in col + 1..n {
                let factor = a[(i, col)] / p;
                if factor == T::zero() {
                    continue;
                }
                for j in col..n {
                    a[(i, j)] = a[(i, j)] - factor * a[(col, j)];
                }
            }
        }
        det
    }

    /// Largest absolute deviation from the transpose.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition `A = V diag(values) Vᵀ` of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as columns.
    pub vectors: Mat<T>,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigenvalue iteration.
///
/// Sweeps until the off-diagonal Frobenius mass drops below `1e-14` times the
/// Frobenius norm of the input (or the type's floor).
pub fn jacobi_eigen<T: Real>(a: &Mat<T>) -> SymEigen<T> {
    assert!(a.is_square(), "Jacobi needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    // symmetrise against round-off in the input
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)]) * T::lit(0.5);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = Mat::identity(n);
    let threshold = T::tol(1e-14) * a.frobenius().max(T::min_positive_value());

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    SymEigen {
        values: (0..n).map(|i| m[(i, i)]).collect(),
        vectors: v,
    }
}

fn off_diagonal_norm<T: Real>(m: &Mat<T>) -> T {
    let mut acc = T::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                acc = acc + m[(i, j)] * m[(i, j)];
            }
        }
    }
    acc.sqrt()
}

impl<T: Real> SymEigen<T> {
    /// `V diag(f(λ)) Vᵀ`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Mat<T> {
        let n = self.values.len();
        let mut out = Mat::zeros(n, n);
        for (l, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                let vi = self.vectors[(i, l)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vi * self.vectors[(j, l)];
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }
}

/// Inverse square root of a symmetric positive definite matrix.
///
/// Fails with [`Error::Conditioning`] when the smallest eigenvalue is below
/// `floor`.
pub fn inverse_sqrt<T: Real>(a: &Mat<T>, floor: T) -> Result<Mat<T>> {
    let eig = jacobi_eigen(a);
    let smallest = eig.min_value();
    if !(smallest >= floor) {
        return Err(Error::Conditioning(format!(
            "smallest eigenvalue {:e} below floor {:e}",
            smallest.as_f64(),
            floor.as_f64()
        )));
    }
    Ok(eig.map(|l| T::one() / l.sqrt()))
}

/// Extends the orthonormal `rows` to an orthonormal basis of `R^dim`.
///
/// Candidates are the standard basis vectors; at each step the candidate with
/// the largest residual after projecting out the current basis is taken, and
/// candidates whose residual falls below `skip` are never used.
pub fn extend_orthonormal<T: Real>(rows: &[Vec<T>], dim: usize, skip: T) -> Result<Vec<Vec<T>>> {
    let mut basis: Vec<Vec<T>> = rows.to_vec();
    let mut added = Vec::new();
    while basis.len() < dim {
        let mut best: Option<(T, Vec<T>)> = None;
        for axis in 0..dim {
            let mut r = unit_vector::<T>(dim, axis);
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&r, b);
                    r = axpy(&r, -c, b);
                }
            }
            let len = norm(&r);
            if len >= skip && best.as_ref().is_none_or(|(l, _)| len > *l) {
                best = Some((len, r));
            }
        }
        let (len, r) = best.ok_or_else(|| {
            Error::Conditioning("no admissible candidate left for orthogonal completion".into())
        })?;
        let u = scale(&r, T::one() / len);
        basis.push(u.clone());
        added.push(u);
    }
    Ok(added)
}

/// Orthonormalises the rows of `a` by modified Gram-Schmidt with
/// re-orthogonalisation. Rows must be linearly independent.
pub fn orthonormalize_rows<T: Real>(a: &Mat<T>) -> Result<Mat<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let mut r = a.row(i).to_vec();
        let original = norm(&r);
        for _ in 0..2 {
            for b in &out {
                let c = dot(&r, b);
                r = axpy(&r, -c, b);
            }
        }
        let len = norm(&r);
        if !(len > T::tol(1e-12) * original) {
            return Err(Error::Conditioning(format!("row {i} is linearly dependent")));
        }
        out.push(scale(&r, T::one() / len));
    }
    Ok(Mat::from_rows(&out))
}
