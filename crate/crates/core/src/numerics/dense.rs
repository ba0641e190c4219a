use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Dense column vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", transparent)]
pub struct DenseVector<T>(Vec<T>);

impl<T: Scalar> DenseMatrix<T> {
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

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting size mismatches and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> DenseVector<T> {
        DenseVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &[T]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    /// Column-wise concatenation `[self, other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hcat of {} and {} rows",
                self.rows, other.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `M x`.
    pub fn matvec(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        if self.cols != x.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let nz: Vec<usize> = (0..x.len()).filter(|&j| x[j] != T::zero()).collect();
        if nz.len() * 4 < self.cols {
            // sparse x: accumulate only the touched columns
            let mut out = vec![T::zero(); self.rows];
            for (i, o) in out.iter_mut().enumerate() {
                let row = self.row(i);
                *o = nz.iter().map(|&j| row[j] * x[j]).sum();
            }
            return Ok(DenseVector(out));
        }
        Ok(DenseVector(
            (0..self.rows)
                .map(|i| dot(self.row(i), x.as_slice()))
                .collect(),
        ))
    }

    /// `Mᵀ y`.
    pub fn tr_matvec(&self, y: &DenseVector<T>) -> Result<DenseVector<T>> {
        if self.rows != y.len() {
            return Err(Error::Dimension(format!(
                "transpose of {}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                y.len()
            )));
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Ok(DenseVector(out))
    }

    /// `MᵀM`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..n {
                let ra = row[a];
                if ra == T::zero() {
                    continue;
                }
                for b in a..n {
                    g.data[a * n + b] += ra * row[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g.data[a * n + b] = g.data[b * n + a];
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> T {
        norm2(&self.data)
    }

    pub fn frobenius_dot(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows.min(self.cols) {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> DenseVector<T> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    /// Wraps entries, rejecting non-finite values.
    pub fn from_vec(data: Vec<T>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector entries"));
        }
        Ok(Self(data))
    }

    pub(crate) fn from_vec_unchecked(data: Vec<T>) -> Self {
        Self(data)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Self) -> T {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> T {
        norm2(&self.0)
    }

    pub fn norm_inf(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: T) -> Self {
        Self(self.0.iter().map(|&v| v * s).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// The vector as an `n x 1` matrix.
    pub fn to_column_matrix(&self) -> DenseMatrix<T> {
        DenseMatrix {
            rows: self.len(),
            cols: 1,
            data: self.0.clone(),
        }
    }
}

impl<T> Index<usize> for DenseVector<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for DenseVector<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Scalar> From<Vec<T>> for DenseVector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm with scaling against overflow.
pub(crate) fn norm2<T: Scalar>(a: &[T]) -> T {
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let ss = a.iter().fold(T::zero(), |acc, &v| {
        let r = v / scale;
        acc + r * r
    });
    scale * ss.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(DenseMatrix::from_vec(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_vec(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseVector::from_vec(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn products_agree() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let x = DenseVector::from(vec![1.0, 0.0, -1.0]);
        assert_eq!(m.matvec(&x).unwrap().as_slice(), &[-2.0, -2.0]);
        let y = DenseVector::from(vec![1.0, 1.0]);
        assert_eq!(m.tr_matvec(&y).unwrap().as_slice(), &[5.0, 7.0, 9.0]);
        let g = m.gram();
        let g2 = m.transpose().matmul(&m).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn norm_survives_large_entries() {
        let v = DenseVector::from(vec![3e200f64, 4e200]);
        assert!((v.norm() / 5e200 - 1.0).abs() < 1e-15);
    }
}
