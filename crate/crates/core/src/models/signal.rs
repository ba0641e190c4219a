use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalShape {
    Vector(usize),
    Matrix(usize, usize),
}

/// A vector or matrix variable, tagged by shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum Signal<T> {
    Vector(DenseVector<T>),
    Matrix(DenseMatrix<T>),
}

impl<T: Scalar> Signal<T> {
    pub fn zeros(shape: SignalShape) -> Self {
        match shape {
            SignalShape::Vector(n) => Self::Vector(DenseVector::zeros(n)),
            SignalShape::Matrix(r, c) => Self::Matrix(DenseMatrix::zeros(r, c)),
        }
    }

    pub fn shape(&self) -> SignalShape {
        match self {
            Self::Vector(v) => SignalShape::Vector(v.len()),
            Self::Matrix(m) => SignalShape::Matrix(m.rows(), m.cols()),
        }
    }

    pub fn as_vector(&self) -> Option<&DenseVector<T>> {
        match self {
            Self::Vector(v) => Some(v),
            Self::Matrix(_) => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&DenseMatrix<T>> {
        match self {
            Self::Matrix(m) => Some(m),
            Self::Vector(_) => None,
        }
    }

    /// Entries in storage order (row-major for matrices).
    pub fn as_slice(&self) -> &[T] {
        match self {
            Self::Vector(v) => v.as_slice(),
            Self::Matrix(m) => m.as_slice(),
        }
    }

    /// Euclidean (Frobenius) norm.
    pub fn norm(&self) -> T {
        crate::numerics::norm2(self.as_slice())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "signals of shape {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same(other)?;
        Ok(crate::numerics::dot(self.as_slice(), other.as_slice()))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (Self::Vector(a), Self::Vector(b)) => Self::Vector(a.axpy(s, b)?),
            (Self::Matrix(a), Self::Matrix(b)) => Self::Matrix(a.axpy(s, b)?),
            _ => unreachable!("shapes checked"),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    pub fn scaled(&self, s: T) -> Self {
        match self {
            Self::Vector(v) => Self::Vector(v.scaled(s)),
            Self::Matrix(m) => Self::Matrix(m.scaled(s)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }
}

impl<T: Scalar> From<DenseVector<T>> for Signal<T> {
    fn from(v: DenseVector<T>) -> Self {
        Self::Vector(v)
    }
}

impl<T: Scalar> From<DenseMatrix<T>> for Signal<T> {
    fn from(m: DenseMatrix<T>) -> Self {
        Self::Matrix(m)
    }
}
