//! Plain-text matrix format: a `rows cols` header line followed by one
//! whitespace-separated row per line. Vectors are stored as `n x 1` matrices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numerics::dense::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;

pub fn write_matrix<T: Scalar>(m: &DenseMatrix<T>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let mut first = true;
        for v in m.row(i) {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

pub fn write_vector<T: Scalar>(v: &DenseVector<T>) -> String {
    write_matrix(&v.to_column_matrix())
}

fn parse_num<T: Scalar>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse {tok:?} as a number")))
}

pub fn read_matrix<T: Scalar>(text: &str) -> Result<DenseMatrix<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad header {header:?}")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse(format!("header must be `rows cols`, got {header:?}")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (idx, line) in lines {
        let row: Vec<T> = line
            .split_whitespace()
            .map(|t| parse_num(t, idx + 1))
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "line {}: expected {cols} entries, found {}",
                idx + 1,
                row.len()
            )));
        }
        data.extend(row);
        seen += 1;
    }
    if seen != rows {
        return Err(Error::Parse(format!("expected {rows} rows, found {seen}")));
    }
    DenseMatrix::from_vec(rows, cols, data)
}

/// Reads an `n x 1` (or `1 x n`) matrix as a vector.
pub fn read_vector<T: Scalar>(text: &str) -> Result<DenseVector<T>> {
    let m = read_matrix::<T>(text)?;
    if m.cols() != 1 && m.rows() != 1 {
        return Err(Error::Parse(format!(
            "expected a single column, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    DenseVector::from_vec(m.as_slice().to_vec())
}
