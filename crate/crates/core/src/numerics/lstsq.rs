use crate::error::{Error, Result};
use crate::numerics::dense::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;

/// Relative pivot threshold below which a column is treated as dependent.
fn rank_tolerance<T: Scalar>(rows: usize) -> T {
    T::lit(1e-10).max(T::epsilon() * T::from_usize_lossy(10 * rows.max(1)))
}

/// Full-column-rank least squares `argmin ½‖b − A x‖²` via Householder QR.
pub fn lstsq<T: Scalar>(a: &DenseMatrix<T>, b: &DenseVector<T>) -> Result<DenseVector<T>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::Dimension(format!(
            "least squares with {m} rows but {} observations",
            b.len()
        )));
    }
    if n == 0 {
        return Ok(DenseVector::zeros(0));
    }
    if n > m {
        return Err(Error::RankDeficient);
    }
    let zero = T::zero();
    // Column-major working copy.
    let mut qr: Vec<Vec<T>> = (0..n).map(|j| a.column(j).into_vec()).collect();
    let mut rhs = b.as_slice().to_vec();
    let col_scale = qr
        .iter()
        .map(|c| crate::numerics::dense::norm2(c))
        .fold(zero, T::max);
    if col_scale == zero {
        return Err(Error::RankDeficient);
    }
    let tol = rank_tolerance::<T>(m) * col_scale;
    let mut diag = vec![zero; n];
    for k in 0..n {
        let nrm = crate::numerics::dense::norm2(&qr[k][k..]);
        if nrm <= tol {
            return Err(Error::RankDeficient);
        }
        let alpha = if qr[k][k] > zero { -nrm } else { nrm };
        // v = x - alpha e1, stored in place.
        qr[k][k] -= alpha;
        let vnorm2: T = qr[k][k..].iter().map(|&x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 == zero {
            continue;
        }
        let (head, tail) = qr.split_at_mut(k + 1);
        let vk = &head[k][k..];
        for col in tail.iter_mut() {
            let s: T = vk.iter().zip(&col[k..]).map(|(&x, &y)| x * y).sum();
            let f = (s + s) / vnorm2;
            for (c, &x) in col[k..].iter_mut().zip(vk) {
                *c -= f * x;
            }
        }
        let s: T = vk.iter().zip(&rhs[k..]).map(|(&x, &y)| x * y).sum();
        let f = (s + s) / vnorm2;
        for (r, &x) in rhs[k..].iter_mut().zip(vk) {
            *r -= f * x;
        }
    }
    // Back substitution with R (diag on the diagonal, qr[j][i] above it).
    let mut x = vec![zero; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= qr[j][i] * x[j];
        }
        x[i] = acc / diag[i];
    }
    Ok(DenseVector::from_vec_unchecked(x))
}

/// Least squares restricted to the columns in `support`; entries off the
/// support are zero. An empty support yields the zero vector.
pub fn solve_restricted_ls<T: Scalar>(
    phi: &DenseMatrix<T>,
    b: &DenseVector<T>,
    support: &[usize],
) -> Result<DenseVector<T>> {
    let n = phi.cols();
    if let Some(&bad) = support.iter().find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange { index: bad, dim: n });
    }
    if b.len() != phi.rows() {
        return Err(Error::Dimension(format!(
            "{} observations for {} rows",
            b.len(),
            phi.rows()
        )));
    }
    let mut x = DenseVector::zeros(n);
    if support.is_empty() {
        return Ok(x);
    }
    let sub = phi.select_columns(support);
    let coef = lstsq(&sub, b)?;
    for (&j, &c) in support.iter().zip(coef.iter()) {
        x[j] = c;
    }
    Ok(x)
}

/// Orthonormal basis for the span of the columns of `m` by twice-iterated
/// modified Gram-Schmidt, in column order. Columns whose residual falls below
/// `tol` times their original norm are dropped.
pub fn orthonormalize_columns<T: Scalar>(m: &DenseMatrix<T>, tol: T) -> DenseMatrix<T> {
    let rows = m.rows();
    let mut basis: Vec<Vec<T>> = Vec::new();
    for j in 0..m.cols() {
        let mut c = m.column(j).into_vec();
        let orig = crate::numerics::dense::norm2(&c);
        if orig == T::zero() {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let p = crate::numerics::dense::dot(q, &c);
                for (ci, &qi) in c.iter_mut().zip(q) {
                    *ci -= p * qi;
                }
            }
        }
        let nrm = crate::numerics::dense::norm2(&c);
        if nrm > tol * orig && basis.len() < rows {
            for ci in c.iter_mut() {
                *ci /= nrm;
            }
            basis.push(c);
        }
    }
    DenseMatrix::from_fn(rows, basis.len(), |i, j| basis[j][i])
}
