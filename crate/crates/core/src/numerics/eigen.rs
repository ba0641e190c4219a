//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicit QL iteration.

use crate::error::{Error, Result};
use crate::numerics::dense::DenseMatrix;
use crate::scalar::Scalar;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Eigenvectors as columns, matching `values`. Empty when not requested.
    pub vectors: Option<DenseMatrix<T>>,
}

fn check_symmetric<T: Scalar>(m: &DenseMatrix<T>, tol: T) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension(format!(
            "symmetric eigensolve needs a non-empty square matrix, got {:?}",
            m.shape()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("symmetric matrix"));
    }
    let asym = m.asymmetry();
    if asym > tol * m.max_abs().max(T::one()) {
        return Err(Error::NotSymmetric(asym.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// Full eigen-decomposition of the symmetric matrix `m`.
///
/// Only the lower triangle is read once symmetry has been validated within
/// `tol` (relative to the largest entry).
pub fn sym_eigen<T: Scalar>(
    m: &DenseMatrix<T>,
    tol: T,
    want_vectors: bool,
) -> Result<SymmetricEigen<T>> {
    check_symmetric(m, tol)?;
    let n = m.rows();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if j <= i { m[(i, j)] } else { m[(j, i)] }).collect())
        .collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    ql_implicit(&mut v, &mut d, &mut e, want_vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| DenseMatrix::from_fn(n, n, |i, j| v[i][order[j]]));
    Ok(SymmetricEigen { values, vectors })
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigs_sym<T: Scalar>(m: &DenseMatrix<T>, tol: T) -> Result<(T, T)> {
    let eig = sym_eigen(m, tol, false)?;
    Ok((eig.values[0], *eig.values.last().expect("n >= 1")))
}

/// Householder tridiagonalization; on return `d` holds the diagonal, `e`
/// the sub-diagonal (in `e[1..]`) and `v` the accumulated transform.
fn tridiagonalize<T: Scalar>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[k][j] -= upd;
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[k][j] -= upd;
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    v[n - 1][n - 1] = T::one();
    e[0] = zero;
}

fn ql_implicit<T: Scalar>(
    v: &mut [Vec<T>],
    d: &mut [T],
    e: &mut [T],
    want_vectors: bool,
) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let eps = T::epsilon();
    let mut f = zero;
    let mut tst1 = zero;
    let max_sweeps = 60 * n.max(1);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NoConvergence("symmetric QL iteration"));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if want_vectors {
                        for row in v.iter_mut() {
                            let hk = row[i + 1];
                            row[i + 1] = s * row[i] + c * hk;
                            row[i] = c * row[i] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::oracle::jacobi_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_diagonal() {
        let (lo, hi) = extreme_eigs_sym(&DenseMatrix::<f64>::identity(3), 1e-12).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
        let (lo, hi) = extreme_eigs_sym(&DenseMatrix::from_diag(&[0.25f64, 4.0]), 1e-12).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 4.0).abs() < 1e-15);
    }

    #[test]
    fn one_by_one() {
        let m = DenseMatrix::from_vec(1, 1, vec![-2.5]).unwrap();
        assert_eq!(extreme_eigs_sym(&m, 1e-12).unwrap(), (-2.5, -2.5));
    }

    #[test]
    fn rejects_asymmetric_and_nonfinite() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(extreme_eigs_sym(&m, 1e-8), Err(Error::NotSymmetric(_))));
        let mut m = DenseMatrix::<f64>::identity(2);
        m.as_mut_slice()[0] = f64::NAN;
        assert!(matches!(extreme_eigs_sym(&m, 1e-8), Err(Error::NonFinite(_))));
    }

    #[test]
    fn gram_matches_jacobi_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let phi = DenseMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
            let g = phi.gram();
            let (lo, hi) = extreme_eigs_sym(&g, 1e-12).unwrap();
            let oracle = jacobi_eigenvalues(&g);
            assert!((lo - oracle[0]).abs() <= 1e-8 * hi.abs());
            assert!((hi - oracle[5]).abs() <= 1e-8 * hi.abs());
        }
    }

    #[test]
    fn vectors_reconstruct_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DenseMatrix::from_fn(7, 5, |_, _| rng.random_range(-1.0..1.0));
        let g = a.gram();
        let eig = sym_eigen(&g, 1e-12, true).unwrap();
        let q = eig.vectors.unwrap();
        let rebuilt = q
            .matmul(&DenseMatrix::from_diag(&eig.values))
            .unwrap()
            .matmul(&q.transpose())
            .unwrap();
        assert!(rebuilt.sub(&g).unwrap().max_abs() < 1e-12);
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.sub(&DenseMatrix::identity(5)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rayleigh_quotients_are_bracketed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::from_fn(9, 9, |_, _| rng.random_range(-1.0..1.0));
        let m = a.axpy(1.0, &a.transpose()).unwrap();
        let (lo, hi) = extreme_eigs_sym(&m, 1e-12).unwrap();
        for _ in 0..100 {
            let v = crate::numerics::DenseVector::from(
                (0..9).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>(),
            );
            let q = v.dot(&m.matvec(&v).unwrap()) / v.dot(&v);
            assert!(lo - 1e-12 <= q && q <= hi + 1e-12);
        }
    }
}
