//! Thin singular value decomposition by Householder bidiagonalization and
//! implicitly shifted Golub-Kahan QR sweeps.

use crate::error::{Error, Result};
use crate::numerics::dense::DenseMatrix;
use crate::scalar::Scalar;

/// `M ≈ U diag(S) Vᵀ` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    /// `U diag(S) Vᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let (m, n, r) = (self.u.rows(), self.v.rows(), self.s.len());
        let mut out = DenseMatrix::zeros(m, n);
        for k in 0..r {
            let sk = self.s[k];
            if sk == T::zero() {
                continue;
            }
            for i in 0..m {
                let a = self.u[(i, k)] * sk;
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * self.v[(j, k)];
                }
            }
        }
        out
    }

    /// Keeps the leading `r` singular triplets.
    pub fn truncate(self, r: usize) -> Self {
        let r = r.min(self.s.len());
        let keep: Vec<usize> = (0..r).collect();
        Self {
            u: self.u.select_columns(&keep),
            s: self.s[..r].to_vec(),
            v: self.v.select_columns(&keep),
        }
    }
}

/// Thin SVD: `U` is `m x p`, `V` is `n x p` with `p = min(m, n)`.
pub fn svd<T: Scalar>(m: &DenseMatrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Dimension("svd of an empty matrix".into()));
    }
    if m.rows() >= m.cols() {
        golub_kahan(m)
    } else {
        let t = golub_kahan(&m.transpose())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

/// Best rank-`r` approximation factors (Eckart-Young).
pub fn truncated_svd<T: Scalar>(m: &DenseMatrix<T>, r: usize) -> Result<Svd<T>> {
    let max = m.rows().min(m.cols());
    if r == 0 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    Ok(svd(m)?.truncate(r))
}

// Requires rows >= cols.
fn golub_kahan<T: Scalar>(input: &DenseMatrix<T>) -> Result<Svd<T>> {
    let (m, n) = input.shape();
    debug_assert!(m >= n);
    let zero = T::zero();
    let one = T::one();
    let mut a: Vec<Vec<T>> = (0..m).map(|i| input.row(i).to_vec()).collect();
    let nu = n;
    let mut s = vec![zero; (m + 1).min(n)];
    let mut u = vec![vec![zero; nu]; m];
    let mut v = vec![vec![zero; n]; n];
    let mut e = vec![zero; n];
    let mut work = vec![zero; m];

    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2).min(m);
    for k in 0..nct.max(nrt) {
        if k < nct {
            s[k] = zero;
            for row in a.iter().skip(k) {
                s[k] = s[k].hypot(row[k]);
            }
            if s[k] != zero {
                if a[k][k] < zero {
                    s[k] = -s[k];
                }
                for row in a.iter_mut().skip(k) {
                    row[k] /= s[k];
                }
                a[k][k] += one;
            }
            s[k] = -s[k];
        }
        for j in (k + 1)..n {
            if k < nct && s[k] != zero {
                let mut t = zero;
                for row in a.iter().skip(k) {
                    t += row[k] * row[j];
                }
                t = -t / a[k][k];
                for row in a.iter_mut().skip(k) {
                    let upd = t * row[k];
                    row[j] += upd;
                }
            }
            e[j] = a[k][j];
        }
        if k < nct {
            for i in k..m {
                u[i][k] = a[i][k];
            }
        }
        if k < nrt {
            e[k] = zero;
            for i in (k + 1)..n {
                e[k] = e[k].hypot(e[i]);
            }
            if e[k] != zero {
                if e[k + 1] < zero {
                    e[k] = -e[k];
                }
                let ek = e[k];
                for ei in e.iter_mut().take(n).skip(k + 1) {
                    *ei /= ek;
                }
                e[k + 1] += one;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != zero {
                for w in work.iter_mut().skip(k + 1) {
                    *w = zero;
                }
                for j in (k + 1)..n {
                    for i in (k + 1)..m {
                        work[i] += e[j] * a[i][j];
                    }
                }
                for j in (k + 1)..n {
                    let t = -e[j] / e[k + 1];
                    for i in (k + 1)..m {
                        a[i][j] += t * work[i];
                    }
                }
            }
            for i in (k + 1)..n {
                v[i][k] = e[i];
            }
        }
    }

    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = a[nct][nct];
    }
    if m < p {
        s[p - 1] = zero;
    }
    if nrt + 1 < p {
        e[nrt] = a[nrt][p - 1];
    }
    e[p - 1] = zero;

    for j in nct..nu {
        for row in u.iter_mut() {
            row[j] = zero;
        }
        u[j][j] = one;
    }
    for k in (0..nct).rev() {
        if s[k] != zero {
            for j in (k + 1)..nu {
                let mut t = zero;
                for row in u.iter().skip(k) {
                    t += row[k] * row[j];
                }
                t = -t / u[k][k];
                for row in u.iter_mut().skip(k) {
                    let upd = t * row[k];
                    row[j] += upd;
                }
            }
            for row in u.iter_mut().skip(k) {
                row[k] = -row[k];
            }
            u[k][k] += one;
            for row in u.iter_mut().take(k) {
                row[k] = zero;
            }
        } else {
            for row in u.iter_mut() {
                row[k] = zero;
            }
            u[k][k] = one;
        }
    }

    for k in (0..n).rev() {
        if k < nrt && e[k] != zero {
            for j in (k + 1)..nu {
                let mut t = zero;
                for row in v.iter().skip(k + 1) {
                    t += row[k] * row[j];
                }
                t = -t / v[k + 1][k];
                for row in v.iter_mut().skip(k + 1) {
                    let upd = t * row[k];
                    row[j] += upd;
                }
            }
        }
        for row in v.iter_mut() {
            row[k] = zero;
        }
        v[k][k] = one;
    }

    let pp = p - 1;
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps;
    let mut iter = 0usize;
    let max_iter = 75 * n.max(10);
    while p > 0 {
        if iter > max_iter {
            return Err(Error::NoConvergence("singular value decomposition"));
        }
        // Locate negligible superdiagonal / diagonal entries.
        let mut k: isize = p as isize - 2;
        while k >= 0 {
            let ku = k as usize;
            if e[ku].abs() <= tiny + eps * (s[ku].abs() + s[ku + 1].abs()) {
                e[ku] = zero;
                break;
            }
            k -= 1;
        }
        let kase;
        if k == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks: isize = p as isize - 1;
            while ks > k {
                let ksu = ks as usize;
                let t = (if ksu != p { e[ksu].abs() } else { zero })
                    + (if ks != k + 1 { e[ksu - 1].abs() } else { zero });
                if s[ksu].abs() <= tiny + eps * t {
                    s[ksu] = zero;
                    break;
                }
                ks -= 1;
            }
            if ks == k {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                k = ks;
            }
        }
        let k = (k + 1) as usize;

        match kase {
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = zero;
                for j in (k..=(p - 2)).rev() {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] = cs * e[j - 1];
                    }
                    for row in v.iter_mut() {
                        let t = cs * row[j] + sn * row[p - 1];
                        row[p - 1] = -sn * row[j] + cs * row[p - 1];
                        row[j] = t;
                    }
                }
            }
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = zero;
                for j in k..p {
                    let t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] = cs * e[j];
                    for row in u.iter_mut() {
                        let t = cs * row[j] + sn * row[k - 1];
                        row[k - 1] = -sn * row[j] + cs * row[k - 1];
                        row[j] = t;
                    }
                }
            }
            3 => {
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / T::lit(2.0);
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = zero;
                if b != zero || c != zero {
                    shift = (b * b + c).sqrt();
                    if b < zero {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..(p - 1) {
                    let mut t = f.hypot(g);
                    let mut cs = f / t;
                    let mut sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] = cs * s[j + 1];
                    for row in v.iter_mut() {
                        let t = cs * row[j] + sn * row[j + 1];
                        row[j + 1] = -sn * row[j] + cs * row[j + 1];
                        row[j] = t;
                    }
                    t = f.hypot(g);
                    cs = f / t;
                    sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] = cs * e[j + 1];
                    if j < m - 1 {
                        for row in u.iter_mut() {
                            let t = cs * row[j] + sn * row[j + 1];
                            row[j + 1] = -sn * row[j] + cs * row[j + 1];
                            row[j] = t;
                        }
                    }
                }
                e[p - 2] = f;
                iter += 1;
            }
            _ => {
                let mut k = k;
                if s[k] <= zero {
                    s[k] = if s[k] < zero { -s[k] } else { zero };
                    for row in v.iter_mut().take(pp + 1) {
                        row[k] = -row[k];
                    }
                }
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        for row in v.iter_mut() {
                            row.swap(k, k + 1);
                        }
                    }
                    if k < m - 1 {
                        for row in u.iter_mut() {
                            row.swap(k, k + 1);
                        }
                    }
                    k += 1;
                }
                iter = 0;
                p -= 1;
            }
        }
    }

    s.truncate(n);
    Ok(Svd {
        u: DenseMatrix::from_fn(m, nu, |i, j| u[i][j]),
        s,
        v: DenseMatrix::from_fn(n, n, |i, j| v[i][j]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::oracle::jacobi_eigenvalues;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn orthonormal_cols(q: &DenseMatrix<f64>) -> f64 {
        let g = q.transpose().matmul(q).unwrap();
        g.sub(&DenseMatrix::identity(q.cols())).unwrap().max_abs()
    }

    #[test]
    fn rank_one_exact() {
        let u = [1.0, -2.0, 0.5];
        let v = [3.0, 1.0];
        let m = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let t = truncated_svd(&m, 1).unwrap();
        assert!(t.reconstruct().sub(&m).unwrap().frobenius_norm() < 1e-13);
    }

    #[test]
    fn diagonal_truncation() {
        let m = DenseMatrix::from_diag(&[3.0f64, 2.0, 1.0]);
        let t = truncated_svd(&m, 2).unwrap();
        assert!((t.s[0] - 3.0).abs() < 1e-14 && (t.s[1] - 2.0).abs() < 1e-14);
        let err = t.reconstruct().sub(&m).unwrap().frobenius_norm();
        assert!((err - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_range_checked() {
        let m = DenseMatrix::<f64>::identity(3);
        assert!(matches!(truncated_svd(&m, 0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(truncated_svd(&m, 4), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn random_matches_gram_eigenvalues_both_orientations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (r, c) in [(8, 5), (5, 8), (6, 6), (1, 4), (4, 1)] {
            let m = DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
            let full = svd(&m).unwrap();
            assert!(orthonormal_cols(&full.u) < 1e-12);
            assert!(orthonormal_cols(&full.v) < 1e-12);
            assert!(full.reconstruct().sub(&m).unwrap().max_abs() < 1e-12);
            let small = if r >= c { m.gram() } else { m.transpose().gram() };
            let mut oracle: Vec<f64> = jacobi_eigenvalues(&small)
                .into_iter()
                .map(|l| l.max(0.0).sqrt())
                .collect();
            oracle.reverse();
            for (a, b) in full.s.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rank_deficient_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DenseMatrix::from_fn(7, 2, |_, _| rng.random_range(-1.0..1.0));
        let b = DenseMatrix::from_fn(2, 6, |_, _| rng.random_range(-1.0..1.0));
        let m = a.matmul(&b).unwrap();
        let full = svd(&m).unwrap();
        assert!(full.s[2] < 1e-12);
        assert!(orthonormal_cols(&full.u) < 1e-12);
        let zero = svd(&DenseMatrix::<f64>::zeros(3, 4)).unwrap();
        assert!(zero.s.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn works_in_single_precision() {
        let m = DenseMatrix::<f32>::from_diag(&[2.0, 5.0, 1.0]);
        let t = truncated_svd(&m, 1).unwrap();
        assert!((t.s[0] - 5.0).abs() < 1e-5);
    }
}
