//! Dense linear-algebra kernels shared by the rest of the crate.

mod dense;
mod eigen;
mod lstsq;
mod svd;
pub mod text;

pub use dense::{DenseMatrix, DenseVector};
pub(crate) use dense::{dot, norm2};
pub use eigen::{extreme_eigs_sym, sym_eigen, SymmetricEigen};
pub use lstsq::{lstsq, orthonormalize_columns, solve_restricted_ls};
pub use svd::{svd, truncated_svd, Svd};

/// Default tolerance for direct solves.
pub const DIRECT_TOL: f64 = 1e-10;
/// Default tolerance for eigenvalue and singular value routines.
pub const ITERATIVE_TOL: f64 = 1e-8;

/// Cyclic Jacobi eigenvalues, used only as an independent test oracle.
#[cfg(test)]
pub(crate) mod oracle {
    use super::DenseMatrix;

    pub fn jacobi_eigenvalues(m: &DenseMatrix<f64>) -> Vec<f64> {
        let n = m.rows();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev
    }
}
