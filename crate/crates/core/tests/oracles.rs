//! Numerical kernels and projections against independent oracles.

use acciht::analysis::{optimal_mu, rip_exact};
use acciht::models::{project, Signal, StructureModel};
use acciht::numerics::{lstsq, svd, sym_eigen, truncated_svd, DenseMatrix, DenseVector};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix<f64> {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_vec(rows, cols, data).unwrap()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> DenseVector<f64> {
    DenseVector::from((0..n).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>())
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (r, c) in [(1, 1), (3, 7), (9, 4), (12, 12), (20, 5)] {
        let m = random_matrix(&mut rng, r, c);
        let ours = svd(&m).unwrap();
        let mut theirs: Vec<f64> = to_na(&m).singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.s.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10, "{r}x{c}: {a} vs {b}");
        }
        let rec = ours.reconstruct().sub(&m).unwrap().frobenius_norm();
        assert!(rec < 1e-10);
    }
}

#[test]
fn symmetric_eigenvalues_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [1, 2, 5, 11, 24] {
        let a = random_matrix(&mut rng, n, n);
        let s = a.axpy(1.0, &a.transpose()).unwrap();
        let ours = sym_eigen(&s, 1e-12, true).unwrap();
        let mut theirs: Vec<f64> = to_na(&s).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in ours.values.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
        let v = ours.vectors.unwrap();
        for j in 0..n {
            let col = v.column(j);
            let av = s.matvec(&col).unwrap();
            assert!(av.axpy(-ours.values[j], &col).unwrap().norm() < 1e-9);
        }
    }
}

#[test]
fn least_squares_matches_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, n) in [(5, 5), (12, 4), (30, 9)] {
        let a = random_matrix(&mut rng, m, n);
        let b = random_vector(&mut rng, m);
        let ours = lstsq(&a, &b).unwrap();
        let na = to_na(&a);
        let theirs = na
            .clone()
            .svd(true, true)
            .solve(&DVector::from_column_slice(b.as_slice()), 1e-14)
            .unwrap();
        for (x, y) in ours.iter().zip(theirs.iter()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn rip_enumeration_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let phi = random_matrix(&mut rng, 7, 9);
    for s in [1, 2, 3, 5] {
        let (alpha, beta) = rip_exact(&phi, s).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for idx in subsets(9, s) {
            let sub = to_na(&phi.select_columns(&idx));
            let eig = (sub.transpose() * sub).symmetric_eigenvalues();
            lo = lo.min(eig.min());
            hi = hi.max(eig.max());
        }
        assert!((alpha - lo).abs() < 1e-10 && (beta - hi).abs() < 1e-10);
    }
}

fn brute_sparse(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    (0..=k.min(n))
        .flat_map(|s| subsets(n, s))
        .map(|keep| {
            x.iter()
                .enumerate()
                .filter(|(i, _)| !keep.contains(i))
                .map(|(_, v)| v * v)
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

fn brute_block(x: &[f64], groups: &[Vec<usize>], k: usize) -> f64 {
    let g = groups.len();
    (0..=k.min(g))
        .flat_map(|s| subsets(g, s))
        .map(|keep| {
            (0..g)
                .filter(|j| !keep.contains(j))
                .flat_map(|j| groups[j].iter())
                .map(|&i| x[i] * x[i])
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn projections_match_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..200 {
        let n = rng.random_range(1..=12);
        let k = rng.random_range(1..=3.min(n));
        let mut x = random_vector(&mut rng, n);
        if trial % 10 == 0 && n > 1 {
            // ties
            x[1] = x[0];
        }
        let xs = Signal::Vector(x.clone());

        let model = StructureModel::sparse(n, k).unwrap();
        let p = project(&xs, &model).unwrap();
        let dist = xs.sub(&p).unwrap().norm().powi(2);
        assert!((dist - brute_sparse(x.as_slice(), k)).abs() < 1e-12);
        assert!(p.as_slice().iter().filter(|&&v| v != 0.0).count() <= k);

        let size = rng.random_range(1..=3);
        let count = n / size;
        if count == 0 {
            continue;
        }
        let xb = DenseVector::from(x.as_slice()[..count * size].to_vec());
        let groups: Vec<Vec<usize>> = (0..count).map(|g| (g * size..(g + 1) * size).collect()).collect();
        let kb = k.min(count);
        let model = StructureModel::block(groups.clone(), kb).unwrap();
        let xbs = Signal::Vector(xb.clone());
        let p = project(&xbs, &model).unwrap();
        let dist = xbs.sub(&p).unwrap().norm().powi(2);
        assert!((dist - brute_block(xb.as_slice(), &groups, kb)).abs() < 1e-12);
    }
}

#[test]
fn truncated_svd_beats_random_low_rank_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let (p, n) = (rng.random_range(3..10), rng.random_range(3..10));
        let r = rng.random_range(1..=p.min(n) - 1);
        let m = random_matrix(&mut rng, p, n);
        let best = truncated_svd(&m, r).unwrap().reconstruct();
        let err = m.sub(&best).unwrap().frobenius_norm();
        // Eckart-Young: the optimal error is the tail of the spectrum
        let s = to_na(&m).singular_values();
        let mut sv: Vec<f64> = s.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let tail: f64 = sv[r..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((err - tail).abs() < 1e-10);
        for _ in 0..50 {
            let cand = random_matrix(&mut rng, p, r).matmul(&random_matrix(&mut rng, r, n)).unwrap();
            assert!(err <= m.sub(&cand).unwrap().frobenius_norm());
        }
    }
}

fn spectral_norm_of_i_minus(mu: f64, m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (DMatrix::identity(n, n) - m * mu).symmetric_eigenvalues().abs().max()
}

#[test]
fn optimal_mu_against_spectral_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.random_range(2..8);
        let q = to_na(&random_matrix(&mut rng, n, n)).qr().q();
        let mut eig: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        let (alpha, beta) = (eig[0], eig[n - 1]);
        let m = &q * DMatrix::from_diagonal(&DVector::from_vec(eig)) * q.transpose();
        let (mu, rho) = optimal_mu(alpha, beta).unwrap();
        let at_opt = spectral_norm_of_i_minus(mu, &m);
        assert!((at_opt - (beta - alpha) / (beta + alpha)).abs() < 1e-8);
        assert!((rho - at_opt).abs() < 1e-8);
        for g in 1..=400 {
            let other = 4.0 * g as f64 / (400.0 * beta);
            assert!(spectral_norm_of_i_minus(other, &m) >= at_opt - 1e-8);
        }
    }
}

proptest! {
    #[test]
    fn projection_is_idempotent(v in proptest::collection::vec(-5.0f64..5.0, 1..20), k in 1usize..5) {
        let n = v.len();
        let model = StructureModel::sparse(n, k.min(n)).unwrap();
        let x = Signal::Vector(DenseVector::from(v));
        let p = project(&x, &model).unwrap();
        prop_assert_eq!(project(&p, &model).unwrap(), p.clone());
        prop_assert!(p.norm() <= x.norm() + 1e-12);
    }

    #[test]
    fn low_rank_projection_has_rank_at_most_r(seed in 0u64..1000, r in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, 6, 5);
        let model = StructureModel::low_rank(6, 5, r).unwrap();
        let p = project(&Signal::Matrix(m), &model).unwrap();
        let s = to_na(p.as_matrix().unwrap()).singular_values();
        prop_assert!(s.iter().filter(|&&v| v > 1e-9).count() <= r);
    }
}
