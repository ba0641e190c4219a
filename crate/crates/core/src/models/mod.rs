//! Structure models: plain sparsity, non-overlapping block sparsity and
//! low-rankness, each with an exact Euclidean projection onto signals with at
//! most `k` active atoms.
//!
//! Ties between equal magnitudes (or group energies) are broken in favour of
//! the lowest index, so projections and supports are deterministic.

mod signal;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{orthonormalize_columns, svd, truncated_svd, DenseMatrix, DenseVector};
use crate::scalar::Scalar;

pub use signal::{Signal, SignalShape};

/// The atom set together with its budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureModel {
    /// At most `k` nonzero entries of a length-`n` vector.
    Sparse { n: usize, k: usize },
    /// At most `k` active groups of a partition of `0..n` (0-based indices).
    Block { groups: Vec<Vec<usize>>, k: usize },
    /// Rank at most `r` for a `rows x cols` matrix.
    LowRank { rows: usize, cols: usize, r: usize },
}

impl StructureModel {
    pub fn sparse(n: usize, k: usize) -> Result<Self> {
        let m = Self::Sparse { n, k };
        m.validate()?;
        Ok(m)
    }

    pub fn block(groups: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let m = Self::Block { groups, k };
        m.validate()?;
        Ok(m)
    }

    /// Block model with `count` contiguous groups of `size` entries.
    pub fn contiguous_blocks(count: usize, size: usize, k: usize) -> Result<Self> {
        Self::block(
            (0..count)
                .map(|g| (g * size..(g + 1) * size).collect())
                .collect(),
            k,
        )
    }

    pub fn low_rank(rows: usize, cols: usize, r: usize) -> Result<Self> {
        let m = Self::LowRank { rows, cols, r };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Sparse { n, k } => {
                if *k == 0 || k > n {
                    return Err(Error::InvalidModel(format!("sparsity k={k} must lie in 1..={n}")));
                }
            }
            Self::Block { groups, k } => {
                if *k == 0 || *k > groups.len() {
                    return Err(Error::InvalidModel(format!(
                        "block budget k={k} must lie in 1..={}",
                        groups.len()
                    )));
                }
                let n: usize = groups.iter().map(Vec::len).sum();
                let mut seen = vec![false; n];
                for g in groups {
                    if g.is_empty() {
                        return Err(Error::InvalidModel("empty group".into()));
                    }
                    for &i in g {
                        if i >= n {
                            return Err(Error::InvalidModel(format!(
                                "groups must partition 0..{n}; index {i} out of range"
                            )));
                        }
                        if std::mem::replace(&mut seen[i], true) {
                            return Err(Error::InvalidModel(format!("index {i} in two groups")));
                        }
                    }
                }
            }
            Self::LowRank { rows, cols, r } => {
                let max = (*rows).min(*cols);
                if *r == 0 || *r > max {
                    return Err(Error::InvalidModel(format!("rank r={r} must lie in 1..={max}")));
                }
            }
        }
        Ok(())
    }

    /// The atom budget `k` (or `r`).
    pub fn budget(&self) -> usize {
        match self {
            Self::Sparse { k, .. } | Self::Block { k, .. } => *k,
            Self::LowRank { r, .. } => *r,
        }
    }

    /// Same atom set with a different budget.
    pub fn with_budget(&self, budget: usize) -> Result<Self> {
        let m = match self {
            Self::Sparse { n, .. } => Self::Sparse { n: *n, k: budget },
            Self::Block { groups, .. } => Self::Block {
                groups: groups.clone(),
                k: budget,
            },
            Self::LowRank { rows, cols, .. } => Self::LowRank {
                rows: *rows,
                cols: *cols,
                r: budget,
            },
        };
        m.validate()?;
        Ok(m)
    }

    pub fn shape(&self) -> SignalShape {
        match self {
            Self::Sparse { n, .. } => SignalShape::Vector(*n),
            Self::Block { groups, .. } => SignalShape::Vector(groups.iter().map(Vec::len).sum()),
            Self::LowRank { rows, cols, .. } => SignalShape::Matrix(*rows, *cols),
        }
    }

    /// Number of atoms available (`n`, number of groups, or `min(rows, cols)`).
    pub fn atom_count(&self) -> usize {
        match self {
            Self::Sparse { n, .. } => *n,
            Self::Block { groups, .. } => groups.len(),
            Self::LowRank { rows, cols, .. } => (*rows).min(*cols),
        }
    }

    pub fn check_shape<T: Scalar>(&self, x: &Signal<T>) -> Result<()> {
        if x.shape() != self.shape() {
            return Err(Error::Dimension(format!(
                "signal of shape {:?} used with a model expecting {:?}",
                x.shape(),
                self.shape()
            )));
        }
        Ok(())
    }

    pub fn zero_signal<T: Scalar>(&self) -> Signal<T> {
        Signal::zeros(self.shape())
    }

    pub fn empty_support<T: Scalar>(&self) -> Support<T> {
        match self {
            Self::Sparse { .. } => Support::Indices(Vec::new()),
            Self::Block { .. } => Support::Groups(Vec::new()),
            Self::LowRank { rows, cols, .. } => Support::Subspace {
                left: DenseMatrix::zeros(*rows, 0),
                right: DenseMatrix::zeros(*cols, 0),
            },
        }
    }

    /// Support covering the whole ambient space.
    pub fn full_support<T: Scalar>(&self) -> Support<T> {
        match self {
            Self::Sparse { n, .. } => Support::Indices((0..*n).collect()),
            Self::Block { groups, .. } => Support::Groups((0..groups.len()).collect()),
            Self::LowRank { rows, cols, .. } => Support::Subspace {
                left: DenseMatrix::identity(*rows),
                right: DenseMatrix::identity(*cols),
            },
        }
    }

    /// Entry indices covered by a support (sparse and block models).
    pub fn support_indices<T: Scalar>(&self, support: &Support<T>) -> Result<Vec<usize>> {
        match (self, support) {
            (Self::Sparse { .. }, Support::Indices(idx)) => Ok(idx.clone()),
            (Self::Block { groups, .. }, Support::Groups(ids)) => {
                let mut idx: Vec<usize> = ids.iter().flat_map(|&g| groups[g].iter().copied()).collect();
                idx.sort_unstable();
                Ok(idx)
            }
            _ => Err(Error::SupportMismatch),
        }
    }
}

/// Active atoms of a signal.
#[derive(Debug, Clone, PartialEq)]
pub enum Support<T> {
    /// Sorted entry indices (sparse model).
    Indices(Vec<usize>),
    /// Sorted group ids (block model).
    Groups(Vec<usize>),
    /// Orthonormal left/right bases (low-rank model).
    Subspace {
        left: DenseMatrix<T>,
        right: DenseMatrix<T>,
    },
}

impl<T: Scalar> Support<T> {
    /// Number of atoms.
    pub fn cardinality(&self) -> usize {
        match self {
            Self::Indices(v) | Self::Groups(v) => v.len(),
            Self::Subspace { left, right } => left.cols().max(right.cols()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == 0
    }

    /// Compact description recorded in solver traces.
    pub fn summary(&self) -> SupportSummary {
        match self {
            Self::Indices(v) => SupportSummary::Indices(v.clone()),
            Self::Groups(v) => SupportSummary::Groups(v.clone()),
            Self::Subspace { .. } => SupportSummary::Rank(self.cardinality()),
        }
    }
}

/// Serializable summary of a [`Support`]; low-rank supports keep only the rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSummary {
    Indices(Vec<usize>),
    Groups(Vec<usize>),
    Rank(usize),
}

/// Indices ordered by decreasing score, ties by increasing index.
fn top_k_by_score<T: Scalar>(scores: &[T], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_unstable();
    order
}

fn group_energies<T: Scalar>(x: &[T], groups: &[Vec<usize>]) -> Vec<T> {
    groups
        .iter()
        .map(|g| g.iter().map(|&i| x[i] * x[i]).sum())
        .collect()
}

/// Exact projection together with its support.
pub fn project_with_support<T: Scalar>(
    x: &Signal<T>,
    model: &StructureModel,
) -> Result<(Signal<T>, Support<T>)> {
    model.check_shape(x)?;
    match (model, x) {
        (StructureModel::Sparse { k, .. }, Signal::Vector(v)) => {
            let mags: Vec<T> = v.iter().map(|a| a.abs()).collect();
            let keep = top_k_by_score(&mags, *k);
            let mut out = DenseVector::zeros(v.len());
            for &i in &keep {
                out[i] = v[i];
            }
            Ok((Signal::Vector(out), Support::Indices(keep)))
        }
        (StructureModel::Block { groups, k }, Signal::Vector(v)) => {
            let keep = top_k_by_score(&group_energies(v.as_slice(), groups), *k);
            let mut out = DenseVector::zeros(v.len());
            for &g in &keep {
                for &i in &groups[g] {
                    out[i] = v[i];
                }
            }
            Ok((Signal::Vector(out), Support::Groups(keep)))
        }
        (StructureModel::LowRank { r, .. }, Signal::Matrix(m)) => {
            let t = truncated_svd(m, *r)?;
            let proj = t.reconstruct();
            Ok((
                Signal::Matrix(proj),
                Support::Subspace {
                    left: t.u,
                    right: t.v,
                },
            ))
        }
        _ => unreachable!("shape checked above"),
    }
}

/// `Π_{k,A}(x)`: the closest signal with at most `k` active atoms.
pub fn project<T: Scalar>(x: &Signal<T>, model: &StructureModel) -> Result<Signal<T>> {
    project_with_support(x, model).map(|(p, _)| p)
}

/// Support of the projection of `x`.
pub fn support_of<T: Scalar>(x: &Signal<T>, model: &StructureModel) -> Result<Support<T>> {
    project_with_support(x, model).map(|(_, s)| s)
}

/// The atoms `x` actually uses, without truncating to the budget: nonzero
/// entries, groups with nonzero energy, or the numerical row/column spaces.
pub fn active_support<T: Scalar>(x: &Signal<T>, model: &StructureModel) -> Result<Support<T>> {
    model.check_shape(x)?;
    match (model, x) {
        (StructureModel::Sparse { .. }, Signal::Vector(v)) => Ok(Support::Indices(
            (0..v.len()).filter(|&i| v[i] != T::zero()).collect(),
        )),
        (StructureModel::Block { groups, .. }, Signal::Vector(v)) => Ok(Support::Groups(
            group_energies(v.as_slice(), groups)
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != T::zero())
                .map(|(g, _)| g)
                .collect(),
        )),
        (StructureModel::LowRank { rows, cols, .. }, Signal::Matrix(m)) => {
            let full = svd(m)?;
            let smax = full.s.first().copied().unwrap_or_else(T::zero);
            let cutoff = smax * T::epsilon() * T::from_usize_lossy((*rows).max(*cols));
            let rank = full.s.iter().take_while(|&&s| s > cutoff && s > T::zero()).count();
            let t = full.truncate(rank);
            Ok(Support::Subspace {
                left: t.u,
                right: t.v,
            })
        }
        _ => unreachable!("shape checked above"),
    }
}

fn check_indices(idx: &[usize], dim: usize) -> Result<()> {
    match idx.iter().find(|&&i| i >= dim) {
        Some(&i) => Err(Error::IndexOutOfRange { index: i, dim }),
        None => Ok(()),
    }
}

/// Orthogonal projection of `x` onto the span of the atoms in `support`.
///
/// For subspace supports with bases `U`, `V` this is the projection
/// `P_U X + X P_V − P_U X P_V` onto matrices whose column space lies in
/// `span(U)` or whose row space lies in `span(V)`.
pub fn restrict<T: Scalar>(
    x: &Signal<T>,
    support: &Support<T>,
    model: &StructureModel,
) -> Result<Signal<T>> {
    model.check_shape(x)?;
    match (support, x) {
        (Support::Indices(idx), Signal::Vector(v)) => {
            check_indices(idx, v.len())?;
            let mut out = DenseVector::zeros(v.len());
            for &i in idx {
                out[i] = v[i];
            }
            Ok(Signal::Vector(out))
        }
        (Support::Groups(ids), Signal::Vector(v)) => {
            let StructureModel::Block { groups, .. } = model else {
                return Err(Error::SupportMismatch);
            };
            check_indices(ids, groups.len())?;
            let mut out = DenseVector::zeros(v.len());
            for &g in ids {
                for &i in &groups[g] {
                    out[i] = v[i];
                }
            }
            Ok(Signal::Vector(out))
        }
        (Support::Subspace { left, right }, Signal::Matrix(m)) => {
            check_subspace(left, right, m)?;
            Ok(Signal::Matrix(tangent_projection(m, left, right)?))
        }
        _ => Err(Error::SupportMismatch),
    }
}

/// `x − restrict(x, support)`: the part of `x` outside the support.
pub fn restrict_complement<T: Scalar>(
    x: &Signal<T>,
    support: &Support<T>,
    model: &StructureModel,
) -> Result<Signal<T>> {
    let inside = restrict(x, support, model)?;
    x.sub(&inside)
}

fn check_subspace<T: Scalar>(
    left: &DenseMatrix<T>,
    right: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
) -> Result<()> {
    if left.rows() != m.rows() || right.rows() != m.cols() {
        return Err(Error::Dimension(format!(
            "subspace bases {}x{} / {}x{} for a {}x{} matrix",
            left.rows(),
            left.cols(),
            right.rows(),
            right.cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn tangent_projection<T: Scalar>(
    m: &DenseMatrix<T>,
    left: &DenseMatrix<T>,
    right: &DenseMatrix<T>,
) -> Result<DenseMatrix<T>> {
    if left.cols() == 0 && right.cols() == 0 {
        return Ok(DenseMatrix::zeros(m.rows(), m.cols()));
    }
    let ut = left.transpose();
    // P_U X
    let utx = ut.matmul(m)?;
    let pu_x = left.matmul(&utx)?;
    // (I − P_U) X P_V
    let resid = m.sub(&pu_x)?;
    let rv = resid.matmul(right)?;
    let tail = rv.matmul(&right.transpose())?;
    pu_x.axpy(T::one(), &tail)
}

/// Union of two supports of the same variant.
pub fn union<T: Scalar>(a: &Support<T>, b: &Support<T>) -> Result<Support<T>> {
    match (a, b) {
        (Support::Indices(x), Support::Indices(y)) => Ok(Support::Indices(merge_sorted(x, y))),
        (Support::Groups(x), Support::Groups(y)) => Ok(Support::Groups(merge_sorted(x, y))),
        (
            Support::Subspace {
                left: l1,
                right: r1,
            },
            Support::Subspace {
                left: l2,
                right: r2,
            },
        ) => {
            let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
            Ok(Support::Subspace {
                left: orthonormalize_columns(&l1.hcat(l2)?, tol),
                right: orthonormalize_columns(&r1.hcat(r2)?, tol),
            })
        }
        _ => Err(Error::SupportMismatch),
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vsig(v: &[f64]) -> Signal<f64> {
        Signal::Vector(DenseVector::from(v.to_vec()))
    }

    #[test]
    fn sparse_projection_keeps_largest() {
        let m = StructureModel::sparse(3, 1).unwrap();
        let p = project(&vsig(&[3.0, -5.0, 1.0]), &m).unwrap();
        assert_eq!(p, vsig(&[0.0, -5.0, 0.0]));
    }

    #[test]
    fn block_projection_by_energy() {
        let m = StructureModel::block(vec![vec![0, 1], vec![2, 3]], 1).unwrap();
        let x = vsig(&[1.0, 1.0, 3.0, 0.0]);
        assert_eq!(project(&x, &m).unwrap(), vsig(&[0.0, 0.0, 3.0, 0.0]));
        assert_eq!(support_of(&x, &m).unwrap(), Support::Groups(vec![1]));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let m = StructureModel::sparse(3, 1).unwrap();
        assert_eq!(
            support_of(&vsig(&[0.0, 7.0, 0.0]), &m).unwrap(),
            Support::Indices(vec![1])
        );
        let m2 = StructureModel::sparse(3, 2).unwrap();
        assert_eq!(
            support_of(&vsig(&[0.0, 0.0, 0.0]), &m2).unwrap(),
            Support::Indices(vec![0, 1])
        );
        assert_eq!(
            support_of(&vsig(&[2.0, -2.0, 2.0]), &m2).unwrap(),
            Support::Indices(vec![0, 1])
        );
        let b = StructureModel::contiguous_blocks(3, 1, 1).unwrap();
        assert_eq!(support_of(&vsig(&[1.0, 1.0, 1.0]), &b).unwrap(), Support::Groups(vec![0]));
    }

    #[test]
    fn rank_one_is_already_feasible() {
        let u = [1.0, 2.0, -1.0];
        let v = [0.5, -3.0];
        let x = DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        let m = StructureModel::low_rank(3, 2, 1).unwrap();
        let p = project(&Signal::Matrix(x.clone()), &m).unwrap();
        assert!(p.as_matrix().unwrap().sub(&x).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn model_validation() {
        assert!(StructureModel::sparse(3, 0).is_err());
        assert!(StructureModel::sparse(3, 4).is_err());
        assert!(StructureModel::block(vec![vec![0, 1], vec![1, 2]], 1).is_err());
        assert!(StructureModel::block(vec![vec![0, 5]], 1).is_err());
        assert!(StructureModel::block(vec![vec![0], vec![1]], 3).is_err());
        assert!(StructureModel::low_rank(3, 2, 3).is_err());
    }

    #[test]
    fn shape_mismatch_errors() {
        let m = StructureModel::sparse(4, 1).unwrap();
        assert!(matches!(project(&vsig(&[1.0, 2.0]), &m), Err(Error::Dimension(_))));
        let lr = StructureModel::low_rank(2, 2, 1).unwrap();
        assert!(project(&vsig(&[1.0, 2.0, 3.0, 4.0]), &lr).is_err());
    }

    #[test]
    fn restrict_and_union_on_indices() {
        let m = StructureModel::sparse(3, 2).unwrap();
        let x = vsig(&[4.0, 5.0, 6.0]);
        let s = Support::Indices(vec![0, 2]);
        assert_eq!(restrict(&x, &s, &m).unwrap(), vsig(&[4.0, 0.0, 6.0]));
        assert_eq!(restrict(&x, &m.full_support(), &m).unwrap(), x);
        assert!(matches!(
            restrict(&x, &Support::Indices(vec![3]), &m),
            Err(Error::IndexOutOfRange { .. })
        ));
        let u = union(&Support::<f64>::Indices(vec![0, 1]), &Support::Indices(vec![1, 2])).unwrap();
        assert_eq!(u, Support::Indices(vec![0, 1, 2]));
        let e = union(&s, &m.empty_support()).unwrap();
        assert_eq!(e, s);
        assert_eq!(
            union(&Support::<f64>::Indices(vec![0]), &Support::Groups(vec![0])),
            Err(Error::SupportMismatch)
        );
    }

    #[test]
    fn low_rank_restrict_picks_top_pair() {
        let m = DenseMatrix::from_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 1.5]])
            .unwrap();
        let model = StructureModel::low_rank(3, 3, 1).unwrap();
        let sig = Signal::Matrix(m.clone());
        let s = support_of(&sig, &model).unwrap();
        let r = restrict(&sig, &s, &model).unwrap();
        let best = crate::numerics::truncated_svd(&m, 1).unwrap().reconstruct();
        assert!(r.as_matrix().unwrap().sub(&best).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn orthogonal_rank_one_union() {
        let e = |n: usize, i: usize| DenseMatrix::from_fn(n, 1, |r, _| if r == i { 1.0 } else { 0.0 });
        let a = Support::Subspace { left: e(4, 0), right: e(3, 1) };
        let b = Support::Subspace { left: e(4, 2), right: e(3, 0) };
        let Support::Subspace { left, right } = union(&a, &b).unwrap() else { panic!() };
        for q in [&left, &right] {
            assert_eq!(q.cols(), 2);
            let g = q.transpose().matmul(q).unwrap();
            assert!(g.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn active_support_counts_all_nonzeros() {
        let m = StructureModel::sparse(4, 1).unwrap();
        let s = active_support(&vsig(&[0.0, 1.0, -2.0, 0.0]), &m).unwrap();
        assert_eq!(s, Support::Indices(vec![1, 2]));
        let lr = StructureModel::low_rank(3, 3, 1).unwrap();
        let x = Signal::Matrix(DenseMatrix::from_diag(&[2.0, 1.0, 0.0]));
        assert_eq!(active_support(&x, &lr).unwrap().cardinality(), 2);
        assert_eq!(active_support(&lr.zero_signal::<f64>(), &lr).unwrap().cardinality(), 0);
    }

    proptest! {
        #[test]
        fn projection_idempotent_and_feasible(
            x in proptest::collection::vec(-10.0f64..10.0, 8),
            k in 1usize..5,
        ) {
            let m = StructureModel::sparse(8, k).unwrap();
            let p = project(&vsig(&x), &m).unwrap();
            prop_assert!(active_support(&p, &m).unwrap().cardinality() <= k);
            prop_assert_eq!(project(&p, &m).unwrap(), p.clone());
            let b = StructureModel::contiguous_blocks(4, 2, k.min(4)).unwrap();
            let pb = project(&vsig(&x), &b).unwrap();
            prop_assert!(active_support(&pb, &b).unwrap().cardinality() <= k.min(4));
            prop_assert_eq!(project(&pb, &b).unwrap(), pb);
        }

        #[test]
        fn restrict_is_linear_and_idempotent(
            x in proptest::collection::vec(-10.0f64..10.0, 6),
            y in proptest::collection::vec(-10.0f64..10.0, 6),
            idx in proptest::collection::btree_set(0usize..6, 0..6),
        ) {
            let m = StructureModel::sparse(6, 1).unwrap();
            let s = Support::Indices(idx.into_iter().collect());
            let rx = restrict(&vsig(&x), &s, &m).unwrap();
            prop_assert_eq!(restrict(&rx, &s, &m).unwrap(), rx.clone());
            let sum = vsig(&x).axpy(2.0, &vsig(&y)).unwrap();
            let lhs = restrict(&sum, &s, &m).unwrap();
            let rhs = rx.axpy(2.0, &restrict(&vsig(&y), &s, &m).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().norm() < 1e-12);
        }

        #[test]
        fn low_rank_projection_idempotent(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let x = DenseMatrix::from_fn(5, 4, |_, _| rng.random_range(-1.0f64..1.0));
            let m = StructureModel::low_rank(5, 4, 2).unwrap();
            let p = project(&Signal::Matrix(x), &m).unwrap();
            let pp = project(&p, &m).unwrap();
            prop_assert!(pp.sub(&p).unwrap().norm() <= 1e-10 * p.norm().max(1.0));
            let s = support_of(&p, &m).unwrap();
            let rp = restrict(&p, &s, &m).unwrap();
            prop_assert!(restrict(&rp, &s, &m).unwrap().sub(&rp).unwrap().norm() < 1e-10);
        }
    }
}
