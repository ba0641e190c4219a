//! Smooth convex losses with value, gradient and support-restricted gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{restrict, Signal, SignalShape, StructureModel, Support};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::scalar::Scalar;

/// Value/gradient contract consumed by the solvers.
pub trait Objective<T: Scalar>: Send + Sync {
    /// Shape of the optimization variable.
    fn shape(&self) -> SignalShape;

    fn value(&self, x: &Signal<T>) -> Result<T>;

    fn gradient(&self, x: &Signal<T>) -> Result<Signal<T>>;

    /// `∇_S f(x)`: the gradient restricted to the atoms in `support`.
    fn gradient_restricted(
        &self,
        x: &Signal<T>,
        support: &Support<T>,
        model: &StructureModel,
    ) -> Result<Signal<T>> {
        restrict(&self.gradient(x)?, support, model)
    }

    /// `⟨d, ∇²f d⟩` when the objective is quadratic, else `None`.
    fn curvature(&self, _d: &Signal<T>) -> Option<Result<T>> {
        None
    }

    fn as_least_squares(&self) -> Option<&LeastSquares<T>> {
        None
    }

    fn as_masked(&self) -> Option<&MaskedLeastSquares<T>> {
        None
    }
}

fn expect_shape<T: Scalar>(x: &Signal<T>, shape: SignalShape) -> Result<()> {
    if x.shape() != shape {
        return Err(Error::Dimension(format!(
            "objective expects {shape:?}, got {:?}",
            x.shape()
        )));
    }
    Ok(())
}

/// `f(x) = ½‖b − Φx‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LeastSquares<T> {
    phi: DenseMatrix<T>,
    b: DenseVector<T>,
}

impl<T: Scalar> LeastSquares<T> {
    pub fn new(phi: DenseMatrix<T>, b: DenseVector<T>) -> Result<Self> {
        if phi.rows() != b.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but {} observations",
                phi.rows(),
                b.len()
            )));
        }
        if !phi.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("least-squares data"));
        }
        Ok(Self { phi, b })
    }

    pub fn phi(&self) -> &DenseMatrix<T> {
        &self.phi
    }

    pub fn b(&self) -> &DenseVector<T> {
        &self.b
    }

    fn vec<'a>(&self, x: &'a Signal<T>) -> Result<&'a DenseVector<T>> {
        expect_shape(x, SignalShape::Vector(self.phi.cols()))?;
        Ok(x.as_vector().expect("shape checked"))
    }

    /// `b − Φx`.
    pub fn residual(&self, x: &Signal<T>) -> Result<DenseVector<T>> {
        let x = self.vec(x)?;
        self.b.sub(&self.phi.matvec(x)?)
    }
}

impl<T: Scalar> Objective<T> for LeastSquares<T> {
    fn shape(&self) -> SignalShape {
        SignalShape::Vector(self.phi.cols())
    }

    fn value(&self, x: &Signal<T>) -> Result<T> {
        let r = self.residual(x)?;
        let n = r.norm();
        Ok(T::lit(0.5) * n * n)
    }

    fn gradient(&self, x: &Signal<T>) -> Result<Signal<T>> {
        let r = self.residual(x)?;
        Ok(Signal::Vector(self.phi.tr_matvec(&r)?.scaled(-T::one())))
    }

    fn curvature(&self, d: &Signal<T>) -> Option<Result<T>> {
        Some(self.vec(d).and_then(|d| {
            let pd = self.phi.matvec(d)?;
            Ok(pd.dot(&pd))
        }))
    }

    fn as_least_squares(&self) -> Option<&LeastSquares<T>> {
        Some(self)
    }
}

/// `f(X) = ½ Σ_{(i,j) observed} (b_ij − X_ij)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MaskedLeastSquares<T> {
    rows: usize,
    cols: usize,
    /// Observed positions, sorted by `(row, col)`.
    positions: Vec<(usize, usize)>,
    values: DenseVector<T>,
}

impl<T: Scalar> MaskedLeastSquares<T> {
    /// Builds the objective from `(row, col, value)` observations (0-based),
    /// in any order.
    pub fn new(rows: usize, cols: usize, mut obs: Vec<(usize, usize, T)>) -> Result<Self> {
        obs.sort_by_key(|&(i, j, _)| (i, j));
        for w in obs.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::InvalidObjective(format!(
                    "position ({}, {}) observed twice",
                    w[0].0, w[0].1
                )));
            }
        }
        if let Some(&(i, j, _)) = obs.iter().find(|&&(i, j, _)| i >= rows || j >= cols) {
            return Err(Error::IndexOutOfRange {
                index: if i >= rows { i } else { j },
                dim: if i >= rows { rows } else { cols },
            });
        }
        let values = DenseVector::from_vec(obs.iter().map(|o| o.2).collect())?;
        Ok(Self {
            rows,
            cols,
            positions: obs.iter().map(|&(i, j, _)| (i, j)).collect(),
            values,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn values(&self) -> &DenseVector<T> {
        &self.values
    }

    fn mat<'a>(&self, x: &'a Signal<T>) -> Result<&'a DenseMatrix<T>> {
        expect_shape(x, SignalShape::Matrix(self.rows, self.cols))?;
        Ok(x.as_matrix().expect("shape checked"))
    }

    /// The mask operator: observed entries of `x` in position order.
    pub fn sample(&self, x: &DenseMatrix<T>) -> DenseVector<T> {
        DenseVector::from_vec_unchecked(self.positions.iter().map(|&(i, j)| x[(i, j)]).collect())
    }
}

impl<T: Scalar> Objective<T> for MaskedLeastSquares<T> {
    fn shape(&self) -> SignalShape {
        SignalShape::Matrix(self.rows, self.cols)
    }

    fn value(&self, x: &Signal<T>) -> Result<T> {
        let x = self.mat(x)?;
        let r = self.values.sub(&self.sample(x))?;
        let n = r.norm();
        Ok(T::lit(0.5) * n * n)
    }

    fn gradient(&self, x: &Signal<T>) -> Result<Signal<T>> {
        let x = self.mat(x)?;
        let mut g = DenseMatrix::zeros(self.rows, self.cols);
        for (&(i, j), &b) in self.positions.iter().zip(self.values.iter()) {
            g[(i, j)] = x[(i, j)] - b;
        }
        Ok(Signal::Matrix(g))
    }

    fn curvature(&self, d: &Signal<T>) -> Option<Result<T>> {
        Some(self.mat(d).map(|d| {
            let s = self.sample(d);
            s.dot(&s)
        }))
    }

    fn as_masked(&self) -> Option<&MaskedLeastSquares<T>> {
        Some(self)
    }
}

/// `f(x) = Σ log(1 + exp(−y_i ⟨φ_i, x⟩)) + (λ/2)‖x‖²` with labels `y_i = ±1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LogisticL2<T> {
    features: DenseMatrix<T>,
    labels: DenseVector<T>,
    lambda: T,
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{-z})` without overflow.
fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

impl<T: Scalar> LogisticL2<T> {
    pub fn new(features: DenseMatrix<T>, labels: DenseVector<T>, lambda: T) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} feature rows but {} labels",
                features.rows(),
                labels.len()
            )));
        }
        if labels.iter().any(|&y| y != T::one() && y != -T::one()) {
            return Err(Error::InvalidObjective("labels must be +1 or -1".into()));
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidObjective("lambda must be a nonnegative real".into()));
        }
        if !features.is_finite() {
            return Err(Error::NonFinite("logistic features"));
        }
        Ok(Self {
            features,
            labels,
            lambda,
        })
    }

    pub fn features(&self) -> &DenseMatrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &DenseVector<T> {
        &self.labels
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    fn margins<'a>(&self, x: &'a Signal<T>) -> Result<(DenseVector<T>, &'a DenseVector<T>)> {
        expect_shape(x, SignalShape::Vector(self.features.cols()))?;
        let x = x.as_vector().expect("shape checked");
        Ok((self.features.matvec(x)?, x))
    }
}

impl<T: Scalar> Objective<T> for LogisticL2<T> {
    fn shape(&self) -> SignalShape {
        SignalShape::Vector(self.features.cols())
    }

    fn value(&self, x: &Signal<T>) -> Result<T> {
        let (z, xv) = self.margins(x)?;
        let loss: T = z
            .iter()
            .zip(self.labels.iter())
            .map(|(&zi, &yi)| softplus(-yi * zi))
            .sum();
        Ok(loss + T::lit(0.5) * self.lambda * xv.dot(xv))
    }

    fn gradient(&self, x: &Signal<T>) -> Result<Signal<T>> {
        let (z, xv) = self.margins(x)?;
        // d/dz softplus(-y z) = -y σ(-y z)
        let w = DenseVector::from_vec_unchecked(
            z.iter()
                .zip(self.labels.iter())
                .map(|(&zi, &yi)| -yi * sigmoid(-yi * zi))
                .collect(),
        );
        let g = self.features.tr_matvec(&w)?.axpy(self.lambda, xv)?;
        Ok(Signal::Vector(g))
    }
}

/// Closed set of objectives a problem instance can carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case", tag = "kind")]
pub enum AnyObjective<T> {
    LeastSquares(LeastSquares<T>),
    MaskedLeastSquares(MaskedLeastSquares<T>),
    Logistic(LogisticL2<T>),
}

impl<T: Scalar> AnyObjective<T> {
    fn inner(&self) -> &dyn Objective<T> {
        match self {
            Self::LeastSquares(o) => o,
            Self::MaskedLeastSquares(o) => o,
            Self::Logistic(o) => o,
        }
    }
}

impl<T: Scalar> Objective<T> for AnyObjective<T> {
    fn shape(&self) -> SignalShape {
        self.inner().shape()
    }
    fn value(&self, x: &Signal<T>) -> Result<T> {
        self.inner().value(x)
    }
    fn gradient(&self, x: &Signal<T>) -> Result<Signal<T>> {
        self.inner().gradient(x)
    }
    fn curvature(&self, d: &Signal<T>) -> Option<Result<T>> {
        self.inner().curvature(d)
    }
    fn as_least_squares(&self) -> Option<&LeastSquares<T>> {
        self.inner().as_least_squares()
    }
    fn as_masked(&self) -> Option<&MaskedLeastSquares<T>> {
        self.inner().as_masked()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> DenseVector<f64> {
        DenseVector::from((0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>())
    }

    fn counterexample_instance() -> LeastSquares<f64> {
        LeastSquares::new(
            DenseMatrix::from_rows(&[
                vec![0.3816, -0.2726, 0.0077],
                vec![-0.1598, 1.9364, -0.3908],
            ])
            .unwrap(),
            DenseVector::from(vec![0.3870, -0.1514]),
        )
        .unwrap()
    }

    #[test]
    fn least_squares_zero_at_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = DenseMatrix::from_fn(5, 3, |_, _| rng.random_range(-1.0..1.0));
        let x = rand_vec(&mut rng, 3);
        let ls = LeastSquares::new(phi.clone(), phi.matvec(&x).unwrap()).unwrap();
        let xs = Signal::Vector(x);
        assert!(ls.value(&xs).unwrap() < 1e-28);
        assert!(ls.gradient(&xs).unwrap().norm() < 1e-14);
    }

    #[test]
    fn counterexample_residuals() {
        let ls = counterexample_instance();
        let f1 = ls.value(&Signal::Vector(vec![-1.7338, 0.0, 0.0].into())).unwrap();
        let f2 = ls.value(&Signal::Vector(vec![1.5415, 0.0, 0.0].into())).unwrap();
        assert!(((2.0 * f1).sqrt() - 1.1328).abs() < 5e-4);
        assert!(((2.0 * f2).sqrt() - 0.2224).abs() < 5e-4);
    }

    #[test]
    fn masked_gradient_zero_off_mask() {
        let obj = MaskedLeastSquares::new(2, 3, vec![(1, 2, 4.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(obj.positions(), &[(0, 0), (1, 2)]);
        let x = Signal::Matrix(DenseMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64));
        let g = obj.gradient(&x).unwrap();
        let g = g.as_matrix().unwrap();
        assert_eq!(g[(0, 1)], 0.0);
        assert_eq!(g[(1, 0)], 0.0);
        assert_eq!(g[(0, 0)], -1.0);
        assert_eq!(g[(1, 2)], 1.0);
        assert!((obj.value(&x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn masked_rejects_bad_positions() {
        assert!(MaskedLeastSquares::new(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)]).is_err());
        assert!(MaskedLeastSquares::new(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn full_mask_matches_dense_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let target = DenseMatrix::from_fn(3, 4, |_, _| rng.random_range(-1.0f64..1.0));
        let obs = (0..3)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, target[(i, j)]))
            .collect();
        let masked = MaskedLeastSquares::new(3, 4, obs).unwrap();
        let dense = LeastSquares::new(DenseMatrix::identity(12), DenseVector::from(target.as_slice().to_vec()))
            .unwrap();
        let x = DenseMatrix::from_fn(3, 4, |_, _| rng.random_range(-1.0..1.0));
        let xv = Signal::Vector(DenseVector::from(x.as_slice().to_vec()));
        let xm = Signal::Matrix(x);
        assert!((masked.value(&xm).unwrap() - dense.value(&xv).unwrap()).abs() < 1e-14);
        let gm = masked.gradient(&xm).unwrap();
        let gd = dense.gradient(&xv).unwrap();
        for (a, b) in gm.as_slice().iter().zip(gd.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn logistic_is_overflow_safe() {
        let obj = LogisticL2::new(
            DenseMatrix::from_rows(&[vec![1.0], vec![-1.0]]).unwrap(),
            DenseVector::from(vec![1.0f64, 1.0]),
            0.0,
        )
        .unwrap();
        let x = Signal::Vector(vec![1e4].into());
        let v = obj.value(&x).unwrap();
        assert!(v.is_finite() && (v - 1e4).abs() < 1e-9);
        assert!(obj.gradient(&x).unwrap().is_finite());
        assert!(LogisticL2::new(DenseMatrix::zeros(1, 1), DenseVector::from(vec![0.5]), 0.0).is_err());
        assert!(LogisticL2::new(DenseMatrix::zeros(1, 1), DenseVector::from(vec![1.0]), -1.0).is_err());
    }

    fn random_logistic(rng: &mut ChaCha8Rng) -> LogisticL2<f64> {
        let features = DenseMatrix::from_fn(6, 4, |_, _| rng.random_range(-1.0..1.0));
        let labels = DenseVector::from(
            (0..6)
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect::<Vec<_>>(),
        );
        LogisticL2::new(features, labels, 0.3).unwrap()
    }

    #[test]
    fn logistic_gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let obj = random_logistic(&mut rng);
        let x = rand_vec(&mut rng, 4);
        let g = obj.gradient(&Signal::Vector(x.clone())).unwrap();
        let h = 1e-5;
        for j in 0..4 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fd = (obj.value(&Signal::Vector(xp)).unwrap() - obj.value(&Signal::Vector(xm)).unwrap())
                / (2.0 * h);
            let gj = g.as_slice()[j];
            assert!((fd - gj).abs() <= 1e-5 * gj.abs().max(1.0), "{fd} vs {gj}");
        }
    }

    fn objectives(rng: &mut ChaCha8Rng) -> Vec<(AnyObjective<f64>, SignalShape)> {
        let phi = DenseMatrix::from_fn(7, 5, |_, _| rng.random_range(-1.0..1.0));
        let b = rand_vec(rng, 7);
        let obs = (0..12)
            .map(|t| (t / 4, (t * 7) % 5, rng.random_range(-1.0..1.0)))
            .collect::<Vec<_>>();
        vec![
            (AnyObjective::LeastSquares(LeastSquares::new(phi, b).unwrap()), SignalShape::Vector(5)),
            (
                AnyObjective::MaskedLeastSquares(MaskedLeastSquares::new(3, 5, obs).unwrap()),
                SignalShape::Matrix(3, 5),
            ),
            (AnyObjective::Logistic(random_logistic(rng)), SignalShape::Vector(4)),
        ]
    }

    fn random_signal(rng: &mut ChaCha8Rng, shape: SignalShape) -> Signal<f64> {
        match shape {
            SignalShape::Vector(n) => Signal::Vector(rand_vec(rng, n)),
            SignalShape::Matrix(r, c) => {
                Signal::Matrix(DenseMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0)))
            }
        }
    }

    #[test]
    fn directional_derivatives_and_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = 1e-5;
        for (obj, shape) in objectives(&mut rng) {
            for _ in 0..20 {
                let x = random_signal(&mut rng, shape);
                let v = random_signal(&mut rng, shape);
                let fd = (obj.value(&x.axpy(h, &v).unwrap()).unwrap()
                    - obj.value(&x.axpy(-h, &v).unwrap()).unwrap())
                    / (2.0 * h);
                let an = obj.gradient(&x).unwrap().dot(&v).unwrap();
                assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{fd} vs {an}");

                let y = random_signal(&mut rng, shape);
                let mid = x.axpy(1.0, &y).unwrap().scaled(0.5);
                let lhs = obj.value(&mid).unwrap();
                let rhs = 0.5 * obj.value(&x).unwrap() + 0.5 * obj.value(&y).unwrap();
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }

    #[test]
    fn restricted_gradient_is_masked_full_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = DenseMatrix::from_fn(8, 6, |_, _| rng.random_range(-1.0..1.0));
        let ls = LeastSquares::new(phi, rand_vec(&mut rng, 8)).unwrap();
        let model = StructureModel::sparse(6, 3).unwrap();
        let x = Signal::Vector(rand_vec(&mut rng, 6));
        let full = ls.gradient(&x).unwrap();
        assert_eq!(ls.gradient_restricted(&x, &model.full_support(), &model).unwrap(), full);
        assert_eq!(
            ls.gradient_restricted(&x, &model.empty_support(), &model).unwrap(),
            model.zero_signal()
        );
        let s = Support::Indices(vec![0, 2, 5]);
        let r = ls.gradient_restricted(&x, &s, &model).unwrap();
        for (i, (&a, &b)) in r.as_slice().iter().zip(full.as_slice()).enumerate() {
            assert_eq!(a, if [0, 2, 5].contains(&i) { b } else { 0.0 });
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let ls = counterexample_instance();
        assert!(ls.value(&Signal::Vector(vec![1.0, 2.0].into())).is_err());
        assert!(ls.gradient(&Signal::Matrix(DenseMatrix::zeros(3, 1))).is_err());
    }
}
