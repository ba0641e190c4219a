//! Seeded synthetic problem generators, evaluation metrics and instance files.
//!
//! All randomness comes from ChaCha8 seeded with the instance seed; each
//! matrix or vector draw uses its own stream (see the `STREAM_*` constants),
//! so adding a draw never perturbs the others. Samples are drawn in `f64` and
//! rounded to the working precision.

mod io;
mod metrics;

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

pub use io::{load_instance, save_instance, FileModel};
pub use metrics::{auc, evaluate, evaluate_estimate, train_loglik, MetricsReport};

use crate::error::{Error, Result};
use crate::models::{Signal, StructureModel};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::objectives::{AnyObjective, LeastSquares, MaskedLeastSquares, Objective};
use crate::scalar::Scalar;

pub const STREAM_DESIGN: u64 = 1;
pub const STREAM_SUPPORT: u64 = 2;
pub const STREAM_VALUES: u64 = 3;
pub const STREAM_NOISE: u64 = 4;
pub const STREAM_SPLIT: u64 = 5;
pub const STREAM_MASK: u64 = 6;
/// The test half of a split draws its noise from this stream.
pub const STREAM_NOISE_TEST: u64 = 7;

/// How an instance was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub generator: String,
    pub params: serde_json::Value,
    pub seed: u64,
}

/// An objective, its structure model, and (for synthetic data) the planted truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<T: Scalar> {
    pub objective: AnyObjective<T>,
    pub model: StructureModel,
    pub truth: Option<Signal<T>>,
    /// `ε` with `b = Φx★ + ε`.
    pub noise: Option<DenseVector<T>>,
    pub seed: u64,
    pub descriptor: Descriptor,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn least_squares(&self) -> Option<&LeastSquares<T>> {
        self.objective.as_least_squares()
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normals<T: Scalar>(r: &mut ChaCha8Rng, count: usize) -> Vec<T> {
    (0..count)
        .map(|_| T::lit(r.sample::<f64, _>(StandardNormal)))
        .collect()
}

fn normal_matrix<T: Scalar>(seed: u64, stream: u64, rows: usize, cols: usize) -> DenseMatrix<T> {
    let mut r = rng(seed, stream);
    DenseMatrix::from_vec(rows, cols, normals(&mut r, rows * cols)).expect("finite normals")
}

/// A `k`-sparse unit vector with normal nonzeros on a uniform random support.
fn planted_unit_sparse<T: Scalar>(seed: u64, n: usize, k: usize) -> DenseVector<T> {
    let mut sr = rng(seed, STREAM_SUPPORT);
    let mut support = index::sample(&mut sr, n, k).into_vec();
    support.sort_unstable();
    let mut vr = rng(seed, STREAM_VALUES);
    let vals: Vec<T> = normals(&mut vr, k);
    let mut x = DenseVector::zeros(n);
    for (&i, &v) in support.iter().zip(&vals) {
        x[i] = v;
    }
    let nrm = x.norm();
    x.scaled(T::one() / nrm)
}

/// `b = Φx★ + ε`, returning `b` and the realized `ε = b − Φx★` so the identity
/// holds exactly in floating point.
fn observe<T: Scalar>(
    phi: &DenseMatrix<T>,
    x: &DenseVector<T>,
    raw_noise: &DenseVector<T>,
) -> Result<(DenseVector<T>, DenseVector<T>)> {
    let clean = phi.matvec(x)?;
    let b = clean.axpy(T::one(), raw_noise)?;
    let eps = b.sub(&clean)?;
    Ok((b, eps))
}

fn least_squares_instance<T: Scalar>(
    phi: DenseMatrix<T>,
    x: DenseVector<T>,
    raw_noise: DenseVector<T>,
    k: usize,
    descriptor: Descriptor,
) -> Result<ProblemInstance<T>> {
    let (b, eps) = observe(&phi, &x, &raw_noise)?;
    let n = phi.cols();
    Ok(ProblemInstance {
        objective: AnyObjective::LeastSquares(LeastSquares::new(phi, b)?),
        model: StructureModel::sparse(n, k)?,
        truth: Some(Signal::Vector(x)),
        noise: Some(eps),
        seed: descriptor.seed,
        descriptor,
    })
}

/// Gaussian design with i.i.d. standard normal entries and a planted
/// unit-norm `k`-sparse signal, observed with noise of standard deviation `noise_sigma`.
pub fn gen_iid_gaussian<T: Scalar>(
    n: usize,
    m: usize,
    k: usize,
    noise_sigma: f64,
    seed: u64,
) -> Result<ProblemInstance<T>> {
    if n == 0 || m == 0 || k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "need n, m >= 1 and 1 <= k <= n, got n={n} m={m} k={k}"
        )));
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidParams(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let phi = normal_matrix(seed, STREAM_DESIGN, m, n);
    let x = planted_unit_sparse(seed, n, k);
    let mut nr = rng(seed, STREAM_NOISE);
    let raw = DenseVector::from(normals::<T>(&mut nr, m)).scaled(T::lit(noise_sigma));
    let descriptor = Descriptor {
        generator: "iid".into(),
        params: json!({ "n": n, "m": m, "k": k, "noise_sigma": noise_sigma }),
        seed,
    };
    least_squares_instance(phi, x, raw, k, descriptor)
}

/// Parameters of the correlated-design generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ar1Params {
    pub n: usize,
    /// Rows before the train/test split.
    pub m_total: usize,
    pub k: usize,
    /// Lag-one correlation between neighbouring features.
    pub rho: f64,
    /// `‖Φx★‖²/‖ε‖²`, enforced exactly on each half.
    pub snr: f64,
    pub seed: u64,
}

impl Default for Ar1Params {
    fn default() -> Self {
        Self {
            n: 200,
            m_total: 800,
            k: 20,
            rho: 0.4,
            snr: 10.0,
            seed: 0,
        }
    }
}

fn unit_columns<T: Scalar>(m: &mut DenseMatrix<T>) {
    let (rows, cols) = m.shape();
    for j in 0..cols {
        let nrm = m.column(j).norm();
        if nrm > T::zero() {
            for i in 0..rows {
                let v = m[(i, j)] / nrm;
                m[(i, j)] = v;
            }
        }
    }
}

/// Rows drawn from a stationary AR(1) process across features
/// (`e_j = ρ e_{j−1} + √(1−ρ²) z_j`), split 50-50 into train and test rows by a
/// seeded permutation; each half then gets unit-norm columns and noise scaled
/// to the requested signal-to-noise ratio. Both halves share `x★`.
pub fn gen_ar1<T: Scalar>(p: &Ar1Params) -> Result<(ProblemInstance<T>, ProblemInstance<T>)> {
    if p.n == 0 || p.k == 0 || p.k > p.n || p.m_total < 2 {
        return Err(Error::InvalidParams(format!(
            "need n >= 1, 1 <= k <= n and m_total >= 2, got n={} k={} m_total={}",
            p.n, p.k, p.m_total
        )));
    }
    if !(p.rho.abs() < 1.0) {
        return Err(Error::InvalidParams(format!("|rho| must be below 1, got {}", p.rho)));
    }
    if !(p.snr > 0.0) || !p.snr.is_finite() {
        return Err(Error::InvalidParams(format!("snr must be positive, got {}", p.snr)));
    }
    let mut dr = rng(p.seed, STREAM_DESIGN);
    let innov = (1.0 - p.rho * p.rho).sqrt();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(p.m_total);
    for _ in 0..p.m_total {
        let mut row = Vec::with_capacity(p.n);
        let mut prev: f64 = dr.sample(StandardNormal);
        row.push(prev);
        for _ in 1..p.n {
            let z: f64 = dr.sample(StandardNormal);
            prev = p.rho * prev + innov * z;
            row.push(prev);
        }
        rows.push(row);
    }
    let mut order: Vec<usize> = (0..p.m_total).collect();
    let mut sr = rng(p.seed, STREAM_SPLIT);
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut sr);
    let half = p.m_total / 2;
    let x = planted_unit_sparse::<T>(p.seed, p.n, p.k);

    let build = |idx: &[usize], stream: u64, part: &str| -> Result<ProblemInstance<T>> {
        let data: Vec<T> = idx
            .iter()
            .flat_map(|&i| rows[i].iter().map(|&v| T::lit(v)))
            .collect();
        let mut phi = DenseMatrix::from_vec(idx.len(), p.n, data)?;
        unit_columns(&mut phi);
        let clean = phi.matvec(&x)?;
        let mut nr = rng(p.seed, stream);
        let z = DenseVector::from(normals::<T>(&mut nr, idx.len()));
        let scale = clean.norm() / (T::lit(p.snr).sqrt() * z.norm());
        let descriptor = Descriptor {
            generator: "ar1".into(),
            params: json!({
                "n": p.n, "m_total": p.m_total, "k": p.k, "rho": p.rho, "snr": p.snr,
                "part": part,
            }),
            seed: p.seed,
        };
        least_squares_instance(phi, x.clone(), z.scaled(scale), p.k, descriptor)
    };
    Ok((
        build(&order[..half], STREAM_NOISE, "train")?,
        build(&order[half..], STREAM_NOISE_TEST, "test")?,
    ))
}

/// Rank-`r` target `X★ = L R` with standard normal factors, observed on
/// `⌊observe_frac·p·n⌋` uniformly random positions.
pub fn gen_matrix_completion<T: Scalar>(
    p: usize,
    n: usize,
    r: usize,
    observe_frac: f64,
    seed: u64,
) -> Result<ProblemInstance<T>> {
    if p == 0 || n == 0 || r == 0 || r > p.min(n) {
        return Err(Error::InvalidParams(format!(
            "need 1 <= r <= min(p, n), got p={p} n={n} r={r}"
        )));
    }
    if !(observe_frac > 0.0 && observe_frac <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "observe fraction must lie in (0, 1], got {observe_frac}"
        )));
    }
    let m_obs = (observe_frac * (p * n) as f64).floor() as usize;
    if m_obs == 0 {
        return Err(Error::InvalidParams("observe fraction leaves no entries".into()));
    }
    let left: DenseMatrix<T> = normal_matrix(seed, STREAM_DESIGN, p, r);
    let right: DenseMatrix<T> = normal_matrix(seed, STREAM_VALUES, r, n);
    let target = left.matmul(&right)?;
    let mut mr = rng(seed, STREAM_MASK);
    let mut picks = index::sample(&mut mr, p * n, m_obs).into_vec();
    picks.sort_unstable();
    let obs = picks
        .iter()
        .map(|&t| (t / n, t % n, target[(t / n, t % n)]))
        .collect();
    Ok(ProblemInstance {
        objective: AnyObjective::MaskedLeastSquares(MaskedLeastSquares::new(p, n, obs)?),
        model: StructureModel::low_rank(p, n, r)?,
        truth: Some(Signal::Matrix(target)),
        noise: None,
        seed,
        descriptor: Descriptor {
            generator: "completion".into(),
            params: json!({ "p": p, "n": n, "r": r, "observe_frac": observe_frac }),
            seed,
        },
    })
}
