use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// A 2x2 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Self([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> T {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: T) -> Self {
        let m = self.0;
        Self::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.0.iter().flatten().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn apply(&self, v: [T; 2]) -> [T; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let m = self.0;
        Some(Self::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(T::one() / d))
    }
}

impl<T: Scalar> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Scalar> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// `ξ = 2(κ − 1)/(κ + 1)` for the restricted condition number `κ = β₃ₖ/α₃ₖ`.
pub fn xi_of<T: Scalar>(kappa: T) -> Result<T> {
    if !kappa.is_finite() || kappa <= T::one() {
        return Err(Error::Precondition(format!("kappa must exceed 1, got {kappa}")));
    }
    Ok(T::lit(2.0) * (kappa - T::one()) / (kappa + T::one()))
}

/// The formula `1 − α/β` printed alongside some plots; reported for reference only.
pub fn xi_one_minus_ratio<T: Scalar>(alpha: T, beta: T) -> T {
    T::one() - alpha / beta
}

/// The coupled error recursion `[e_{i+1}, e_i] ≤ A [e_i, e_{i−1}]` and its spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ContractionSystem<T> {
    pub xi: T,
    pub tau: T,
    pub a: Mat2<T>,
    /// Eigenvalue of largest modulus.
    pub lambda1: T,
    pub lambda2: T,
    /// Discriminant `Tr(A)² − 4 det(A)`.
    pub delta: T,
}

/// Builds `A = [[ξ|1+τ|, ξ|τ|], [1, 0]]` and its eigenvalues.
pub fn contraction_matrix<T: Scalar>(xi: T, tau: T) -> Result<ContractionSystem<T>> {
    if !xi.is_finite() || !tau.is_finite() {
        return Err(Error::NonFinite("contraction parameters"));
    }
    if xi <= T::zero() {
        return Err(Error::Precondition(format!("xi must be positive, got {xi}")));
    }
    let p = xi * (T::one() + tau).abs();
    let q = xi * tau.abs();
    let a = Mat2::new(p, q, T::one(), T::zero());
    let delta = p * p + T::lit(4.0) * q;
    let lambda1 = (p + delta.sqrt()) / T::lit(2.0);
    // det(A) = −q; dividing avoids the cancellation in (p − √Δ)/2
    let lambda2 = if lambda1 > T::zero() {
        -q / lambda1
    } else {
        (p - delta.sqrt()) / T::lit(2.0)
    };
    Ok(ContractionSystem {
        xi,
        tau,
        a,
        lambda1,
        lambda2,
        delta,
    })
}

impl<T: Scalar> ContractionSystem<T> {
    /// Spectral radius `|λ1|`.
    pub fn rate(&self) -> T {
        self.lambda1.abs()
    }
}

/// Real eigenvalues of a 2x2 matrix, larger modulus first.
pub fn eigenvalues2<T: Scalar>(a: &Mat2<T>) -> Result<(T, T)> {
    let tr = a.trace();
    let det = a.det();
    let delta = tr * tr - T::lit(4.0) * det;
    let scale = (tr * tr).max(det.abs()).max(T::min_positive_value());
    if delta < T::zero() {
        if -delta <= T::lit(64.0) * T::epsilon() * scale {
            let l = tr / T::lit(2.0);
            return Ok((l, l));
        }
        return Err(Error::ComplexEigenvalues(delta.to_f64().unwrap_or(f64::NAN)));
    }
    let sq = delta.sqrt();
    let big = if tr >= T::zero() {
        (tr + sq) / T::lit(2.0)
    } else {
        (tr - sq) / T::lit(2.0)
    };
    let small = if big != T::zero() {
        det / big
    } else {
        T::zero()
    };
    Ok((big, small))
}

/// `A^i` in closed form from the eigenvalues of `A`.
///
/// Distinct eigenvalues use
/// `A^i = (λ1^i − λ2^i)/(λ1 − λ2) · A − (λ2 λ1^i − λ1 λ2^i)/(λ1 − λ2) · I`;
/// a repeated eigenvalue `λ` uses `A^i = λ^i I + i λ^{i−1} (A − λI)`.
pub fn matrix_power<T: Scalar>(a: &Mat2<T>, i: u32) -> Result<Mat2<T>> {
    if i == 0 {
        return Ok(Mat2::identity());
    }
    let (l1, l2) = eigenvalues2(a)?;
    let id = Mat2::identity();
    let gap = (l1 - l2).abs();
    let n = i as i32;
    if gap > T::lit(1e-9) * (l1.abs() + l2.abs() + T::one()) {
        let p1 = l1.powi(n);
        let p2 = l2.powi(n);
        let c_a = (p1 - p2) / (l1 - l2);
        let c_i = (l2 * p1 - l1 * p2) / (l1 - l2);
        Ok(a.scale(c_a) - id.scale(c_i))
    } else {
        let l = (l1 + l2) / T::lit(2.0);
        let lead = T::from_usize_lossy(i as usize) * l.powi(n - 1);
        Ok(id.scale(l.powi(n)) + (*a - id.scale(l)).scale(lead))
    }
}

/// Admissible momentum interval `|τ| ≤ t★`, or nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case", tag = "kind")]
pub enum TauRange<T> {
    Empty,
    Interval { lo: T, hi: T },
}

impl<T: Scalar> TauRange<T> {
    pub fn contains(&self, tau: T) -> bool {
        match *self {
            Self::Empty => false,
            Self::Interval { lo, hi } => lo <= tau && tau <= hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    pub fn half_width(&self) -> Option<T> {
        match *self {
            Self::Empty => None,
            Self::Interval { hi, .. } => Some(hi),
        }
    }
}

/// `t★ = (1 − φ√ξ)/(φ√ξ)`; the range is `[−t★, t★]` when `φ√ξ ≤ 1`.
///
/// At `ξ = φ⁻²` (up to a few ulps) the range collapses to `{0}`.
pub fn tau_range<T: Scalar>(xi: T) -> Result<TauRange<T>> {
    if !xi.is_finite() || xi <= T::zero() {
        return Err(Error::Precondition(format!("xi must be positive, got {xi}")));
    }
    let g = T::lit(PHI) * xi.sqrt();
    let gap = T::one() - g;
    if gap.abs() <= T::lit(4.0) * T::epsilon() {
        return Ok(TauRange::Interval {
            lo: T::zero(),
            hi: T::zero(),
        });
    }
    if gap < T::zero() {
        return Ok(TauRange::Empty);
    }
    let t = gap / g;
    Ok(TauRange::Interval { lo: -t, hi: t })
}

/// `B = (I − A)⁻¹ = Σ A^i` in the closed form valid for `τ ≥ 0`, `ξ(1 + 2τ) < 1`.
pub fn geometric_sum<T: Scalar>(xi: T, tau: T) -> Result<Mat2<T>> {
    if !xi.is_finite() || xi <= T::zero() {
        return Err(Error::Precondition(format!("xi must be positive, got {xi}")));
    }
    if !(tau >= T::zero()) {
        return Err(Error::Precondition(format!("tau must be nonnegative, got {tau}")));
    }
    let den = T::one() - xi * (T::one() + T::lit(2.0) * tau);
    if den <= T::zero() {
        return Err(Error::Precondition(format!(
            "xi(1 + 2 tau) = {} must be below 1",
            T::one() - den
        )));
    }
    Ok(Mat2::new(T::one(), xi * tau, T::one(), T::one() - xi * (T::one() + tau)).scale(T::one() / den))
}
