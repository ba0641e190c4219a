use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{extreme_eigs_sym, DenseMatrix};
use crate::scalar::Scalar;

/// Largest number of column subsets [`rip_exact`] will enumerate.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipMethod {
    ExactEnumeration,
    LambdaMaxSurrogate,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RipLevel<T> {
    pub alpha: T,
    pub beta: T,
}

/// Restricted isometry constants `α_s ‖x‖² ≤ ‖Φx‖² ≤ β_s ‖x‖²` per sparsity level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RipConstants<T> {
    pub levels: BTreeMap<usize, RipLevel<T>>,
    pub method: RipMethod,
}

impl<T: Scalar> RipConstants<T> {
    /// Checks `0 < α ≤ β` per level and monotonicity across levels.
    pub fn new(levels: BTreeMap<usize, RipLevel<T>>, method: RipMethod) -> Result<Self> {
        for (s, l) in &levels {
            if !(l.alpha > T::zero()) || l.alpha > l.beta || !l.beta.is_finite() {
                return Err(Error::Precondition(format!(
                    "level {s}: need 0 < alpha <= beta, got ({}, {})",
                    l.alpha, l.beta
                )));
            }
        }
        for ((s1, a), (s2, b)) in levels.iter().zip(levels.iter().skip(1)) {
            if b.alpha > a.alpha || b.beta < a.beta {
                return Err(Error::Precondition(format!(
                    "constants at level {s2} tighter than at level {s1}"
                )));
            }
        }
        Ok(Self { levels, method })
    }

    /// Constants at levels `2k` and `3k` computed by subset enumeration.
    pub fn enumerate(phi: &DenseMatrix<T>, k: usize) -> Result<Self> {
        let mut levels = BTreeMap::new();
        for s in [2 * k, 3 * k] {
            let (alpha, beta) = rip_exact(phi, s)?;
            levels.insert(s, RipLevel { alpha, beta });
        }
        Self::new(levels, RipMethod::ExactEnumeration)
    }

    pub fn level(&self, s: usize) -> Result<RipLevel<T>> {
        self.levels
            .get(&s)
            .copied()
            .ok_or_else(|| Error::Precondition(format!("no RIP constants at level {s}")))
    }

    /// `κ = β_s/α_s`.
    pub fn kappa(&self, s: usize) -> Result<T> {
        let l = self.level(s)?;
        Ok(l.beta / l.alpha)
    }

    /// `2√β₂ₖ/(α₃ₖ + β₃ₖ)`, the factor multiplying `‖ε‖` in the per-iteration bound.
    pub fn noise_coefficient(&self, k: usize) -> Result<T> {
        let b2 = self.level(2 * k)?.beta;
        let l3 = self.level(3 * k)?;
        Ok(T::lit(2.0) * b2.sqrt() / (l3.alpha + l3.beta))
    }
}

fn binomial(n: usize, s: usize) -> Option<u64> {
    let s = s.min(n - s);
    let mut acc: u128 = 1;
    for i in 0..s {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Advances `idx` to the next increasing sequence with entries below `n`.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let s = idx.len();
    for i in (0..s).rev() {
        if idx[i] < n - (s - i) {
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn sub_gram<T: Scalar>(gram: &DenseMatrix<T>, idx: &[usize]) -> DenseMatrix<T> {
    let s = idx.len();
    let mut data = Vec::with_capacity(s * s);
    for &i in idx {
        for &j in idx {
            data.push(gram[(i, j)]);
        }
    }
    DenseMatrix::from_vec(s, s, data).expect("finite Gram entries")
}

/// Exact `(α_s, β_s)`: extreme eigenvalues of `Φ_Iᵀ Φ_I` over every `s`-subset `I`.
///
/// Subsets are split across worker threads by their first index and combined
/// by min/max, so the result does not depend on the thread count.
pub fn rip_exact<T: Scalar>(phi: &DenseMatrix<T>, s: usize) -> Result<(T, T)> {
    let n = phi.cols();
    if s == 0 || s > n {
        return Err(Error::Precondition(format!("level s={s} must lie in 1..={n}")));
    }
    match binomial(n, s) {
        Some(c) if c <= ENUMERATION_BUDGET => {}
        _ => {
            return Err(Error::EnumerationBudget {
                n,
                s,
                budget: ENUMERATION_BUDGET,
            })
        }
    }
    let gram = phi.gram();
    let tol = T::lit(1e-12);
    let per_first = |first: usize| -> Result<(T, T)> {
        let mut idx: Vec<usize> = (first..first + s).collect();
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        loop {
            let (a, b) = extreme_eigs_sym(&sub_gram(&gram, &idx), tol)?;
            lo = lo.min(a);
            hi = hi.max(b);
            if s == 1 || !next_combination(&mut idx[1..], n) {
                break;
            }
        }
        Ok((lo, hi))
    };
    let parts: Vec<(T, T)> = (0..=n - s)
        .into_par_iter()
        .map(per_first)
        .collect::<Result<_>>()?;
    Ok(parts
        .into_iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        }))
}

/// `β̂ = λ_max(ΦᵀΦ)`, computed on whichever of `ΦᵀΦ`, `ΦΦᵀ` is smaller.
pub fn rip_surrogate<T: Scalar>(phi: &DenseMatrix<T>) -> Result<T> {
    let g = if phi.rows() < phi.cols() {
        phi.transpose().gram()
    } else {
        phi.gram()
    };
    if g.rows() == 0 {
        return Ok(T::zero());
    }
    Ok(extreme_eigs_sym(&g, T::lit(1e-10))?.1)
}

/// Step `μ = 2/(α + β)` minimizing `‖I − μM‖₂` over spectra in `[α, β]`, and
/// the resulting contraction `(β − α)/(β + α)`.
pub fn optimal_mu<T: Scalar>(alpha: T, beta: T) -> Result<(T, T)> {
    if !(alpha > T::zero()) || !(beta >= alpha) || !beta.is_finite() {
        return Err(Error::Precondition(format!(
            "need 0 < alpha <= beta, got ({alpha}, {beta})"
        )));
    }
    Ok((T::lit(2.0) / (alpha + beta), (beta - alpha) / (beta + alpha)))
}
