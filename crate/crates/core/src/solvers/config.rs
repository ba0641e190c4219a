use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the gradient step `μ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", rename_all = "snake_case")]
pub enum StepSize<T> {
    /// A constant step.
    Fixed(T),
    /// `1/β̂` with `β̂ = λ_max(ΦᵀΦ)`; least squares only.
    Auto,
    /// Exact minimization along the restricted gradient each iteration:
    /// `μ_i = ‖g‖²/⟨g, ∇²f g⟩`; quadratic objectives only.
    LineSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct SolverConfig<T> {
    /// Momentum `τ`.
    pub tau: T,
    pub step: StepSize<T>,
    /// Relative tolerance: stop once `‖x_i − x_{i−1}‖ ≤ η‖x_i‖`.
    pub eta: T,
    pub max_iter: usize,
    /// Least-squares refit on the support after every projection.
    pub debias: bool,
    /// Restricted condition number; when given, a momentum outside the
    /// guaranteed range is reported as a warning.
    pub kappa: Option<T>,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tau: T::lit(0.25),
            step: StepSize::Auto,
            eta: T::lit(1e-7),
            max_iter: 10_000,
            debias: false,
            kappa: None,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.tau.is_finite() {
            return Err(Error::InvalidConfig("tau must be finite".into()));
        }
        if !(self.eta > T::zero()) || !self.eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if let StepSize::Fixed(mu) = self.step {
            if !(mu > T::zero()) || !mu.is_finite() {
                return Err(Error::InvalidConfig(format!("step size must be positive, got {mu}")));
            }
        }
        if let Some(k) = self.kappa {
            if !(k > T::one()) || !k.is_finite() {
                return Err(Error::InvalidConfig(format!("kappa must exceed 1, got {k}")));
            }
        }
        Ok(())
    }

    pub fn with_tau(&self, tau: T) -> Self {
        Self {
            tau,
            ..self.clone()
        }
    }
}
