use serde::{Deserialize, Serialize};

use super::contraction::{contraction_matrix, tau_range, ContractionSystem, Mat2, TauRange};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Longest linear scan [`iteration_bound`] performs for negative momentum.
pub const MAX_SCAN: usize = 10_000_000;

/// Error envelope for the accelerated iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundReport<T> {
    pub system: ContractionSystem<T>,
    pub tau_range: TauRange<T>,
    pub iteration_bound: Option<usize>,
    /// Upper bounds on `‖x_T − x★‖` for `T = 0, 1, …`.
    pub error_curve: Vec<T>,
    pub noise_floor: T,
}

struct Envelope<T> {
    sys: ContractionSystem<T>,
    x_norm: T,
    /// `c‖ε‖`, the additive noise term of one iteration.
    noise: T,
}

impl<T: Scalar> Envelope<T> {
    fn new(xi: T, tau: T, x_norm: T, noise: T) -> Result<Self> {
        if !(x_norm >= T::zero()) || !(noise >= T::zero()) {
            return Err(Error::Precondition("norms must be nonnegative".into()));
        }
        let sys = contraction_matrix(xi, tau)?;
        if sys.rate() >= T::one() {
            return Err(Error::Precondition(format!(
                "|lambda1| = {} is not below 1",
                sys.rate()
            )));
        }
        if tau >= T::zero() {
            if sys.lambda1.abs() <= sys.lambda2.abs() {
                return Err(Error::Precondition("lambda1 and lambda2 coincide in modulus".into()));
            }
            if self_s(&sys) >= T::one() {
                return Err(Error::Precondition(format!(
                    "xi(1 + 2 tau) = {} is not below 1",
                    self_s(&sys)
                )));
            }
        }
        Ok(Self { sys, x_norm, noise })
    }

    fn closed_form(&self) -> bool {
        self.sys.tau >= T::zero()
    }

    /// `(head, floor)` with bound(T) = head·|λ1|^T + floor.
    fn closed_form_terms(&self) -> (T, T) {
        let s = self_s(&self.sys);
        let one = T::one();
        let gap = self.sys.lambda1.abs() - self.sys.lambda2.abs();
        let head = T::lit(2.0) / gap
            * ((one + s) * self.x_norm + (one + s) / (one - s) * self.noise);
        (head, self.noise / (one - s))
    }

    fn noise_floor(&self) -> T {
        if self.closed_form() {
            return self.closed_form_terms().1;
        }
        let inv = (Mat2::identity() - self.sys.a)
            .inverse()
            .expect("I - A invertible when |lambda1| < 1");
        inv.apply([self.noise, T::zero()])[0]
    }

    /// Bound for `T = 0..=horizon`.
    fn curve(&self, horizon: usize) -> Vec<T> {
        if self.closed_form() {
            let (head, floor) = self.closed_form_terms();
            let rate = self.sys.rate();
            (0..=horizon).map(|t| head * pow(rate, t) + floor).collect()
        } else {
            let mut y = [self.x_norm, self.x_norm];
            let mut out = Vec::with_capacity(horizon + 1);
            for _ in 0..=horizon {
                out.push(y[0]);
                y = self.step(y);
            }
            out
        }
    }

    /// One step of the unfolded recursion `y ← A y + [c‖ε‖, 0]`.
    fn step(&self, y: [T; 2]) -> [T; 2] {
        let v = self.sys.a.apply(y);
        [v[0] + self.noise, v[1]]
    }
}

fn pow<T: Scalar>(r: T, t: usize) -> T {
    r.powi(t.min(i32::MAX as usize) as i32)
}

fn self_s<T: Scalar>(sys: &ContractionSystem<T>) -> T {
    sys.xi * (T::one() + T::lit(2.0) * sys.tau)
}

/// Upper envelope on `‖x_T − x★‖` for `T = 0..=horizon`.
///
/// `noise_coef` is `2√β₂ₖ/(α₃ₖ + β₃ₖ)` (see
/// [`RipConstants::noise_coefficient`](super::RipConstants::noise_coefficient)).
/// For `τ ≥ 0` this is the closed form
/// `2|λ1|^T/(|λ1| − |λ2|)·((1 + s)‖x★‖ + (1 + s)/(1 − s)·c‖ε‖) + c‖ε‖/(1 − s)`
/// with `s = ξ(1 + 2τ)`; for `τ < 0` it is the first component of the
/// unfolded recursion `A^T y₀ + Σ_{i<T} A^i [c‖ε‖, 0]`, `y₀ = [‖x★‖, ‖x★‖]`.
pub fn error_bound<T: Scalar>(
    xi: T,
    tau: T,
    noise_coef: T,
    x_star_norm: T,
    eps_norm: T,
    horizon: usize,
) -> Result<BoundReport<T>> {
    let env = Envelope::new(xi, tau, x_star_norm, noise_coef * eps_norm)?;
    Ok(BoundReport {
        system: env.sys,
        tau_range: tau_range(xi)?,
        iteration_bound: None,
        error_curve: env.curve(horizon),
        noise_floor: env.noise_floor(),
    })
}

/// Smallest `T` at which the noiseless envelope drops to `zeta` or below.
///
/// For `τ ≥ 0` this is `⌈log(C/ζ)/log(1/|λ1|)⌉` with
/// `C = 2(1 + ξ(1 + 2τ))‖x★‖/(|λ1| − |λ2|)`, nudged by one step where
/// rounding puts it off the envelope; for `τ < 0` the unfolded recursion is scanned.
pub fn iteration_bound<T: Scalar>(xi: T, tau: T, x_star_norm: T, zeta: T) -> Result<usize> {
    if !(zeta > T::zero()) || !zeta.is_finite() {
        return Err(Error::Precondition(format!("zeta must be positive, got {zeta}")));
    }
    let env = Envelope::new(xi, tau, x_star_norm, T::zero())?;
    if env.closed_form() {
        let (head, _) = env.closed_form_terms();
        if head <= zeta {
            return Ok(0);
        }
        let rate = env.sys.rate();
        let at = |t: usize| head * pow(rate, t);
        let est = ((head / zeta).ln() / (T::one() / rate).ln()).ceil();
        let mut t = est.to_usize().unwrap_or(MAX_SCAN);
        while t > 0 && at(t - 1) <= zeta {
            t -= 1;
        }
        while at(t) > zeta {
            t += 1;
        }
        Ok(t)
    } else {
        let mut y = [x_star_norm, x_star_norm];
        for t in 0..=MAX_SCAN {
            if y[0] <= zeta {
                return Ok(t);
            }
            y = env.step(y);
        }
        Err(Error::NoConvergence("iteration bound scan"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_hand_value() {
        let r = error_bound(0.5f64, 0.0, 1.0, 1.0, 0.0, 10).unwrap();
        assert!((r.error_curve[10] - 6.0 * 0.5f64.powi(10)).abs() < 1e-15);
        assert_eq!(r.noise_floor, 0.0);
    }

    #[test]
    fn noiseless_collapse_form() {
        let (xi, tau) = (0.1f64, 0.2);
        let r = error_bound(xi, tau, 0.7, 2.0, 0.0, 50).unwrap();
        let (l1, l2) = (r.system.lambda1.abs(), r.system.lambda2.abs());
        for (t, &v) in r.error_curve.iter().enumerate() {
            let expect = 2.0 * l1.powi(t as i32) / (l1 - l2) * (1.0 + xi * (1.0 + 2.0 * tau)) * 2.0;
            assert!((v - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
        assert!(r.error_curve[50] < 1e-20);
    }

    #[test]
    fn noise_floor_value() {
        let r = error_bound(0.2f64, 0.1, 0.5, 1.0, 0.3, 400).unwrap();
        let floor = 0.5 * 0.3 / (1.0 - 0.2 * 1.2);
        assert!((r.noise_floor - floor).abs() < 1e-15);
        assert!((r.error_curve[400] - floor).abs() < 1e-12);
    }

    #[test]
    fn preconditions_are_named() {
        assert!(error_bound(0.94f64, 0.25, 1.0, 1.0, 0.0, 5).is_err());
        assert!(iteration_bound(0.94f64, 0.25, 1.0, 1e-6).is_err());
        assert!(iteration_bound(0.2f64, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn iteration_bound_matches_scan() {
        let r = error_bound(0.5f64, 0.0, 0.0, 1.0, 0.0, 200).unwrap();
        let scan = r.error_curve.iter().position(|&v| v <= 1e-6).unwrap();
        assert_eq!(iteration_bound(0.5f64, 0.0, 1.0, 1e-6).unwrap(), scan);
        assert_eq!(iteration_bound(0.5f64, 0.0, 1.0, 1e3).unwrap(), 0);
    }

    #[test]
    fn negative_tau_routes_through_recursion() {
        let (xi, tau) = (0.2f64, -0.1);
        let r = error_bound(xi, tau, 0.5, 1.0, 0.2, 300).unwrap();
        let sys = contraction_matrix(xi, tau).unwrap();
        // explicit sum of powers
        let mut y = [0.0, 0.0];
        let mut p = Mat2::identity();
        for _ in 0..7 {
            let q = p.apply([0.1, 0.0]);
            y = [y[0] + q[0], y[1] + q[1]];
            p = p * sys.a;
        }
        let head = p.apply([1.0, 1.0]);
        assert!((r.error_curve[7] - (head[0] + y[0])).abs() < 1e-14);
        assert!((r.error_curve[300] - r.noise_floor).abs() < 1e-12);
        let t = iteration_bound(xi, tau, 1.0, 1e-8).unwrap();
        let noiseless = error_bound(xi, tau, 0.0, 1.0, 0.0, t).unwrap().error_curve;
        assert!(noiseless[t] <= 1e-8 && noiseless[t - 1] > 1e-8);
    }
}
