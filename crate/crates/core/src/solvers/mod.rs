//! Accelerated iterative hard thresholding and its momentum-free special case.
//!
//! Each iteration expands the momentum support by the top atoms of the
//! gradient outside it, takes a gradient step restricted to that set, projects
//! back onto the model and extrapolates:
//!
//! ```text
//! T_i     = supp(Π_k(∇_{U_i^c} f(u_i))) ∪ U_i
//! x_{i+1} = Π_k(u_i − μ ∇_{T_i} f(u_i))
//! u_{i+1} = x_{i+1} + τ (x_{i+1} − x_i)
//! ```

mod config;
mod debias;
mod trace;

use std::time::Instant;

pub use config::{SolverConfig, StepSize};
pub use debias::{debias, line_search_tau};
pub use trace::{
    decode_support, encode_support, parse_csv, write_csv, IterationRecord, SolverTrace,
    Termination, TraceRow,
};

use crate::analysis::{rip_surrogate, tau_range, xi_of};
use crate::error::{Error, Result};
use crate::models::{
    active_support, project_with_support, restrict, restrict_complement, support_of, union, Signal,
    StructureModel, Support,
};
use crate::objectives::Objective;
use crate::scalar::Scalar;

/// Divergence threshold relative to `1 + f(x₀)`.
pub const BLOW_UP: f64 = 1e12;

/// `T = supp(Π_k(∇_{U^c} f(u))) ∪ U`.
pub fn support_expansion<T: Scalar, O: Objective<T> + ?Sized>(
    u: &Signal<T>,
    obj: &O,
    model: &StructureModel,
    current: &Support<T>,
) -> Result<Support<T>> {
    expand(&obj.gradient(u)?, model, current)
}

fn expand<T: Scalar>(
    grad: &Signal<T>,
    model: &StructureModel,
    current: &Support<T>,
) -> Result<Support<T>> {
    let outside = restrict_complement(grad, current, model)?;
    union(&support_of(&outside, model)?, current)
}

/// Atoms of the momentum point `u`, kept to at most `2k` (the low-rank case can
/// pick up numerically tiny extra directions).
fn momentum_support<T: Scalar>(u: &Signal<T>, model: &StructureModel) -> Result<Support<T>> {
    let s = active_support(u, model)?;
    let cap = 2 * model.budget();
    if s.cardinality() <= cap || !matches!(model, StructureModel::LowRank { .. }) {
        return Ok(s);
    }
    support_of(u, &model.with_budget(cap)?)
}

fn resolve_step<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    step: StepSize<T>,
) -> Result<Option<T>> {
    match step {
        StepSize::Fixed(mu) => Ok(Some(mu)),
        StepSize::Auto => {
            let ls = obj.as_least_squares().ok_or_else(|| {
                Error::InvalidConfig("automatic step size needs a least-squares objective".into())
            })?;
            let beta = rip_surrogate(ls.phi())?;
            if !(beta > T::zero()) {
                return Err(Error::InvalidConfig("design has no positive curvature".into()));
            }
            Ok(Some(T::one() / beta))
        }
        StepSize::LineSearch => Ok(None),
    }
}

fn momentum_warning<T: Scalar>(config: &SolverConfig<T>) -> Result<Option<String>> {
    let Some(kappa) = config.kappa else {
        return Ok(None);
    };
    let range = tau_range(xi_of(kappa)?)?;
    if range.contains(config.tau) {
        return Ok(None);
    }
    Ok(Some(format!(
        "tau = {} is outside the guaranteed range {:?} for kappa = {kappa}",
        config.tau, range
    )))
}

/// Accelerated IHT from `x₀ = u₀ = 0`.
///
/// `truth`, when given, is used only to record `‖x_i − x★‖`.
pub fn acc_iht<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    model: &StructureModel,
    config: &SolverConfig<T>,
    truth: Option<&Signal<T>>,
) -> Result<SolverTrace<T>> {
    let start = Instant::now();
    config.validate()?;
    model.validate()?;
    if obj.shape() != model.shape() {
        return Err(Error::Dimension(format!(
            "objective variable {:?} but model {:?}",
            obj.shape(),
            model.shape()
        )));
    }
    if let Some(t) = truth {
        model.check_shape(t)?;
    }
    if config.debias && obj.as_least_squares().is_none() && obj.as_masked().is_none() {
        return Err(Error::InvalidConfig("debias needs a least-squares objective".into()));
    }
    if config.step == StepSize::LineSearch && obj.curvature(&model.zero_signal()).is_none() {
        return Err(Error::InvalidConfig("line search needs a quadratic objective".into()));
    }
    let mu = resolve_step(obj, config.step)?;
    let mut warnings = Vec::new();
    if let Some(w) = momentum_warning(config)? {
        log::warn!("{w}");
        warnings.push(w);
    }

    let k = model.budget();
    let tau = config.tau;
    let dist = |x: &Signal<T>| -> Result<Option<T>> {
        truth.map(|t| x.sub(t).map(|d| d.norm())).transpose()
    };

    let mut x = model.zero_signal::<T>();
    let mut u = x.clone();
    let mut u_support = model.empty_support::<T>();
    let f0 = obj.value(&x)?;
    if !f0.is_finite() {
        return Err(Error::NonFinite("objective at the starting point"));
    }
    let blow_up = T::lit(BLOW_UP) * (T::one() + f0.abs());
    let mut records = vec![IterationRecord {
        iter: 0,
        support: u_support.summary(),
        f_value: f0,
        step_norm: T::zero(),
        dist_to_truth: dist(&x)?,
        x: x.clone(),
    }];
    let mut debias_skipped = Vec::new();
    let mut termination = Termination::MaxIterations;

    for iter in 1..=config.max_iter {
        let grad = obj.gradient(&u)?;
        if !grad.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        let t_set = expand(&grad, model, &u_support)?;
        debug_assert!(t_set.cardinality() <= 3 * k);
        let g_t = restrict(&grad, &t_set, model)?;
        let step = match mu {
            Some(mu) => mu,
            None => {
                let gg = g_t.dot(&g_t)?;
                let curv = obj.curvature(&g_t).expect("checked quadratic")?;
                if curv > T::zero() {
                    gg / curv
                } else {
                    T::zero()
                }
            }
        };
        let u_bar = u.axpy(-step, &g_t)?;
        let (mut x_new, supp) = project_with_support(&u_bar, model)?;
        if config.debias {
            let (refit, applied) = debias(&x_new, obj, model)?;
            if !applied {
                debias_skipped.push(iter);
            }
            x_new = refit;
        }
        let f = obj.value(&x_new)?;
        if !f.is_finite() || !x_new.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        let diff = x_new.sub(&x)?;
        let step_norm = diff.norm();
        records.push(IterationRecord {
            iter,
            support: supp.summary(),
            f_value: f,
            step_norm,
            dist_to_truth: dist(&x_new)?,
            x: x_new.clone(),
        });
        if f > blow_up {
            termination = Termination::Diverged;
            break;
        }
        u = x_new.axpy(tau, &diff)?;
        u_support = momentum_support(&u, model)?;
        debug_assert!(u_support.cardinality() <= 2 * k);
        let converged = step_norm <= config.eta * x_new.norm();
        x = x_new;
        if converged {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolverTrace {
        records,
        termination,
        config: config.clone(),
        mu,
        warnings,
        debias_skipped,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Plain IHT: [`acc_iht`] with `τ = 0`.
pub fn iht<T: Scalar, O: Objective<T> + ?Sized>(
    obj: &O,
    model: &StructureModel,
    config: &SolverConfig<T>,
    truth: Option<&Signal<T>>,
) -> Result<SolverTrace<T>> {
    acc_iht(obj, model, &config.with_tau(T::zero()), truth)
}
