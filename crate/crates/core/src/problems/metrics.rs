use serde::{Deserialize, Serialize};

use super::ProblemInstance;
use crate::error::{Error, Result};
use crate::models::{active_support, Signal};
use crate::objectives::{softplus, AnyObjective};
use crate::scalar::Scalar;
use crate::solvers::SolverTrace;

/// Quality of an estimate against a problem's planted truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// `1 − ‖b − Φx̂‖²/‖b − b̄‖²` on held-out rows.
    pub r2_test: Option<f64>,
    /// Ranking of entries by `|x̂_j|` against the true support.
    pub support_auc: Option<f64>,
    pub train_loglik: f64,
    pub exact_support_match: Option<bool>,
    /// `‖x̂ − x★‖ / ‖x★‖`.
    pub relative_error: f64,
}

/// Metrics for the final iterate of `trace`.
pub fn evaluate<T: Scalar>(
    trace: &SolverTrace<T>,
    instance: &ProblemInstance<T>,
    test: Option<&ProblemInstance<T>>,
) -> Result<MetricsReport> {
    evaluate_estimate(trace.final_x(), instance, test)
}

pub fn evaluate_estimate<T: Scalar>(
    x: &Signal<T>,
    instance: &ProblemInstance<T>,
    test: Option<&ProblemInstance<T>>,
) -> Result<MetricsReport> {
    let truth = instance
        .truth
        .as_ref()
        .ok_or(Error::MissingTruth("evaluation"))?;
    instance.model.check_shape(x)?;
    let tn = truth.norm().to_f64().unwrap_or(f64::NAN);
    let err = x.sub(truth)?.norm().to_f64().unwrap_or(f64::NAN);
    let relative_error = if tn > 0.0 { err / tn } else { err };

    let (support_auc, exact_support_match) = match (x, truth) {
        (Signal::Vector(v), Signal::Vector(t)) => {
            let scores: Vec<f64> = v.iter().map(|a| a.abs().to_f64().unwrap_or(0.0)).collect();
            let labels: Vec<bool> = t.iter().map(|&a| a != T::zero()).collect();
            let exact = active_support(x, &instance.model)? == active_support(truth, &instance.model)?;
            (auc(&scores, &labels), Some(exact))
        }
        _ => (None, None),
    };

    let r2_test = match test {
        Some(t) => Some(r_squared(x, t)?),
        None => None,
    };

    Ok(MetricsReport {
        r2_test,
        support_auc,
        train_loglik: train_loglik(&instance.objective, x)?,
        exact_support_match,
        relative_error,
    })
}

fn r_squared<T: Scalar>(x: &Signal<T>, test: &ProblemInstance<T>) -> Result<f64> {
    let ls = test
        .least_squares()
        .ok_or_else(|| Error::InvalidObjective("held-out R² needs a least-squares instance".into()))?;
    let resid = ls.residual(x)?;
    let b = ls.b();
    let mean = b.iter().copied().sum::<T>() / T::from_usize_lossy(b.len());
    let tss: T = b.iter().map(|&v| (v - mean) * (v - mean)).sum();
    let rss = resid.dot(&resid);
    Ok((T::one() - rss / tss).to_f64().unwrap_or(f64::NAN))
}

/// Log-likelihood of the training data at `x`: unit-variance Gaussian
/// residuals for least-squares objectives, Bernoulli for logistic (without
/// the ridge penalty).
pub fn train_loglik<T: Scalar>(obj: &AnyObjective<T>, x: &Signal<T>) -> Result<f64> {
    let ln2pi = (2.0 * std::f64::consts::PI).ln();
    let gaussian = |rss: T, m: usize| -0.5 * rss.to_f64().unwrap_or(f64::NAN) - 0.5 * m as f64 * ln2pi;
    match obj {
        AnyObjective::LeastSquares(ls) => {
            let r = ls.residual(x)?;
            Ok(gaussian(r.dot(&r), r.len()))
        }
        AnyObjective::MaskedLeastSquares(ms) => {
            let m = x
                .as_matrix()
                .ok_or_else(|| Error::Dimension("masked objective expects a matrix".into()))?;
            let r = ms.sample(m).sub(ms.values())?;
            Ok(gaussian(r.dot(&r), r.len()))
        }
        AnyObjective::Logistic(lg) => {
            let v = x
                .as_vector()
                .ok_or_else(|| Error::Dimension("logistic objective expects a vector".into()))?;
            let z = lg.features().matvec(v)?;
            let nll: T = z
                .iter()
                .zip(lg.labels().iter())
                .map(|(&zi, &yi)| softplus(-yi * zi))
                .sum();
            Ok(-nll.to_f64().unwrap_or(f64::NAN))
        }
    }
}

/// Area under the ROC curve of `scores` for the positives in `labels`
/// (Mann-Whitney with average ranks for ties). `None` when either class is empty.
pub fn auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    let rank_sum: f64 = (0..labels.len()).filter(|&i| labels[i]).map(|i| ranks[i]).sum();
    let (p, n) = (pos as f64, neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}
