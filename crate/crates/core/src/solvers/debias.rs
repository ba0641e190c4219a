use crate::error::{Error, Result};
use crate::models::{active_support, Signal, StructureModel, Support};
use crate::numerics::{lstsq, solve_restricted_ls, DenseMatrix, DenseVector};
use crate::objectives::{MaskedLeastSquares, Objective};
use crate::scalar::Scalar;

/// Least-squares refit of `x` on its own support.
///
/// Returns the refit and `true`, or `x` unchanged and `false` when the
/// restricted system is rank deficient or the refit would not lower `f`.
pub fn debias<T: Scalar, O: Objective<T> + ?Sized>(
    x: &Signal<T>,
    obj: &O,
    model: &StructureModel,
) -> Result<(Signal<T>, bool)> {
    model.check_shape(x)?;
    let support = active_support(x, model)?;
    let refit = if let Some(ls) = obj.as_least_squares() {
        let idx = model.support_indices(&support)?;
        match solve_restricted_ls(ls.phi(), ls.b(), &idx) {
            Ok(v) => Signal::Vector(v),
            Err(Error::RankDeficient) => return Ok((x.clone(), false)),
            Err(e) => return Err(e),
        }
    } else if let Some(masked) = obj.as_masked() {
        match refit_core(masked, &support) {
            Ok(m) => Signal::Matrix(m),
            Err(Error::RankDeficient) => return Ok((x.clone(), false)),
            Err(e) => return Err(e),
        }
    } else {
        return Err(Error::InvalidObjective(
            "debias needs a least-squares objective".into(),
        ));
    };
    if obj.value(&refit)? <= obj.value(x)? {
        Ok((refit, true))
    } else {
        Ok((x.clone(), false))
    }
}

/// Best `U C Vᵀ` over the observed entries, for the bases of `support`.
fn refit_core<T: Scalar>(obj: &MaskedLeastSquares<T>, support: &Support<T>) -> Result<DenseMatrix<T>> {
    let Support::Subspace { left, right } = support else {
        return Err(Error::SupportMismatch);
    };
    let (rows, cols) = obj.dims();
    let (a, b) = (left.cols(), right.cols());
    if a == 0 || b == 0 {
        return Ok(DenseMatrix::zeros(rows, cols));
    }
    let pos = obj.positions();
    let mut design = Vec::with_capacity(pos.len() * a * b);
    for &(i, j) in pos {
        for p in 0..a {
            for q in 0..b {
                design.push(left[(i, p)] * right[(j, q)]);
            }
        }
    }
    let design = DenseMatrix::from_vec(pos.len(), a * b, design)?;
    if design.rows() < design.cols() {
        return Err(Error::RankDeficient);
    }
    let c = lstsq(&design, obj.values())?;
    let core = DenseMatrix::from_vec(a, b, c.into_vec())?;
    left.matmul(&core)?.matmul(&right.transpose())
}

/// Closed-form momentum `τ★ = ⟨b − Φx_new, Φd⟩/‖Φd‖²` along `d = x_new − x_old`,
/// the unconstrained minimizer of `‖b − Φ(x_new + τd)‖²`.
pub fn line_search_tau<T: Scalar>(
    ls: &crate::objectives::LeastSquares<T>,
    x_new: &Signal<T>,
    x_old: &Signal<T>,
) -> Result<T> {
    let d = x_new.sub(x_old)?;
    let d = d
        .as_vector()
        .ok_or_else(|| Error::Dimension("line search expects vectors".into()))?;
    let pd = ls.phi().matvec(d)?;
    let denom = pd.dot(&pd);
    if denom == T::zero() {
        return Err(Error::ZeroDirection);
    }
    let r: DenseVector<T> = ls.residual(x_new)?;
    Ok(r.dot(&pd) / denom)
}
