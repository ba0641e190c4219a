use std::fmt::Write as _;

use acciht::Signal;
use acciht::numerics::{DenseMatrix, DenseVector};
use acciht::objectives::Objective;
use acciht::LeastSquares;
use acciht::solvers::line_search_tau;
use serde::Serialize;

use crate::args::CounterexampleArgs;
use crate::error::{invalid, CliError, CliResult};
use crate::output::emit;

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    /// `‖b − Φx₁‖₂`.
    pub residual_x1: f64,
    /// `‖b − Φx₂‖₂`.
    pub residual_x2: f64,
    /// Line-search momentum along `d = x₂ − x₁`.
    pub tau_star: f64,
    /// `(τ, f(x₂ + τd))` with `f = ½‖b − Φx‖²`.
    pub curve: Vec<(f64, f64)>,
    pub strictly_increasing: bool,
}

fn instance() -> (LeastSquares, Signal, Signal) {
    let phi = DenseMatrix::from_rows(&[
        vec![0.3816, -0.2726, 0.0077],
        vec![-0.1598, 1.9364, -0.3908],
    ])
    .expect("fixed data");
    let b = DenseVector::from(vec![0.3870, -0.1514]);
    let x1 = Signal::Vector(DenseVector::from(vec![-1.7338, 0.0, 0.0]));
    let x2 = Signal::Vector(DenseVector::from(vec![1.5415, 0.0, 0.0]));
    (LeastSquares::new(phi, b).expect("fixed data"), x1, x2)
}

pub fn report(points: usize) -> CliResult<CounterexampleReport> {
    if points < 2 {
        return invalid("need at least 2 grid points");
    }
    let (ls, x1, x2) = instance();
    let d = x2.sub(&x1)?;
    let f = |tau: f64| ls.value(&x2.axpy(tau, &d).expect("same shape"));
    let curve = (0..points)
        .map(|i| {
            let tau = i as f64 / (points - 1) as f64;
            f(tau).map(|v| (tau, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let strictly_increasing = curve.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(CounterexampleReport {
        residual_x1: ls.residual(&x1)?.norm(),
        residual_x2: ls.residual(&x2)?.norm(),
        tau_star: line_search_tau(&ls, &x2, &x1)?,
        curve,
        strictly_increasing,
    })
}

pub fn render(rep: &CounterexampleReport) -> String {
    let mut out = String::new();
    writeln!(out, "||b - Phi x1||_2 = {:.6}", rep.residual_x1).ok();
    writeln!(out, "||b - Phi x2||_2 = {:.6}", rep.residual_x2).ok();
    writeln!(out, "line-search tau  = {:.6}", rep.tau_star).ok();
    writeln!(out, "f(x2 + tau d), d = x2 - x1:").ok();
    for (tau, v) in &rep.curve {
        writeln!(out, "  tau = {tau:.3}  f = {v:.6}").ok();
    }
    writeln!(
        out,
        "f strictly increasing for tau > 0: {}",
        if rep.strictly_increasing { "yes" } else { "no" }
    )
    .ok();
    out
}

pub fn run(args: CounterexampleArgs) -> CliResult<()> {
    let rep = report(args.points.unwrap_or(11))?;
    if args.json {
        emit(&(serde_json::to_string_pretty(&rep)? + "\n"))?;
    } else {
        emit(&render(&rep))?;
    }
    if !rep.strictly_increasing || rep.tau_star > 0.0 {
        return Err(CliError::Validation("momentum along d unexpectedly decreases f".into()));
    }
    Ok(())
}
