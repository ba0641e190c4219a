use std::collections::BTreeMap;

use acciht::analysis::{
    contraction_matrix, error_bound, iteration_bound, tau_range, xi_of, xi_one_minus_ratio,
    RipConstants, RipLevel, RipMethod,
};
use acciht::numerics::text::read_matrix;
use acciht::numerics::{extreme_eigs_sym, DenseMatrix};
use acciht::Error;
use serde_json::{json, Value};

use crate::args::{merge, AnalyzeArgs};
use crate::error::{invalid, CliError, CliResult};
use crate::output::{emit, write_atomic};

fn surrogate_constants(phi: &DenseMatrix<f64>, k: usize) -> CliResult<RipConstants<f64>> {
    let (alpha, beta) = extreme_eigs_sym(&phi.gram(), 1e-10)?;
    if !(alpha > 0.0) {
        return invalid(
            "the Hessian is singular (fewer rows than columns); pass --kappa or --xi instead",
        );
    }
    let level = RipLevel { alpha, beta };
    let levels = BTreeMap::from([(2 * k, level), (3 * k, level)]);
    Ok(RipConstants::new(levels, RipMethod::LambdaMaxSurrogate)?)
}

struct Inputs {
    xi: f64,
    kappa: Option<f64>,
    rip: Option<(RipConstants<f64>, usize)>,
}

fn resolve(args: &AnalyzeArgs) -> CliResult<Inputs> {
    let given = [args.xi.is_some(), args.kappa.is_some(), args.phi.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return invalid("give exactly one of --xi, --kappa or --phi");
    }
    if let Some(xi) = args.xi {
        if !(xi > 0.0) || !xi.is_finite() {
            return invalid(format!("xi must be positive, got {xi}"));
        }
        return Ok(Inputs { xi, kappa: None, rip: None });
    }
    if let Some(kappa) = args.kappa {
        return Ok(Inputs {
            xi: xi_of(kappa)?,
            kappa: Some(kappa),
            rip: None,
        });
    }
    let path = args.phi.as_ref().expect("checked above");
    let Some(k) = args.k else {
        return invalid("--phi needs --k");
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let phi = read_matrix::<f64>(&text)?;
    let rip = if args.surrogate {
        surrogate_constants(&phi, k)?
    } else {
        match RipConstants::enumerate(&phi, k) {
            Ok(r) => r,
            Err(e @ Error::EnumerationBudget { .. }) => {
                return invalid(format!("{e}; rerun with --surrogate"))
            }
            Err(e) => return Err(e.into()),
        }
    };
    let kappa = rip.kappa(3 * k)?;
    Ok(Inputs {
        xi: xi_of(kappa)?,
        kappa: Some(kappa),
        rip: Some((rip, k)),
    })
}

/// The analysis report as JSON.
pub fn report(args: &AnalyzeArgs) -> CliResult<Value> {
    let Some(tau) = args.tau else {
        return invalid("--tau is required");
    };
    let inputs = resolve(args)?;
    let xi = inputs.xi;
    let x_norm = args.x_norm.unwrap_or(1.0);
    let eps_norm = args.eps_norm.unwrap_or(0.0);
    let horizon = args.horizon.unwrap_or(100);
    let zeta = args.zeta.unwrap_or(1e-6 * x_norm.max(f64::MIN_POSITIVE));
    let noise_coef = match (&inputs.rip, args.noise_coef) {
        (_, Some(c)) => c,
        (Some((rip, k)), None) => rip.noise_coefficient(*k)?,
        (None, None) if eps_norm > 0.0 => {
            return invalid("--eps-norm needs --noise-coef (or --phi)");
        }
        (None, None) => 0.0,
    };
    let sys = contraction_matrix(xi, tau)?;
    let range = tau_range(xi)?;
    let mut notes = Vec::new();
    if range.is_empty() {
        notes.push("no momentum is guaranteed to converge at this xi (xi >= 1/phi^2)".to_string());
    } else if !range.contains(tau) {
        notes.push("tau lies outside the guaranteed range".to_string());
    }
    let (curve, floor, iters) = match error_bound(xi, tau, noise_coef, x_norm, eps_norm, horizon) {
        Ok(rep) => {
            let iters = iteration_bound(xi, tau, x_norm, zeta).ok();
            (rep.error_curve, Some(rep.noise_floor), iters)
        }
        Err(Error::Precondition(msg)) => {
            notes.push(format!("no error bound: {msg}"));
            (Vec::new(), None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let rip = inputs.rip.as_ref().map(|(r, _)| r);
    let ratio = rip
        .and_then(|r| r.levels.values().last().copied())
        .map(|l| xi_one_minus_ratio(l.alpha, l.beta));
    Ok(json!({
        "xi": xi,
        "kappa": inputs.kappa,
        "xi_one_minus_ratio": ratio,
        "tau": tau,
        "lambda1": sys.lambda1,
        "lambda2": sys.lambda2,
        "delta": sys.delta,
        "rate": sys.rate(),
        "tau_range": range,
        "tau_in_range": range.contains(tau),
        "iteration_bound": iters,
        "zeta": zeta,
        "noise_coef": noise_coef,
        "noise_floor": floor,
        "error_curve": curve,
        "rip": rip,
        "notes": notes,
    }))
}

pub fn run(flags: AnalyzeArgs) -> CliResult<()> {
    let args = merge(&flags, flags.config.as_deref())?;
    let rep = report(&args)?;
    let text = serde_json::to_string_pretty(&rep)? + "\n";
    match &args.out {
        Some(path) => write_atomic(path, &text),
        None => emit(&text),
    }
}
