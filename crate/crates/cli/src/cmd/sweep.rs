use std::fmt::Write as _;

use acciht::analysis::{rip_exact, rip_surrogate, tau_range, xi_of, xi_one_minus_ratio, TauRange};
use acciht::solvers::{acc_iht, StepSize, Termination};
use acciht::{Error, ProblemInstance, SolverTrace};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{echo, merge, Generator, SweepArgs};
use crate::error::{invalid, CliResult};
use crate::output::{emit, ensure_writable, Outputs};
use crate::source::{check_source, load, solver_config, Defaults};

/// Relative objective increase that counts as a ripple.
pub const RIPPLE_TOL: f64 = 1e-12;

const TOY: Defaults = Defaults {
    gen: Generator::Iid,
    iid: (10, 6, 2),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    ConvergedMonotone,
    ConvergedRippling,
    Diverged,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ConvergedMonotone => "converged-monotone",
            Self::ConvergedRippling => "converged-rippling",
            Self::Diverged => "diverged",
        }
    }
}

/// Diverged, or rippling when `f` rises by more than [`RIPPLE_TOL`] relative
/// at any step, else monotone.
pub fn classify(trace: &SolverTrace) -> Regime {
    if trace.diverged() {
        return Regime::Diverged;
    }
    let f = trace.f_values();
    if f.windows(2).any(|w| w[1] > w[0] * (1.0 + RIPPLE_TOL)) {
        Regime::ConvergedRippling
    } else {
        Regime::ConvergedMonotone
    }
}

/// Default step for a sweep: `1/β_k` by enumeration when affordable, else `1/β̂`;
/// line search for objectives without a design matrix.
pub fn sweep_step(inst: &ProblemInstance) -> CliResult<StepSize<f64>> {
    let Some(ls) = inst.least_squares() else {
        return Ok(StepSize::LineSearch);
    };
    let k = inst.model.budget();
    match rip_exact(ls.phi(), k) {
        Ok((_, beta)) if beta > 0.0 => Ok(StepSize::Fixed(1.0 / beta)),
        Ok(_) => invalid("design has a zero column block"),
        Err(Error::EnumerationBudget { .. }) => Ok(StepSize::Fixed(1.0 / rip_surrogate(ls.phi())?)),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Overlay {
    pub level: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: f64,
    pub xi: f64,
    pub xi_one_minus_ratio: Option<f64>,
    pub tau_range: TauRange<f64>,
}

fn overlay_at(inst: &ProblemInstance, s: usize) -> Option<Overlay> {
    let ls = inst.least_squares()?;
    if s > ls.phi().cols() {
        return None;
    }
    let (alpha, beta) = rip_exact(ls.phi(), s).ok()?;
    if !(alpha > 0.0) {
        return None;
    }
    let kappa = beta / alpha;
    let xi = xi_of(kappa).ok()?;
    Some(Overlay {
        level: format!("{s}"),
        alpha: Some(alpha),
        beta: Some(beta),
        kappa,
        xi,
        xi_one_minus_ratio: Some(xi_one_minus_ratio(alpha, beta)),
        tau_range: tau_range(xi).ok()?,
    })
}

fn user_overlay(kappa: f64) -> CliResult<Overlay> {
    let xi = xi_of(kappa)?;
    Ok(Overlay {
        level: "user".into(),
        alpha: None,
        beta: None,
        kappa,
        xi,
        xi_one_minus_ratio: None,
        tau_range: tau_range(xi)?,
    })
}

/// The grid, with 0 inserted whenever it lies inside the requested span.
pub fn tau_grid(args: &SweepArgs) -> CliResult<Vec<f64>> {
    let mut taus = match &args.taus {
        Some(t) => t.clone(),
        None => {
            let lo = args.tau_min.unwrap_or(-2.0);
            let hi = args.tau_max.unwrap_or(1.0);
            let steps = args.tau_steps.unwrap_or(31);
            if !(lo <= hi) || steps == 0 {
                return invalid("need tau-min <= tau-max and tau-steps >= 1");
            }
            if steps == 1 {
                vec![lo]
            } else {
                (0..steps)
                    .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
                    .collect()
            }
        }
    };
    if taus.is_empty() || taus.iter().any(|t| !t.is_finite()) {
        return invalid("momentum grid must be non-empty and finite");
    }
    for t in taus.iter_mut() {
        if t.abs() < 1e-12 {
            *t = 0.0;
        }
    }
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = taus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo <= 0.0 && hi >= 0.0 && !taus.contains(&0.0) {
        taus.push(0.0);
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    Ok(taus)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub seed: u64,
    pub tau: f64,
    pub solver: &'static str,
    pub regime: Regime,
    pub termination: Termination,
    pub iterations: usize,
    pub final_error: Option<f64>,
    pub final_f: f64,
    pub in_guaranteed_range: Option<bool>,
}

struct SeedResult {
    overlays: serde_json::Value,
    mu: StepSize<f64>,
    rows: Vec<SweepRow>,
    traces: Vec<(String, String)>,
}

fn run_seed(args: &SweepArgs, taus: &[f64], seed: u64) -> CliResult<SeedResult> {
    let inst = load(&args.source, &TOY, seed)?.train;
    let step = sweep_step(&inst)?;
    let base = solver_config(&args.solver, step)?;
    let model = match args.solver.budget {
        Some(b) => inst.model.with_budget(b)?,
        None => inst.model.clone(),
    };
    let k = inst.model.budget();
    let guaranteed = match args.solver.kappa {
        Some(kappa) => Some(user_overlay(kappa)?),
        None => overlay_at(&inst, 3 * k),
    };
    let caption = overlay_at(&inst, k);
    let jobs: Vec<(SweepRow, String)> = taus
        .par_iter()
        .map(|&tau| {
            let trace = acc_iht(&inst.objective, &model, &base.with_tau(tau), inst.truth.as_ref())?;
            let row = SweepRow {
                seed,
                tau,
                solver: if tau == 0.0 { "iht" } else { "acc" },
                regime: classify(&trace),
                termination: trace.termination,
                iterations: trace.iterations(),
                final_error: trace.final_record().dist_to_truth,
                final_f: trace.final_record().f_value,
                in_guaranteed_range: guaranteed.as_ref().map(|o| o.tau_range.contains(tau)),
            };
            Ok((row, trace.to_csv()?))
        })
        .collect::<CliResult<_>>()?;
    let mut rows = Vec::with_capacity(jobs.len());
    let mut traces = Vec::new();
    for (i, (row, csv)) in jobs.into_iter().enumerate() {
        traces.push((format!("traces/seed-{seed}-tau-{i:03}.csv"), csv));
        rows.push(row);
    }
    Ok(SeedResult {
        overlays: json!({ "seed": seed, "guaranteed": guaranteed, "level_k": caption }),
        mu: step,
        rows,
        traces,
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "seed,tau,solver,regime,termination,iterations,final_error,final_f,in_guaranteed_range\n",
    );
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.tau,
            r.solver,
            r.regime.as_str(),
            serde_json::to_value(r.termination).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            r.iterations,
            r.final_error.map(|v| v.to_string()).unwrap_or_default(),
            r.final_f,
            r.in_guaranteed_range.map(|v| v.to_string()).unwrap_or_default(),
        )
        .expect("write to string");
    }
    out
}

pub fn run(flags: SweepArgs) -> CliResult<()> {
    let args = merge(&flags, flags.config.as_deref())?;
    check_source(&args.source)?;
    solver_config(&args.solver, StepSize::Auto)?;
    let taus = tau_grid(&args)?;
    let reps = args.reps.unwrap_or(1);
    if reps == 0 {
        return invalid("--reps must be at least 1");
    }
    if let Some(out) = &args.out {
        ensure_writable(out)?;
    }
    let seed0 = args.source.seed.unwrap_or(0);
    let results: Vec<SeedResult> = (0..reps as u64)
        .into_par_iter()
        .map(|i| run_seed(&args, &taus, seed0 + i))
        .collect::<CliResult<_>>()?;

    let rows: Vec<SweepRow> = results.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    let table = sweep_csv(&rows);
    if let Some(out) = &args.out {
        let mut echoed = args.clone();
        echoed.source.seed = Some(seed0);
        let mut files = Outputs::default();
        files.add_json("config.json", &echo(&echoed)?)?;
        files.add("sweep.csv", table.clone());
        files.add_json(
            "sweep.json",
            &json!({
                "taus": taus,
                "ripple_tolerance": RIPPLE_TOL,
                "step": results.iter().map(|r| json!({"mu": r.mu})).collect::<Vec<_>>(),
                "overlay": results.iter().map(|r| r.overlays.clone()).collect::<Vec<_>>(),
                "rows": rows,
            }),
        )?;
        if args.traces {
            for r in &results {
                for (name, csv) in &r.traces {
                    files.add(name.as_str(), csv.clone());
                }
            }
        }
        files.write(out)?;
    }
    emit(&table)
}
