use std::fmt::Write as _;
use std::path::PathBuf;

use acciht::problems::evaluate;
use acciht::solvers::{acc_iht, iht, SolverConfig, StepSize, Termination};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{echo, merge, SolveArgs, SolverKind};
use crate::error::{invalid, CliError, CliResult};
use crate::output::{emit, ensure_writable, Outputs};
use crate::source::{check_source, load, solver_config, SOLVE_DEFAULTS};

struct RunResult {
    seed: u64,
    termination: Termination,
    summary: Value,
    files: Outputs,
}

fn run_one(args: &SolveArgs, cfg: &SolverConfig<f64>, seed: u64) -> CliResult<RunResult> {
    let loaded = load(&args.source, &SOLVE_DEFAULTS, seed)?;
    let inst = &loaded.train;
    let model = match args.solver.budget {
        Some(b) => inst.model.with_budget(b)?,
        None => inst.model.clone(),
    };
    let truth = inst.truth.as_ref();
    let trace = match args.solver.solver.unwrap_or(SolverKind::Acc) {
        SolverKind::Acc => acc_iht(&inst.objective, &model, cfg, truth)?,
        SolverKind::Iht => iht(&inst.objective, &model, cfg, truth)?,
    };
    let metrics = match truth {
        Some(_) => Some(evaluate(&trace, inst, loaded.test.as_ref())?),
        None => None,
    };
    let summary = json!({
        "seed": seed,
        "termination": trace.termination,
        "iterations": trace.iterations(),
        "final_f_value": trace.final_record().f_value,
        "mu": trace.mu,
        "wall_time_secs": trace.wall_time_secs,
        "warnings": trace.warnings,
        "metrics": metrics,
    });
    let mut files = Outputs::default();
    files.add("trace.csv", trace.to_csv()?);
    files.add_json("trace.json", &trace.to_json())?;
    files.add_json("metrics.json", &summary)?;
    Ok(RunResult {
        seed,
        termination: trace.termination,
        summary,
        files,
    })
}

pub fn run(flags: SolveArgs) -> CliResult<()> {
    let args = merge(&flags, flags.config.as_deref())?;
    check_source(&args.source)?;
    let cfg = solver_config(&args.solver, StepSize::Auto)?;
    if args.solver.solver == Some(SolverKind::Iht) && args.solver.tau.is_some_and(|t| t != 0.0) {
        log::warn!("--solver iht ignores --tau");
    }
    let reps = args.reps.unwrap_or(1);
    if reps == 0 {
        return invalid("--reps must be at least 1");
    }
    if let Some(out) = &args.out {
        ensure_writable(out)?;
    }
    let seed0 = args.source.seed.unwrap_or(0);
    let runs: Vec<RunResult> = (0..reps as u64)
        .into_par_iter()
        .map(|i| run_one(&args, &cfg, seed0 + i))
        .collect::<CliResult<_>>()?;

    let mut echoed = args.clone();
    echoed.source.seed = Some(seed0);
    let mut outputs = Outputs::default();
    outputs.add_json("config.json", &echo(&echoed)?)?;
    let mut table = String::from("seed,termination,iterations,relative_error,exact_support_match\n");
    let mut summaries = Vec::with_capacity(runs.len());
    let diverged: Vec<u64> = runs
        .iter()
        .filter(|r| r.termination == Termination::Diverged)
        .map(|r| r.seed)
        .collect();
    for r in runs.iter() {
        let m = &r.summary["metrics"];
        writeln!(
            table,
            "{},{},{},{},{}",
            r.seed,
            r.summary["termination"].as_str().unwrap_or(""),
            r.summary["iterations"],
            m["relative_error"].as_f64().map(|v| v.to_string()).unwrap_or_default(),
            m["exact_support_match"].as_bool().map(|v| v.to_string()).unwrap_or_default(),
        )
        .expect("write to string");
        summaries.push(r.summary.clone());
    }
    if reps == 1 {
        outputs.extend(&PathBuf::new(), runs.into_iter().next().expect("one run").files);
    } else {
        outputs.add("summary.csv", table);
        for r in runs {
            outputs.extend(&PathBuf::from(format!("rep-{}", r.seed)), r.files);
        }
    }
    if let Some(out) = &args.out {
        outputs.write(out)?;
    }
    let report = if reps == 1 {
        summaries[0].clone()
    } else {
        Value::Array(summaries.clone())
    };
    emit(&(serde_json::to_string_pretty(&report)? + "\n"))?;


    if !diverged.is_empty() {
        return Err(CliError::Diverged(format!("solver diverged (seeds {diverged:?})")));
    }
    Ok(())
}
