use std::path::Path;

use acciht::problems::{gen_ar1, gen_iid_gaussian, gen_matrix_completion, load_instance, Ar1Params};
use acciht::solvers::{SolverConfig, StepSize};
use acciht::ProblemInstance;

use crate::args::{Generator, SolverArgs, SourceArgs};
use crate::error::{invalid, CliError, CliResult};

/// A training instance and, for split generators, its held-out half.
pub struct Loaded {
    pub train: ProblemInstance,
    pub test: Option<ProblemInstance>,
}

/// `(n, m, k)` used when no generator flag is given.
pub struct Defaults {
    pub gen: Generator,
    pub iid: (usize, usize, usize),
}

pub const SOLVE_DEFAULTS: Defaults = Defaults {
    gen: Generator::Iid,
    iid: (2000, 600, 20),
};

pub fn check_source(src: &SourceArgs) -> CliResult<()> {
    if src.gen.is_some() && src.input.is_some() {
        return invalid("give either --gen or --input, not both");
    }
    if let Some(dir) = &src.input {
        if !dir.join("instance.json").is_file() && !is_split(dir) {
            return Err(CliError::Io(format!(
                "{}: no instance.json found",
                dir.display()
            )));
        }
    }
    Ok(())
}

/// A directory holding `train/` and `test/` instances, as written by `gen --gen ar1`.
fn is_split(dir: &Path) -> bool {
    dir.join("train/instance.json").is_file() && dir.join("test/instance.json").is_file()
}

pub fn load(src: &SourceArgs, defaults: &Defaults, seed: u64) -> CliResult<Loaded> {
    check_source(src)?;
    if let Some(dir) = &src.input {
        if is_split(dir) {
            return Ok(Loaded {
                train: load_instance(&dir.join("train"))?,
                test: Some(load_instance(&dir.join("test"))?),
            });
        }
        return Ok(Loaded {
            train: load_instance(dir)?,
            test: None,
        });
    }
    match src.gen.unwrap_or(defaults.gen) {
        Generator::Iid => {
            let (n, m, k) = defaults.iid;
            Ok(Loaded {
                train: gen_iid_gaussian(
                    src.n.unwrap_or(n),
                    src.m.unwrap_or(m),
                    src.k.unwrap_or(k),
                    src.sigma.unwrap_or(0.0),
                    seed,
                )?,
                test: None,
            })
        }
        Generator::Ar1 => {
            let d = Ar1Params::default();
            let (train, test) = gen_ar1(&Ar1Params {
                n: src.n.unwrap_or(d.n),
                m_total: src.m_total.unwrap_or(d.m_total),
                k: src.k.unwrap_or(d.k),
                rho: src.rho.unwrap_or(d.rho),
                snr: src.snr.unwrap_or(d.snr),
                seed,
            })?;
            Ok(Loaded {
                train,
                test: Some(test),
            })
        }
        Generator::Completion => Ok(Loaded {
            train: gen_matrix_completion(
                src.p.unwrap_or(50),
                src.n.unwrap_or(60),
                src.r.unwrap_or(3),
                src.frac.unwrap_or(0.35),
                seed,
            )?,
            test: None,
        }),
    }
}

pub fn parse_step(text: &str) -> CliResult<StepSize<f64>> {
    match text {
        "auto" => Ok(StepSize::Auto),
        "line-search" | "line_search" => Ok(StepSize::LineSearch),
        other => other
            .parse::<f64>()
            .map(StepSize::Fixed)
            .map_err(|_| CliError::Validation(format!("--mu must be a number, auto or line-search, got {other:?}"))),
    }
}

/// Solver configuration from flags; `fallback_step` applies when `--mu` is absent.
pub fn solver_config(a: &SolverArgs, fallback_step: StepSize<f64>) -> CliResult<SolverConfig<f64>> {
    let d = SolverConfig::<f64>::default();
    let cfg = SolverConfig {
        tau: a.tau.unwrap_or(d.tau),
        step: match &a.mu {
            Some(s) => parse_step(s)?,
            None => fallback_step,
        },
        eta: a.eta.unwrap_or(d.eta),
        max_iter: a.max_iter.unwrap_or(d.max_iter),
        debias: a.debias,
        kappa: a.kappa,
    };
    cfg.validate()?;
    Ok(cfg)
}
