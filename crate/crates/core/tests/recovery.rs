//! End-to-end recovery on generated instances.

use acciht::analysis::{error_bound, rip_exact, tau_range, xi_of, RipConstants};
use acciht::models::StructureModel;
use acciht::numerics::{DenseMatrix, DenseVector};
use acciht::objectives::{AnyObjective, LeastSquares};
use acciht::problems::{evaluate, gen_iid_gaussian, gen_matrix_completion, ProblemInstance};
use acciht::solvers::{acc_iht, iht, SolverConfig, StepSize, Termination};
use acciht::Signal;

fn solve(inst: &ProblemInstance<f64>, config: &SolverConfig<f64>) -> acciht::SolverTrace {
    acc_iht(&inst.objective, &inst.model, config, inst.truth.as_ref()).unwrap()
}

#[test]
fn noiseless_sparse_recovery_and_speedup() {
    let mut faster = 0;
    for seed in 0..4 {
        let inst = gen_iid_gaussian::<f64>(500, 200, 8, 0.0, seed).unwrap();
        let cfg = SolverConfig {
            eta: 1e-10,
            ..SolverConfig::default()
        };
        let acc = solve(&inst, &cfg);
        let plain = iht(&inst.objective, &inst.model, &cfg, inst.truth.as_ref()).unwrap();
        for t in [&acc, &plain] {
            assert_eq!(t.termination, Termination::Converged);
            let rep = evaluate(t, &inst, None).unwrap();
            assert!(rep.relative_error <= 1e-6, "seed {seed}: {}", rep.relative_error);
            assert_eq!(rep.exact_support_match, Some(true));
        }
        if acc.iterations() <= plain.iterations() {
            faster += 1;
        }
    }
    assert!(faster >= 3);
}

#[test]
fn envelope_dominates_on_well_conditioned_designs() {
    for seed in 0..5 {
        let inst = gen_iid_gaussian::<f64>(10, 3000, 2, 0.0, seed).unwrap();
        let ls = inst.least_squares().unwrap();
        let rip = RipConstants::enumerate(ls.phi(), 2).unwrap();
        let l3 = rip.level(6).unwrap();
        let xi = xi_of(rip.kappa(6).unwrap()).unwrap();
        let t = tau_range(xi).unwrap().half_width().expect("well conditioned");
        for tau in [0.0, 0.5 * t, -0.5 * t] {
            let cfg = SolverConfig {
                tau,
                step: StepSize::Fixed(2.0 / (l3.alpha + l3.beta)),
                eta: 1e-12,
                max_iter: 200,
                ..SolverConfig::default()
            };
            let tr = solve(&inst, &cfg);
            let e: Vec<f64> = tr.records.iter().map(|r| r.dist_to_truth.unwrap()).collect();
            let curve = error_bound(xi, tau, 0.0, 1.0, 0.0, e.len()).unwrap().error_curve;
            for (i, &v) in e.iter().enumerate() {
                assert!(v <= curve[i] + 1e-12);
                if i > 0 {
                    let before = if i == 1 { e[0] } else { e[i - 2] };
                    let rhs = xi * (1.0 + tau).abs() * e[i - 1] + xi * tau.abs() * before;
                    assert!(v <= rhs + 1e-12);
                }
            }
        }
    }
}

#[test]
fn noisy_recovery_reaches_the_noise_floor() {
    let inst = gen_iid_gaussian::<f64>(300, 120, 5, 0.01, 3).unwrap();
    let tr = solve(&inst, &SolverConfig::default());
    let rep = evaluate(&tr, &inst, Some(&inst)).unwrap();
    assert_eq!(rep.exact_support_match, Some(true));
    assert!(rep.relative_error < 0.05);
    assert!(rep.r2_test.unwrap() > 0.99);
}

#[test]
fn toy_family_negative_momentum_diverges() {
    for seed in 0..5 {
        let inst = gen_iid_gaussian::<f64>(10, 6, 2, 0.0, seed).unwrap();
        let ls = inst.least_squares().unwrap();
        let (_, beta) = rip_exact(ls.phi(), 2).unwrap();
        let cfg = SolverConfig {
            step: StepSize::Fixed(1.0 / beta),
            ..SolverConfig::default()
        };
        assert_eq!(solve(&inst, &cfg.with_tau(0.0)).termination, Termination::Converged);
        assert_eq!(solve(&inst, &cfg.with_tau(-2.0)).termination, Termination::Diverged);
    }
}

#[test]
fn block_sparse_recovery() {
    let n = 60;
    let size = 3;
    let model = StructureModel::contiguous_blocks(n / size, size, 2).unwrap();
    let base = gen_iid_gaussian::<f64>(n, 40, 1, 0.0, 8).unwrap();
    let phi = base.least_squares().unwrap().phi().clone();
    let mut x = DenseVector::zeros(n);
    for (i, v) in [(6, 1.0), (7, -0.5), (8, 0.8), (42, 0.3), (43, 1.2), (44, -0.9)] {
        x[i] = v;
    }
    let b = phi.matvec(&x).unwrap();
    let obj = AnyObjective::LeastSquares(LeastSquares::new(phi, b).unwrap());
    let truth = Signal::Vector(x);
    let tr = acc_iht(&obj, &model, &SolverConfig { eta: 1e-12, ..SolverConfig::default() }, Some(&truth)).unwrap();
    assert_eq!(tr.termination, Termination::Converged);
    assert!(tr.final_record().dist_to_truth.unwrap() < 1e-8);
}

#[test]
fn matrix_completion_with_line_search() {
    let inst = gen_matrix_completion::<f64>(30, 30, 2, 0.5, 4).unwrap();
    let cfg = SolverConfig {
        step: StepSize::LineSearch,
        eta: 1e-10,
        ..SolverConfig::default()
    };
    let tr = solve(&inst, &cfg);
    let rep = evaluate(&tr, &inst, None).unwrap();
    assert!(rep.relative_error <= 1e-3, "{}", rep.relative_error);
}

#[test]
fn single_precision_recovery() {
    let inst = gen_iid_gaussian::<f32>(120, 60, 4, 0.0, 2).unwrap();
    let cfg = SolverConfig::<f32> {
        eta: 1e-5,
        ..SolverConfig::default()
    };
    let tr = acc_iht(&inst.objective, &inst.model, &cfg, inst.truth.as_ref()).unwrap();
    assert!(tr.final_record().dist_to_truth.unwrap() < 1e-3);
}

#[test]
fn zero_design_stays_at_zero() {
    let obj = LeastSquares::new(DenseMatrix::<f64>::zeros(4, 6), DenseVector::from(vec![1.0; 4])).unwrap();
    let model = StructureModel::sparse(6, 2).unwrap();
    let cfg = SolverConfig {
        step: StepSize::Fixed(0.5),
        max_iter: 5,
        ..SolverConfig::default()
    };
    let tr = acc_iht(&obj, &model, &cfg, None).unwrap();
    assert_eq!(tr.final_x().norm(), 0.0);
}
