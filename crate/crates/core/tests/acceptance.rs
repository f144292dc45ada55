//! Acceptance criteria, run by a plain `main` so that every criterion prints
//! its `criterion N: PASS|FAIL ...` line whether it passes or not. The
//! process exits nonzero if any criterion fails.

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_reach::generators::{
    b0_from_ladder_weights, b0_thermal, b0_zero_temperature, equidistant_gibbs, gibbs_vector,
    thermal_model, EnergySpec, Temperature,
};
use simplex_reach::gksl::{
    check_in_condition, extract_diagonal_restriction, propagate_density, trace_norm_distance,
    DensityMatrix, GkslOperator,
};
use simplex_reach::propagate::{evolve, expm_limit_bidiagonal, propagator, run_schedule};
use simplex_reach::simplex::{blocks, Block, Permutation, SimplexVector};
use simplex_reach::steering::{plan_theorem1, plan_theorem2, steer_from_ground, theorem2_generator};
use simplex_reach::verify::{
    all_permutations, repro_example1, repro_example3, tangential_all, thm3_block_certificate,
    thm3_bound_sweep, SweepConfig,
};

fn report(id: u32, pass: bool, elapsed: Duration, detail: String) -> bool {
    println!(
        "criterion {id}: {} ({:.3} s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from the simplex.
fn random_simplex(r: &mut ChaCha8Rng, n: usize) -> SimplexVector {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    SimplexVector::normalized(e.iter().map(|v| v / s).collect()).unwrap()
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn final_distance(
    b: &simplex_reach::GeneratorMatrix,
    x0: &SimplexVector,
    plan: &simplex_reach::SteeringPlan,
    target: &SimplexVector,
) -> f64 {
    let step = simplex_reach::propagate::default_sample_step(&plan.schedule);
    let traj = run_schedule(b, x0, &plan.schedule, step.max(1.0)).unwrap();
    l1(traj.final_state.as_slice(), target.as_slice())
}

fn criterion_01_example1() -> bool {
    let start = Instant::now();
    let r = repro_example1().unwrap();
    let elapsed = start.elapsed();
    let pass = r.matches_paper && r.claims_hold() && elapsed < Duration::from_secs(1);
    report(
        1,
        pass,
        elapsed,
        format!(
            "computed {:.5?} vs paper {:?}, max deviation {:.2e} (tol {:.0e}); non-majorization claims hold: {}",
            r.computed,
            r.paper,
            r.max_deviation,
            r.tolerance,
            r.claims_hold()
        ),
    )
}

fn criterion_02_example3() -> bool {
    let start = Instant::now();
    let r = repro_example3().unwrap();
    let elapsed = start.elapsed();
    let pass = r.matches_paper && r.claims_hold() && elapsed < Duration::from_secs(1);
    report(
        2,
        pass,
        elapsed,
        format!(
            "computed {:.5?} vs paper {:?}, max deviation {:.2e}; majorization by d violated: {}",
            r.computed,
            r.paper,
            r.max_deviation,
            r.claims_hold()
        ),
    )
}

fn criterion_03_example2_blocks() -> bool {
    let start = Instant::now();
    // (1,6,2,3,4)(5) in one-line form
    let pi = Permutation::from_one_based(&[6, 3, 4, 1, 5, 2]).unwrap();
    let k3 = blocks(&pi, 3).unwrap();
    let k5 = blocks(&pi, 5).unwrap();
    let pass = k3 == vec![Block::one_based(3, 4), Block::one_based(6, 6)]
        && k5 == vec![Block::one_based(1, 1), Block::one_based(3, 6)];
    report(
        3,
        pass,
        start.elapsed(),
        format!(
            "k=3 -> {}, k=5 -> {}",
            k3.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "),
            k5.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn criterion_04_restriction_oracle() -> bool {
    let start = Instant::now();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=8 {
        for _ in 0..50 {
            let a: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.0..3.0)).collect();
            let b: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.0..3.0)).collect();
            let got = extract_diagonal_restriction(&GkslOperator::ladder_pair(&a, &b).unwrap()).unwrap();
            let want = b0_from_ladder_weights(&a, &b).unwrap();
            worst = worst.max((got.matrix() - want.matrix()).amax());

            let d = random_simplex(&mut r, n);
            let model = thermal_model(&d).unwrap();
            let got = extract_diagonal_restriction(&GkslOperator::thermal(&model).unwrap()).unwrap();
            let want = b0_thermal(&model).unwrap();
            worst = worst.max((got.matrix() - want.matrix()).amax());
            cases += 2;
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        worst <= 1e-13 && elapsed < Duration::from_secs(10),
        elapsed,
        format!("{cases} weight/temperature settings, max entrywise difference {worst:.2e}"),
    )
}

fn criterion_05_bidiagonal_closed_form() -> bool {
    let start = Instant::now();
    let mut r = rng(5);
    let mut worst_finite: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for n in 3..=8 {
        for _ in 0..10 {
            let c: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.1..5.0)).collect();
            let flow = expm_limit_bidiagonal(&c).unwrap();
            let a = flow.generator();
            for t in [0.1, 1.0, 10.0] {
                let oracle = (&a * -t).exp();
                worst_finite = worst_finite.max((flow.at(t).unwrap() - oracle).amax());
            }
            let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
            let mut e1 = DMatrix::zeros(n, n);
            e1.row_mut(0).fill(1.0);
            worst_limit = worst_limit.max((flow.at(50.0 / cmin).unwrap() - &e1).amax());
            worst_limit = worst_limit.max((flow.limit() - &e1).amax());
        }
    }
    report(
        5,
        worst_finite <= 1e-10 && worst_limit <= 1e-8,
        start.elapsed(),
        format!("finite-t max difference {worst_finite:.2e}, limit max difference {worst_limit:.2e}"),
    )
}

fn criterion_06_exact_steering() -> bool {
    let start = Instant::now();
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    let mut max_dwells = 0;
    let mut count_ok = true;
    for n in 2..=8 {
        let b = b0_zero_temperature(n).unwrap();
        let e1 = SimplexVector::vertex(n, 0).unwrap();
        for _ in 0..200 {
            let target = random_simplex(&mut r, n);
            let plan = steer_from_ground(&b, &target).unwrap();
            worst = worst.max(final_distance(&b, &e1, &plan, &target));
            max_dwells = max_dwells.max(plan.dwell_count());
            count_ok &= plan.dwell_count() < n
                && plan.impulse_count() < n
                && plan.schedule.len() <= n;
        }
    }
    let elapsed = start.elapsed();
    report(
        6,
        worst < 1e-9 && count_ok && elapsed < Duration::from_secs(30),
        elapsed,
        format!(
            "1400 targets, max l1 error {worst:.2e}; most dwells used {max_dwells}; at most n-1 dwells and n-1 impulses: {count_ok}"
        ),
    )
}

fn criterion_07_theorem1_full_scheme() -> bool {
    let start = Instant::now();
    let mut r = rng(7);
    let eps = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = r.random_range(2..=6);
        let b = b0_zero_temperature(n).unwrap();
        let x0 = random_simplex(&mut r, n);
        let target = random_simplex(&mut r, n);
        let plan = plan_theorem1(&b, &x0, &target, eps).unwrap();
        worst = worst.max(final_distance(&b, &x0, &plan, &target));
    }
    report(
        7,
        worst < eps,
        start.elapsed(),
        format!("50 pairs, max l1 error {worst:.3e} (eps {eps:.0e})"),
    )
}

fn criterion_08_theorem2() -> bool {
    let start = Instant::now();
    let mut r = rng(8);
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    let mut synchronized = true;
    for (core_n, copies) in [(2, 2), (2, 3), (3, 2)] {
        let b = theorem2_generator(core_n, copies).unwrap();
        let n = b.dim();
        for _ in 0..50 {
            let x0 = random_simplex(&mut r, n);
            let target = random_simplex(&mut r, n);
            let plan = plan_theorem2(core_n, copies, &x0, &target, eps).unwrap();
            worst = worst.max(final_distance(&b, &x0, &plan, &target));
            for stage in 1..=copies {
                let ends: Vec<f64> = plan
                    .block_timings
                    .iter()
                    .filter(|t| t.stage == stage)
                    .map(|t| t.end)
                    .collect();
                if let Some(first) = ends.first() {
                    synchronized &= ends.iter().all(|e| (e - first).abs() <= 1e-9 * first.max(1.0));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        8,
        worst < eps && synchronized && elapsed < Duration::from_secs(60),
        elapsed,
        format!("150 targets, max l1 error {worst:.3e} (eps {eps:.0e}); blocks finish together: {synchronized}"),
    )
}

fn criterion_09_majorization_bound() -> bool {
    let start = Instant::now();
    let mut tangential_ok = true;
    let mut cert_ok = true;
    let mut worst_gap: f64 = 0.0;
    let mut min_sum = f64::INFINITY;
    let mut violations = 0;
    let mut states = 0;
    for n in 3..=6 {
        let perms = all_permutations(n);
        for alpha in [0.2, 0.5, 0.9] {
            let d = equidistant_gibbs(alpha, n).unwrap();
            let b = b0_thermal(&thermal_model(&d).unwrap()).unwrap();
            tangential_ok &= tangential_all(&b, &d, 1e-6).all_pass();
            for pi in &perms {
                for k in 1..=n {
                    for c in thm3_block_certificate(&b, &d, pi, k).unwrap() {
                        worst_gap = worst_gap.max((c.direct - c.boundary).abs());
                        min_sum = min_sum.min(c.direct.min(c.boundary));
                        cert_ok &= c.consistent(1e-12) && c.nonnegative(1e-12);
                    }
                }
            }
            let report = thm3_bound_sweep(&SweepConfig::new(d, 1000, 9)).unwrap();
            violations += report.violation_count();
            states += report.states_checked;
        }
    }
    let elapsed = start.elapsed();
    report(
        9,
        tangential_ok && cert_ok && violations == 0 && elapsed < Duration::from_secs(120),
        elapsed,
        format!(
            "(a) tangential all pass: {tangential_ok}; (b) certificates min {min_sum:.2e}, max direct/boundary gap {worst_gap:.2e}; (c) {violations} violations over {states} sampled states"
        ),
    )
}

fn random_density(r: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
    });
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    let mut rho = rho / tr;
    // exact hermiticity
    let rho_h = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    rho.copy_from(&rho_h);
    DensityMatrix::new(rho).unwrap()
}

fn criterion_10_gksl_invariants() -> bool {
    let start = Instant::now();
    let mut r = rng(10);
    let mut worst_trace: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut contraction_ok = true;
    let mut in_ok = true;
    for i in 0..100 {
        let n = r.random_range(2..=4);
        let g = match i % 4 {
            0 => GkslOperator::zero_temperature(n).unwrap(),
            1 => GkslOperator::thermal(&thermal_model(&random_simplex(&mut r, n)).unwrap()).unwrap(),
            2 => {
                let a: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.0..2.0)).collect();
                let b: Vec<f64> = (0..n - 1).map(|_| r.random_range(0.0..2.0)).collect();
                GkslOperator::ladder_pair(&a, &b).unwrap()
            }
            _ => GkslOperator::zero_temperature(2).unwrap().local_lift(n).unwrap(),
        };
        in_ok &= check_in_condition(&g);
        let dim = g.dim();
        let t = r.random_range(0.0..3.0);
        let mut rho = random_density(&mut r, dim);
        let mut sigma = random_density(&mut r, dim);
        let mut dist = trace_norm_distance(&rho, &sigma).unwrap();
        for _ in 0..4 {
            rho = propagate_density(&g, &rho, t / 4.0).unwrap();
            sigma = propagate_density(&g, &sigma, t / 4.0).unwrap();
            for s in [&rho, &sigma] {
                worst_trace = worst_trace.max((s.matrix().trace() - Complex64::new(1.0, 0.0)).norm());
                min_eig = min_eig.min(s.min_eigenvalue());
            }
            let next = trace_norm_distance(&rho, &sigma).unwrap();
            contraction_ok &= next <= dist + 1e-10;
            dist = next;
        }
    }
    report(
        10,
        worst_trace <= 1e-12 && min_eig >= -1e-10 && contraction_ok && in_ok,
        start.elapsed(),
        format!(
            "trace error {worst_trace:.2e}, min eigenvalue {min_eig:.2e}, contraction: {contraction_ok}, IN condition: {in_ok}"
        ),
    )
}

fn criterion_11_relaxation() -> bool {
    let start = Instant::now();
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    let mut positive = true;
    for _ in 0..20 {
        let n = r.random_range(2..=8);
        let mut energies: Vec<f64> = (0..n).map(|_| r.random_range(0.0..2.0)).collect();
        energies.sort_by(f64::total_cmp);
        let temperature = Temperature::Finite(r.random_range(0.2..5.0));
        let d = gibbs_vector(&EnergySpec::new(energies, temperature).unwrap()).unwrap();
        let b = b0_thermal(&thermal_model(&d).unwrap()).unwrap();
        let t = 50.0 / b.norm1();
        for i in 0..n {
            let x = evolve(&b, &SimplexVector::vertex(n, i).unwrap(), t).unwrap();
            worst = worst.max(l1(x.as_slice(), d.as_slice()));
        }
        positive &= propagator(&b, 1.0).iter().all(|v| *v > 0.0);
    }
    report(
        11,
        worst <= 1e-8 && positive,
        start.elapsed(),
        format!("max l1 distance to d at t = 50/|B| is {worst:.2e}; exp(-B) entrywise positive: {positive}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> bool); 11] = [
        (1, criterion_01_example1),
        (2, criterion_02_example3),
        (3, criterion_03_example2_blocks),
        (4, criterion_04_restriction_oracle),
        (5, criterion_05_bidiagonal_closed_form),
        (6, criterion_06_exact_steering),
        (7, criterion_07_theorem1_full_scheme),
        (8, criterion_08_theorem2),
        (9, criterion_09_majorization_bound),
        (10, criterion_10_gksl_invariants),
        (11, criterion_11_relaxation),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        // a panic inside a criterion counts as its failure
        let pass = panic::catch_unwind(run).unwrap_or_else(|_| {
            println!("criterion {id}: FAIL (panicked)");
            false
        });
        failed += usize::from(!pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
