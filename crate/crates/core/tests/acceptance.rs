//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use opconn::classify::{classify_connection, projection_fixed_points, regularity_witness};
use opconn::function::catalog_examples;
use opconn::measure::{fn_from_measure, known_measure_of};
use opconn::random::{derive_seed, random_pd, random_psd_rank, rng_from_seed};
use opconn::solver::{quasi_arithmetic_solvability, solution_continuity_probe, solve_left, SolveStatus};
use opconn::symmetric::loewner_margin;
use opconn::{Connection, FiniteMeasure, FunctionSpec, PdMatrix, PsdMatrix, SymmetricMatrix, Tolerances};

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn conn(f: FunctionSpec) -> Connection {
    Connection::from_function(f).expect("catalog connection")
}

/// `Q φ(Λ) Qᵀ` computed straight from nalgebra.
fn spectral(m: &DMatrix<f64>, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(phi));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

fn dense(m: &SymmetricMatrix) -> DMatrix<f64> {
    m.as_matrix().clone()
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

fn cancellable_catalog() -> Vec<FunctionSpec> {
    catalog_examples()
        .into_iter()
        .filter(|f| !f.is_constant() && !f.is_scalar_identity())
        .collect()
}

fn nonregular(f: &FunctionSpec) -> bool {
    f.eval(0.0).unwrap() == 0.0
}

fn c1_solver_roundtrip() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let catalog = cancellable_catalog();
    for (ci, f) in catalog.iter().enumerate() {
        let sigma = conn(f.clone());
        for trial in 0..200u64 {
            let mut rng = rng_from_seed(derive_seed(1000 + ci as u64, trial));
            let n = rng.random_range(1..=6);
            let rank = rng.random_range(0..=n);
            let a = random_pd(&mut rng, n, 0.2, 5.0);
            let x0 = random_psd_rank(&mut rng, n, rank.max(1), 0.2, 5.0);
            let ok = sigma
                .evaluate(&a, &x0)
                .and_then(|b| solve_left(&sigma, &a, &b))
                .ok()
                .and_then(|r| r.x)
                .map(|x| x.distance(&x0).unwrap() / x0.frobenius_norm());
            match ok {
                Some(err) => worst = worst.max(err),
                None => failures += 1,
            }
        }
    }
    verdict(
        failures == 0 && worst <= 1e-7,
        format!(
            "{} connections x 200 trials, worst relative error {worst:.2e} (<= 1e-7), {failures} unsolved",
            catalog.len()
        ),
    )
}

fn c2_quasi_closed_form() -> Verdict {
    let tol = Tolerances::default();
    let mut worst_solver: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    let mut gate_errors = Vec::new();
    for p in [-1.0, -0.5, 0.5, 1.0] {
        for alpha in [0.25, 0.5, 0.75] {
            let sigma = conn(FunctionSpec::quasi_arithmetic(p, alpha).unwrap());
            let t: f64 = (1.0f64 - alpha).powf(1.0 / p);
            for trial in 0..20u64 {
                let mut rng = rng_from_seed(derive_seed(2000, trial));
                let n = rng.random_range(2..=5);
                let a = random_pd(&mut rng, n, 0.3, 3.0);
                let x0 = random_pd(&mut rng, n, 0.3, 3.0).into_psd();
                let b = sigma.evaluate(&a, &x0).unwrap();

                // X = A^{1/2} f_{p,1/α}(A^{-1/2} B A^{-1/2}) A^{1/2}, built in place.
                let ad = dense(&a);
                let root = spectral(&ad, f64::sqrt);
                let inv_root = spectral(&ad, |v| 1.0 / v.sqrt());
                let m = &inv_root * dense(&b) * &inv_root;
                let finv = |y: f64| {
                    if p < 0.0 && y <= 0.0 {
                        0.0
                    } else {
                        (1.0 - 1.0 / alpha + y.powf(p) / alpha).max(0.0).powf(1.0 / p)
                    }
                };
                let oracle = &root * spectral(&(&m + m.transpose()).scale(0.5), finv) * &root;
                let solved = solve_left(&sigma, &a, &b).unwrap().x.unwrap();
                worst_solver = worst_solver.max((dense(&solved) - &oracle).norm());
                let closed = quasi_arithmetic_solvability(p, alpha, &a, &b, &tol).unwrap();
                worst_solver = worst_solver.max((dense(&closed.solution.unwrap()) - &oracle).norm());

                // The power-mean formula coincides when A and B commute.
                let da: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
                let dx: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
                let a_c = PdMatrix::from_diagonal(&da).unwrap();
                let x_c = PsdMatrix::from_diagonal(&dx).unwrap();
                let b_c = sigma.evaluate(&a_c, &x_c).unwrap();
                let power = |ma: &DMatrix<f64>, mb: &DMatrix<f64>| {
                    let s = spectral(ma, |v| v.powf(p)) * (1.0 - 1.0 / alpha)
                        + spectral(mb, |v| v.powf(p)) / alpha;
                    spectral(&(&s + s.transpose()).scale(0.5), |v| v.powf(1.0 / p))
                };
                let x_solved = solve_left(&sigma, &a_c, &b_c).unwrap().x.unwrap();
                worst_power = worst_power.max((dense(&x_solved) - power(&dense(&a_c), &dense(&b_c))).norm());
                if p.abs() == 1.0 {
                    worst_power = worst_power.max((dense(&solved) - power(&ad, &dense(&b))).norm());
                }
            }

            // Gates on constructed boundary cases.
            let a = PdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]], 1e-12).unwrap();
            let ta = a.scale(t);
            let bump = SymmetricMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
            let psd = |m: SymmetricMatrix| PsdMatrix::new(m, 1e-12).unwrap();
            let cases: Vec<(PsdMatrix, bool)> = if p > 0.0 {
                vec![
                    (psd(ta.clone()), true),
                    (psd(ta.add(&bump.scale(1e-3)).unwrap()), true),
                    (psd(ta.sub(&bump.scale(1e-3)).unwrap()), false),
                ]
            } else {
                vec![
                    (psd(ta.clone()), false),
                    (psd(ta.sub(&bump.scale(1e-3)).unwrap()), false),
                    (psd(ta.scale(0.999)), true),
                    (PsdMatrix::zeros(2), true),
                ]
            };
            for (b, want) in cases {
                let got = quasi_arithmetic_solvability(p, alpha, &a, &b, &tol).unwrap().solvable;
                let solver = solve_left(&sigma, &a, &b).unwrap().status == SolveStatus::UniqueSolution;
                if got != want || solver != want {
                    gate_errors.push(format!("p={p} alpha={alpha} want {want}"));
                }
            }
        }
    }
    verdict(
        worst_solver <= 1e-8 && worst_power <= 1e-8 && gate_errors.is_empty(),
        format!(
            "congruence form gap {worst_solver:.2e}, power formula gap (commuting, p=+-1) {worst_power:.2e} (<= 1e-8), gate errors {gate_errors:?}"
        ),
    )
}

fn c3_integral_representation() -> Verdict {
    let arcsine = FiniteMeasure::arcsine(200).unwrap();
    let mut worst_sqrt: f64 = 0.0;
    for i in 0..=400 {
        let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 400.0);
        worst_sqrt = worst_sqrt.max((fn_from_measure(&arcsine, x).unwrap() - x.sqrt()).abs());
    }
    let mut worst_atomic: f64 = 0.0;
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let ar = FiniteMeasure::new(vec![(0.0, 1.0 - alpha), (1.0, alpha)], None).unwrap();
        let ha = FiniteMeasure::dirac(alpha, 1.0).unwrap();
        let known_ar = known_measure_of(&FunctionSpec::arithmetic(alpha).unwrap()).unwrap();
        let known_ha = known_measure_of(&FunctionSpec::harmonic(alpha).unwrap()).unwrap();
        for i in 0..=200 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 200.0);
            let arith = 1.0 - alpha + alpha * x;
            let harm = x / ((1.0 - alpha) * x + alpha);
            for (mu, want) in [(&ar, arith), (&known_ar, arith), (&ha, harm), (&known_ha, harm)] {
                let got = fn_from_measure(mu, x).unwrap();
                worst_atomic = worst_atomic.max((got - want).abs() / (1.0 + want.abs()));
            }
        }
    }
    verdict(
        worst_sqrt <= 1e-6 && worst_atomic <= 1e-12,
        format!("arcsine N=200 vs sqrt {worst_sqrt:.2e} (<= 1e-6), atomic {worst_atomic:.2e} (<= 1e-12)"),
    )
}

fn c4_axiom_harness() -> Verdict {
    use opconn::axioms::*;
    let mut worst = [0.0f64; 4];
    let mut failing = Vec::new();
    for (i, f) in catalog_examples().into_iter().enumerate() {
        let sigma = conn(f.clone());
        let r = verify_axioms(&sigma, 500, 4, 4000 + i as u64).unwrap();
        for (k, name) in [M1, M2_INEQUALITY, M2_EQUALITY, M3_MONOTONE].iter().enumerate() {
            worst[k] = worst[k].max(r.get(name).unwrap().worst_violation);
        }
        if !r.all_pass() {
            let names: Vec<&String> = r.axioms.iter().filter(|(_, s)| !s.passed()).map(|(n, _)| n).collect();
            failing.push(format!("{f}: {names:?}"));
        }
    }
    let within = worst[0] <= 1e-8 && worst[1] <= 1e-8 && worst[2] <= 1e-8 && worst[3] <= 1e-9;
    verdict(
        within && failing.is_empty(),
        format!(
            "500 trials per connection, worst M1 {:.1e}, M2 {:.1e}, congruence {:.1e}, M3 decrease {:.1e}; failing {failing:?}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c5_regularity_table() -> Verdict {
    let mut errors = Vec::new();
    for f in catalog_examples() {
        let sigma = conn(f.clone());
        let class = classify_connection(&sigma);
        let expected_regular = match f {
            FunctionSpec::Logarithmic
            | FunctionSpec::DualLogarithmic
            | FunctionSpec::WeightedGeometric { .. }
            | FunctionSpec::WeightedHarmonic { .. } => Some(false),
            FunctionSpec::WeightedArithmetic { alpha } => {
                if class.witnesses["f(0)"] != 1.0 - alpha {
                    errors.push(format!("{f}: f(0) = {}", class.witnesses["f(0)"]));
                }
                Some(true)
            }
            _ => None,
        };
        if let Some(want) = expected_regular {
            if class.regular != want {
                errors.push(format!("{f}: regular = {}", class.regular));
            }
        }
        for dim in [1, 3, 5] {
            let ev = regularity_witness(&sigma, dim, 5000).unwrap();
            if !ev.consistent || ev.regular != class.regular {
                errors.push(format!("{f} dim {dim}: inconsistent witnesses"));
            }
        }
    }
    verdict(errors.is_empty(), format!("catalog regularity and six-way witness consistency; errors {errors:?}"))
}

fn c6_cancellability_table() -> Verdict {
    let mut errors = Vec::new();
    for k in [0.5, 1.0, 3.0] {
        let c = classify_connection(&conn(FunctionSpec::constant(k).unwrap()));
        if c.left_cancellable || !c.right_cancellable {
            errors.push(format!("constant {k}"));
        }
        let c = classify_connection(&conn(FunctionSpec::scalar_identity(k).unwrap()));
        if !c.left_cancellable || c.right_cancellable {
            errors.push(format!("scalar_identity {k}"));
        }
    }
    let mut nontrivial = 0;
    for f in catalog_examples() {
        let c = classify_connection(&conn(f.clone()));
        if c.nontrivial_mean {
            nontrivial += 1;
            if !c.cancellable {
                errors.push(format!("{f} not cancellable"));
            }
        }
        if known_measure_of(&f).is_some() && c.measure_consistent != Some(true) {
            errors.push(format!("{f}: measure side disagrees"));
        }
    }
    verdict(
        errors.is_empty() && nontrivial > 0,
        format!("{nontrivial} nontrivial means cancellable, trivial cases rejected; errors {errors:?}"),
    )
}

fn c7_order_counterexample() -> Verdict {
    let a = PsdMatrix::from_rows(&[vec![2.0, 2.0], vec![2.0, 2.0]], 1e-12).unwrap();
    let b = PsdMatrix::from_rows(&[vec![5.0, 3.0], vec![3.0, 2.0]], 1e-12).unwrap();
    let sigma = conn(FunctionSpec::geometric(0.5).unwrap());
    let id = PsdMatrix::identity(2);
    let ia = sigma.evaluate(&id, &a).unwrap();
    let ib = sigma.evaluate(&id, &b).unwrap();
    // A^{1/2} = [[1,1],[1,1]] and B^{1/2} = [[2,1],[1,1]] exactly.
    let root_a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let root_b = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    let root_err = (dense(&ia) - root_a).norm().max((dense(&ib) - root_b).norm());
    let roots = loewner_margin(&ia, &ib).unwrap();
    let plain = loewner_margin(&a, &b).unwrap();
    let oracle_plain = min_eig(&(dense(&b) - dense(&a)));
    verdict(
        roots >= -1e-10 && plain <= -0.1 && (plain - oracle_plain).abs() < 1e-12 && root_err < 1e-12,
        format!("min eig(B^1/2 - A^1/2) = {roots:.2e} (>= -1e-10), min eig(B - A) = {plain:.6} (<= -0.1)"),
    )
}

fn c8_zero_equation() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    let mut counted = (0, 0);
    for f in cancellable_catalog() {
        let sigma = conn(f.clone());
        let zero_regular = !nonregular(&f);
        for trial in 0..50u64 {
            let mut rng = rng_from_seed(derive_seed(8000, trial));
            let n = rng.random_range(1..=6);
            let a = random_pd(&mut rng, n, 0.2, 5.0);
            let r = opconn::classify::zero_equation(&sigma, &a).unwrap();
            if zero_regular {
                counted.1 += 1;
                if r.status != SolveStatus::RangeViolation {
                    errors.push(format!("{f}: {:?}", r.status));
                }
            } else {
                counted.0 += 1;
                match r.x {
                    Some(x) => worst = worst.max(x.frobenius_norm()),
                    None => errors.push(format!("{f}: {:?}", r.status)),
                }
            }
        }
    }
    verdict(
        worst <= 1e-7 && errors.is_empty(),
        format!(
            "{} nonregular solves, worst ||X|| {worst:.2e} (<= 1e-7); {} regular solves all RangeViolation; errors {}",
            counted.0,
            counted.1,
            errors.len()
        ),
    )
}

fn c9_projection_fixed_points() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut errors = Vec::new();
    for f in catalog_examples() {
        let sigma = conn(f.clone());
        if !sigma.is_mean() {
            continue;
        }
        for dim in [2, 4, 8] {
            let r = projection_fixed_points(&sigma, dim, 9000 + dim as u64).unwrap();
            if !r.regular {
                worst = worst.max(r.worst_projection_residual);
            }
            if !r.holds() {
                errors.push(format!("{f} dim {dim}"));
            }
            if r.nontrivial_mean && r.grid_points != 1000 {
                errors.push(format!("{f}: grid {}", r.grid_points));
            }
        }
    }
    verdict(
        worst <= 1e-9 && errors.is_empty(),
        format!("worst ||I s P - P|| {worst:.2e} (<= 1e-9) over 50 projections per dim in {{2,4,8}}; sandwich lemma on 1000 points; errors {errors:?}"),
    )
}

fn c10_continuity_probe() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    let log_prime = |x: f64| {
        let l = x.ln();
        (l - (x - 1.0) / x) / (l * l)
    };
    // (connection, c, derivative of f^{-1} at c)
    let cases: Vec<(Connection, f64, f64)> = vec![
        (conn(FunctionSpec::geometric(0.5).unwrap()), 1.0, 2.0),
        (conn(FunctionSpec::geometric(0.5).unwrap()), 2.0, 4.0),
        (conn(FunctionSpec::Logarithmic), 1.0, 2.0),
        (conn(FunctionSpec::Logarithmic), 2.0, 1.0 / log_prime(3.512_862_417_252_339)),
    ];
    for (sigma, c, oracle) in cases {
        let a = PdMatrix::identity(3);
        let b = PsdMatrix::new(SymmetricMatrix::scaled_identity(3, c), 0.0).unwrap();
        let ratios: Vec<f64> = [1e-4, 1e-5, 1e-6]
            .iter()
            .map(|&d| solution_continuity_probe(&sigma, &a, &b, d).unwrap())
            .collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        let stable = hi / lo <= 2.0;
        let matches = ratios.iter().all(|r| (r - oracle).abs() <= 0.05 * oracle);
        pass &= stable && matches;
        details.push(format!("{} at {c}I: {ratios:.4?} vs {oracle:.4}", sigma.label()));
    }
    verdict(pass, details.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("solver roundtrip", c1_solver_roundtrip),
        ("quasi-arithmetic closed form", c2_quasi_closed_form),
        ("integral representation", c3_integral_representation),
        ("axiom harness", c4_axiom_harness),
        ("regularity table", c5_regularity_table),
        ("cancellability table", c6_cancellability_table),
        ("order-cancellability counterexample", c7_order_counterexample),
        ("zero equation", c8_zero_equation),
        ("projection fixed points", c9_projection_fixed_points),
        ("continuity probe", c10_continuity_probe),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {:>2} [{name}]: {status} ({:.1}s) {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
