//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use qcx::alternatives::{gordan_alternative, gordan_dual_system, strict_feasibility, GordanResult};
use qcx::charac::{classify_dichotomy, enumerate_solution_set, membership};
use qcx::cli::registry::{self, Builtin};
use qcx::cli::LoadedProblem;
use qcx::kkt::{lagrangian_constancy, member_x1, membership_constrained, solve_multipliers};
use qcx::linalg::{dot, norm, norm_inf};
use qcx::oracle::brute_force_solutions;
use qcx::subdiff::{default_gp_candidates, default_ml_candidates, gp_solution_check, ml_solution_set_1d, MlForm};
use qcx::{Alternative, CharacVariant, Config, MultiplierVector, Program, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use CharacVariant::*;

const EPS_OPT: f64 = 1e-9;
const COSINE_FLOOR: f64 = 1.0 - 1e-8;
const GORDAN_RESIDUAL: f64 = 1e-9;
const GORDAN_CASES: usize = 1000;
const GORDAN_SEED: u64 = 20_240_601;
const AD_POINTS: usize = 100;
const AD_STEP: f64 = 1e-6;
const AD_RELATIVE: f64 = 1e-6;
const NESTING_POINTS: usize = 500;
const KKT_RESIDUAL: f64 = 1e-9;
const LAMBDA_MATCH: f64 = 1e-6;
const AC1_BUDGET: Duration = Duration::from_secs(1);
const AC7_BUDGET: Duration = Duration::from_secs(5);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load(name: &str) -> (Builtin, LoadedProblem) {
    let b = registry::builtin(name).expect("builtin exists");
    let p = b.file.load().expect("builtin loads");
    (b, p)
}

fn xbar(b: &Builtin) -> Vec<f64> {
    b.file.known_solution.clone().expect("builtins carry a known solution")
}

fn grid_where(p: &dyn Program, res: usize, cfg: &Config, keep: impl Fn(&[f64]) -> bool) -> Vec<Vector> {
    p.feasible_grid(res, cfg).unwrap().into_iter().filter(|x| keep(x)).collect()
}

fn fmt_err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ac1() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let (b, lp) = load("ex2_1");
    let p = lp.program();
    let o = brute_force_solutions(p, 41, EPS_OPT, &cfg).map_err(fmt_err)?;
    ensure(o.min_value == 0.0, || format!("min {}", o.min_value))?;
    let expected = grid_where(p, 41, &cfg, |x| x[1] == 0.0 && (1.0..=2.0).contains(&x[0]));
    ensure(expected.len() == 41, || format!("{} closed-form points", expected.len()))?;
    ensure(o.solution_points == expected, || "oracle set differs from x2 = 0".into())?;
    for v in [SHat1, SHat2, S1, S2, S3, S4, S5] {
        let got = enumerate_solution_set(p, &xbar(&b), v, 41, &cfg).map_err(fmt_err)?;
        ensure(got == o.solution_points, || {
            format!("{v}: {} points vs oracle {}", got.len(), o.solution_points.len())
        })?;
    }
    let t = start.elapsed();
    ensure(t < AC1_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("41 solutions, 7 variants agree, {t:?}"))
}

fn ac2() -> Outcome {
    let cfg = Config::default();
    let (b, lp) = load("ex2_2");
    let p = lp.program();
    let got = enumerate_solution_set(p, &xbar(&b), SHat1, 13, &cfg).map_err(fmt_err)?;
    let expected = grid_where(p, 13, &cfg, |x| x[0] == -1.0);
    ensure(!expected.is_empty() && got == expected, || format!("{} vs {} points", got.len(), expected.len()))?;
    Ok(format!("{} points on x1 = -1", got.len()))
}

fn ac3() -> Outcome {
    let cfg = Config::default();
    let (b, lp) = load("ex2_3");
    let got = enumerate_solution_set(lp.program(), &xbar(&b), S1, b.resolution, &cfg).map_err(fmt_err)?;
    ensure(got.len() == 1 && got[0].as_slice() == [1.0, 1.0], || format!("{got:?}"))?;

    let (bc, lc) = load("ex2_3_constrained");
    let cp = lc.constrained().unwrap();
    let x = xbar(&bc);
    let m = solve_multipliers(cp, &x, &cfg).map_err(fmt_err)?;
    // independent value: λ = −⟨∇f, ∇g⟩ / ‖∇g‖² from central differences
    let gf = cp.objective.grad_fd(&x, AD_STEP, &cfg).map_err(fmt_err)?;
    let gg = cp.constraints[0].grad_fd(&x, AD_STEP, &cfg).map_err(fmt_err)?;
    let derived = -dot(&gf, &gg) / dot(&gg, &gg);
    let lambda = m.lambda.lambdas()[0];
    ensure((lambda - 0.5).abs() <= KKT_RESIDUAL, || format!("lambda {lambda}"))?;
    ensure((lambda - derived).abs() <= LAMBDA_MATCH, || format!("lambda {lambda} vs finite differences {derived}"))?;
    ensure(m.stationarity_residual <= KKT_RESIDUAL, || format!("stationarity {:e}", m.stationarity_residual))?;
    Ok(format!("S1 = {{(1,1)}}, lambda = {lambda}, stationarity {:e}", m.stationarity_residual))
}

fn ac4() -> Outcome {
    let cfg = Config::default();
    let (b, lp) = load("ex2_4");
    let p = lp.program();
    let o = brute_force_solutions(p, 17, EPS_OPT, &cfg).map_err(fmt_err)?;
    let d = classify_dichotomy(p, &o.solution_points, &cfg).map_err(fmt_err)?;
    ensure(d.alternative == Alternative::II, || format!("{:?}", d.alternative))?;
    let x = xbar(&b);
    let got = enumerate_solution_set(p, &x, STilde, 17, &cfg).map_err(fmt_err)?;
    let expected = grid_where(p, 17, &cfg, |x| x[0] == 0.0 && x[1] <= 0.0);
    ensure(got == expected, || format!("STILDE {} vs closed form {}", got.len(), expected.len()))?;
    let cands = default_gp_candidates(p, &x, 8, &cfg).map_err(fmt_err)?;
    let mut gp = Vec::new();
    for y in p.feasible_grid(17, &cfg).map_err(fmt_err)? {
        if gp_solution_check(p, &x, &y, &cands, p.domain_window(), 17, &cfg).map_err(fmt_err)?.member {
            gp.push(y);
        }
    }
    ensure(gp == expected, || format!("GP route {} vs {}", gp.len(), expected.len()))?;
    Ok(format!("Alternative II, STILDE = GP = {} points", got.len()))
}

fn ac5() -> Outcome {
    let cfg = Config::default();
    let (_, lp) = load("ex4_1");
    let p = lp.program();
    let expected = grid_where(p, 201, &cfg, |x| (0.0..=1.0).contains(&x[0]));
    let o = brute_force_solutions(p, 201, EPS_OPT, &cfg).map_err(fmt_err)?;
    ensure(o.solution_points == expected, || format!("oracle {} vs {}", o.solution_points.len(), expected.len()))?;
    let st = enumerate_solution_set(p, &[0.0], STilde, 201, &cfg).map_err(fmt_err)?;
    ensure(st == expected, || format!("STILDE {} vs {}", st.len(), expected.len()))?;
    let w = p.domain_window().padded(0.5);
    let cands = default_ml_candidates();
    let grid = p.feasible_grid(201, &cfg).map_err(fmt_err)?;
    let ml = ml_solution_set_1d(p, 0.0, &grid, &cands, &w, 401, MlForm::M2, &cfg).map_err(fmt_err)?;
    ensure(ml == expected, || format!("ML {} vs {}", ml.len(), expected.len()))?;
    Ok(format!("oracle = STILDE = ML(M2) = {} points", expected.len()))
}

fn ac6() -> Outcome {
    let cfg = Config::default();
    let mut lines = Vec::new();
    for b in registry::all() {
        let lp = b.file.load().map_err(fmt_err)?;
        let p = lp.program();
        let o = brute_force_solutions(p, b.resolution, EPS_OPT, &cfg).map_err(fmt_err)?;
        let d = classify_dichotomy(p, &o.solution_points, &cfg).map_err(|e| format!("{}: {e}", b.name))?;
        ensure(d.alternative == b.alternative, || format!("{}: {:?}", b.name, d.alternative))?;
        let grads: Vec<Vector> = o.solution_points.iter().map(|x| p.objective().grad(x, &cfg).unwrap()).collect();
        let zero = grads.iter().filter(|g| g.norm() <= cfg.eps_grad).count();
        ensure(zero == 0 || zero == grads.len(), || format!("{}: {zero} of {} zero gradients", b.name, grads.len()))?;
        if d.alternative == Alternative::I {
            let mut worst: f64 = 1.0;
            for i in 0..grads.len() {
                for j in i + 1..grads.len() {
                    worst = worst.min(dot(&grads[i], &grads[j]) / (norm(&grads[i]) * norm(&grads[j])));
                }
            }
            ensure(worst >= COSINE_FLOOR, || format!("{}: cosine {worst}", b.name))?;
        }
        lines.push(format!("{}:{:?}", b.name, d.alternative));
    }
    Ok(lines.join(" "))
}

fn ac7() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(GORDAN_SEED);
    let (mut primal, mut dual) = (0, 0);
    for case in 0..GORDAN_CASES {
        let m = rng.random_range(1..=5);
        let n = rng.random_range(1..=5);
        let a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()).collect();
        let neg: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        match gordan_alternative(&a, &cfg).map_err(|e| format!("case {case}: {e}"))? {
            GordanResult::Primal { x, .. } => {
                let min = a.iter().map(|r| dot(r, &x)).fold(f64::INFINITY, f64::min);
                ensure(min > 0.0, || format!("case {case}: min Ax = {min}"))?;
                let other = gordan_dual_system(&a, &cfg).map_err(fmt_err)?;
                ensure(other.is_none(), || format!("case {case}: dual also solvable"))?;
                primal += 1;
            }
            GordanResult::Dual { y } => {
                let aty: Vec<f64> = (0..n).map(|j| a.iter().zip(y.iter()).map(|(r, yi)| r[j] * yi).sum()).collect();
                let sum: f64 = y.iter().sum();
                ensure(norm_inf(&aty) <= GORDAN_RESIDUAL, || format!("case {case}: |A'y| = {:e}", norm_inf(&aty)))?;
                ensure(y.iter().all(|v| *v >= 0.0) && (sum - 1.0).abs() <= GORDAN_RESIDUAL, || {
                    format!("case {case}: y = {y:?}")
                })?;
                let other = strict_feasibility(n, &[], &[], &neg, &vec![0.0; m], &cfg).map_err(fmt_err)?;
                ensure(other.is_none(), || format!("case {case}: primal also solvable"))?;
                dual += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < AC7_BUDGET, || format!("took {t:?}"))?;
    Ok(format!("{primal} primal, {dual} dual, {t:?}"))
}

fn ac8() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for b in registry::all() {
        let lp = b.file.load().map_err(fmt_err)?;
        let p = lp.program();
        for _ in 0..AD_POINTS {
            let x = p.domain_window().sample(&mut rng, 0.0);
            let g = p.objective().grad(&x, &cfg).map_err(|e| format!("{} at {x:?}: {e}", b.name))?;
            let fd = p.objective().grad_fd(&x, AD_STEP, &cfg).map_err(fmt_err)?;
            let diff = norm_inf(&qcx::linalg::sub(&g, &fd));
            let bound = AD_RELATIVE * (1.0 + norm_inf(&g));
            ensure(diff <= bound, || format!("{} at {x:?}: {diff:e} > {bound:e}", b.name))?;
            worst = worst.max(diff / bound);
        }
    }
    Ok(format!("{} builtins x {AD_POINTS} points, worst ratio {worst:.2e}", registry::NAMES.len()))
}

/// `(stronger, weaker)` implications checked at every point.
fn implications(b: &Builtin, cfg: &Config, lp: &LoadedProblem) -> Vec<(CharacVariant, CharacVariant)> {
    if lp.constrained().is_some() {
        return vec![
            (SHatPrime1, SHatPrime2),
            (SPrime5, SPrime1),
            (SPrime1, SPrime2),
            (SPrime5, SPrime3),
            (SPrime3, SPrime4),
        ];
    }
    let g = lp.program().objective().grad(&xbar(b), cfg).unwrap();
    if g.norm() > cfg.eps_grad {
        vec![(SHat1, SHat2), (S5, S1), (S1, S2), (S5, S3), (S3, S4)]
    } else {
        // the S families need a nonzero anchor gradient; their T counterparts do not
        vec![(THat1, THat2), (T5, T1), (T1, T2), (T5, T3), (T3, T4)]
    }
}

fn ac9() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0usize;
    for b in registry::all() {
        let lp = b.file.load().map_err(fmt_err)?;
        let p = lp.program();
        let x0 = xbar(&b);
        let lambda = b.lambda.clone().map(|l| MultiplierVector::new(l).unwrap());
        let rules = implications(&b, &cfg, &lp);
        let mut points: Vec<Vector> = (0..NESTING_POINTS).map(|_| p.domain_window().sample(&mut rng, 0.0)).collect();
        points.extend(p.feasible_grid(b.resolution, &cfg).map_err(fmt_err)?);
        for x in &points {
            let member = |v: CharacVariant| -> Result<bool, String> {
                let r = match (&lambda, lp.constrained()) {
                    (Some(l), Some(cp)) => membership_constrained(cp, &x0, l, x, v, &cfg),
                    _ => membership(p, &x0, x, v, &cfg),
                };
                r.map(|m| m.member).map_err(|e| format!("{} {v} at {x:?}: {e}", b.name))
            };
            for &(strong, weak) in &rules {
                if member(strong)? && !member(weak)? {
                    return Err(format!("{}: {strong} holds but {weak} fails at {x:?}", b.name));
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} points, zero violations"))
}

fn ac10() -> Outcome {
    let cfg = Config::default();
    let mut lines = Vec::new();
    for b in registry::all().into_iter().filter(|b| b.lambda.is_some()) {
        let lp = b.file.load().map_err(fmt_err)?;
        let cp = lp.constrained().unwrap();
        let x = xbar(&b);
        let m = solve_multipliers(cp, &x, &cfg).map_err(fmt_err)?;
        let l = m.lambda.lambdas();
        // recompute both residuals from scratch
        let mut r = cp.objective.grad(&x, &cfg).unwrap().into_inner();
        for (li, g) in l.iter().zip(&cp.constraints) {
            r = qcx::linalg::axpy(*li, &g.grad(&x, &cfg).unwrap(), &r);
        }
        let stationarity = norm_inf(&r);
        let gvals = cp.constraint_values(&x, &cfg).unwrap();
        let slack = l.iter().zip(&gvals).map(|(li, gi)| (li * gi).abs()).fold(0.0, f64::max);
        ensure(stationarity <= KKT_RESIDUAL && m.stationarity_residual <= KKT_RESIDUAL, || {
            format!("{}: stationarity {stationarity:e} / reported {:e}", b.name, m.stationarity_residual)
        })?;
        ensure(slack <= KKT_RESIDUAL && m.complementarity_residual <= KKT_RESIDUAL, || {
            format!("{}: complementarity {slack:e}", b.name)
        })?;
        let o = brute_force_solutions(cp, b.resolution, EPS_OPT, &cfg).map_err(fmt_err)?;
        for s in &o.solution_points {
            ensure(member_x1(cp, &x, &m.lambda, s, &cfg).map_err(fmt_err)?, || format!("{}: {s:?} not in X1", b.name))?;
        }
        let lag = lagrangian_constancy(cp, &x, &m.lambda, &o.solution_points, &cfg).map_err(fmt_err)?;
        ensure(lag.constant && lag.max_deviation <= KKT_RESIDUAL, || {
            format!("{}: Lagrangian deviation {:e}", b.name, lag.max_deviation)
        })?;
        lines.push(format!("{}: lambda {:?}, {} solutions in X1", b.name, l, o.solution_points.len()));
    }
    ensure(!lines.is_empty(), || "no constrained builtin".into())?;
    Ok(lines.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 ex2_1 oracle and seven variants", ac1),
        ("AC2 ex2_2 SHAT1", ac2),
        ("AC3 ex2_3 singleton and multiplier", ac3),
        ("AC4 ex2_4 dichotomy, STILDE, GP", ac4),
        ("AC5 ex4_1 three routes", ac5),
        ("AC6 dichotomy exclusivity", ac6),
        ("AC7 Gordan suite", ac7),
        ("AC8 AD vs finite differences", ac8),
        ("AC9 nesting", ac9),
        ("AC10 KKT suite", ac10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
