use proptest::prelude::*;

use qcx::alternatives::{
    collinearity_factor, gordan_alternative, gordan_dual_system, strict_feasibility, GordanResult,
};
use qcx::charac::membership;
use qcx::cli::registry;
use qcx::expr::{parse, Expr};
use qcx::linalg::{dot, norm_inf, sub};
use qcx::oracle::brute_force_solutions;
use qcx::subdiff::gp_member;
use qcx::{CharacVariant, Config, Window};

fn matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-1.0f64..=1.0, n), m))
}

fn expr(n: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-4i32..=4).prop_map(|k| Expr::Const(k as f64 * 0.5)), (0..n).prop_map(Expr::Var),];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 0i32..=3).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            // denominators and radicands kept away from zero
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(
                Box::new(a),
                Box::new(Expr::Add(Box::new(Expr::Const(1.0)), Box::new(Expr::Pow(Box::new(b), 2))))
            )),
            inner.clone().prop_map(|a| Expr::Sqrt(Box::new(Expr::Add(
                Box::new(Expr::Const(1.0)),
                Box::new(Expr::Pow(Box::new(a), 2))
            )))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn gordan_branches_are_exclusive(a in matrix()) {
        let cfg = Config::default();
        let m = a.len();
        let n = a[0].len();
        match gordan_alternative(&a, &cfg).unwrap() {
            GordanResult::Primal { x, margin } => {
                prop_assert!(margin > 0.0);
                prop_assert!(a.iter().all(|r| dot(r, &x) > 0.0));
                prop_assert!(gordan_dual_system(&a, &cfg).unwrap().is_none());
            }
            GordanResult::Dual { y } => {
                let aty: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[i][j] * y[i]).sum()).collect();
                prop_assert!(norm_inf(&aty) <= 1e-9);
                let neg: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
                prop_assert!(strict_feasibility(n, &[], &[], &neg, &vec![0.0; m], &cfg).unwrap().is_none());
            }
        }
    }

    #[test]
    fn collinearity_recovers_positive_factors(
        a in prop::collection::vec(-3.0f64..3.0, 1..5),
        p in 0.1f64..10.0,
    ) {
        prop_assume!(norm_inf(&a) > 0.1);
        let cfg = Config::default();
        let b: Vec<f64> = a.iter().map(|v| p * v).collect();
        let got = collinearity_factor(&a, &b, &cfg).unwrap().unwrap();
        prop_assert!((got - p).abs() <= 1e-12 * p.max(1.0));
        let flipped: Vec<f64> = b.iter().map(|v| -v).collect();
        prop_assert_eq!(collinearity_factor(&a, &flipped, &cfg).unwrap(), None);
    }

    #[test]
    fn print_then_parse_is_identity(e in expr(3), x in prop::collection::vec(-2.0f64..2.0, 3)) {
        let cfg = Config::default();
        let text = e.to_string();
        let back = parse(&text, 3).unwrap();
        prop_assert_eq!(back.to_string(), text);
        match (e.eval(&x, &cfg), back.eval(&x, &cfg)) {
            (Ok(a), Ok(b)) => prop_assert!(a == b || (a.is_nan() && b.is_nan())),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn dual_gradient_matches_finite_differences(e in expr(2), x in prop::collection::vec(-1.0f64..1.0, 2)) {
        let cfg = Config::default();
        let (Ok(g), Ok(fd)) = (e.grad(&x, &cfg), e.grad_fd(&x, 1e-6, &cfg)) else { return Ok(()) };
        let scale = 1.0 + norm_inf(&g);
        prop_assume!(g.iter().all(|v| v.is_finite()) && scale < 1e4);
        prop_assert!(norm_inf(&sub(&g, &fd)) <= 1e-4 * scale, "{} at {:?}: {:?} vs {:?}", e, x, g, fd);
    }

    #[test]
    fn nested_families(i in 0usize..registry::NAMES.len(), u in prop::collection::vec(0.0f64..=1.0, 2)) {
        use CharacVariant::*;
        let b = registry::builtin(registry::NAMES[i]).unwrap();
        let lp = b.file.load().unwrap();
        prop_assume!(lp.constrained().is_none());
        let p = lp.program();
        let cfg = Config::default();
        let w = p.domain_window();
        let x: Vec<f64> = (0..p.dimension()).map(|k| w.lo[k] + u[k] * (w.hi[k] - w.lo[k])).collect();
        let x0 = b.file.known_solution.clone().unwrap();
        let zero_anchor = p.objective().grad(&x0, &cfg).unwrap().norm() <= cfg.eps_grad;
        let rules: &[(CharacVariant, CharacVariant)] = if zero_anchor {
            &[(THat1, THat2), (T5, T1), (T1, T2), (T5, T3), (T3, T4)]
        } else {
            &[(SHat1, SHat2), (S5, S1), (S1, S2), (S5, S3), (S3, S4), (S1, T1), (S4, T4)]
        };
        for &(strong, weak) in rules {
            let s = membership(p, &x0, &x, strong, &cfg).unwrap().member;
            let wk = membership(p, &x0, &x, weak, &cfg).unwrap().member;
            prop_assert!(!s || wk, "{} without {} at {:?}", strong, weak, x);
        }
    }

    #[test]
    fn gp_membership_shrinks_as_the_window_grows(v in prop::collection::vec(-1.0f64..=1.0, 2)) {
        let cfg = Config::default();
        let b = registry::builtin("ex2_4").unwrap();
        let f = b.file.load().unwrap().program().objective().clone();
        let small = Window::new(vec![-1.0; 2], vec![1.0; 2]).unwrap();
        let large = Window::new(vec![-2.0; 2], vec![2.0; 2]).unwrap();
        for x0 in [[0.0, 0.0], [0.5, -0.5], [0.0, 1.0]] {
            if gp_member(&f, &x0, &v, &large, 33, &cfg).unwrap() {
                prop_assert!(gp_member(&f, &x0, &v, &small, 17, &cfg).unwrap());
            }
        }
    }
}

#[test]
fn zero_is_a_gp_subgradient_only_at_grid_minimizers() {
    let cfg = Config::default();
    let b = registry::builtin("ex2_4").unwrap();
    let lp = b.file.load().unwrap();
    let f = lp.program().objective();
    let w = lp.program().domain_window();
    let values: Vec<f64> = w.grid(9).iter().map(|x| f.eval(x, &cfg).unwrap()).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    for (x, v) in w.grid(9).iter().zip(&values) {
        let zero_in = gp_member(f, x, &[0.0, 0.0], w, 9, &cfg).unwrap();
        assert_eq!(zero_in, *v <= min + cfg.eps_feas, "at {x:?}");
    }
}

#[test]
fn oracle_minimum_is_monotone_under_refinement() {
    let cfg = Config::default();
    for b in registry::all() {
        let lp = b.file.load().unwrap();
        let mut last = f64::INFINITY;
        // 5 -> 9 -> 17 -> 33: each grid contains the previous one
        for r in [5, 9, 17, 33] {
            let m = brute_force_solutions(lp.program(), r, cfg.eps_opt, &cfg).unwrap().min_value;
            assert!(m <= last, "{}: resolution {r} raised the minimum", b.name);
            last = m;
        }
    }
}
