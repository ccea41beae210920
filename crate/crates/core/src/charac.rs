//! Membership predicates for the solution-set families, the gradient
//! dichotomy, and windowed enumeration.
//!
//! With `a = ∇f(x)ᵀ(x̄−x)` and `b = ∇f(x̄)ᵀ(x−x̄)`:
//!
//! | variant | conditions besides `x ∈ S` |
//! |---|---|
//! | SHAT1 / SHAT2 | `b = 0` / `b <= 0`, equal normalized gradients, `∇f(x) ≠ 0` |
//! | STILDE | `∇f(x) = 0` |
//! | S1 / S2 | `a = 0` / `a >= 0`, `∇f(x) ≠ 0` |
//! | S3 / S4 | `a = b` / `a >= b`, `∇f(x) ≠ 0` |
//! | S5 | `a = b = 0`, `∇f(x) ≠ 0` |
//! | THAT1 / THAT2 | `b = 0` / `b <= 0`, `∇f(x) = p·∇f(x̄)` for some `p > 0` |
//! | T1..T5 | as S1..S5 without `∇f(x) ≠ 0` |
//!
//! The S and SHAT families need `∇f(x̄) ≠ 0`. When `∇f(x̄) = 0` the THAT
//! condition can only hold with `∇f(x) = 0`, so it is tested that way.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{axpy, cosine_distance, dot, norm, sub};
use crate::model::{
    check_point_dim, Alternative, CharacVariant, DichotomyReport, GradientWitness, MembershipVerdict, Program,
    Residual, Vector,
};

pub(crate) fn require_feasible<P: Program + ?Sized>(p: &P, x: &[f64], what: &str, cfg: &Config) -> Result<()> {
    check_point_dim(x, p.dimension())?;
    if !p.is_feasible(x, cfg)? {
        return Err(Error::Infeasible { point: x.to_vec(), reason: format!("{what} is not feasible") });
    }
    Ok(())
}

/// Splits the known solutions into Alternative I (common unit gradient) or II (all gradients zero).
pub fn classify_dichotomy<P: Program + ?Sized>(
    p: &P,
    known_solutions: &[Vector],
    cfg: &Config,
) -> Result<DichotomyReport> {
    if known_solutions.is_empty() {
        return Err(Error::InvalidInput("classification needs at least one known solution".into()));
    }
    let mut witnesses = Vec::with_capacity(known_solutions.len());
    let mut grads = Vec::with_capacity(known_solutions.len());
    for x in known_solutions {
        require_feasible(p, x, "known solution", cfg)?;
        let g = p.objective().grad(x, cfg)?;
        witnesses.push(GradientWitness { point: x.clone(), gradient_norm: g.norm() });
        grads.push(g);
    }
    let zero = witnesses.iter().filter(|w| w.gradient_norm <= cfg.eps_grad).count();
    if zero == witnesses.len() {
        return Ok(DichotomyReport { alternative: Alternative::II, common_unit_gradient: None, witnesses });
    }
    if zero > 0 {
        return Err(Error::InconsistentDichotomy(format!(
            "{zero} of {} solutions have a zero gradient",
            witnesses.len()
        )));
    }
    for i in 0..grads.len() {
        for j in i + 1..grads.len() {
            let d = cosine_distance(&grads[i], &grads[j]);
            if d > cfg.eps_dir {
                return Err(Error::InconsistentDichotomy(format!(
                    "normalized gradients at {:?} and {:?} differ (cosine distance {d:e})",
                    known_solutions[i].as_slice(),
                    known_solutions[j].as_slice()
                )));
            }
        }
    }
    let n = p.dimension();
    let mut mean = vec![0.0; n];
    for g in &grads {
        mean = axpy(1.0 / g.norm(), g, &mean);
    }
    let len = norm(&mean);
    let unit = Vector::from_raw(mean.iter().map(|v| v / len).collect());
    Ok(DichotomyReport { alternative: Alternative::I, common_unit_gradient: Some(unit), witnesses })
}

/// Verdict for one point and one unprimed variant.
pub fn membership<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    x: &[f64],
    variant: CharacVariant,
    cfg: &Config,
) -> Result<MembershipVerdict> {
    if variant.needs_multipliers() {
        return Err(Error::InvalidInput(format!("{variant} needs a multiplier vector and a constrained problem")));
    }
    require_feasible(p, xbar, "anchor x̄", cfg)?;
    check_point_dim(x, p.dimension())?;
    let f = p.objective();
    let gbar = f.grad(xbar, cfg)?;
    if variant.requires_nonzero_anchor_gradient() && gbar.norm() <= cfg.eps_grad {
        return Err(Error::HypothesisViolated(format!(
            "{variant} needs a nonzero gradient at the anchor, found norm {:e}",
            gbar.norm()
        )));
    }
    let residuals = residuals(p, xbar, &gbar, x, variant, cfg)?;
    Ok(MembershipVerdict::new(Vector::new(x.to_vec())?, variant, residuals))
}

pub(crate) fn residuals<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    gbar: &[f64],
    x: &[f64],
    variant: CharacVariant,
    cfg: &Config,
) -> Result<BTreeMap<String, Residual>> {
    use CharacVariant::*;
    let g = p.objective().grad(x, cfg)?;
    let gnorm = g.norm();
    let back = dot(&g, &sub(xbar, x));
    let step = dot(gbar, &sub(x, xbar));
    let tol = cfg.eps_feas;

    let mut r = BTreeMap::new();
    let mut put = |k: &str, v: Residual| {
        r.insert(k.to_string(), v);
    };
    put("feasibility", Residual::at_most(p.violation(x, cfg)?, tol));

    let nonzero = |put: &mut dyn FnMut(&str, Residual)| put("grad_norm", Residual::above(gnorm, cfg.eps_grad));
    let same_direction = |put: &mut dyn FnMut(&str, Residual)| {
        if gnorm > cfg.eps_grad {
            put("cosine_distance", Residual::at_most(cosine_distance(&g, gbar), cfg.eps_dir));
        }
    };
    match variant {
        SHat1 | SHat2 => {
            put(
                "grad_xbar_dot_step",
                if variant == SHat1 { Residual::zero(step, tol) } else { Residual::at_most(step, tol) },
            );
            same_direction(&mut put);
            nonzero(&mut put);
        }
        STilde => put("grad_norm", Residual::at_most(gnorm, cfg.eps_grad)),
        S1 | T1 => put("grad_x_dot_back", Residual::zero(back, tol)),
        S2 | T2 => put("grad_x_dot_back", Residual::at_least(back, tol)),
        S3 | T3 => put("back_minus_step", Residual::zero(back - step, tol)),
        S4 | T4 => put("back_minus_step", Residual::at_least(back - step, tol)),
        S5 | T5 => {
            put("grad_x_dot_back", Residual::zero(back, tol));
            put("grad_xbar_dot_step", Residual::zero(step, tol));
            put("back_minus_step", Residual::zero(back - step, tol));
        }
        THat1 | THat2 => {
            put(
                "grad_xbar_dot_step",
                if variant == THat1 { Residual::zero(step, tol) } else { Residual::at_most(step, tol) },
            );
            if norm(gbar) <= cfg.eps_grad {
                put("grad_norm", Residual::at_most(gnorm, cfg.eps_grad));
            } else {
                nonzero(&mut put);
                if gnorm > cfg.eps_grad {
                    // the same test as `alternatives::collinearity_factor(∇f(x̄), ∇f(x))`
                    let factor = dot(gbar, &g) / dot(gbar, gbar);
                    let miss = norm(&axpy(-factor, gbar, &g)) / gnorm;
                    put("collinearity_factor", Residual::above(factor, 0.0));
                    put("collinearity_residual", Residual::at_most(miss, cfg.eps_dir));
                }
            }
        }
        _ => unreachable!("primed variants rejected above"),
    }
    if matches!(variant, S1 | S2 | S3 | S4 | S5) {
        nonzero(&mut put);
    }
    Ok(r)
}

/// Feasible window grid nodes that belong to the variant, row-major.
pub fn enumerate_solution_set<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    variant: CharacVariant,
    resolution: usize,
    cfg: &Config,
) -> Result<Vec<Vector>> {
    let grid = p.feasible_grid(resolution, cfg)?;
    let mut out = Vec::new();
    for x in grid {
        if membership(p, xbar, &x, variant, cfg)?.member {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDifference {
    pub left: CharacVariant,
    pub right: CharacVariant,
    pub only_left: Vec<Vector>,
    pub only_right: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantAgreement {
    pub agree: bool,
    pub sizes: BTreeMap<CharacVariant, usize>,
    /// Only the pairs with a nonempty symmetric difference.
    pub differences: Vec<PairDifference>,
}

pub(crate) fn difference(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    a.iter().filter(|x| !b.contains(x)).cloned().collect()
}

pub fn variant_agreement<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    variants: &[CharacVariant],
    resolution: usize,
    cfg: &Config,
) -> Result<VariantAgreement> {
    let mut sets = Vec::with_capacity(variants.len());
    for &v in variants {
        sets.push((v, enumerate_solution_set(p, xbar, v, resolution, cfg)?));
    }
    let mut differences = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let only_left = difference(&sets[i].1, &sets[j].1);
            let only_right = difference(&sets[j].1, &sets[i].1);
            if !(only_left.is_empty() && only_right.is_empty()) {
                differences.push(PairDifference { left: sets[i].0, right: sets[j].0, only_left, only_right });
            }
        }
    }
    Ok(VariantAgreement {
        agree: differences.is_empty(),
        sizes: sets.iter().map(|(v, s)| (*v, s.len())).collect(),
        differences,
    })
}

/// For convex `f`: `‖∇f(x) − ∇f(x̄)‖ <= eps_dir·(1 + ‖∇f(x̄)‖)` on every listed solution.
pub fn convex_gradient_constancy<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    solutions: &[Vector],
    cfg: &Config,
) -> Result<bool> {
    check_point_dim(xbar, p.dimension())?;
    let f = p.objective();
    let gbar = f.grad(xbar, cfg)?;
    let tol = cfg.eps_dir * (1.0 + gbar.norm());
    for x in solutions {
        check_point_dim(x, p.dimension())?;
        if norm(&sub(&f.grad(x, cfg)?, &gbar)) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::model::{Problem, Window};
    use crate::sets::{Atom, ConvexSetDescriptor};

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn ex2_1() -> Problem {
        let s = ConvexSetDescriptor::new(
            2,
            vec![Atom::Box { lo: vec![1.0, 0.0], hi: vec![2.0, 2.0] }, Atom::Halfspace { a: vec![-1.0, 1.0], b: 0.0 }],
        )
        .unwrap();
        Problem::new(parse("x2/x1", 2).unwrap(), s, Window::new(vec![1.0, 0.0], vec![2.0, 2.0]).unwrap()).unwrap()
    }

    #[test]
    fn dichotomy_alternative_one() {
        let c = Config::default();
        let r = classify_dichotomy(&ex2_1(), &[v(&[1.0, 0.0]), v(&[1.5, 0.0]), v(&[2.0, 0.0])], &c).unwrap();
        assert_eq!(r.alternative, Alternative::I);
        assert_eq!(r.common_unit_gradient.unwrap().as_slice(), &[0.0, 1.0]);
        assert!(classify_dichotomy(&ex2_1(), &[], &c).is_err());
        // a non-solution with a different gradient direction
        let e = classify_dichotomy(&ex2_1(), &[v(&[1.0, 0.0]), v(&[1.0, 1.0])], &c).unwrap_err();
        assert!(matches!(e, Error::InconsistentDichotomy(_)));
    }

    #[test]
    fn shat1_membership_and_residual() {
        let c = Config::default();
        let p = ex2_1();
        assert!(membership(&p, &[1.0, 0.0], &[1.5, 0.0], CharacVariant::SHat1, &c).unwrap().member);
        let out = membership(&p, &[1.0, 0.0], &[1.0, 0.5], CharacVariant::SHat1, &c).unwrap();
        assert!(!out.member);
        assert_eq!(out.residuals["grad_xbar_dot_step"].value, 0.5);
        let failing: Vec<&str> = out.failing().map(|(k, _)| k).collect();
        assert!(failing.contains(&"grad_xbar_dot_step"));
    }

    #[test]
    fn primed_variants_are_rejected_here() {
        let c = Config::default();
        assert!(membership(&ex2_1(), &[1.0, 0.0], &[1.0, 0.0], CharacVariant::SPrime1, &c).is_err());
    }

    #[test]
    fn s5_enumeration_on_the_rectangle() {
        let c = Config::default();
        let pts = enumerate_solution_set(&ex2_1(), &[1.0, 0.0], CharacVariant::S5, 21, &c).unwrap();
        assert_eq!(pts.len(), 21);
        assert!(pts.iter().all(|x| x[1] == 0.0 && (1.0..=2.0).contains(&x[0])));
    }

    #[test]
    fn gradient_constancy() {
        let c = Config::default();
        let line = Window::new(vec![0.0], vec![2.0]).unwrap();
        let s = ConvexSetDescriptor::new(1, vec![Atom::Box { lo: vec![0.0], hi: vec![2.0] }]).unwrap();
        let p = Problem::new(parse("(x1 - 1)^2", 1).unwrap(), s, line).unwrap();
        assert!(convex_gradient_constancy(&p, &[1.0], &[v(&[1.0])], &c).unwrap());
        assert!(!convex_gradient_constancy(&p, &[1.0], &[v(&[0.0])], &c).unwrap());
        let sq = Window::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s = ConvexSetDescriptor::new(2, vec![Atom::Box { lo: vec![0.0; 2], hi: vec![1.0; 2] }]).unwrap();
        let p = Problem::new(parse("x1", 2).unwrap(), s, sq).unwrap();
        let face = [v(&[0.0, 0.0]), v(&[0.0, 0.5]), v(&[0.0, 1.0])];
        assert!(convex_gradient_constancy(&p, &[0.0, 0.0], &face, &c).unwrap());
    }
}
