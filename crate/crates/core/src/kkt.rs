//! Active sets, GMFCQ, Lagrange multipliers, `X₁(λ)`, and the primed and
//! double-primed characterizations of the inequality-constrained problem.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alternatives::simplex::{LinearProgram, LpOutcome, Relation};
use crate::alternatives::strict_feasibility;
use crate::charac::{self, require_feasible};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, rank, sub};
use crate::model::{check_point_dim, CharacVariant, ConstrainedProblem, MembershipVerdict, MultiplierVector, Vector};
use crate::model::{Program, Residual};

/// Zero-based constraint indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSetReport {
    /// `|g_i(x)| <= eps_act`.
    pub active: Vec<usize>,
    /// Active indices with `λ_i > eps_lp`; empty without multipliers.
    pub strictly_positive: Vec<usize>,
}

pub fn active_set(
    cp: &ConstrainedProblem,
    x: &[f64],
    lambda: Option<&MultiplierVector>,
    cfg: &Config,
) -> Result<ActiveSetReport> {
    check_point_dim(x, cp.dimension)?;
    if !cp.ground_set.contains(x, cfg.eps_feas) {
        return Err(Error::Infeasible { point: x.to_vec(), reason: "outside the ground set".into() });
    }
    let g = cp.constraint_values(x, cfg)?;
    if let Some((i, v)) = g.iter().enumerate().find(|(_, v)| **v > cfg.eps_feas) {
        return Err(Error::Infeasible { point: x.to_vec(), reason: format!("constraint {i} is violated (g = {v})") });
    }
    let active: Vec<usize> = (0..g.len()).filter(|&i| g[i].abs() <= cfg.eps_act).collect();
    let strictly_positive = match lambda {
        Some(l) => {
            check_lambda(cp, l)?;
            active.iter().copied().filter(|&i| l.lambdas()[i] > cfg.eps_lp).collect()
        }
        None => Vec::new(),
    };
    Ok(ActiveSetReport { active, strictly_positive })
}

fn check_lambda(cp: &ConstrainedProblem, l: &MultiplierVector) -> Result<()> {
    if l.len() != cp.constraints.len() {
        return Err(Error::dim("multiplier vector", cp.constraints.len(), l.len()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqReport {
    pub holds: bool,
    pub active: Vec<usize>,
    /// `y ∈ T_X(x̄)` with `∇g_i(x̄)ᵀy < 0` on the active set.
    pub direction: Option<Vector>,
    pub margin: Option<f64>,
}

/// GMFCQ at `xbar` (MFCQ when `X` is all of ℝⁿ).
pub fn check_gmfcq(cp: &ConstrainedProblem, xbar: &[f64], cfg: &Config) -> Result<CqReport> {
    let act = active_set(cp, xbar, None, cfg)?;
    let cone = cp.ground_set.tangent_polar_at(xbar, cfg)?;
    let n = cp.dimension;
    let mut weak = cone.inequalities.clone();
    for e in &cone.equalities {
        weak.push(e.clone());
        weak.push(e.iter().map(|v| -v).collect());
    }
    let mut strict = Vec::with_capacity(act.active.len());
    for &i in &act.active {
        strict.push(cp.constraints[i].grad(xbar, cfg)?.into_inner());
    }
    let sol = strict_feasibility(n, &weak, &vec![0.0; weak.len()], &strict, &vec![0.0; strict.len()], cfg)?;
    Ok(match sol {
        Some(s) => CqReport { holds: true, active: act.active, direction: Some(s.point), margin: s.margin },
        None => CqReport { holds: false, active: act.active, direction: None, margin: None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub lambda: MultiplierVector,
    pub active: Vec<usize>,
    /// Weights on the active face normals of `X`, then on its equality normals.
    pub normal_cone_weights: Vec<f64>,
    /// `‖∇f + Σλ_i∇g_i + Σ w_j a_j‖_∞`.
    pub stationarity_residual: f64,
    /// `max |λ_i g_i(x̄)|`.
    pub complementarity_residual: f64,
    /// The active gradients and normals are linearly dependent, so `λ` may not be unique.
    pub rank_deficient: bool,
}

/// A multiplier with `−(∇f(x̄) + Σλ_i∇g_i(x̄)) ∈ N_X(x̄)` and `λ_i = 0` off the active set.
pub fn solve_multipliers(cp: &ConstrainedProblem, xbar: &[f64], cfg: &Config) -> Result<MultiplierReport> {
    let cq = check_gmfcq(cp, xbar, cfg)?;
    if !cq.holds {
        return Err(Error::HypothesisViolated(format!("GMFCQ fails at {xbar:?}")));
    }
    let n = cp.dimension;
    let m = cp.constraints.len();
    let cone = cp.ground_set.tangent_polar_at(xbar, cfg)?;
    let gf = cp.objective.grad(xbar, cfg)?;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for &i in &cq.active {
        cols.push(cp.constraints[i].grad(xbar, cfg)?.into_inner());
    }
    let n_act = cols.len();
    cols.extend(cone.inequalities.iter().cloned());
    let n_ineq = cone.inequalities.len();
    cols.extend(cone.equalities.iter().cloned());
    let k = cols.len();

    let mut lp = LinearProgram::new(k.max(1));
    for j in n_act + n_ineq..k {
        lp = lp.free(j);
    }
    let pad = |mut r: Vec<f64>| {
        r.resize(k.max(1), 0.0);
        r
    };
    for c in 0..n {
        lp = lp.row(pad(cols.iter().map(|col| col[c]).collect()), Relation::Eq, -gf[c]);
    }
    let w = match lp.solve(cfg.eps_lp)? {
        LpOutcome::Optimal { x, .. } => x,
        _ => return Err(Error::NoMultiplier { point: xbar.to_vec() }),
    };
    let w: Vec<f64> =
        w.into_iter().take(k).enumerate().map(|(j, v)| if j < n_act + n_ineq { v.max(0.0) } else { v }).collect();

    let mut lambdas = vec![0.0; m];
    for (slot, &i) in cq.active.iter().enumerate() {
        lambdas[i] = w[slot];
    }
    let mut stat = gf.into_inner();
    for (col, wj) in cols.iter().zip(&w) {
        for c in 0..n {
            stat[c] += wj * col[c];
        }
    }
    let stationarity_residual = norm_inf(&stat);
    if stationarity_residual > cfg.eps_lp {
        return Err(Error::NoMultiplier { point: xbar.to_vec() });
    }
    let g = cp.constraint_values(xbar, cfg)?;
    let complementarity_residual = lambdas.iter().zip(&g).map(|(l, gi)| (l * gi).abs()).fold(0.0, f64::max);
    Ok(MultiplierReport {
        lambda: MultiplierVector::new(lambdas)?,
        active: cq.active,
        normal_cone_weights: w[n_act..].to_vec(),
        stationarity_residual,
        complementarity_residual,
        rank_deficient: rank(&cols, n, cfg.eps_lp) < k,
    })
}

/// `Ĩ(x̄, λ)`: active at `x̄` with `λ_i > eps_lp`.
pub fn strict_index_set(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    cfg: &Config,
) -> Result<Vec<usize>> {
    Ok(active_set(cp, xbar, Some(lambda), cfg)?.strictly_positive)
}

fn x1_residuals(
    cp: &ConstrainedProblem,
    tilde: &[usize],
    x: &[f64],
    cfg: &Config,
) -> Result<BTreeMap<String, Residual>> {
    let g = cp.constraint_values(x, cfg)?;
    let mut r = BTreeMap::new();
    r.insert("ground_set".to_string(), Residual::at_most(cp.ground_set.violation(x), cfg.eps_feas));
    for (i, gi) in g.iter().enumerate() {
        if tilde.contains(&i) {
            r.insert(format!("g{i}_equality"), Residual::zero(*gi, cfg.eps_act));
        } else {
            r.insert(format!("g{i}"), Residual::at_most(*gi, cfg.eps_feas));
        }
    }
    Ok(r)
}

/// `x ∈ X₁(λ)`: `g_i(x) = 0` on `Ĩ(x̄, λ)` and `g_i(x) <= 0` elsewhere.
pub fn member_x1(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    x: &[f64],
    cfg: &Config,
) -> Result<bool> {
    check_point_dim(x, cp.dimension)?;
    let tilde = strict_index_set(cp, xbar, lambda, cfg)?;
    Ok(x1_residuals(cp, &tilde, x, cfg)?.values().all(Residual::satisfied))
}

/// Verdict for a primed or double-primed variant.
pub fn membership_constrained(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    x: &[f64],
    variant: CharacVariant,
    cfg: &Config,
) -> Result<MembershipVerdict> {
    let Some(base) = variant.unprimed().filter(|_| variant.needs_multipliers()) else {
        return Err(Error::InvalidInput(format!("{variant} is not a primed variant")));
    };
    require_feasible(cp, xbar, "anchor x̄", cfg)?;
    check_point_dim(x, cp.dimension)?;
    let gbar = cp.objective.grad(xbar, cfg)?;
    if gbar.norm() <= cfg.eps_grad {
        return Err(Error::HypothesisViolated(format!(
            "{variant} needs a nonzero gradient at the anchor, found norm {:e}",
            gbar.norm()
        )));
    }
    if variant.is_double_primed() && !cp.ground_set.is_interior(xbar, cfg) {
        return Err(Error::NotOpenGroundSet);
    }
    let tilde = strict_index_set(cp, xbar, lambda, cfg)?;
    let mut res = x1_residuals(cp, &tilde, x, cfg)?;
    let mut base_res = charac::residuals(cp, xbar, &gbar, x, base, cfg)?;
    if variant.is_double_primed() {
        base_res.remove("grad_xbar_dot_step");
        let step = sub(x, xbar);
        for &i in &tilde {
            let d = dot(&cp.constraints[i].grad(xbar, cfg)?, &step);
            let r = if variant == CharacVariant::SHatDoublePrime1 {
                Residual::zero(d, cfg.eps_feas)
            } else {
                Residual::at_least(d, cfg.eps_feas)
            };
            res.insert(format!("grad_g{i}_dot_step"), r);
        }
    }
    res.extend(base_res);
    Ok(MembershipVerdict::new(Vector::new(x.to_vec())?, variant, res))
}

/// Feasible window grid nodes in the primed or double-primed variant.
pub fn enumerate_constrained(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    variant: CharacVariant,
    resolution: usize,
    cfg: &Config,
) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for x in cp.feasible_grid(resolution, cfg)? {
        if membership_constrained(cp, xbar, lambda, &x, variant, cfg)?.member {
            out.push(x);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianReport {
    pub constant: bool,
    /// `max |L(x) − L(x̄)|` over the listed points.
    pub max_deviation: f64,
}

fn lagrangian(cp: &ConstrainedProblem, lambda: &MultiplierVector, x: &[f64], cfg: &Config) -> Result<f64> {
    let g = cp.constraint_values(x, cfg)?;
    Ok(cp.objective.eval(x, cfg)? + dot(lambda.lambdas(), &g))
}

/// `L = f + Σλ_i g_i` is constant on `solutions` within `eps_feas`.
pub fn lagrangian_constancy(
    cp: &ConstrainedProblem,
    xbar: &[f64],
    lambda: &MultiplierVector,
    solutions: &[Vector],
    cfg: &Config,
) -> Result<LagrangianReport> {
    check_lambda(cp, lambda)?;
    check_point_dim(xbar, cp.dimension)?;
    let l0 = lagrangian(cp, lambda, xbar, cfg)?;
    let mut max_deviation: f64 = 0.0;
    for x in solutions {
        check_point_dim(x, cp.dimension)?;
        max_deviation = max_deviation.max((lagrangian(cp, lambda, x, cfg)? - l0).abs());
    }
    Ok(LagrangianReport { constant: max_deviation <= cfg.eps_feas, max_deviation })
}
