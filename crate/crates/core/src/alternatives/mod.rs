//! Gordan's alternative, the collinearity factor, and strict linear
//! feasibility, all on top of a small simplex kernel.

pub mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm};
use crate::model::Vector;
use simplex::{LinearProgram, LpOutcome, Relation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex exceeded {limit} pivots")]
    IterationLimit { limit: usize },
    #[error("neither Gordan system could be certified at the kernel tolerance")]
    Inconclusive,
}

/// Exactly one of `Ax > 0` (primal) and `Aᵀy = 0, y >= 0, y ≠ 0` (dual) is solvable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum GordanResult {
    /// `x ∈ [-1,1]ⁿ` with `min(Ax) = margin`.
    Primal { x: Vector, margin: f64 },
    /// `y >= 0` normalized to `Σy = 1`.
    Dual { y: Vector },
}

/// A point of a strict system, with the attained margin (`None` when there
/// are no strict rows).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictSolution {
    pub point: Vector,
    pub margin: Option<f64>,
}

fn check_rows(rows: &[Vec<f64>], rhs: &[f64], n: usize, what: &str) -> Result<()> {
    if rows.len() != rhs.len() {
        return Err(Error::dim(format!("{what} right-hand side"), rows.len(), rhs.len()));
    }
    for r in rows {
        if r.len() != n {
            return Err(Error::dim(format!("{what} row"), n, r.len()));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{what} has a non-finite entry")));
        }
    }
    Ok(())
}

/// Finds `y ∈ [-1,1]ⁿ` with `a_le·y <= b_le` and `a_strict·y <= b_strict − μ`
/// for the largest margin `μ`. Returns `None` when that margin is `<= eps_lp`
/// or the weak system alone is infeasible.
pub fn strict_feasibility(
    n: usize,
    a_le: &[Vec<f64>],
    b_le: &[f64],
    a_strict: &[Vec<f64>],
    b_strict: &[f64],
    cfg: &Config,
) -> Result<Option<StrictSolution>> {
    if n == 0 {
        return Err(Error::InvalidInput("strict feasibility needs n >= 1".into()));
    }
    check_rows(a_le, b_le, n, "weak system")?;
    check_rows(a_strict, b_strict, n, "strict system")?;
    let tol = cfg.eps_lp;

    if a_strict.is_empty() {
        let origin_ok = b_le.iter().all(|b| *b >= -tol);
        if origin_ok {
            return Ok(Some(StrictSolution { point: Vector::zeros(n), margin: None }));
        }
        let mut lp = LinearProgram::new(n);
        for j in 0..n {
            lp = lp.bound(j, Some(-1.0), Some(1.0));
        }
        for (a, b) in a_le.iter().zip(b_le) {
            lp = lp.row(a.clone(), Relation::Le, *b);
        }
        return Ok(match lp.solve(tol)? {
            LpOutcome::Optimal { x, .. } => Some(StrictSolution { point: Vector::from_raw(x), margin: None }),
            _ => None,
        });
    }

    // variables (y_1..y_n, μ); maximize μ
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut lp = LinearProgram::new(n + 1).maximize(c).free(n);
    for j in 0..n {
        lp = lp.bound(j, Some(-1.0), Some(1.0));
    }
    for (a, b) in a_le.iter().zip(b_le) {
        let mut r = a.clone();
        r.push(0.0);
        lp = lp.row(r, Relation::Le, *b);
    }
    for (a, b) in a_strict.iter().zip(b_strict) {
        let mut r = a.clone();
        r.push(1.0);
        lp = lp.row(r, Relation::Le, *b);
    }
    match lp.solve(tol)? {
        LpOutcome::Optimal { mut x, objective } if objective > tol => {
            x.truncate(n);
            Ok(Some(StrictSolution { point: Vector::from_raw(x), margin: Some(objective) }))
        }
        LpOutcome::Unbounded => unreachable!("margin is bounded by the box"),
        _ => Ok(None),
    }
}

fn matrix_shape(a: &[Vec<f64>]) -> Result<usize> {
    let n = a.first().map(Vec::len).unwrap_or(0);
    if a.is_empty() || n == 0 {
        return Err(Error::InvalidInput("Gordan matrix must be at least 1x1".into()));
    }
    check_rows(a, &vec![0.0; a.len()], n, "Gordan matrix")?;
    Ok(n)
}

/// Solves `Aᵀy = 0, y >= 0, Σy = 1` by phase 1.
pub fn gordan_dual_system(a: &[Vec<f64>], cfg: &Config) -> Result<Option<Vector>> {
    let n = matrix_shape(a)?;
    let m = a.len();
    let mut lp = LinearProgram::new(m);
    for j in 0..n {
        lp = lp.row(a.iter().map(|r| r[j]).collect(), Relation::Eq, 0.0);
    }
    lp = lp.row(vec![1.0; m], Relation::Eq, 1.0);
    Ok(match lp.solve(cfg.eps_lp)? {
        LpOutcome::Optimal { x, .. } => Some(Vector::from_raw(x.into_iter().map(|v| v.max(0.0)).collect())),
        _ => None,
    })
}

pub fn gordan_alternative(a: &[Vec<f64>], cfg: &Config) -> Result<GordanResult> {
    let n = matrix_shape(a)?;
    let neg: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    if let Some(sol) = strict_feasibility(n, &[], &[], &neg, &vec![0.0; a.len()], cfg)? {
        let margin = a.iter().map(|r| dot(r, &sol.point)).fold(f64::INFINITY, f64::min);
        if margin > cfg.eps_lp {
            return Ok(GordanResult::Primal { x: sol.point, margin });
        }
    }
    match gordan_dual_system(a, cfg)? {
        Some(y) => Ok(GordanResult::Dual { y }),
        None => Err(LpError::Inconclusive.into()),
    }
}

/// `p > 0` with `b = p·a`, if one exists (`p = aᵀb / aᵀa`, then verified
/// against `‖b − p·a‖ <= eps_dir·‖b‖`).
pub fn collinearity_factor(a: &[f64], b: &[f64], cfg: &Config) -> Result<Option<f64>> {
    if a.len() != b.len() {
        return Err(Error::dim("collinearity", a.len(), b.len()));
    }
    for v in [a, b] {
        let nv = norm(v);
        if nv <= cfg.eps_grad {
            return Err(Error::ZeroVector { norm: nv });
        }
    }
    let p = dot(a, b) / dot(a, a);
    if p.is_nan() || p <= 0.0 {
        return Ok(None);
    }
    let resid = norm(&axpy(-p, a, b));
    Ok((resid <= cfg.eps_dir * norm(b)).then_some(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn gordan_examples() {
        let c = cfg();
        match gordan_alternative(&[vec![1.0]], &c).unwrap() {
            GordanResult::Primal { x, .. } => assert_eq!(x.as_slice(), &[1.0]),
            d => panic!("{d:?}"),
        }
        match gordan_alternative(&[vec![1.0], vec![-1.0]], &c).unwrap() {
            GordanResult::Dual { y } => assert_eq!(y.as_slice(), &[0.5, 0.5]),
            p => panic!("{p:?}"),
        }
        match gordan_alternative(&[vec![1.0, 0.0], vec![0.0, 1.0]], &c).unwrap() {
            GordanResult::Primal { x, .. } => assert_eq!(x.as_slice(), &[1.0, 1.0]),
            d => panic!("{d:?}"),
        }
        assert!(gordan_alternative(&[], &c).is_err());
    }

    #[test]
    fn collinearity_examples() {
        let c = cfg();
        assert_eq!(collinearity_factor(&[0.0, 1.0], &[0.0, 2.0], &c).unwrap(), Some(2.0));
        assert_eq!(collinearity_factor(&[0.0, 1.0], &[1.0, 0.0], &c).unwrap(), None);
        assert_eq!(collinearity_factor(&[0.0, 1.0], &[0.0, -1.0], &c).unwrap(), None);
        assert!(matches!(collinearity_factor(&[0.0, 0.0], &[0.0, 1.0], &c), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn strict_examples() {
        let c = cfg();
        let s = strict_feasibility(2, &[], &[], &[vec![1.0, 1.0]], &[0.0], &c).unwrap().unwrap();
        assert_eq!(s.point.as_slice(), &[-1.0, -1.0]);
        assert_eq!(s.margin, Some(2.0));
        assert_eq!(strict_feasibility(1, &[], &[], &[vec![1.0], vec![-1.0]], &[0.0, 0.0], &c).unwrap(), None);
        let s = strict_feasibility(3, &[], &[], &[], &[], &c).unwrap().unwrap();
        assert_eq!(s.point.as_slice(), &[0.0, 0.0, 0.0]);
        assert_eq!(s.margin, None);
    }

    #[test]
    fn strict_respects_weak_rows() {
        let c = cfg();
        // y1 + y2 < 0 with y1 >= 0: the margin peaks at 1 along y1 = 0, y2 = -1
        let s = strict_feasibility(2, &[vec![-1.0, 0.0]], &[0.0], &[vec![1.0, 1.0]], &[0.0], &c).unwrap().unwrap();
        assert_eq!(s.margin, Some(1.0));
        assert!(s.point[0] >= 0.0 && s.point[0] + s.point[1] <= -1.0 + 1e-12);
        // weak rows alone, origin infeasible
        let s = strict_feasibility(1, &[vec![-1.0]], &[-0.5], &[], &[], &c).unwrap().unwrap();
        assert!(s.point[0] >= 0.5);
        assert_eq!(strict_feasibility(1, &[vec![-1.0]], &[-2.0], &[], &[], &c).unwrap(), None);
    }
}
