//! Subdifferential routes to the solution set: Greenberg–Pierskalla (any
//! dimension, grid falsification) and Martínez-Legaz (1-D only).
//!
//! Both subdifferentials are infinite sets, so membership is decided on a
//! grid: a "false" is a concrete witness, a "true" means no witness was
//! found at that resolution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{dot, sub};
use crate::model::{check_point_dim, Program, Vector, Window};

fn check_fn_window(f: &Expr, window: &Window, resolution: usize) -> Result<()> {
    window.validate()?;
    if resolution < 3 {
        return Err(Error::InvalidInput(format!("subdifferential grids need resolution >= 3, got {resolution}")));
    }
    if let Some(v) = f.max_variable() {
        if v >= window.dimension() {
            return Err(Error::dim("window", v + 1, window.dimension()));
        }
    }
    Ok(())
}

/// A grid point `x` with `vᵀ(x−x₀) >= −eps_feas` and `f(x) < f(x₀) − eps_feas`.
pub fn gp_counterexample(
    f: &Expr,
    x0: &[f64],
    v: &[f64],
    window: &Window,
    resolution: usize,
    cfg: &Config,
) -> Result<Option<Vector>> {
    check_fn_window(f, window, resolution)?;
    check_point_dim(x0, window.dimension())?;
    check_point_dim(v, window.dimension())?;
    let f0 = f.eval(x0, cfg)?;
    for x in window.grid(resolution) {
        if dot(v, &sub(&x, x0)) >= -cfg.eps_feas && f.eval(&x, cfg)? < f0 - cfg.eps_feas {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// `v ∈ ∂^GP f(x₀)` on the window grid.
pub fn gp_member(f: &Expr, x0: &[f64], v: &[f64], window: &Window, resolution: usize, cfg: &Config) -> Result<bool> {
    Ok(gp_counterexample(f, x0, v, window, resolution, cfg)?.is_none())
}

/// Coordinate rays `±s·e_i` for `s ∈ {0.5, 1, 2}`, `samples` seeded points of
/// the positive orthant, and `∇f(x̄)` when it is nonzero.
pub fn default_gp_candidates<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    samples: usize,
    cfg: &Config,
) -> Result<Vec<Vector>> {
    let n = p.dimension();
    let mut out = Vec::new();
    for i in 0..n {
        for s in [0.5, 1.0, 2.0] {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = sign * s;
                out.push(Vector::from_raw(e));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..samples {
        out.push(Vector::from_raw((0..n).map(|_| rng.random_range(0.05..=1.0)).collect()));
    }
    let g = p.objective().grad(xbar, cfg)?;
    if g.norm() > cfg.eps_grad {
        out.push(g);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteVerdict<C> {
    pub member: bool,
    /// The candidate that certifies membership.
    pub certificate: Option<C>,
}

/// Some candidate `v` lies in `∂^GP f(x̄) ∩ ∂^GP f(x)` with `vᵀ(x−x̄) = 0`.
pub fn gp_solution_check<P: Program + ?Sized>(
    p: &P,
    xbar: &[f64],
    x: &[f64],
    candidates: &[Vector],
    window: &Window,
    resolution: usize,
    cfg: &Config,
) -> Result<RouteVerdict<Vector>> {
    check_point_dim(xbar, p.dimension())?;
    check_point_dim(x, p.dimension())?;
    let f = p.objective();
    let step = sub(x, xbar);
    for v in candidates {
        check_point_dim(v, p.dimension())?;
        if dot(v, &step).abs() > cfg.eps_feas {
            continue;
        }
        if gp_member(f, xbar, v, window, resolution, cfg)? && gp_member(f, x, v, window, resolution, cfg)? {
            return Ok(RouteVerdict { member: true, certificate: Some(v.clone()) });
        }
    }
    Ok(RouteVerdict { member: false, certificate: None })
}

/// `(v, t)` with `v·y >= t` describing a half-line in 1-D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLPair {
    pub v: f64,
    pub t: f64,
}

impl MLPair {
    pub fn new(v: f64, t: f64) -> Result<Self> {
        if !(v.is_finite() && t.is_finite()) {
            return Err(Error::InvalidInput(format!("ML pair ({v}, {t}) is not finite")));
        }
        Ok(MLPair { v, t })
    }
}

/// The grid infimum of `f` over `{y : v·y >= t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Infimum {
    /// No admissible grid node (treated as `+∞`).
    Empty,
    Finite(f64),
    /// The admissible set runs off a window edge on its unbounded side while
    /// `f` keeps decreasing toward that edge. Heuristic.
    Unbounded,
}

impl Infimum {
    fn at_least(self, bound: f64) -> bool {
        match self {
            Infimum::Empty => true,
            Infimum::Finite(v) => v >= bound,
            Infimum::Unbounded => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlVerdict {
    pub member: bool,
    pub infimum: Infimum,
}

fn one_dimensional(f: &Expr, window: &Window) -> Result<()> {
    if window.dimension() != 1 || f.max_variable().unwrap_or(0) != 0 {
        return Err(Error::dim(
            "Martínez-Legaz route (1-D only)",
            1,
            window.dimension().max(f.max_variable().map_or(1, |v| v + 1)),
        ));
    }
    Ok(())
}

fn ml_infimum(f: &Expr, pair: MLPair, window: &Window, resolution: usize, cfg: &Config) -> Result<Infimum> {
    let ys: Vec<f64> = (0..resolution).map(|i| window.node(0, i, resolution)).collect();
    let admissible = |y: f64| pair.v * y >= pair.t - cfg.eps_feas;
    let mut best: Option<f64> = None;
    for &y in &ys {
        if admissible(y) {
            let fy = f.eval(&[y], cfg)?;
            best = Some(best.map_or(fy, |b: f64| b.min(fy)));
        }
    }
    let Some(best) = best else { return Ok(Infimum::Empty) };
    // the half-line is unbounded to the right when v > 0, to the left when v < 0, both ways when v = 0
    let last = resolution - 1;
    let falling = |edge: usize, inner: usize| -> Result<bool> {
        Ok(admissible(ys[edge]) && f.eval(&[ys[edge]], cfg)? < f.eval(&[ys[inner]], cfg)?)
    };
    let right = pair.v >= 0.0 && falling(last, last - 1)?;
    let left = pair.v <= 0.0 && falling(0, 1)?;
    Ok(if right || left { Infimum::Unbounded } else { Infimum::Finite(best) })
}

/// `(v, t) ∈ ∂^M f(x)` for a function of one variable.
pub fn ml_member_1d(
    f: &Expr,
    x: f64,
    pair: MLPair,
    window: &Window,
    resolution: usize,
    cfg: &Config,
) -> Result<MlVerdict> {
    check_fn_window(f, window, resolution)?;
    one_dimensional(f, window)?;
    let infimum = ml_infimum(f, pair, window, resolution, cfg)?;
    let fx = f.eval(&[x], cfg)?;
    let member = pair.v * x >= pair.t - cfg.eps_feas && infimum.at_least(fx - cfg.eps_feas);
    Ok(MlVerdict { member, infimum })
}

/// Which of the two equivalent Martínez-Legaz solution sets to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MlForm {
    /// `∂^M f(x̄) ∩ ∂^M f(x) ≠ ∅`.
    M1,
    /// Some `(v, t) ∈ ∂^M f(x)` with `v·x̄ >= t`.
    #[default]
    M2,
}

/// `v ∈ {−1, 0, 0.5, 1, 2}` crossed with thresholds `t = v·s` (`t = s` when
/// `v = 0`) for `s = k/20`, `k = −20..=60`.
pub fn default_ml_candidates() -> Vec<MLPair> {
    let mut out = Vec::new();
    for v in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        for k in -20..=60 {
            let s = k as f64 / 20.0;
            out.push(MLPair { v, t: if v == 0.0 { s } else { v * s } });
        }
    }
    out
}

/// Lazily computed infima, one per candidate; they do not depend on the point.
struct MlCache<'a> {
    f: &'a Expr,
    candidates: &'a [MLPair],
    window: &'a Window,
    resolution: usize,
    infima: Vec<Option<Infimum>>,
}

impl<'a> MlCache<'a> {
    fn new<P: Program + ?Sized>(
        p: &'a P,
        candidates: &'a [MLPair],
        window: &'a Window,
        resolution: usize,
    ) -> Result<Self> {
        let f = p.objective();
        check_fn_window(f, window, resolution)?;
        one_dimensional(f, window)?;
        if p.dimension() != 1 {
            return Err(Error::dim("Martínez-Legaz route (1-D only)", 1, p.dimension()));
        }
        Ok(MlCache { f, candidates, window, resolution, infima: vec![None; candidates.len()] })
    }

    fn member(&mut self, k: usize, x: f64, cfg: &Config) -> Result<bool> {
        let pair = self.candidates[k];
        if pair.v * x < pair.t - cfg.eps_feas {
            return Ok(false);
        }
        let inf = match self.infima[k] {
            Some(i) => i,
            None => {
                let i = ml_infimum(self.f, pair, self.window, self.resolution, cfg)?;
                self.infima[k] = Some(i);
                i
            }
        };
        Ok(inf.at_least(self.f.eval(&[x], cfg)? - cfg.eps_feas))
    }

    fn check(&mut self, xbar: f64, x: f64, form: MlForm, cfg: &Config) -> Result<RouteVerdict<MLPair>> {
        for k in 0..self.candidates.len() {
            let pair = self.candidates[k];
            // the cheap half-line test first
            if form == MlForm::M2 && pair.v * xbar < pair.t - cfg.eps_feas {
                continue;
            }
            if !self.member(k, x, cfg)? {
                continue;
            }
            if form == MlForm::M1 && !self.member(k, xbar, cfg)? {
                continue;
            }
            return Ok(RouteVerdict { member: true, certificate: Some(pair) });
        }
        Ok(RouteVerdict { member: false, certificate: None })
    }
}

/// `x` is a solution by the Martínez-Legaz route (form `M1` or `M2`).
#[allow(clippy::too_many_arguments)]
pub fn ml_solution_check_1d<P: Program + ?Sized>(
    p: &P,
    xbar: f64,
    x: f64,
    candidates: &[MLPair],
    window: &Window,
    resolution: usize,
    form: MlForm,
    cfg: &Config,
) -> Result<RouteVerdict<MLPair>> {
    MlCache::new(p, candidates, window, resolution)?.check(xbar, x, form, cfg)
}

/// [`ml_solution_check_1d`] over many points, sharing the infima.
#[allow(clippy::too_many_arguments)]
pub fn ml_solution_set_1d<P: Program + ?Sized>(
    p: &P,
    xbar: f64,
    points: &[Vector],
    candidates: &[MLPair],
    window: &Window,
    resolution: usize,
    form: MlForm,
    cfg: &Config,
) -> Result<Vec<Vector>> {
    let mut cache = MlCache::new(p, candidates, window, resolution)?;
    let mut out = Vec::new();
    for x in points {
        check_point_dim(x, 1)?;
        if cache.check(xbar, x[0], form, cfg)?.member {
            out.push(x.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    const EX4_1: &str = "pw[x1 <= 0: -x1^2; x1 >= 0 & x1 <= 1: 0; x1 >= 1: (x1 - 1)^2]";

    fn line(lo: f64, hi: f64) -> Window {
        Window::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn gp_scalar_example() {
        let c = Config::default();
        let f = parse("pw[x1 >= 0: x1^2; x1 <= 0: -x1^2]", 1).unwrap();
        let w = line(-2.0, 2.0);
        assert!(gp_member(&f, &[0.0], &[1.0], &w, 41, &c).unwrap());
        assert!(!gp_member(&f, &[0.0], &[-1.0], &w, 41, &c).unwrap());
        assert_eq!(gp_counterexample(&f, &[0.0], &[0.0], &w, 41, &c).unwrap().unwrap().as_slice(), &[-2.0]);
    }

    #[test]
    fn ml_examples() {
        let c = Config::default();
        let f = parse(EX4_1, 1).unwrap();
        let w = line(-1.0, 3.0);
        let ml = |x, v, t| ml_member_1d(&f, x, MLPair::new(v, t).unwrap(), &w, 401, &c).unwrap();
        assert!(ml(0.5, 1.0, 0.4).member);
        assert!(ml(1.5, 1.0, 1.5).member);
        let r = ml(1.5, 1.0, 1.0);
        assert!(!r.member);
        assert_eq!(r.infimum, Infimum::Finite(0.0));
        assert_eq!(ml(0.5, -1.0, 0.0).infimum, Infimum::Unbounded);
        assert_eq!(ml(0.5, 0.0, 1.0).infimum, Infimum::Empty);
    }

    #[test]
    fn ml_rejects_two_dimensions() {
        let c = Config::default();
        let f = parse("x1 + x2", 2).unwrap();
        let w = Window::new(vec![0.0; 2], vec![1.0; 2]).unwrap();
        assert!(ml_member_1d(&f, 0.0, MLPair { v: 1.0, t: 0.0 }, &w, 5, &c).is_err());
    }
}
