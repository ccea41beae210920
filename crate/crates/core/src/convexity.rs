//! Sampled falsifiers for the generalized-convexity hypotheses.
//!
//! A `holds: true` report means "no violation found"; a counterexample is
//! self-certifying and can be re-checked with its `replay` method.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{axpy, dot, norm, sub};
use crate::model::{Vector, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<W> {
    pub holds: bool,
    /// Number of instances tested.
    pub checked: usize,
    pub counterexample: Option<W>,
}

impl<W> Report<W> {
    fn finish(checked: usize, counterexample: Option<W>) -> Self {
        Report { holds: counterexample.is_none(), checked, counterexample }
    }
}

/// `f(x + t(y−x)) > max(f(x), f(y)) + eps_feas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentWitness {
    pub x: Vector,
    pub y: Vector,
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

/// `f(u), f(v) <= α` but `f((u+v)/2) > α + eps_feas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetWitness {
    pub u: Vector,
    pub v: Vector,
    pub midpoint_value: f64,
}

/// `f(y) <= f(x)` but `∇f(x)ᵀ(y−x) > eps_feas`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderWitness {
    pub x: Vector,
    pub y: Vector,
    pub directional: f64,
}

/// `f(y) < f(x) − eps_feas` but `∇f(x)ᵀ(y−x) >= −eps_feas·‖y−x‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoconvexWitness {
    pub y: Vector,
    pub value: f64,
    pub directional: f64,
}

fn check_window(f: &Expr, w: &Window) -> Result<()> {
    w.validate()?;
    if let Some(v) = f.max_variable() {
        if v >= w.dimension() {
            return Err(Error::dim("window", v + 1, w.dimension()));
        }
    }
    Ok(())
}

fn segment_point(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return y.to_vec();
    }
    axpy(t, &sub(y, x), x)
}

impl SegmentWitness {
    pub fn replay(&self, f: &Expr, cfg: &Config) -> Result<bool> {
        let z = segment_point(&self.x, &self.y, self.t);
        let bound = f.eval(&self.x, cfg)?.max(f.eval(&self.y, cfg)?);
        Ok(f.eval(&z, cfg)? > bound + cfg.eps_feas)
    }
}

impl LevelSetWitness {
    pub fn replay(&self, f: &Expr, alpha: f64, cfg: &Config) -> Result<bool> {
        let m: Vec<f64> = self.u.iter().zip(self.v.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
        Ok(f.eval(&self.u, cfg)? <= alpha && f.eval(&self.v, cfg)? <= alpha && f.eval(&m, cfg)? > alpha + cfg.eps_feas)
    }
}

impl FirstOrderWitness {
    pub fn replay(&self, f: &Expr, cfg: &Config) -> Result<bool> {
        let g = f.grad(&self.x, cfg)?;
        Ok(f.eval(&self.y, cfg)? <= f.eval(&self.x, cfg)? && dot(&g, &sub(&self.y, &self.x)) > cfg.eps_feas)
    }
}

impl PseudoconvexWitness {
    pub fn replay(&self, f: &Expr, x: &[f64], cfg: &Config) -> Result<bool> {
        let g = f.grad(x, cfg)?;
        let d = sub(&self.y, x);
        Ok(f.eval(&self.y, cfg)? < f.eval(x, cfg)? - cfg.eps_feas && dot(&g, &d) >= -cfg.eps_feas * norm(&d))
    }
}

/// Tests `f(x + t(y−x)) <= max(f(x), f(y))` on `pairs` seeded random pairs
/// and `t ∈ {0, 1/t_steps, …, 1}`.
pub fn check_quasiconvex(
    f: &Expr,
    window: &Window,
    pairs: usize,
    t_steps: usize,
    cfg: &Config,
) -> Result<Report<SegmentWitness>> {
    check_window(f, window)?;
    let steps = t_steps.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0;
    for _ in 0..pairs {
        let x = window.sample(&mut rng, cfg.delta_open);
        let y = window.sample(&mut rng, cfg.delta_open);
        let bound = f.eval(&x, cfg)?.max(f.eval(&y, cfg)?);
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let value = f.eval(&segment_point(&x, &y, t), cfg)?;
            checked += 1;
            if value > bound + cfg.eps_feas {
                return Ok(Report::finish(checked, Some(SegmentWitness { x, y, t, value, bound })));
            }
        }
    }
    Ok(Report::finish(checked, None))
}

/// Midpoint convexity of `{f <= alpha}` over all pairs of window grid nodes.
pub fn check_levelset_convex(
    f: &Expr,
    alpha: f64,
    window: &Window,
    resolution: usize,
    cfg: &Config,
) -> Result<Report<LevelSetWitness>> {
    check_window(f, window)?;
    if resolution < 3 {
        return Err(Error::InvalidInput(format!("level-set check needs resolution >= 3, got {resolution}")));
    }
    let mut level = Vec::new();
    for p in window.grid(resolution) {
        if f.eval(&p, cfg)? <= alpha {
            level.push(p);
        }
    }
    let mut checked = 0;
    for (i, u) in level.iter().enumerate() {
        for v in &level[i + 1..] {
            let m: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| 0.5 * (a + b)).collect();
            let midpoint_value = f.eval(&m, cfg)?;
            checked += 1;
            if midpoint_value > alpha + cfg.eps_feas {
                let w = LevelSetWitness { u: u.clone(), v: v.clone(), midpoint_value };
                return Ok(Report::finish(checked, Some(w)));
            }
        }
    }
    Ok(Report::finish(checked, None))
}

/// Tests `f(y) <= f(x) ⇒ ∇f(x)ᵀ(y−x) <= 0` on seeded random pairs.
pub fn check_first_order_qcx(
    f: &Expr,
    window: &Window,
    pairs: usize,
    cfg: &Config,
) -> Result<Report<FirstOrderWitness>> {
    check_window(f, window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0;
    for _ in 0..pairs {
        let x = window.sample(&mut rng, cfg.delta_open);
        let y = window.sample(&mut rng, cfg.delta_open);
        for (a, b) in [(&x, &y), (&y, &x)] {
            if f.eval(b, cfg)? <= f.eval(a, cfg)? {
                checked += 1;
                let directional = dot(&f.grad(a, cfg)?, &sub(b, a));
                if directional > cfg.eps_feas {
                    let w = FirstOrderWitness { x: a.clone(), y: b.clone(), directional };
                    return Ok(Report::finish(checked, Some(w)));
                }
            }
        }
    }
    Ok(Report::finish(checked, None))
}

/// Pointwise pseudoconvexity at `x`, over `samples` seeded random `y`.
pub fn check_pseudoconvex_at(
    f: &Expr,
    x: &[f64],
    window: &Window,
    samples: usize,
    cfg: &Config,
) -> Result<Report<PseudoconvexWitness>> {
    check_window(f, window)?;
    crate::model::check_point_dim(x, window.dimension())?;
    let fx = f.eval(x, cfg)?;
    let g = f.grad(x, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checked = 0;
    for _ in 0..samples {
        let y = window.sample(&mut rng, cfg.delta_open);
        let value = f.eval(&y, cfg)?;
        if value < fx - cfg.eps_feas {
            checked += 1;
            let d = sub(&y, x);
            let directional = dot(&g, &d);
            if directional >= -cfg.eps_feas * norm(&d) {
                return Ok(Report::finish(checked, Some(PseudoconvexWitness { y, value, directional })));
            }
        }
    }
    Ok(Report::finish(checked, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn cfg() -> Config {
        Config::default()
    }

    fn square(r: f64) -> Window {
        Window::new(vec![-r, -r], vec![r, r]).unwrap()
    }

    #[test]
    fn cubic_is_quasiconvex() {
        let f = parse("x1^3", 2).unwrap();
        let r = check_quasiconvex(&f, &square(2.0), 500, 10, &cfg()).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(check_first_order_qcx(&f, &square(2.0), 500, &cfg()).unwrap().holds);
        assert!(check_quasiconvex(&parse("5", 2).unwrap(), &square(1.0), 100, 4, &cfg()).unwrap().holds);
    }

    #[test]
    fn saddle_fails_with_replayable_witness() {
        let f = parse("x1^2 - x2^2", 2).unwrap();
        let c = cfg();
        let r = check_quasiconvex(&f, &square(1.0), 500, 10, &c).unwrap();
        let w = r.counterexample.expect("saddle is not quasiconvex");
        assert!(w.replay(&f, &c).unwrap());
        let l = check_levelset_convex(&f, -0.5, &square(1.0), 21, &c).unwrap();
        assert!(l.counterexample.unwrap().replay(&f, -0.5, &c).unwrap());
    }

    #[test]
    fn level_sets() {
        let c = cfg();
        let f = parse("-x1 - x2 + sqrt((x1 - x2)^2 + 4)", 2).unwrap();
        assert!(check_levelset_convex(&f, 0.0, &square(2.0), 21, &c).unwrap().holds);
        let r = check_levelset_convex(&parse("x1^2 + x2^2", 2).unwrap(), -1.0, &square(2.0), 5, &c).unwrap();
        assert!(r.holds && r.checked == 0);
        assert!(check_levelset_convex(&f, 0.0, &square(2.0), 2, &c).is_err());
    }

    #[test]
    fn first_order_on_fraction_and_concave_parabola() {
        let c = cfg();
        let strip = Window::new(vec![1.0, 0.0], vec![2.0, 2.0]).unwrap();
        assert!(check_first_order_qcx(&parse("x2/x1", 2).unwrap(), &strip, 500, &c).unwrap().holds);
        let f = parse("-x1^2", 1).unwrap();
        let line = Window::new(vec![-1.0], vec![1.0]).unwrap();
        let r = check_first_order_qcx(&f, &line, 200, &c).unwrap();
        assert!(r.counterexample.unwrap().replay(&f, &c).unwrap());
    }

    #[test]
    fn pseudoconvexity_points() {
        let c = cfg();
        let f = parse(
            "pw[x1 >= 0 & x2 >= 0: x1^2 + x2^2; x1 <= 0 & x2 >= 0: x2^2; \
             x1 <= 0 & x2 <= 0: -x1^2*x2^2; x1 >= 0 & x2 <= 0: x1^2]",
            2,
        )
        .unwrap();
        assert!(check_pseudoconvex_at(&f, &[1.0, 0.0], &square(2.0), 2000, &c).unwrap().holds);
        let r = check_pseudoconvex_at(&f, &[0.0, -1.0], &square(2.0), 2000, &c).unwrap();
        assert!(r.counterexample.unwrap().replay(&f, &[0.0, -1.0], &c).unwrap());
        let cube = parse("x1^3", 2).unwrap();
        assert!(!check_pseudoconvex_at(&cube, &[0.0, 0.0], &square(2.0), 200, &c).unwrap().holds);
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        let f = parse("x1^2 - x2^2", 2).unwrap();
        let a = check_quasiconvex(&f, &square(1.0), 50, 5, &cfg()).unwrap();
        let b = check_quasiconvex(&f, &square(1.0), 50, 5, &cfg()).unwrap();
        assert_eq!(a, b);
    }
}
