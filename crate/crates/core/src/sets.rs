//! Convex sets as intersections of simple atoms, and polyhedral cones at a point.

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use crate::model::{check_point_dim, Vector, Window};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Atom {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `a·x <= b`
    Halfspace {
        a: Vec<f64>,
        b: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// `a·x = b`
    LinearEquality {
        a: Vec<f64>,
        b: f64,
    },
}

impl Atom {
    fn dimension(&self) -> usize {
        match self {
            Atom::Box { lo, .. } => lo.len(),
            Atom::Halfspace { a, .. } | Atom::LinearEquality { a, .. } => a.len(),
            Atom::Ball { center, .. } => center.len(),
        }
    }

    fn validate(&self, n: usize, index: usize) -> Result<()> {
        let ctx = format!("set atom {index}");
        if self.dimension() != n {
            return Err(Error::dim(ctx, n, self.dimension()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            Atom::Box { lo, hi } => {
                if hi.len() != n {
                    return Err(Error::dim(ctx, n, hi.len()));
                }
                finite(lo) && finite(hi) && lo.iter().zip(hi).all(|(l, h)| l <= h)
            }
            Atom::Halfspace { a, b } | Atom::LinearEquality { a, b } => finite(a) && b.is_finite(),
            Atom::Ball { center, radius } => finite(center) && radius.is_finite() && *radius >= 0.0,
        };
        if !ok {
            return Err(Error::InvalidInput(format!("{ctx} has non-finite or inverted data")));
        }
        Ok(())
    }

    /// Signed residual: `<= 0` inside the atom (for equalities, `|a·x − b|`).
    pub fn residual(&self, x: &[f64]) -> f64 {
        match self {
            Atom::Box { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| (l - v).max(v - h)).fold(f64::NEG_INFINITY, f64::max)
            }
            Atom::Halfspace { a, b } => dot(a, x) - b,
            Atom::Ball { center, radius } => norm(&sub(x, center)) - radius,
            Atom::LinearEquality { a, b } => (dot(a, x) - b).abs(),
        }
    }
}

/// Intersection of atoms in ℝⁿ. No atoms means all of ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSetDescriptor {
    dimension: usize,
    atoms: Vec<Atom>,
}

/// Polyhedral cone `{y : rows·y <= 0, equalities·y = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeRep {
    pub dimension: usize,
    pub inequalities: Vec<Vec<f64>>,
    pub equalities: Vec<Vec<f64>>,
}

impl ConeRep {
    pub fn whole_space(n: usize) -> Self {
        ConeRep { dimension: n, inequalities: Vec::new(), equalities: Vec::new() }
    }

    pub fn is_whole_space(&self) -> bool {
        self.inequalities.is_empty() && self.equalities.is_empty()
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.inequalities.iter().all(|a| dot(a, y) <= tol) && self.equalities.iter().all(|a| dot(a, y).abs() <= tol)
    }
}

impl ConvexSetDescriptor {
    pub fn new(dimension: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("set dimension must be >= 1".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            a.validate(dimension, i)?;
        }
        Ok(ConvexSetDescriptor { dimension, atoms })
    }

    pub fn whole_space(dimension: usize) -> Self {
        ConvexSetDescriptor { dimension, atoms: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// The same set with atom `index` dropped.
    pub fn without_atom(&self, index: usize) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.remove(index);
        ConvexSetDescriptor { dimension: self.dimension, atoms }
    }

    /// `max(0, worst atom residual)`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.residual(x)).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dimension && self.violation(x) <= tol
    }

    pub fn is_polyhedral(&self) -> bool {
        !self.atoms.iter().any(|a| matches!(a, Atom::Ball { .. }))
    }

    /// Window grid nodes inside the set (within `eps_feas`), row-major.
    pub fn sample_grid(&self, window: &Window, resolution: usize, cfg: &Config) -> Result<Vec<Vector>> {
        if resolution < 2 {
            return Err(Error::InvalidInput(format!("grid resolution must be >= 2, got {resolution}")));
        }
        if window.dimension() != self.dimension {
            return Err(Error::dim("window", self.dimension, window.dimension()));
        }
        Ok(window.grid(resolution).into_iter().filter(|x| self.contains(x, cfg.eps_feas)).collect())
    }

    /// `T_X(x) = (N_X(x))*` for polyhedral `X`: one row per atom face active
    /// within `eps_act`, plus every equality atom.
    pub fn tangent_polar_at(&self, x: &[f64], cfg: &Config) -> Result<ConeRep> {
        check_point_dim(x, self.dimension)?;
        if !self.is_polyhedral() {
            return Err(Error::NonPolyhedral);
        }
        if !self.contains(x, cfg.eps_feas) {
            return Err(Error::NotInSet { context: "tangent cone".into(), point: x.to_vec() });
        }
        let n = self.dimension;
        let mut cone = ConeRep::whole_space(n);
        let unit = |i: usize, s: f64| {
            let mut e = vec![0.0; n];
            e[i] = s;
            e
        };
        for atom in &self.atoms {
            match atom {
                Atom::Box { lo, hi } => {
                    for i in 0..n {
                        if (x[i] - lo[i]).abs() <= cfg.eps_act {
                            cone.inequalities.push(unit(i, -1.0));
                        }
                        if (x[i] - hi[i]).abs() <= cfg.eps_act {
                            cone.inequalities.push(unit(i, 1.0));
                        }
                    }
                }
                Atom::Halfspace { a, b } => {
                    if (dot(a, x) - b).abs() <= cfg.eps_act {
                        cone.inequalities.push(a.clone());
                    }
                }
                Atom::LinearEquality { a, .. } => cone.equalities.push(a.clone()),
                Atom::Ball { .. } => unreachable!("checked polyhedral"),
            }
        }
        Ok(cone)
    }

    /// True when `x` is interior: no equality atoms and no atom active within `eps_act`.
    pub fn is_interior(&self, x: &[f64], cfg: &Config) -> bool {
        self.atoms.iter().all(|a| !matches!(a, Atom::LinearEquality { .. }) && a.residual(x) < -cfg.eps_act)
    }
}
