//! Domain types shared by every module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg;
use crate::sets::ConvexSetDescriptor;

/// A point or direction in ℝⁿ. Entries are finite and `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector must have at least one entry".into()));
        }
        if let Some(v) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("vector entry {v} is not finite")));
        }
        Ok(Vector(entries))
    }

    /// Wraps entries the caller already knows to be finite.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Axis-aligned closed box; stands in for the open convex domain of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let w = Window { lo, hi };
        w.validate()?;
        Ok(w)
    }

    /// Parses `lo1,hi1,lo2,hi2,...`.
    pub fn parse_flat(text: &str) -> Result<Self> {
        let vals: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| Error::InvalidInput(format!("bad window {text:?}: {e}")))?;
        if vals.is_empty() || vals.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!("window needs an even number of bounds, got {}", vals.len())));
        }
        let lo = vals.iter().step_by(2).copied().collect();
        let hi = vals.iter().skip(1).step_by(2).copied().collect();
        Window::new(lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.is_empty() {
            return Err(Error::InvalidInput("window must have dimension >= 1".into()));
        }
        if self.lo.len() != self.hi.len() {
            return Err(Error::dim("window bounds", self.lo.len(), self.hi.len()));
        }
        for (l, h) in self.lo.iter().zip(&self.hi) {
            if !(l.is_finite() && h.is_finite() && l <= h) {
                return Err(Error::InvalidInput(format!("window axis [{l}, {h}] is invalid")));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dimension()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    /// Grows every axis by `frac` of its width on both sides.
    pub fn padded(&self, frac: f64) -> Window {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let pad = (h - l) * frac;
                (l - pad, h + pad)
            })
            .unzip();
        Window { lo, hi }
    }

    /// Coordinate `i` of `resolution` equally spaced nodes on axis `axis`.
    /// Both endpoints are reproduced exactly.
    pub fn node(&self, axis: usize, i: usize, resolution: usize) -> f64 {
        let (l, h) = (self.lo[axis], self.hi[axis]);
        if resolution < 2 || i == 0 {
            l
        } else if i + 1 == resolution {
            h
        } else {
            l + (h - l) * (i as f64) / ((resolution - 1) as f64)
        }
    }

    /// All grid nodes, row-major (the last axis varies fastest).
    pub fn grid(&self, resolution: usize) -> Vec<Vector> {
        let n = self.dimension();
        let total = resolution.checked_pow(n as u32).unwrap_or(usize::MAX);
        let mut out = Vec::with_capacity(total.min(1 << 20));
        let mut idx = vec![0usize; n];
        if resolution == 0 {
            return out;
        }
        loop {
            out.push(Vector::from_raw(idx.iter().enumerate().map(|(a, &i)| self.node(a, i, resolution)).collect()));
            let mut axis = n;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < resolution {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Uniform sample from the window shrunk by `margin` on every side.
    pub fn sample<R: Rng>(&self, rng: &mut R, margin: f64) -> Vector {
        Vector::from_raw(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(l, h)| {
                    let (a, b) = if h - l > 2.0 * margin { (l + margin, h - margin) } else { (*l, *h) };
                    if b > a {
                        rng.random_range(a..=b)
                    } else {
                        a
                    }
                })
                .collect(),
        )
    }
}

/// Common view of (P) and (PI): an objective over a feasible region inside
/// a bounded window.
pub trait Program {
    fn dimension(&self) -> usize;
    fn objective(&self) -> &Expr;
    fn domain_window(&self) -> &Window;
    /// Nonnegative magnitude of the worst constraint violation at `x`.
    fn violation(&self, x: &[f64], cfg: &Config) -> Result<f64>;

    fn is_feasible(&self, x: &[f64], cfg: &Config) -> Result<bool> {
        Ok(self.violation(x, cfg)? <= cfg.eps_feas)
    }

    /// Feasible nodes of the window grid, row-major.
    fn feasible_grid(&self, resolution: usize, cfg: &Config) -> Result<Vec<Vector>> {
        let mut out = Vec::new();
        for x in self.domain_window().grid(resolution) {
            if self.is_feasible(&x, cfg)? {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// Problem (P): minimize `f` over the convex set `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub objective: Expr,
    pub feasible_set: ConvexSetDescriptor,
    pub dimension: usize,
    pub domain_window: Window,
}

impl Problem {
    pub fn new(objective: Expr, feasible_set: ConvexSetDescriptor, domain_window: Window) -> Result<Self> {
        domain_window.validate()?;
        let n = domain_window.dimension();
        if feasible_set.dimension() != n {
            return Err(Error::dim("feasible set", n, feasible_set.dimension()));
        }
        check_expr_dim(&objective, n, "objective")?;
        Ok(Problem { objective, feasible_set, dimension: n, domain_window })
    }

    /// Ensures `S ∩ window` is nonempty, via `anchor` when given or a grid probe.
    pub fn verify_nonempty(&self, anchor: Option<&[f64]>, cfg: &Config) -> Result<()> {
        verify_nonempty(self, anchor, cfg)
    }
}

impl Program for Problem {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn objective(&self) -> &Expr {
        &self.objective
    }
    fn domain_window(&self) -> &Window {
        &self.domain_window
    }
    fn violation(&self, x: &[f64], _cfg: &Config) -> Result<f64> {
        check_point_dim(x, self.dimension)?;
        Ok(self.feasible_set.violation(x))
    }
}

/// Problem (PI): minimize `f` over `X ∩ {g_i <= 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedProblem {
    pub objective: Expr,
    pub constraints: Vec<Expr>,
    pub ground_set: ConvexSetDescriptor,
    pub dimension: usize,
    pub domain_window: Window,
}

impl ConstrainedProblem {
    pub fn new(
        objective: Expr,
        constraints: Vec<Expr>,
        ground_set: ConvexSetDescriptor,
        domain_window: Window,
    ) -> Result<Self> {
        domain_window.validate()?;
        let n = domain_window.dimension();
        if constraints.is_empty() {
            return Err(Error::InvalidInput("a constrained problem needs at least one constraint".into()));
        }
        if ground_set.dimension() != n {
            return Err(Error::dim("ground set", n, ground_set.dimension()));
        }
        check_expr_dim(&objective, n, "objective")?;
        for (i, g) in constraints.iter().enumerate() {
            check_expr_dim(g, n, &format!("constraint {i}"))?;
        }
        Ok(ConstrainedProblem { objective, constraints, ground_set, dimension: n, domain_window })
    }

    pub fn constraint_values(&self, x: &[f64], cfg: &Config) -> Result<Vec<f64>> {
        self.constraints.iter().map(|g| Ok(g.eval(x, cfg)?)).collect()
    }

    pub fn verify_nonempty(&self, anchor: Option<&[f64]>, cfg: &Config) -> Result<()> {
        verify_nonempty(self, anchor, cfg)
    }
}

impl Program for ConstrainedProblem {
    fn dimension(&self) -> usize {
        self.dimension
    }
    fn objective(&self) -> &Expr {
        &self.objective
    }
    fn domain_window(&self) -> &Window {
        &self.domain_window
    }
    fn violation(&self, x: &[f64], cfg: &Config) -> Result<f64> {
        check_point_dim(x, self.dimension)?;
        let mut worst = self.ground_set.violation(x);
        for g in &self.constraints {
            worst = worst.max(g.eval(x, cfg)?);
        }
        Ok(worst.max(0.0))
    }
}

fn check_expr_dim(e: &Expr, n: usize, what: &str) -> Result<()> {
    match e.max_variable() {
        Some(i) if i >= n => {
            Err(Error::InvalidInput(format!("{what} uses x{} but the problem has dimension {n}", i + 1)))
        }
        _ => Ok(()),
    }
}

pub(crate) fn check_point_dim(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::dim("point", n, x.len()));
    }
    Ok(())
}

const NONEMPTY_PROBE_RESOLUTION: usize = 21;

fn verify_nonempty<P: Program + ?Sized>(p: &P, anchor: Option<&[f64]>, cfg: &Config) -> Result<()> {
    if let Some(a) = anchor {
        if p.is_feasible(a, cfg)? {
            return Ok(());
        }
        return Err(Error::Infeasible { point: a.to_vec(), reason: "anchor point violates the constraints".into() });
    }
    if p.feasible_grid(NONEMPTY_PROBE_RESOLUTION, cfg)?.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(())
}

/// Lagrange multipliers `λ >= 0`, one per constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MultiplierVector {
    lambdas: Vec<f64>,
}

impl MultiplierVector {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if let Some(l) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidInput(format!("multiplier {l} is not a finite nonnegative number")));
        }
        Ok(MultiplierVector { lambdas })
    }

    pub fn zeros(m: usize) -> Self {
        MultiplierVector { lambdas: vec![0.0; m] }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

impl TryFrom<Vec<f64>> for MultiplierVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        MultiplierVector::new(v)
    }
}

impl From<MultiplierVector> for Vec<f64> {
    fn from(m: MultiplierVector) -> Self {
        m.lambdas
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    /// Nonzero gradients with a common direction over the solution set.
    I,
    /// Zero gradient over the solution set.
    II,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientWitness {
    pub point: Vector,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub alternative: Alternative,
    pub common_unit_gradient: Option<Vector>,
    pub witnesses: Vec<GradientWitness>,
}

/// The solution-set families that can be tested for membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CharacVariant {
    #[serde(rename = "SHAT1")]
    SHat1,
    #[serde(rename = "SHAT2")]
    SHat2,
    #[serde(rename = "STILDE")]
    STilde,
    S1,
    S2,
    S3,
    S4,
    S5,
    #[serde(rename = "THAT1")]
    THat1,
    #[serde(rename = "THAT2")]
    THat2,
    T1,
    T2,
    T3,
    T4,
    T5,
    #[serde(rename = "SP1")]
    SPrime1,
    #[serde(rename = "SP2")]
    SPrime2,
    #[serde(rename = "SP3")]
    SPrime3,
    #[serde(rename = "SP4")]
    SPrime4,
    #[serde(rename = "SP5")]
    SPrime5,
    #[serde(rename = "SHATP1")]
    SHatPrime1,
    #[serde(rename = "SHATP2")]
    SHatPrime2,
    #[serde(rename = "SHATPP1")]
    SHatDoublePrime1,
    #[serde(rename = "SHATPP2")]
    SHatDoublePrime2,
}

impl CharacVariant {
    pub const ALL: [CharacVariant; 24] = [
        Self::SHat1,
        Self::SHat2,
        Self::STilde,
        Self::S1,
        Self::S2,
        Self::S3,
        Self::S4,
        Self::S5,
        Self::THat1,
        Self::THat2,
        Self::T1,
        Self::T2,
        Self::T3,
        Self::T4,
        Self::T5,
        Self::SPrime1,
        Self::SPrime2,
        Self::SPrime3,
        Self::SPrime4,
        Self::SPrime5,
        Self::SHatPrime1,
        Self::SHatPrime2,
        Self::SHatDoublePrime1,
        Self::SHatDoublePrime2,
    ];

    /// Variants whose equality with the solution set needs `∇f(x̄) ≠ 0`.
    pub const NONZERO_GRADIENT: [CharacVariant; 7] =
        [Self::SHat1, Self::SHat2, Self::S1, Self::S2, Self::S3, Self::S4, Self::S5];

    pub const T_FAMILY: [CharacVariant; 7] =
        [Self::THat1, Self::THat2, Self::T1, Self::T2, Self::T3, Self::T4, Self::T5];

    pub const CONSTRAINED: [CharacVariant; 9] = [
        Self::SHatPrime1,
        Self::SHatPrime2,
        Self::SPrime1,
        Self::SPrime2,
        Self::SPrime3,
        Self::SPrime4,
        Self::SPrime5,
        Self::SHatDoublePrime1,
        Self::SHatDoublePrime2,
    ];

    pub fn tag(self) -> &'static str {
        use CharacVariant::*;
        match self {
            SHat1 => "SHAT1",
            SHat2 => "SHAT2",
            STilde => "STILDE",
            S1 => "S1",
            S2 => "S2",
            S3 => "S3",
            S4 => "S4",
            S5 => "S5",
            THat1 => "THAT1",
            THat2 => "THAT2",
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            T4 => "T4",
            T5 => "T5",
            SPrime1 => "SP1",
            SPrime2 => "SP2",
            SPrime3 => "SP3",
            SPrime4 => "SP4",
            SPrime5 => "SP5",
            SHatPrime1 => "SHATP1",
            SHatPrime2 => "SHATP2",
            SHatDoublePrime1 => "SHATPP1",
            SHatDoublePrime2 => "SHATPP2",
        }
    }

    /// Primed and double-primed variants carry a multiplier vector.
    pub fn needs_multipliers(self) -> bool {
        Self::CONSTRAINED.contains(&self)
    }

    pub fn is_double_primed(self) -> bool {
        matches!(self, Self::SHatDoublePrime1 | Self::SHatDoublePrime2)
    }

    /// Unconstrained family a primed variant intersects with `X₁(λ)`.
    pub fn unprimed(self) -> Option<CharacVariant> {
        use CharacVariant::*;
        Some(match self {
            SPrime1 => S1,
            SPrime2 => S2,
            SPrime3 => S3,
            SPrime4 => S4,
            SPrime5 => S5,
            SHatPrime1 | SHatDoublePrime1 => SHat1,
            SHatPrime2 | SHatDoublePrime2 => SHat2,
            _ => return None,
        })
    }

    pub fn requires_nonzero_anchor_gradient(self) -> bool {
        Self::NONZERO_GRADIENT.contains(&self) || self.needs_multipliers()
    }
}

impl fmt::Display for CharacVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CharacVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        CharacVariant::ALL
            .iter()
            .copied()
            .find(|v| v.tag() == up)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variant {s:?}")))
    }
}

/// How a residual is compared against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    /// `|value| <= tol`
    Zero,
    /// `value <= tol`
    AtMost,
    /// `value >= -tol`
    AtLeast,
    /// `value > tol`
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub test: Test,
    pub tolerance: f64,
}

impl Residual {
    pub fn zero(value: f64, tolerance: f64) -> Self {
        Residual { value, test: Test::Zero, tolerance }
    }
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        Residual { value, test: Test::AtMost, tolerance }
    }
    pub fn at_least(value: f64, tolerance: f64) -> Self {
        Residual { value, test: Test::AtLeast, tolerance }
    }
    pub fn above(value: f64, tolerance: f64) -> Self {
        Residual { value, test: Test::Above, tolerance }
    }

    pub fn satisfied(&self) -> bool {
        match self.test {
            Test::Zero => self.value.abs() <= self.tolerance,
            Test::AtMost => self.value <= self.tolerance,
            Test::AtLeast => self.value >= -self.tolerance,
            Test::Above => self.value > self.tolerance,
        }
    }
}

/// Per-point membership verdict with named residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub point: Vector,
    pub variant: CharacVariant,
    pub member: bool,
    pub residuals: BTreeMap<String, Residual>,
}

impl MembershipVerdict {
    pub fn new(point: Vector, variant: CharacVariant, residuals: BTreeMap<String, Residual>) -> Self {
        let member = residuals.values().all(Residual::satisfied);
        MembershipVerdict { point, variant, member, residuals }
    }

    /// Residuals that fail their test.
    pub fn failing(&self) -> impl Iterator<Item = (&str, &Residual)> {
        self.residuals.iter().filter(|(_, r)| !r.satisfied()).map(|(k, r)| (k.as_str(), r))
    }
}
