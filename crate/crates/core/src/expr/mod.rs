//! Scalar expressions in `n` variables: parsing, evaluation, and exact
//! gradients by forward-mode dual numbers.
//!
//! Piecewise expressions select branches by conjunctions of linear guards.
//! Guards are closed: on a shared boundary every matching branch is
//! evaluated and the branches must agree in value (within `eps_feas`) and,
//! for gradients, in slope (within `eps_dir`).

mod dual;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::config::Config;
use crate::model::Vector;
use dual::{Dual, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("{name} takes {expected} argument(s), found {found} (byte {offset})")]
    Arity { name: String, expected: usize, found: usize, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of negative value {value}")]
    SqrtOfNegative { value: f64 },
    #[error("{op} is not differentiable here")]
    NonDifferentiable { op: &'static str },
    #[error("point {point:?} lies in no piecewise branch")]
    NoBranch { point: Vec<f64> },
    #[error("piecewise branches disagree on a shared boundary: {left} vs {right}")]
    BoundaryMismatch { left: f64, right: f64 },
    #[error("piecewise branches disagree in slope along x{} on a shared boundary: {left} vs {right}", coordinate + 1)]
    BoundaryGradientMismatch { coordinate: usize, left: f64, right: f64 },
    #[error("expression uses x{} but the point has dimension {dimension}", variable + 1)]
    Dimension { variable: usize, dimension: usize },
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

/// `coeffs·x <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGuard {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl LinearGuard {
    pub fn slack(&self, x: &[f64]) -> f64 {
        crate::linalg::dot(&self.coeffs, x) - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub guard: Vec<LinearGuard>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    Abs(Box<Expr>),
    Piecewise(Vec<Branch>),
}

/// Parses `text` as an expression in the variables `x1..x{dimension}`.
pub fn parse(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    parse::parse(text, dimension)
}

impl Expr {
    /// Largest zero-based variable index used, if any.
    pub fn max_variable(&self) -> Option<usize> {
        use Expr::*;
        match self {
            Const(_) => None,
            Var(i) => Some(*i),
            Neg(a) | Pow(a, _) | Sqrt(a) | Abs(a) => a.max_variable(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.max_variable().max(b.max_variable()),
            Piecewise(bs) => bs
                .iter()
                .map(|b| {
                    let g = b.guard.iter().filter_map(|g| g.coeffs.iter().rposition(|c| *c != 0.0)).max();
                    g.max(b.body.max_variable())
                })
                .max()
                .flatten(),
        }
    }

    /// `(a, c)` with `self ≡ a·x + c`, when the expression is affine.
    pub fn affine(&self, n: usize) -> Option<(Vec<f64>, f64)> {
        use Expr::*;
        let constant = |c: f64| Some((vec![0.0; n], c));
        match self {
            Const(c) => constant(*c),
            Var(i) => {
                let mut a = vec![0.0; n];
                *a.get_mut(*i)? = 1.0;
                Some((a, 0.0))
            }
            Neg(e) => {
                let (a, c) = e.affine(n)?;
                Some((a.into_iter().map(|v| -v).collect(), -c))
            }
            Add(l, r) | Sub(l, r) => {
                let (al, cl) = l.affine(n)?;
                let (ar, cr) = r.affine(n)?;
                let s = if matches!(self, Sub(..)) { -1.0 } else { 1.0 };
                Some((al.iter().zip(&ar).map(|(x, y)| x + s * y).collect(), cl + s * cr))
            }
            Mul(l, r) => {
                let (al, cl) = l.affine(n)?;
                let (ar, cr) = r.affine(n)?;
                let zero = |a: &[f64]| a.iter().all(|v| *v == 0.0);
                if zero(&al) {
                    Some((ar.iter().map(|v| cl * v).collect(), cl * cr))
                } else if zero(&ar) {
                    Some((al.iter().map(|v| cr * v).collect(), cl * cr))
                } else {
                    None
                }
            }
            Div(l, r) => {
                let (al, cl) = l.affine(n)?;
                let (ar, cr) = r.affine(n)?;
                if ar.iter().any(|v| *v != 0.0) || cr == 0.0 {
                    return None;
                }
                Some((al.iter().map(|v| v / cr).collect(), cl / cr))
            }
            Pow(e, k) => {
                let (a, c) = e.affine(n)?;
                if *k == 1 {
                    Some((a, c))
                } else if a.iter().all(|v| *v == 0.0) && (c != 0.0 || *k > 0) {
                    constant(c.powi(*k))
                } else if *k == 0 {
                    constant(1.0)
                } else {
                    None
                }
            }
            Sqrt(e) | Abs(e) => {
                let (a, c) = e.affine(n)?;
                if a.iter().any(|v| *v != 0.0) || (matches!(self, Sqrt(_)) && c < 0.0) {
                    return None;
                }
                constant(if matches!(self, Sqrt(_)) { c.sqrt() } else { c.abs() })
            }
            Piecewise(_) => None,
        }
    }

    /// Value of the expression at `x`.
    pub fn eval(&self, x: &[f64], cfg: &Config) -> Result<f64, EvalError> {
        self.check_dimension(x)?;
        let v = evaluate::<f64>(self, x, &|i| x[i], None, cfg)?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }

    /// Exact gradient at `x`: one dual-number pass per coordinate.
    pub fn grad(&self, x: &[f64], cfg: &Config) -> Result<Vector, EvalError> {
        self.check_dimension(x)?;
        let mut g = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let seed = |i: usize| Dual::new(x[i], if i == k { 1.0 } else { 0.0 });
            let d = evaluate::<Dual>(self, x, &seed, Some(k), cfg)?;
            if !(d.re.is_finite() && d.eps.is_finite()) {
                return Err(EvalError::NonFinite);
            }
            g.push(d.eps);
        }
        Ok(Vector::from_raw(g))
    }

    /// Central-difference gradient with step `h`.
    pub fn grad_fd(&self, x: &[f64], h: f64, cfg: &Config) -> Result<Vector, EvalError> {
        self.check_dimension(x)?;
        let mut g = Vec::with_capacity(x.len());
        let mut probe = x.to_vec();
        for k in 0..x.len() {
            probe[k] = x[k] + h;
            let up = self.eval(&probe, cfg)?;
            probe[k] = x[k] - h;
            let down = self.eval(&probe, cfg)?;
            probe[k] = x[k];
            g.push((up - down) / (2.0 * h));
        }
        Ok(Vector::from_raw(g))
    }

    fn check_dimension(&self, x: &[f64]) -> Result<(), EvalError> {
        match self.max_variable() {
            Some(v) if v >= x.len() => Err(EvalError::Dimension { variable: v, dimension: x.len() }),
            _ => Ok(()),
        }
    }
}

fn evaluate<S: Scalar>(
    e: &Expr,
    x: &[f64],
    var: &dyn Fn(usize) -> S,
    coordinate: Option<usize>,
    cfg: &Config,
) -> Result<S, EvalError> {
    use Expr::*;
    let rec = |a: &Expr| evaluate(a, x, var, coordinate, cfg);
    Ok(match e {
        Const(c) => S::constant(*c),
        Var(i) => var(*i),
        Neg(a) => -rec(a)?,
        Add(a, b) => rec(a)? + rec(b)?,
        Sub(a, b) => rec(a)? - rec(b)?,
        Mul(a, b) => rec(a)? * rec(b)?,
        Div(a, b) => rec(a)?.div(rec(b)?)?,
        Pow(a, n) => rec(a)?.powi(*n)?,
        Sqrt(a) => rec(a)?.sqrt()?,
        Abs(a) => rec(a)?.abs(),
        Piecewise(branches) => {
            let mut chosen: Option<S> = None;
            for b in branches {
                if !b.guard.iter().all(|g| g.slack(x) <= cfg.eps_feas) {
                    continue;
                }
                let v = rec(&b.body)?;
                match chosen {
                    None => chosen = Some(v),
                    Some(first) => {
                        if (first.value() - v.value()).abs() > cfg.eps_feas {
                            return Err(EvalError::BoundaryMismatch { left: first.value(), right: v.value() });
                        }
                        let (l, r) = (first.tangent(), v.tangent());
                        if (l - r).abs() > cfg.eps_dir * (1.0 + l.abs().max(r.abs())) {
                            return Err(EvalError::BoundaryGradientMismatch {
                                coordinate: coordinate.unwrap_or(0),
                                left: l,
                                right: r,
                            });
                        }
                    }
                }
            }
            chosen.ok_or_else(|| EvalError::NoBranch { point: x.to_vec() })?
        }
    })
}

fn fmt_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        write!(f, "(-{})", -v)
    } else {
        write!(f, "{}", v + 0.0)
    }
}

impl fmt::Display for LinearGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            fmt_number(f, *c)?;
            write!(f, "*x{}", i + 1)?;
        }
        if first {
            f.write_str("0")?;
        }
        f.write_str(" <= ")?;
        fmt_number(f, self.bound)
    }
}

/// Fully parenthesized form; parsing it reproduces the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Const(c) => fmt_number(f, *c),
            Var(i) => write!(f, "x{}", i + 1),
            Neg(a) => write!(f, "(-{a})"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, n) => write!(f, "({a})^{n}"),
            Sqrt(a) => write!(f, "sqrt({a})"),
            Abs(a) => write!(f, "abs({a})"),
            Piecewise(bs) => {
                f.write_str("pw[")?;
                for (k, b) in bs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("; ")?;
                    }
                    for (j, g) in b.guard.iter().enumerate() {
                        if j > 0 {
                            f.write_str(" & ")?;
                        }
                        write!(f, "{g}")?;
                    }
                    write!(f, ": {}", b.body)?;
                }
                f.write_str("]")
            }
        }
    }
}
