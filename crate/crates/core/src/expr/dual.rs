//! Scalars the evaluator runs on: plain `f64` for values and a first-order
//! dual number for one directional derivative per pass.

use std::ops::{Add, Mul, Neg, Sub};

use super::EvalError;

pub(crate) trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(self) -> f64;
    fn tangent(self) -> f64;
    fn div(self, rhs: Self) -> Result<Self, EvalError>;
    fn powi(self, n: i32) -> Result<Self, EvalError>;
    fn sqrt(self) -> Result<Self, EvalError>;
    fn abs(self) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(self) -> f64 {
        self
    }
    fn tangent(self) -> f64 {
        0.0
    }
    fn div(self, rhs: Self) -> Result<Self, EvalError> {
        if rhs == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn powi(self, n: i32) -> Result<Self, EvalError> {
        if n < 0 && self == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(f64::powi(self, n))
    }
    fn sqrt(self) -> Result<Self, EvalError> {
        if self < 0.0 {
            return Err(EvalError::SqrtOfNegative { value: self });
        }
        Ok(f64::sqrt(self))
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// `re + eps·ε` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl Scalar for Dual {
    fn constant(c: f64) -> Self {
        Dual::new(c, 0.0)
    }
    fn value(self) -> f64 {
        self.re
    }
    fn tangent(self) -> f64 {
        self.eps
    }
    fn div(self, o: Self) -> Result<Self, EvalError> {
        if o.re == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(Dual::new(self.re / o.re, (self.eps * o.re - self.re * o.eps) / (o.re * o.re)))
    }
    fn powi(self, n: i32) -> Result<Self, EvalError> {
        if n == 0 {
            return Ok(Dual::constant(1.0));
        }
        if n < 0 && self.re == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let lower = self.re.powi(n - 1);
        Ok(Dual::new(lower * self.re, f64::from(n) * lower * self.eps))
    }
    fn sqrt(self) -> Result<Self, EvalError> {
        if self.re < 0.0 {
            return Err(EvalError::SqrtOfNegative { value: self.re });
        }
        let r = self.re.sqrt();
        if r == 0.0 {
            if self.eps == 0.0 {
                return Ok(Dual::new(0.0, 0.0));
            }
            return Err(EvalError::NonDifferentiable { op: "sqrt" });
        }
        Ok(Dual::new(r, self.eps / (2.0 * r)))
    }
    /// Uses slope 0 at the kink, so `x·|x|` still differentiates correctly at 0.
    fn abs(self) -> Self {
        if self.re > 0.0 {
            self
        } else if self.re < 0.0 {
            -self
        } else {
            Dual::new(0.0, 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::new(2.0, 1.0);
        let y = Dual::new(3.0, 0.0);
        assert_eq!((x * y).eps, 3.0);
        let q = Scalar::div(y, x).unwrap();
        assert_eq!(q.re, 1.5);
        assert_eq!(q.eps, -0.75);
    }

    #[test]
    fn powi_derivative() {
        let x = Dual::new(-1.0, 1.0);
        let c = x.powi(3).unwrap();
        assert_eq!(c.re, -1.0);
        assert_eq!(c.eps, 3.0);
        assert!(Dual::new(0.0, 1.0).powi(-1).is_err());
    }

    #[test]
    fn sqrt_at_zero() {
        assert!(Dual::new(0.0, 1.0).sqrt().is_err());
        assert_eq!(Dual::new(0.0, 0.0).sqrt().unwrap(), Dual::new(0.0, 0.0));
        assert!(Scalar::sqrt(-1.0_f64).is_err());
    }
}
