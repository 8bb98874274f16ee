//! Values on the projective line ℙ¹ = F ∪ {∞}, with an explicit absorbing
//! `Indeterminate` outcome for 0/0, ∞/∞, 0·∞ and ∞ ± ∞.

use core::fmt;

use super::field::Field;
use super::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Projective<F> {
    Finite(F),
    /// The single unsigned point at infinity.
    Infinity,
    Indeterminate,
}

/// Projective rational, the carrier used for exact orbits.
pub type ProjectiveValue = Projective<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

use Projective::{Finite, Indeterminate, Infinity};

impl<F: Field> Projective<F> {
    pub fn zero() -> Self {
        Finite(F::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Infinity)
    }

    pub fn is_indeterminate(&self) -> bool {
        matches!(self, Indeterminate)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Finite(x) if x.is_zero())
    }

    pub fn finite(&self) -> Option<&F> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Finite(x), Finite(y)) => Finite(x.add(y)),
            (Infinity, Infinity) => Indeterminate,
            _ => Infinity,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Finite(x) => Finite(x.neg()),
            other => other.clone(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Finite(x), Finite(y)) => Finite(x.mul(y)),
            (Infinity, Infinity) => Infinity,
            (Finite(c), Infinity) | (Infinity, Finite(c)) => {
                if c.is_zero() {
                    Indeterminate
                } else {
                    Infinity
                }
            }
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Indeterminate => Indeterminate,
            Infinity => Finite(F::zero()),
            Finite(x) => match x.inv() {
                Some(r) => Finite(r),
                None => Infinity,
            },
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            (Infinity, Infinity) => Indeterminate,
            (Finite(x), Finite(y)) if x.is_zero() && y.is_zero() => Indeterminate,
            (Infinity, Finite(_)) => Infinity,
            _ => self.mul(&rhs.recip()),
        }
    }

    pub fn apply(&self, op: ArithOp, rhs: &Self) -> Self {
        match op {
            ArithOp::Add => self.add(rhs),
            ArithOp::Sub => self.sub(rhs),
            ArithOp::Mul => self.mul(rhs),
            ArithOp::Div => self.div(rhs),
        }
    }
}

/// Field arithmetic on ℙ¹ with the projective conventions
/// c/0 = ∞ (c ≠ 0), c/∞ = 0, c ± ∞ = ∞, c·∞ = ∞ (c ≠ 0).
pub fn proj_arith<F: Field>(op: ArithOp, x: &Projective<F>, y: &Projective<F>) -> Projective<F> {
    x.apply(op, y)
}

impl fmt::Display for Projective<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(x) => f.write_str(&format_rational(x)),
            Infinity => f.write_str("∞"),
            Indeterminate => f.write_str("?"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    fn fin(n: i64, d: i64) -> ProjectiveValue {
        Finite(rat(n, d))
    }

    #[test]
    fn conventions() {
        assert_eq!(proj_arith(ArithOp::Div, &fin(1, 1), &fin(0, 1)), Infinity);
        assert_eq!(proj_arith(ArithOp::Sub, &ProjectiveValue::Infinity, &Infinity), Indeterminate);
        assert_eq!(proj_arith(ArithOp::Add, &fin(1, 2), &fin(1, 3)), fin(5, 6));
        assert_eq!(proj_arith(ArithOp::Div, &fin(3, 1), &Infinity), fin(0, 1));
        assert_eq!(proj_arith(ArithOp::Add, &fin(3, 1), &Infinity), Infinity);
        assert_eq!(proj_arith(ArithOp::Mul, &fin(3, 1), &Infinity), Infinity);
        assert_eq!(proj_arith(ArithOp::Mul, &fin(0, 1), &Infinity), Indeterminate);
        assert_eq!(proj_arith(ArithOp::Div, &fin(0, 1), &fin(0, 1)), Indeterminate);
        assert_eq!(proj_arith(ArithOp::Div, &ProjectiveValue::Infinity, &Infinity), Indeterminate);
        assert_eq!(proj_arith(ArithOp::Div, &Infinity, &fin(0, 1)), Infinity);
    }

    #[test]
    fn indeterminate_absorbs() {
        for op in [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div] {
            assert_eq!(proj_arith(op, &ProjectiveValue::Indeterminate, &fin(2, 1)), Indeterminate);
            assert_eq!(proj_arith(op, &ProjectiveValue::Infinity, &Indeterminate), Indeterminate);
        }
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", Finite(int(-3))), "-3");
        assert_eq!(alloc::format!("{}", ProjectiveValue::Infinity), "∞");
    }
}
