//! The generalized dKdV lattice rule and its (1, q) periodic reductions φ_q.

use alloc::vec::Vec;
use core::fmt::Debug;

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{Field, LaurentSeries, Projective, Rational, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("parameters a and b must be nonzero")]
    ZeroParameter,
    #[error("reduction order q must be at least 1")]
    ZeroOrder,
    #[error("state has length {got}, expected q + 1 = {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("indeterminate form (∞ − ∞ or 0/0); regularize with ε")]
    IndeterminateStep,
    #[error("series arithmetic failed: {0}")]
    Series(#[from] SeriesError),
    #[error("parameter not representable in the chosen field")]
    Unrepresentable,
    #[error("closed form degenerates: u1·u2 + {0}·γ vanishes")]
    DegenerateOrbit(i64),
    #[error("closed form needs q = 1")]
    NotFirstOrder,
}

/// The triple (a, b, q) of the reduced map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapParams {
    pub a: Rational,
    pub b: Rational,
    pub q: usize,
}

impl MapParams {
    pub fn new(a: Rational, b: Rational, q: usize) -> Result<Self, MapError> {
        if Zero::is_zero(&a) || Zero::is_zero(&b) {
            return Err(MapError::ZeroParameter);
        }
        if q == 0 {
            return Err(MapError::ZeroOrder);
        }
        Ok(MapParams { a, b, q })
    }

    pub fn is_integrable(&self) -> bool {
        self.a == self.b
    }

    pub fn dim(&self) -> usize {
        self.q + 1
    }

    /// Coefficients mapped into `F`.
    pub fn in_field<F: Field>(&self) -> Result<ReducedMap<F>, MapError> {
        let a = F::from_rational(&self.a).ok_or(MapError::Unrepresentable)?;
        let b = F::from_rational(&self.b).ok_or(MapError::Unrepresentable)?;
        if a.is_zero() || b.is_zero() {
            return Err(MapError::Unrepresentable);
        }
        Ok(ReducedMap { a, b, q: self.q })
    }
}

/// A value the map can be evaluated on: projective points or ε-series.
pub trait Scalar: Clone + Debug {
    type Coeff: Field;

    fn plus(&self, rhs: &Self) -> Result<Self, MapError>;
    fn minus(&self, rhs: &Self) -> Result<Self, MapError>;
    /// c / x for a field constant c ≠ 0.
    fn const_over(c: &Self::Coeff, x: &Self) -> Result<Self, MapError>;
}

fn checked<F: Field>(v: Projective<F>) -> Result<Projective<F>, MapError> {
    if v.is_indeterminate() {
        Err(MapError::IndeterminateStep)
    } else {
        Ok(v)
    }
}

impl<F: Field> Scalar for Projective<F> {
    type Coeff = F;

    fn plus(&self, rhs: &Self) -> Result<Self, MapError> {
        checked(self.add(rhs))
    }

    fn minus(&self, rhs: &Self) -> Result<Self, MapError> {
        checked(self.sub(rhs))
    }

    fn const_over(c: &F, x: &Self) -> Result<Self, MapError> {
        checked(Projective::Finite(c.clone()).div(x))
    }
}

impl<F: Field> Scalar for LaurentSeries<F> {
    type Coeff = F;

    fn plus(&self, rhs: &Self) -> Result<Self, MapError> {
        Ok(self.add(rhs))
    }

    fn minus(&self, rhs: &Self) -> Result<Self, MapError> {
        Ok(self.sub(rhs))
    }

    fn const_over(c: &F, x: &Self) -> Result<Self, MapError> {
        Ok(x.recip()?.scale(c))
    }
}

/// Coordinates (u_1, …, u_{q+1}) of φ_q.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S> {
    entries: Vec<S>,
}

impl<S> StateVector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        StateVector { entries }
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based coordinate u_i.
    pub fn u(&self, i: usize) -> &S {
        &self.entries[i - 1]
    }
}

/// Map coefficients in a concrete field.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedMap<F> {
    pub a: F,
    pub b: F,
    pub q: usize,
}

impl<F: Field> ReducedMap<F> {
    fn check<S>(&self, s: &StateVector<S>) -> Result<(), MapError> {
        if s.len() != self.q + 1 {
            return Err(MapError::WrongLength {
                expected: self.q + 1,
                got: s.len(),
            });
        }
        Ok(())
    }

    /// (u_1, …, u_{q+1}) ↦ (u_2, …, u_{q+1}, u_1 + a/u_{q+1} − b/u_2).
    pub fn forward<S: Scalar<Coeff = F>>(
        &self,
        s: &StateVector<S>,
    ) -> Result<StateVector<S>, MapError> {
        self.check(s)?;
        let u = &s.entries;
        let q = self.q;
        let e = u[0]
            .plus(&S::const_over(&self.a, &u[q])?)?
            .minus(&S::const_over(&self.b, &u[1])?)?;
        let mut out = Vec::with_capacity(q + 1);
        out.extend_from_slice(&u[1..]);
        out.push(e);
        Ok(StateVector::new(out))
    }

    /// (u_1, …, u_{q+1}) ↦ (u_{q+1} + b/u_1 − a/u_q, u_1, …, u_q).
    pub fn backward<S: Scalar<Coeff = F>>(
        &self,
        s: &StateVector<S>,
    ) -> Result<StateVector<S>, MapError> {
        self.check(s)?;
        let u = &s.entries;
        let q = self.q;
        let d = u[q]
            .plus(&S::const_over(&self.b, &u[0])?)?
            .minus(&S::const_over(&self.a, &u[q - 1])?)?;
        let mut out = Vec::with_capacity(q + 1);
        out.push(d);
        out.extend_from_slice(&u[..q]);
        Ok(StateVector::new(out))
    }

    pub fn lattice_step<S: Scalar<Coeff = F>>(
        &self,
        opposite: &S,
        x_m1n: &S,
        x_mn1: &S,
        direction: Direction,
    ) -> Result<S, MapError> {
        let ta = S::const_over(&self.a, x_m1n)?;
        let tb = S::const_over(&self.b, x_mn1)?;
        match direction {
            Direction::NE => opposite.plus(&ta)?.minus(&tb),
            Direction::SW => opposite.minus(&ta)?.plus(&tb),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Solve for x_{m+1,n+1}.
    NE,
    /// Solve for x_{m,n}.
    SW,
}

pub fn phi_forward<S: Scalar>(
    s: &StateVector<S>,
    p: &MapParams,
) -> Result<StateVector<S>, MapError> {
    p.in_field::<S::Coeff>()?.forward(s)
}

pub fn phi_backward<S: Scalar>(
    s: &StateVector<S>,
    p: &MapParams,
) -> Result<StateVector<S>, MapError> {
    p.in_field::<S::Coeff>()?.backward(s)
}

/// One application of the lattice rule. For `NE` the first argument is
/// x_{m,n} and the result is x_{m+1,n+1}; for `SW` the first argument is
/// x_{m+1,n+1} and the result is x_{m,n}.
pub fn lattice_step<S: Scalar>(
    opposite: &S,
    x_m1n: &S,
    x_mn1: &S,
    p: &MapParams,
    direction: Direction,
) -> Result<S, MapError> {
    p.in_field::<S::Coeff>()?
        .lattice_step(opposite, x_m1n, x_mn1, direction)
}

/// Iterates `n` forward steps, returning all n + 1 states.
pub fn orbit<S: Scalar>(
    s: &StateVector<S>,
    p: &MapParams,
    n: usize,
) -> Result<Vec<StateVector<S>>, MapError> {
    let m = p.in_field::<S::Coeff>()?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(s.clone());
    for _ in 0..n {
        let next = m.forward(out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// φ_1ⁿ(u1, u2) from the linearization along the invariant fibration
/// u1·u2 + nγ, with γ = a − b.
pub fn phi1_closed_form(
    u1: &Rational,
    u2: &Rational,
    n: usize,
    p: &MapParams,
) -> Result<StateVector<Rational>, MapError> {
    if p.q != 1 {
        return Err(MapError::NotFirstOrder);
    }
    let gamma = &p.a - &p.b;
    let kappa = u1 * u2;
    let level = |k: i64| -> Result<Rational, MapError> {
        let v = &kappa + &gamma * Rational::from_integer(k.into());
        if Zero::is_zero(&v) {
            Err(MapError::DegenerateOrbit(k))
        } else {
            Ok(v)
        }
    };
    let l = (n / 2) as i64;
    let omega = if n % 2 == 1 {
        let mut w = u2.clone();
        for k in 1..=l {
            w = w * level(2 * k)? / level(2 * k - 1)?;
        }
        w
    } else {
        let mut w = u1.clone();
        for k in 0..l {
            w = w * level(2 * k + 1)? / level(2 * k)?;
        }
        w
    };
    if Zero::is_zero(&omega) {
        return Err(MapError::DegenerateOrbit(n as i64));
    }
    let second = level(n as i64)? / &omega;
    Ok(StateVector::new(alloc::vec![omega, second]))
}
