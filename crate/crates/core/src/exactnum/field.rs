//! Coefficient carriers for exact computation.
//!
//! Everything above this module (Laurent series, projective values, the
//! mappings, interpolation) is written against [`Field`], so the same code
//! runs over ℚ, over the prime field 𝔽ₚ with p = 2⁶¹ − 1, and over
//! first-order jets used for Jacobian ranks.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::RngCore;

use super::rational::Rational;

/// Exact coefficient arithmetic.
///
/// `inv` is partial: it returns `None` exactly when the element is not a
/// unit. For genuine fields that means zero; for [`Jet`] it means a zero
/// value part.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Image of a rational number; `None` if its denominator is not invertible.
    fn from_rational(r: &Rational) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
            .expect("integers are representable in every coefficient field")
    }

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }
}

/// Fields from which generic (random) points can be drawn.
pub trait GenericSample: Field {
    /// A random nonzero element.
    fn sample_generic<R: RngCore + ?Sized>(rng: &mut R) -> Self;
}

/// Numerators and denominators of generic rational samples lie in
/// `[-SAMPLE_BOUND, SAMPLE_BOUND] \ {0}`.
pub const SAMPLE_BOUND: u32 = 50;

fn small_nonzero<R: RngCore + ?Sized>(rng: &mut R) -> i64 {
    let span = 2 * SAMPLE_BOUND;
    loop {
        // rejection sampling keeps the distribution uniform
        let zone = u32::MAX - u32::MAX % span;
        let x = rng.next_u32();
        if x >= zone {
            continue;
        }
        let v = (x % span) as i64 - SAMPLE_BOUND as i64;
        let v = if v >= 0 { v + 1 } else { v };
        return v;
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        Some(r.clone())
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
}

impl GenericSample for Rational {
    fn sample_generic<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let n = small_nonzero(rng);
        let d = small_nonzero(rng);
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// The Mersenne prime 2⁶¹ − 1.
pub const MODULUS: u64 = (1u64 << 61) - 1;

/// Element of the prime field 𝔽ₚ, p = 2⁶¹ − 1, in canonical form `0 ≤ x < p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp(u64);

impl Fp {
    pub const fn new(v: u64) -> Self {
        Fp(v % MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(x: u128) -> u64 {
        let lo = (x as u64) & MODULUS;
        let hi = (x >> 61) as u64;
        let mut s = lo + (hi & MODULUS) + ((x >> 122) as u64);
        while s >= MODULUS {
            s -= MODULUS;
        }
        s
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn from_bigint(n: &BigInt) -> Fp {
        let m = BigInt::from(MODULUS);
        let r = n.mod_floor(&m);
        Fp(r.to_u64().expect("residue fits in u64"))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, rhs: &Self) -> Self {
        let s = self.0 + rhs.0;
        Fp(if s >= MODULUS { s - MODULUS } else { s })
    }
    fn sub(&self, rhs: &Self) -> Self {
        Fp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + MODULUS - rhs.0
        })
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp(Fp::reduce128(self.0 as u128 * rhs.0 as u128))
    }
    fn neg(&self) -> Self {
        if self.0 == 0 {
            *self
        } else {
            Fp(MODULUS - self.0)
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(MODULUS - 2))
        }
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        let n = Fp::from_bigint(r.numer());
        let d = Fp::from_bigint(r.denom());
        d.inv().map(|di| Field::mul(&n, &di))
    }
    fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Fp::new(v as u64)
        } else {
            Field::neg(&Fp::new(v.unsigned_abs()))
        }
    }
}

impl GenericSample for Fp {
    fn sample_generic<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = rng.next_u64() >> 3;
            if v != 0 && v < MODULUS {
                return Fp(v);
            }
        }
    }
}

/// First-order jet: a value together with its gradient with respect to a
/// fixed set of parameters. A shorter gradient is padded with zeros.
#[derive(Clone, Debug)]
pub struct Jet<F> {
    pub value: F,
    pub grad: Vec<F>,
}

impl<F: Field> Jet<F> {
    pub fn constant(value: F) -> Self {
        Jet {
            value,
            grad: Vec::new(),
        }
    }

    /// The `index`-th coordinate function evaluated at `value`.
    pub fn variable(value: F, index: usize, dim: usize) -> Self {
        let mut grad = alloc::vec![F::zero(); dim];
        grad[index] = F::one();
        Jet { value, grad }
    }

    pub fn partial(&self, index: usize) -> F {
        self.grad.get(index).cloned().unwrap_or_else(F::zero)
    }

    fn zip_grad(&self, rhs: &Self, f: impl Fn(&F, &F) -> F) -> Vec<F> {
        let n = self.grad.len().max(rhs.grad.len());
        (0..n)
            .map(|i| f(&self.partial(i), &rhs.partial(i)))
            .collect()
    }
}

impl<F: Field> PartialEq for Jet<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.value != other.value {
            return false;
        }
        let n = self.grad.len().max(other.grad.len());
        (0..n).all(|i| self.partial(i) == other.partial(i))
    }
}

impl<F: Field> Field for Jet<F> {
    fn zero() -> Self {
        Jet::constant(F::zero())
    }
    fn one() -> Self {
        Jet::constant(F::one())
    }
    /// Only the value part decides; a vanishing value with a nonzero
    /// gradient is a non-generic coincidence at the sample point.
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Jet {
            value: self.value.add(&rhs.value),
            grad: self.zip_grad(rhs, |x, y| x.add(y)),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Jet {
            value: self.value.sub(&rhs.value),
            grad: self.zip_grad(rhs, |x, y| x.sub(y)),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.value, &rhs.value);
        Jet {
            value: a.mul(b),
            grad: self.zip_grad(rhs, |da, db| a.mul(db).add(&b.mul(da))),
        }
    }
    fn neg(&self) -> Self {
        Jet {
            value: self.value.neg(),
            grad: self.grad.iter().map(Field::neg).collect(),
        }
    }
    fn inv(&self) -> Option<Self> {
        let r = self.value.inv()?;
        let r2 = r.mul(&r).neg();
        Some(Jet {
            value: r,
            grad: self.grad.iter().map(|d| d.mul(&r2)).collect(),
        })
    }
    fn from_rational(r: &Rational) -> Option<Self> {
        F::from_rational(r).map(Jet::constant)
    }
    fn from_i64(v: i64) -> Self {
        Jet::constant(F::from_i64(v))
    }
}

/// Rank of a matrix over a field by Gaussian elimination.
pub fn matrix_rank<F: Field>(rows: &[Vec<F>]) -> usize {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let ncols = m.iter().map(Vec::len).max().unwrap_or(0);
    for row in m.iter_mut() {
        row.resize(ncols, F::zero());
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].inv().expect("nonzero pivot");
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].mul(&inv);
                for (x, y) in row[col..ncols].iter_mut().zip(&pivot_row[col..ncols]) {
                    *x = x.sub(&factor.mul(y));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Sign of a rational as -1, 0 or 1.
pub fn rational_sign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// True if `r` is strictly positive.
pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}
