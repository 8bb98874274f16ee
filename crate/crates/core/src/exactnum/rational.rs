//! Arbitrary-precision rationals and their text forms.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| malformed())?;
    let d = BigInt::from_str(d).map_err(|_| malformed())?;
    if d.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(n, d))
}

/// Parses a decimal literal such as `0.001`, `-2.5` or `1e-9` into the
/// rational it denotes exactly. Plain `p/q` literals are accepted too.
pub fn parse_decimal(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    if t.contains('/') {
        return parse_rational(t);
    }
    if t.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| malformed())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(malformed());
    }
    let mut all = String::from(int_part);
    all.push_str(frac_part);
    let n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| malformed())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = Rational::from_integer(n);
    if scale >= 0 {
        r *= Rational::from_integer(Pow::pow(&ten, scale as u32));
    } else {
        r /= Rational::from_integer(Pow::pow(&ten, (-scale) as u32));
    }
    Ok(if neg { -r } else { r })
}

/// `p/q` text form (`p` when q = 1).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Truncated decimal expansion with `digits` digits after the point
/// (rounded toward zero).
pub fn to_decimal_string(r: &Rational, digits: u32) -> String {
    let scale = Pow::pow(&BigInt::from(10u32), digits);
    let scaled = (r.numer().abs() * &scale) / r.denom();
    let mut s = scaled.to_string();
    let d = digits as usize;
    if s.len() <= d {
        let mut padded = "0".repeat(d + 1 - s.len());
        padded.push_str(&s);
        s = padded;
    }
    let (ip, fp) = s.split_at(s.len() - d);
    let mut out = String::new();
    if r.is_negative() {
        out.push('-');
    }
    out.push_str(ip);
    if d > 0 {
        out.push('.');
        out.push_str(fp);
    }
    out
}

/// log₁₀ of a positive big integer, accurate to f64 precision.
pub fn log10_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return libm::log10(n.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    libm::log10(top.to_f64().unwrap()) + shift as f64 * core::f64::consts::LOG10_2
}

/// Logarithmic height log₁₀ max(|p|, q) of p/q in lowest terms.
pub fn height(r: &Rational) -> f64 {
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    if n > d {
        log10_biguint(n)
    } else {
        log10_biguint(d)
    }
}

/// Nearest f64 (through a 64-bit mantissa window; exact for small values).
pub fn to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 64;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize)) / r.denom()
    };
    scaled.to_f64().unwrap_or(0.0) * libm::pow(2.0, shift as f64)
}

/// Exact rational from a finite f64.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Least common multiple of the denominators.
pub fn common_denominator(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Clears denominators and removes the integer content, so the result is a
/// primitive integer vector whose first nonzero entry is positive.
pub fn primitive_integers(values: &[Rational]) -> Vec<BigInt> {
    let l = common_denominator(values);
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * Rational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return ints;
    }
    let sign = ints
        .iter()
        .find(|v| !v.is_zero())
        .map(|v| if v.is_negative() { -BigInt::one() } else { BigInt::one() })
        .unwrap_or_else(BigInt::one);
    ints.into_iter().map(|v| v / &g * &sign).collect()
}
