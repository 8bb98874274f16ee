//! Truncated formal Laurent series in a single infinitesimal ε.
//!
//! A non-zero series stores a dense window of known coefficients for the
//! exponents `start .. start + len`; exponents at or beyond the truncation
//! order `start + len` are unknown. After normalization the first stored
//! coefficient is nonzero, so `start` is the valuation. If every known
//! coefficient cancelled, the window is empty and only `O(ε^start)` is known.

use alloc::vec::Vec;
use core::cmp::{max, min};

use thiserror::Error;

use super::field::Field;
use super::projective::Projective;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("reciprocal of an exact zero")]
    ExactZeroReciprocal,
    #[error("all known coefficients vanished below ε^{truncation}; raise the truncation order")]
    UndeterminedLeading { truncation: i64 },
    #[error("leading coefficient is not invertible")]
    NonInvertibleLeading,
}

/// Leading-order behaviour of an entry as ε → 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntrySignature {
    /// Vanishes like ε^order.
    ZeroLike(u32),
    /// Diverges like ε^-order.
    InfLike(u32),
    /// Finite nonzero limit.
    Regular,
}

/// Order reported for an exact zero, whose valuation is +∞.
pub const EXACT_ZERO_ORDER: u32 = u32::MAX;

impl EntrySignature {
    pub fn is_regular(self) -> bool {
        self == EntrySignature::Regular
    }

    /// Glyph used in step signatures: `0`, `∞` or `u`, with `^k` for order k > 1.
    pub fn symbol(self) -> alloc::string::String {
        use alloc::string::ToString;
        match self {
            EntrySignature::Regular => "u".to_string(),
            EntrySignature::ZeroLike(1) => "0".to_string(),
            EntrySignature::InfLike(1) => "∞".to_string(),
            EntrySignature::ZeroLike(EXACT_ZERO_ORDER) => "0^∞".to_string(),
            EntrySignature::ZeroLike(k) => alloc::format!("0^{k}"),
            EntrySignature::InfLike(k) => alloc::format!("∞^{k}"),
        }
    }

    pub fn class_name(self) -> &'static str {
        match self {
            EntrySignature::Regular => "regular",
            EntrySignature::ZeroLike(_) => "zero",
            EntrySignature::InfLike(_) => "infinity",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            EntrySignature::Regular => 0,
            EntrySignature::ZeroLike(k) | EntrySignature::InfLike(k) => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr<F> {
    ExactZero,
    Truncated { start: i64, coeffs: Vec<F> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<F> {
    repr: Repr<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

impl<F: Field> LaurentSeries<F> {
    pub fn exact_zero() -> Self {
        LaurentSeries {
            repr: Repr::ExactZero,
        }
    }

    /// Builds `Σ coeffs[i] ε^(valuation + i) + O(ε^truncation)`, padding with
    /// zeros or dropping coefficients at or beyond the truncation order.
    pub fn new(valuation: i64, mut coeffs: Vec<F>, truncation: i64) -> Self {
        let len = max(truncation - valuation, 0) as usize;
        coeffs.resize(len, F::zero());
        let start = if len == 0 { truncation } else { valuation };
        Self::normalized(start, coeffs)
    }

    /// Only `O(ε^truncation)` is known.
    pub fn big_o(truncation: i64) -> Self {
        LaurentSeries {
            repr: Repr::Truncated {
                start: truncation,
                coeffs: Vec::new(),
            },
        }
    }

    pub fn constant(c: F, truncation: i64) -> Self {
        Self::monomial(c, 0, truncation)
    }

    pub fn monomial(c: F, exponent: i64, truncation: i64) -> Self {
        Self::new(exponent, alloc::vec![c], truncation)
    }

    /// The infinitesimal ε itself.
    pub fn epsilon(truncation: i64) -> Self {
        Self::monomial(F::one(), 1, truncation)
    }

    fn normalized(mut start: i64, coeffs: Vec<F>) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero());
        let coeffs = match lead {
            Some(i) => {
                start += i as i64;
                let mut c = coeffs;
                c.drain(..i);
                c
            }
            None => {
                start += coeffs.len() as i64;
                Vec::new()
            }
        };
        LaurentSeries {
            repr: Repr::Truncated { start, coeffs },
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// True when every known coefficient vanished.
    pub fn is_undetermined(&self) -> bool {
        matches!(&self.repr, Repr::Truncated { coeffs, .. } if coeffs.is_empty())
    }

    /// Lowest exponent with a nonzero coefficient, if known.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Truncated { start, coeffs } if !coeffs.is_empty() => Some(*start),
            _ => None,
        }
    }

    /// First unknown exponent; `None` for an exact zero.
    pub fn truncation_order(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::Truncated { start, coeffs } => Some(start + coeffs.len() as i64),
        }
    }

    /// Number of known coefficients from the valuation upward.
    pub fn known_terms(&self) -> usize {
        match &self.repr {
            Repr::ExactZero => usize::MAX,
            Repr::Truncated { coeffs, .. } => coeffs.len(),
        }
    }

    /// Coefficient of ε^exponent, or `None` if it lies beyond the truncation.
    pub fn coeff(&self, exponent: i64) -> Option<F> {
        match &self.repr {
            Repr::ExactZero => Some(F::zero()),
            Repr::Truncated { start, coeffs } => {
                let trunc = start + coeffs.len() as i64;
                if exponent >= trunc {
                    None
                } else if exponent < *start {
                    Some(F::zero())
                } else {
                    Some(coeffs[(exponent - start) as usize].clone())
                }
            }
        }
    }

    pub fn leading_coefficient(&self) -> Option<&F> {
        match &self.repr {
            Repr::Truncated { coeffs, .. } => coeffs.first(),
            Repr::ExactZero => None,
        }
    }

    /// Lowers the truncation order to `truncation` (no-op if already lower).
    pub fn truncate(&self, truncation: i64) -> Self {
        match &self.repr {
            Repr::ExactZero => self.clone(),
            Repr::Truncated { start, coeffs } => {
                let keep = max(min(truncation - start, coeffs.len() as i64), 0) as usize;
                if keep == 0 {
                    Self::big_o(min(truncation, start + coeffs.len() as i64))
                } else {
                    LaurentSeries {
                        repr: Repr::Truncated {
                            start: *start,
                            coeffs: coeffs[..keep].to_vec(),
                        },
                    }
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::ExactZero => self.clone(),
            Repr::Truncated { start, coeffs } => LaurentSeries {
                repr: Repr::Truncated {
                    start: *start,
                    coeffs: coeffs.iter().map(Field::neg).collect(),
                },
            },
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        match &self.repr {
            Repr::ExactZero => self.clone(),
            Repr::Truncated { start, coeffs } => {
                Self::normalized(*start, coeffs.iter().map(|x| x.mul(c)).collect())
            }
        }
    }

    fn combine(&self, rhs: &Self, negate_rhs: bool) -> Self {
        match (&self.repr, &rhs.repr) {
            (Repr::ExactZero, _) => {
                if negate_rhs {
                    rhs.neg()
                } else {
                    rhs.clone()
                }
            }
            (_, Repr::ExactZero) => self.clone(),
            (
                Repr::Truncated { start: s1, coeffs: c1 },
                Repr::Truncated { start: s2, coeffs: c2 },
            ) => {
                let t1 = s1 + c1.len() as i64;
                let t2 = s2 + c2.len() as i64;
                let trunc = min(t1, t2);
                let start = min(*s1, *s2);
                if start >= trunc {
                    return Self::big_o(trunc);
                }
                let zero = F::zero();
                let get = |c: &Vec<F>, s: i64, e: i64| -> F {
                    if e < s {
                        zero.clone()
                    } else {
                        c.get((e - s) as usize).cloned().unwrap_or_else(F::zero)
                    }
                };
                let out = (start..trunc)
                    .map(|e| {
                        let a = get(c1, *s1, e);
                        let b = get(c2, *s2, e);
                        if negate_rhs {
                            a.sub(&b)
                        } else {
                            a.add(&b)
                        }
                    })
                    .collect();
                Self::normalized(start, out)
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.combine(rhs, true)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (&self.repr, &rhs.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::exact_zero(),
            (
                Repr::Truncated { start: v1, coeffs: c1 },
                Repr::Truncated { start: v2, coeffs: c2 },
            ) => {
                let n = min(c1.len(), c2.len());
                let start = v1 + v2;
                if n == 0 {
                    return Self::big_o(start);
                }
                let out = (0..n)
                    .map(|k| {
                        let mut acc = c1[0].mul(&c2[k]);
                        for i in 1..=k {
                            acc = acc.add(&c1[i].mul(&c2[k - i]));
                        }
                        acc
                    })
                    .collect();
                Self::normalized(start, out)
            }
        }
    }

    /// Multiplicative inverse, preserving the number of known coefficients.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        match &self.repr {
            Repr::ExactZero => Err(SeriesError::ExactZeroReciprocal),
            Repr::Truncated { start, coeffs } => {
                if coeffs.is_empty() {
                    return Err(SeriesError::UndeterminedLeading { truncation: *start });
                }
                let a0inv = coeffs[0].inv().ok_or(SeriesError::NonInvertibleLeading)?;
                let neg_a0inv = a0inv.neg();
                let n = coeffs.len();
                let mut out: Vec<F> = Vec::with_capacity(n);
                out.push(a0inv);
                for k in 1..n {
                    let mut acc = coeffs[1].mul(&out[k - 1]);
                    for i in 2..=k {
                        acc = acc.add(&coeffs[i].mul(&out[k - i]));
                    }
                    out.push(acc.mul(&neg_a0inv));
                }
                Ok(LaurentSeries {
                    repr: Repr::Truncated {
                        start: -start,
                        coeffs: out,
                    },
                })
            }
        }
    }

    /// Leading-order behaviour as ε → 0.
    pub fn classify(&self) -> Result<EntrySignature, SeriesError> {
        match &self.repr {
            Repr::ExactZero => Ok(EntrySignature::ZeroLike(EXACT_ZERO_ORDER)),
            Repr::Truncated { start, coeffs } => {
                if coeffs.is_empty() {
                    return Err(SeriesError::UndeterminedLeading { truncation: *start });
                }
                Ok(match start.cmp(&0) {
                    core::cmp::Ordering::Greater => EntrySignature::ZeroLike(*start as u32),
                    core::cmp::Ordering::Less => EntrySignature::InfLike((-start) as u32),
                    core::cmp::Ordering::Equal => EntrySignature::Regular,
                })
            }
        }
    }

    /// The limit ε → 0 as a point of ℙ¹.
    pub fn limit(&self) -> Result<Projective<F>, SeriesError> {
        Ok(match self.classify()? {
            EntrySignature::ZeroLike(_) => Projective::Finite(F::zero()),
            EntrySignature::InfLike(_) => Projective::Infinity,
            EntrySignature::Regular => {
                Projective::Finite(self.leading_coefficient().cloned().unwrap())
            }
        })
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> LaurentSeries<G> {
        match &self.repr {
            Repr::ExactZero => LaurentSeries::exact_zero(),
            Repr::Truncated { start, coeffs } => {
                LaurentSeries::normalized(*start, coeffs.iter().map(f).collect())
            }
        }
    }
}

/// Coefficientwise `s op t` with truncation propagated: the minimum of the
/// two orders for sums, `min(val s + trunc t, val t + trunc s)` for products.
pub fn laurent_arith<F: Field>(
    op: SeriesOp,
    s: &LaurentSeries<F>,
    t: &LaurentSeries<F>,
) -> LaurentSeries<F> {
    match op {
        SeriesOp::Add => s.add(t),
        SeriesOp::Sub => s.sub(t),
        SeriesOp::Mul => s.mul(t),
    }
}

pub fn laurent_recip<F: Field>(s: &LaurentSeries<F>) -> Result<LaurentSeries<F>, SeriesError> {
    s.recip()
}

pub fn classify_entry<F: Field>(s: &LaurentSeries<F>) -> Result<EntrySignature, SeriesError> {
    s.classify()
}
