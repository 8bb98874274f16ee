//! Dynamical degree of φ_q by three routes: the express method on a
//! singularity pattern, height growth of exact rational orbits, and degree
//! sequences reconstructed by rational interpolation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactnum::rational::{height, primitive_integers, to_decimal_string, to_f64};
use crate::exactnum::{Field, Fp, GenericSample, Poly, Projective, Rational};
use crate::mapping::{MapError, MapParams, ReducedMap, StateVector};
use crate::singularity::{Classification, SingularityPattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("pattern balance is trivial: no spontaneous zeros or infinities survive")]
    EmptyPattern,
    #[error("pattern offsets invalid: {0}")]
    InvalidPattern(String),
    #[error("classification {0} carries no value-count pattern")]
    NoBalance(String),
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("orbit hit an exact singularity in {attempts} samples")]
    OrbitCollapse { attempts: usize },
    #[error("need at least {needed} iterations, got {got}")]
    TooFewIterations { needed: usize, got: usize },
    #[error("interpolation inconsistent at step {step} with degree bound {bound}")]
    InterpolationInconsistent { step: usize, bound: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Offsets at which the last coordinate of the pattern is 0 or ∞.
///
/// A finite pattern lists everything in the prefix. A periodic pattern adds
/// a block of `block_period` steps starting at `block_start`, repeated
/// forever; block offsets are relative to the block start.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValueCountPattern {
    pub zero_offsets_prefix: Vec<usize>,
    pub inf_offsets_prefix: Vec<usize>,
    pub block_zeros: Vec<usize>,
    pub block_infs: Vec<usize>,
    pub block_start: usize,
    pub block_period: Option<usize>,
}

impl ValueCountPattern {
    pub fn finite(zeros: Vec<usize>, infs: Vec<usize>) -> Self {
        ValueCountPattern {
            zero_offsets_prefix: zeros,
            inf_offsets_prefix: infs,
            ..Default::default()
        }
    }

    pub fn periodic(
        prefix_zeros: Vec<usize>,
        prefix_infs: Vec<usize>,
        block_start: usize,
        block_zeros: Vec<usize>,
        block_infs: Vec<usize>,
        period: usize,
    ) -> Self {
        ValueCountPattern {
            zero_offsets_prefix: prefix_zeros,
            inf_offsets_prefix: prefix_infs,
            block_zeros,
            block_infs,
            block_start,
            block_period: Some(period),
        }
    }

    /// Reads the last coordinate of each forward step of an open or
    /// unconfined pattern.
    pub fn from_pattern(p: &SingularityPattern) -> Result<Self, DegreeError> {
        let last = |j: usize| p.forward[j].signature.entries.last().copied().unwrap();
        let split = |range: core::ops::Range<usize>, base: usize| {
            let mut zeros = Vec::new();
            let mut infs = Vec::new();
            for j in range {
                match last(j) {
                    crate::exactnum::EntrySignature::ZeroLike(_) => zeros.push(j - base),
                    crate::exactnum::EntrySignature::InfLike(_) => infs.push(j - base),
                    crate::exactnum::EntrySignature::Regular => {}
                }
            }
            (zeros, infs)
        };
        match p.classification {
            Classification::ConfinedOpen { length } => {
                let (z, i) = split(0..length, 0);
                Ok(Self::finite(z, i))
            }
            Classification::Unconfined { period, onset } => {
                let s = onset as usize;
                let (pz, pi) = split(0..s, 0);
                let (bz, bi) = split(s..s + period, s);
                Ok(Self::periodic(pz, pi, s, bz, bi, period))
            }
            other => Err(DegreeError::NoBalance(alloc::format!("{other}"))),
        }
    }

    fn validate(&self) -> Result<(), DegreeError> {
        let distinct = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        for v in [
            &self.zero_offsets_prefix,
            &self.inf_offsets_prefix,
            &self.block_zeros,
            &self.block_infs,
        ] {
            if !distinct(v) {
                return Err(DegreeError::InvalidPattern("repeated offset".into()));
            }
        }
        if let Some(per) = self.block_period {
            if per == 0 {
                return Err(DegreeError::InvalidPattern("zero period".into()));
            }
            if self.block_zeros.iter().chain(&self.block_infs).any(|&o| o >= per) {
                return Err(DegreeError::InvalidPattern(
                    "block offset not below the period".into(),
                ));
            }
        } else if !self.block_zeros.is_empty() || !self.block_infs.is_empty() {
            return Err(DegreeError::InvalidPattern("block without a period".into()));
        }
        Ok(())
    }
}

/// Integer polynomial in λ, highest degree first, primitive with positive
/// leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPolynomial {
    pub coefficients: Vec<BigInt>,
}

impl CharPolynomial {
    pub fn from_high_first(c: &[i64]) -> Self {
        CharPolynomial {
            coefficients: c.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn to_poly(&self) -> Poly<Rational> {
        Poly::from_coeffs(
            self.coefficients
                .iter()
                .rev()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn from_poly(p: &Poly<Rational>) -> Self {
        let mut ints = primitive_integers(p.coeffs());
        ints.reverse();
        if ints.first().is_some_and(|c| c.is_negative()) {
            for c in ints.iter_mut() {
                *c = -c.clone();
            }
        }
        CharPolynomial { coefficients: ints }
    }
}

impl fmt::Display for CharPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = d - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("−")?;
                }
            } else {
                f.write_str(if c.is_negative() { " − " } else { " + " })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || e == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match e {
                0 => {}
                1 => f.write_str("λ")?,
                _ => write!(f, "λ^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn x_pow(n: usize) -> Poly<Rational> {
    let mut c = alloc::vec![<Rational as Zero>::zero(); n + 1];
    c[n] = <Rational as One>::one();
    Poly::from_coeffs(c)
}

fn indicator(offsets: &[usize]) -> Poly<Rational> {
    offsets
        .iter()
        .fold(Poly::zero(), |acc, &o| acc.add(&x_pow(o)))
}

/// Characteristic polynomial of the balance between spontaneous zeros and
/// infinities. With x = 1/λ the finite balance is Σ x^z − Σ x^i = 0; a
/// periodic block contributes x^s (Σ x^z − Σ x^i)/(1 − x^P), so the balance
/// numerator is prefix·(1 − x^P) + x^s·block. Powers of x are divided out
/// before returning to λ; cyclotomic factors are kept.
pub fn express_char_poly(pattern: &ValueCountPattern) -> Result<CharPolynomial, DegreeError> {
    pattern.validate()?;
    let prefix = indicator(&pattern.zero_offsets_prefix)
        .sub(&indicator(&pattern.inf_offsets_prefix));
    let numerator = match pattern.block_period {
        None => prefix,
        Some(per) => {
            let block = indicator(&pattern.block_zeros).sub(&indicator(&pattern.block_infs));
            let shifted = block.mul(&x_pow(pattern.block_start));
            let denom = Poly::one().sub(&x_pow(per));
            prefix.mul(&denom).add(&shifted)
        }
    };
    if numerator.is_zero() {
        return Err(DegreeError::EmptyPattern);
    }
    let low = numerator.coeffs().iter().position(|c| !Zero::is_zero(c)).unwrap();
    let mut c: Vec<Rational> = numerator.coeffs()[low..].to_vec();
    // λ^d · N(1/λ) reverses the coefficient list.
    c.reverse();
    let p = Poly::from_coeffs(c);
    if p.degree() == Some(0) {
        return Err(DegreeError::EmptyPattern);
    }
    Ok(CharPolynomial::from_poly(&p))
}

/// n-th cyclotomic polynomial over ℚ.
pub fn cyclotomic(n: usize) -> Poly<Rational> {
    let mut p = x_pow(n).sub(&Poly::one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p.div_rem(&cyclotomic(d)).unwrap().0;
        }
    }
    p
}

/// Splits off cyclotomic factors: returns (n, multiplicity) pairs and the
/// remaining cofactor.
pub fn cyclotomic_factorization(p: &CharPolynomial) -> (Vec<(usize, usize)>, CharPolynomial) {
    let mut rest = p.to_poly();
    let mut found = Vec::new();
    let deg = rest.degree().unwrap_or(0);
    let mut n = 1;
    while n <= 4 * deg.max(1) * deg.max(1) + 2 && rest.degree().unwrap_or(0) > 0 {
        let phi = cyclotomic(n);
        if phi.degree().unwrap_or(0) <= rest.degree().unwrap_or(0) {
            let mut mult = 0;
            loop {
                let (q, r) = rest.div_rem(&phi).unwrap();
                if !r.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                found.push((n, mult));
            }
        }
        n += 1;
    }
    (found, CharPolynomial::from_poly(&rest))
}

/// Root bracket `lower < root ≤ upper`, or an exact rational root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEstimate {
    pub lower: Rational,
    pub upper: Rational,
    pub exact: Option<Rational>,
}

impl RootEstimate {
    pub fn value(&self) -> f64 {
        match &self.exact {
            Some(r) => to_f64(r),
            None => (to_f64(&self.lower) + to_f64(&self.upper)) / 2.0,
        }
    }

    /// Decimal digits of the upper bracket end, truncated.
    pub fn decimal(&self, digits: u32) -> String {
        match &self.exact {
            Some(r) => to_decimal_string(r, digits),
            None => to_decimal_string(&self.upper, digits),
        }
    }

    pub fn is_one(&self) -> bool {
        self.exact.as_ref().is_some_and(|r| r.is_one())
    }
}

fn sturm_sequence(p: &Poly<Rational>) -> Vec<Poly<Rational>> {
    let mut seq = alloc::vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).unwrap();
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

fn sign_changes(seq: &[Poly<Rational>], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Largest real root above 1, bracketed to width `tol` by Sturm counting
/// and exact rational bisection. Returns exactly 1 when every real root is
/// at most 1 + 10⁻⁹.
pub fn largest_real_root(poly: &CharPolynomial, tol: &Rational) -> Result<RootEstimate, DegreeError> {
    let p = poly.to_poly();
    if p.degree().unwrap_or(0) == 0 {
        return Err(DegreeError::ConstantPolynomial);
    }
    let sq = {
        let g = p.gcd(&p.derivative());
        p.div_rem(&g).unwrap().0
    };
    let seq = sturm_sequence(&sq);
    let lead = sq.leading().unwrap().clone();
    let cauchy = sq
        .coeffs()
        .iter()
        .map(|c| (c / &lead).abs())
        .fold(<Rational as Zero>::zero(), |m, v| if v > m { v } else { m })
        + <Rational as One>::one();
    let two = Rational::from_integer(2.into());
    let mut hi = if cauchy > two { cauchy } else { two };
    let mut lo = <Rational as One>::one() + Rational::new(1.into(), 1_000_000_000.into());
    let count = |a: &Rational, b: &Rational| sign_changes(&seq, a) - sign_changes(&seq, b);
    if count(&lo, &hi) == 0 {
        return Ok(RootEstimate {
            lower: <Rational as One>::one(),
            upper: <Rational as One>::one(),
            exact: Some(<Rational as One>::one()),
        });
    }
    let half = Rational::new(1.into(), 2.into());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) * &half;
        if count(&mid, &hi) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exact = if Zero::is_zero(&sq.eval(&hi)) {
        Some(hi.clone())
    } else {
        None
    };
    Ok(RootEstimate {
        lower: lo,
        upper: hi,
        exact,
    })
}

/// Logarithmic heights of an exact orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightSeries {
    /// h_n = max over coordinates of log₁₀ max(|numerator|, denominator).
    pub heights: Vec<f64>,
    pub initial: Vec<Rational>,
    pub seed: u64,
    /// Set when the digit budget stopped the orbit early.
    pub truncated_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineEstimate {
    pub lambda_hat: f64,
    pub fit_start: usize,
    pub fit_end: usize,
    /// Root-mean-square residual of the log₁₀ fit.
    pub residual: f64,
    pub series: HeightSeries,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiophantineOptions {
    /// Stop iterating once a height exceeds this many decimal digits.
    pub max_digits: f64,
}

impl Default for DiophantineOptions {
    fn default() -> Self {
        DiophantineOptions { max_digits: 20000.0 }
    }
}

/// Exact orbit heights from a random small-height initial state.
pub fn height_series(
    p: &MapParams,
    n_iters: usize,
    seed: u64,
    opts: &DiophantineOptions,
) -> Result<HeightSeries, DegreeError> {
    let map: ReducedMap<Rational> = p.in_field()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 5;
    'sample: for _ in 0..ATTEMPTS {
        let initial: Vec<Rational> = (0..p.dim())
            .map(|_| Rational::sample_generic(&mut rng))
            .collect();
        let mut state = StateVector::new(initial.iter().cloned().map(Projective::Finite).collect());
        let h_of = |s: &StateVector<Projective<Rational>>| {
            s.entries()
                .iter()
                .map(|v| v.finite().map(height).unwrap_or(0.0))
                .fold(0.0, f64::max)
        };
        let mut heights = alloc::vec![h_of(&state)];
        let mut truncated_at = None;
        for n in 1..=n_iters {
            state = match map.forward(&state) {
                Ok(s) => s,
                Err(_) => continue 'sample,
            };
            let e = state.entries().last().unwrap();
            if !e.is_finite() || e.is_zero() {
                continue 'sample;
            }
            let h = h_of(&state);
            heights.push(h);
            if h > opts.max_digits {
                truncated_at = Some(n);
                break;
            }
        }
        return Ok(HeightSeries {
            heights,
            initial,
            seed,
            truncated_at,
        });
    }
    Err(DegreeError::OrbitCollapse { attempts: ATTEMPTS })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum();
    (slope, icpt, libm::sqrt(rss / n))
}

/// Growth-rate estimate from exact heights. The increments
/// Δ_n = h_n − h_{n−q−1} over one full shift cycle grow like λⁿ whether or
/// not the heights carry a linear part, so λ̂ = 10^slope of the least
/// squares line through (n, log₁₀ Δ_n) over the last half of the orbit,
/// skipping the first `burn_in` iterates.
pub fn diophantine_degree(
    p: &MapParams,
    n_iters: usize,
    seed: u64,
    burn_in: usize,
) -> Result<DiophantineEstimate, DegreeError> {
    diophantine_degree_with(p, n_iters, seed, burn_in, &DiophantineOptions::default())
}

pub fn diophantine_degree_with(
    p: &MapParams,
    n_iters: usize,
    seed: u64,
    burn_in: usize,
    opts: &DiophantineOptions,
) -> Result<DiophantineEstimate, DegreeError> {
    let needed = 2 * burn_in + 8;
    if n_iters < needed {
        return Err(DegreeError::TooFewIterations {
            needed,
            got: n_iters,
        });
    }
    let series = height_series(p, n_iters, seed, opts)?;
    let h = &series.heights;
    let last = h.len() - 1;
    let lag = p.dim();
    let start = (last / 2).max(burn_in).max(lag);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..=last)
        .filter_map(|n| {
            let d = h[n] - h[n - lag];
            (d > 0.0).then(|| (n as f64, libm::log10(d)))
        })
        .unzip();
    if xs.len() < 3 {
        return Err(DegreeError::TooFewIterations {
            needed: start + 3,
            got: last,
        });
    }
    let (slope, _, residual) = least_squares(&xs, &ys);
    Ok(DiophantineEstimate {
        lambda_hat: libm::pow(10.0, slope),
        fit_start: start,
        fit_end: last,
        residual,
        series,
    })
}

/// Quadratic envelope check: C = max h_n/n² over the second quarter of the
/// orbit, then h_n ≤ C n² is tested over the second half.
pub fn quadratic_envelope(series: &HeightSeries) -> (f64, bool) {
    let h = &series.heights;
    let n = h.len() - 1;
    let c = (n / 4).max(1)..=(n / 2).max(1);
    let cmax = c
        .map(|i| h[i] / (i * i) as f64)
        .fold(0.0, f64::max);
    let ok = (n / 2 + 1..=n).all(|i| h[i] <= cmax * (i * i) as f64);
    (cmax, ok)
}

/// How the initial data depend on the interpolation variable t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    /// u_{q+1} = t, other coordinates fixed.
    SingleVariable,
    /// u_i = c_i t + d_i for random c_i, d_i.
    GenericLine,
}

struct Affine<F> {
    slope: Vec<F>,
    offset: Vec<F>,
}

fn eval_orbit<F: Field>(
    map: &ReducedMap<F>,
    line: &Affine<F>,
    t: &F,
    n: usize,
) -> Option<Vec<F>> {
    let init: Vec<Projective<F>> = line
        .slope
        .iter()
        .zip(&line.offset)
        .map(|(c, d)| Projective::Finite(c.mul(t).add(d)))
        .collect();
    let mut out = alloc::vec![init.last().unwrap().finite()?.clone()];
    let mut s = StateVector::new(init);
    for _ in 0..n {
        s = map.forward(&s).ok()?;
        out.push(s.entries().last().unwrap().finite()?.clone());
    }
    Some(out)
}

/// Rational function through the points with numerator and denominator
/// degree at most `bound`, by the extended Euclidean algorithm on the
/// node polynomial and the Lagrange interpolant.
fn cauchy_interpolate<F: Field>(ts: &[F], vs: &[F], bound: usize) -> Option<(Poly<F>, Poly<F>)> {
    let mut node = Poly::one();
    for t in ts {
        node = node.mul_linear(t);
    }
    let nc = node.coeffs();
    let mut acc = alloc::vec![F::zero(); ts.len()];
    for (ti, vi) in ts.iter().zip(vs) {
        // node / (t − t_i) by synthetic division
        let mut basis = alloc::vec![F::zero(); ts.len()];
        let mut carry = F::zero();
        for k in (1..nc.len()).rev() {
            carry = nc[k].add(&carry.mul(ti));
            basis[k - 1] = carry.clone();
        }
        let w = vi.mul(&Poly::from_coeffs(basis.clone()).eval(ti).inv()?);
        for (a, c) in acc.iter_mut().zip(&basis) {
            *a = a.add(&c.mul(&w));
        }
    }
    let lag = Poly::from_coeffs(acc);
    let (mut r0, mut r1) = (node, lag);
    let (mut s0, mut s1) = (Poly::<F>::zero(), Poly::<F>::one());
    while r1.degree().is_some_and(|d| d > bound) {
        let (q, r) = r0.div_rem(&r1)?;
        let s = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if s1.is_zero() || s1.degree()? > bound {
        return None;
    }
    let g = r1.gcd(&s1);
    let num = r1.div_rem(&g)?.0;
    let den = s1.div_rem(&g)?.0;
    Some((num, den))
}

fn rf_degree<F: Field>(num: &Poly<F>, den: &Poly<F>) -> usize {
    num.degree().unwrap_or(0).max(den.degree().unwrap_or(0))
}

/// Degrees in t of x_q, x_{q+1}, …, x_{q+n} (the last coordinate after
/// 0, 1, …, n steps), over the prime field.
pub fn degree_sequence(
    p: &MapParams,
    mode: DegreeMode,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>, DegreeError> {
    degree_sequence_with::<Fp>(p, mode, n, seed)
}

pub fn degree_sequence_with<F: GenericSample>(
    p: &MapParams,
    mode: DegreeMode,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>, DegreeError> {
    let map: ReducedMap<F> = p.in_field()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = p.dim();
    let line = match mode {
        DegreeMode::SingleVariable => {
            let mut slope = alloc::vec![F::zero(); dim];
            slope[dim - 1] = F::one();
            let mut offset: Vec<F> = (0..dim).map(|_| F::sample_generic(&mut rng)).collect();
            offset[dim - 1] = F::zero();
            Affine { slope, offset }
        }
        DegreeMode::GenericLine => Affine {
            slope: (0..dim).map(|_| F::sample_generic(&mut rng)).collect(),
            offset: (0..dim).map(|_| F::sample_generic(&mut rng)).collect(),
        },
    };
    let mut ts: Vec<F> = Vec::new();
    let mut values: Vec<Vec<F>> = Vec::new();
    let mut grow = |want: usize, ts: &mut Vec<F>, values: &mut Vec<Vec<F>>| {
        let mut misses = 0;
        while ts.len() < want {
            let t = F::sample_generic(&mut rng);
            if ts.contains(&t) {
                continue;
            }
            match eval_orbit(&map, &line, &t, n) {
                Some(v) => {
                    ts.push(t);
                    values.push(v);
                }
                None => {
                    misses += 1;
                    if misses > 64 + want {
                        return false;
                    }
                }
            }
        }
        true
    };
    const CHECKS: usize = 3;
    let mut degrees: Vec<usize> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let cap = if j == 0 {
            1
        } else {
            // x_{q+j} = x_{j-1} + a/x_{q+j-1} − b/x_j
            let d = |idx: isize| -> usize {
                if idx < 0 {
                    1
                } else {
                    degrees[idx as usize]
                }
            };
            let back = |i: usize| -> usize {
                // degree of x_i for i < q: initial coordinate, degree ≤ 1
                if i < p.q {
                    1
                } else {
                    d((i - p.q) as isize)
                }
            };
            back(j - 1) + degrees[j - 1] + back(j)
        };
        let prev = degrees.last().copied().unwrap_or(1);
        let mut bound = (2 * prev + 2).min(cap).max(1);
        let mut doublings = 0;
        let deg = loop {
            let need = 2 * bound + 1 + CHECKS;
            if !grow(need, &mut ts, &mut values) {
                return Err(DegreeError::InterpolationInconsistent { step: j, bound });
            }
            let m = 2 * bound + 1;
            let vs: Vec<F> = values[..m].iter().map(|v| v[j].clone()).collect();
            let ok = cauchy_interpolate(&ts[..m], &vs, bound).filter(|(num, den)| {
                (m..need).all(|i| {
                    let dv = den.eval(&ts[i]);
                    !dv.is_zero() && num.eval(&ts[i]) == values[i][j].mul(&dv)
                })
            });
            match ok {
                Some((num, den)) => break rf_degree(&num, &den),
                None => {
                    if bound >= cap || doublings >= 3 {
                        return Err(DegreeError::InterpolationInconsistent { step: j, bound });
                    }
                    bound = (bound * 2).min(cap);
                    doublings += 1;
                }
            }
        };
        degrees.push(deg);
    }
    Ok(degrees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use alloc::vec;

    #[test]
    fn confined_balance_factorizes() {
        for q in 2..=6 {
            let pat = ValueCountPattern::finite(vec![0, q + 1], vec![1, q]);
            let c = express_char_poly(&pat).unwrap();
            let mut expect = vec![0i64; q + 2];
            expect[0] = 1;
            expect[1] = -1;
            expect[q] = -1;
            expect[q + 1] = 1;
            assert_eq!(c, CharPolynomial::from_high_first(&expect), "q = {q}");
        }
    }

    #[test]
    fn unconfined_block_balance() {
        let pat = ValueCountPattern::periodic(vec![], vec![], 0, vec![0], vec![1, 4], 5);
        assert_eq!(
            express_char_poly(&pat).unwrap(),
            CharPolynomial::from_high_first(&[1, -1, 0, 0, -1])
        );
        // prefix plus shifted block
        let pat = ValueCountPattern::periodic(vec![0], vec![1], 3, vec![1], vec![0, 2], 4);
        assert_eq!(
            express_char_poly(&pat).unwrap(),
            CharPolynomial::from_high_first(&[1, -1, 0, -1])
        );
    }

    #[test]
    fn symmetric_balance_is_empty() {
        let pat = ValueCountPattern::finite(vec![0], vec![0]);
        assert_eq!(express_char_poly(&pat), Err(DegreeError::EmptyPattern));
    }

    #[test]
    fn display_uses_minus_signs() {
        let c = CharPolynomial::from_high_first(&[1, -1, 0, 0, 0, -1]);
        assert_eq!(alloc::format!("{c}"), "λ^5 − λ^4 − 1");
        let c = CharPolynomial::from_high_first(&[2, 0, 1]);
        assert_eq!(alloc::format!("{c}"), "2λ^2 + 1");
    }

    #[test]
    fn roots_by_sturm_bisection() {
        let tol = rat(1, 1_000_000_000);
        let g = largest_real_root(&CharPolynomial::from_high_first(&[1, -1, -1]), &tol).unwrap();
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        assert!(g.lower < g.upper && &g.upper - &g.lower <= tol);
        assert!((g.value() - phi).abs() < 1e-9);
        let r = largest_real_root(&CharPolynomial::from_high_first(&[1, -1, 0, -1]), &tol).unwrap();
        assert!((r.value() - 1.465_571_231_9).abs() < 1e-9);
        let one = largest_real_root(&CharPolynomial::from_high_first(&[1, -1, -1, 1]), &tol).unwrap();
        assert!(one.is_one());
        let two = largest_real_root(&CharPolynomial::from_high_first(&[1, -3, 2]), &tol).unwrap();
        assert!((two.value() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn plastic_factorization() {
        let c = CharPolynomial::from_high_first(&[1, -1, 0, 0, 0, -1]);
        let (cyc, rest) = cyclotomic_factorization(&c);
        assert_eq!(cyc, vec![(6, 1)]);
        assert_eq!(rest, CharPolynomial::from_high_first(&[1, 0, -1, -1]));
    }

    #[test]
    fn interpolation_recovers_rational_function() {
        let num = Poly::from_coeffs(vec![int(3), int(0), int(-2)]);
        let den = Poly::from_coeffs(vec![int(1), int(5)]);
        let ts: Vec<Rational> = (1..=9).map(int).collect();
        let vs: Vec<Rational> = ts.iter().map(|t| num.eval(t) / den.eval(t)).collect();
        let (n2, d2) = cauchy_interpolate(&ts, &vs, 4).unwrap();
        assert_eq!(rf_degree(&n2, &d2), 2);
        for t in [int(-3), rat(1, 7)] {
            assert_eq!(n2.eval(&t) / d2.eval(&t), num.eval(&t) / den.eval(&t));
        }
    }

    #[test]
    fn first_steps_have_low_degree() {
        let p = MapParams::new(int(1), int(2), 4).unwrap();
        let d = degree_sequence(&p, DegreeMode::SingleVariable, 3, 5).unwrap();
        assert_eq!(d, vec![1, 1, 1, 1]);
        let p = MapParams::new(int(1), int(2), 3).unwrap();
        let d = degree_sequence(&p, DegreeMode::GenericLine, 2, 5).unwrap();
        assert_eq!(&d[1..], &[3, 5]);
    }

    #[test]
    fn too_few_iterations() {
        let p = MapParams::new(int(1), int(2), 2).unwrap();
        assert!(matches!(
            diophantine_degree(&p, 10, 1, 3),
            Err(DegreeError::TooFewIterations { .. })
        ));
    }
}
