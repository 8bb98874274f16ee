//! Exact arithmetic: rationals, a prime field, jets, the projective line and
//! truncated Laurent series in ε.

pub mod field;
pub mod laurent;
pub mod poly;
pub mod projective;
pub mod rational;

pub use field::{matrix_rank, Field, Fp, GenericSample, Jet, MODULUS};
pub use laurent::{
    classify_entry, laurent_arith, laurent_recip, EntrySignature, LaurentSeries, SeriesError,
    SeriesOp, EXACT_ZERO_ORDER,
};
pub use poly::Poly;
pub use projective::{proj_arith, ArithOp, Projective, ProjectiveValue};
pub use rational::{format_rational, int, parse_rational, rat, Rational};
