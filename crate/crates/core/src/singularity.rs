//! ε-regularized iteration of φ_q through a singular hypersurface u_k = 0,
//! codimension bookkeeping, and classification of the resulting pattern.
//!
//! Every run seeds u_k = ε and assigns generic values to the other
//! coordinates. Over the carrier `Jet<F>` each coefficient carries its
//! gradient with respect to those generic values, so the ε → 0 limit of
//! each iterate comes with an exact Jacobian. The rank of that Jacobian is
//! the dimension of the image variety X_j.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactnum::{
    matrix_rank, EntrySignature, Field, Fp, GenericSample, Jet, LaurentSeries, Projective,
    SeriesError,
};
use crate::mapping::{MapError, MapParams, ReducedMap, StateVector};

const MAX_DOUBLINGS: u32 = 8;
const MAX_RESAMPLES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingularityError {
    #[error("hypersurface index {k} outside 1..={dim}")]
    BadHypersurface { k: usize, dim: usize },
    #[error("need {expected} sample values, got {got}")]
    BadSample { expected: usize, got: usize },
    #[error("leading terms still undetermined at truncation order {truncation}")]
    TruncationExhausted { truncation: i64 },
    #[error("sample hits an exact zero at step {step}; resample")]
    DegenerateSample { step: i64 },
    #[error("exact zero at step {step} persisted over {attempts} resamples")]
    ProbableIdentityZero { step: i64, attempts: usize },
    #[error("probes disagree: {0}")]
    InconclusiveProbe(String),
    #[error("no classification rule fired within the window; signatures: {0}")]
    Unclassifiable(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Limiting behaviour of every coordinate at one step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepSignature {
    pub step: i64,
    pub entries: Vec<EntrySignature>,
}

impl StepSignature {
    pub fn singular_count(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_regular()).count()
    }

    pub fn is_regular(&self) -> bool {
        self.singular_count() == 0
    }
}

impl fmt::Display for StepSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&e.symbol())?;
        }
        f.write_str(")")
    }
}

/// Free coordinates (1-based) that the ε → 0 limit at `step` depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceProfile {
    pub step: i64,
    pub depends_on: BTreeSet<usize>,
}

/// Signature, codimension and dependence of one iterate X_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepState {
    pub signature: StepSignature,
    pub codim: usize,
    pub depends_on: BTreeSet<usize>,
}

impl StepState {
    pub fn step(&self) -> i64 {
        self.signature.step
    }

    /// Equality of signature, codimension and dependence, ignoring the step index.
    pub fn same_as(&self, other: &StepState) -> bool {
        self.same_shape(other) && self.depends_on == other.depends_on
    }

    /// Equality of signature and codimension only. Along a periodic chain the
    /// free coordinates may be reparametrized from one period to the next.
    pub fn same_shape(&self, other: &StepState) -> bool {
        self.signature.entries == other.signature.entries && self.codim == other.codim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// The seed never lowers the dimension: not a singularity.
    Nonsingular,
    /// Dimension restored for good after `length` steps.
    ConfinedOpen { length: usize },
    /// X_{period} = X_0.
    Cyclic { period: usize },
    /// Forward singular block repeating forever, regular past.
    Unconfined { period: usize, onset: i64 },
    /// Singular blocks repeating in both time directions.
    Anticonfined {
        forward_period: usize,
        forward_onset: i64,
        backward_period: usize,
        backward_onset: i64,
    },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Nonsingular => f.write_str("Nonsingular"),
            Classification::ConfinedOpen { length } => write!(f, "ConfinedOpen({length})"),
            Classification::Cyclic { period } => write!(f, "Cyclic({period})"),
            Classification::Unconfined { period, onset } => {
                write!(f, "Unconfined(period {period}, onset {onset})")
            }
            Classification::Anticonfined {
                forward_period,
                forward_onset,
                backward_period,
                backward_onset,
            } => write!(
                f,
                "Anticonfined(forward period {forward_period} from {forward_onset}, \
                 backward period {backward_period} from {backward_onset})"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityPattern {
    pub q: usize,
    pub hypersurface: usize,
    /// States at steps 0, 1, …, window.
    pub forward: Vec<StepState>,
    /// States at steps 0, −1, …, −window.
    pub backward: Vec<StepState>,
    pub classification: Classification,
    pub seed: u64,
    pub truncation: i64,
}

impl SingularityPattern {
    pub fn forward_signatures(&self) -> Vec<StepSignature> {
        self.forward.iter().map(|s| s.signature.clone()).collect()
    }

    pub fn backward_signatures(&self) -> Vec<StepSignature> {
        self.backward.iter().map(|s| s.signature.clone()).collect()
    }

    pub fn codim_profile(&self) -> Vec<usize> {
        self.forward.iter().map(|s| s.codim).collect()
    }
}

/// Window, truncation and sampling knobs for an analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeOptions {
    pub window: usize,
    pub truncation: i64,
    pub probe_count: usize,
    pub seed: u64,
}

impl ProbeOptions {
    pub fn for_order(q: usize, seed: u64) -> Self {
        ProbeOptions {
            window: 6 * q + 10,
            truncation: 2 * q as i64 + 6,
            probe_count: 3,
            seed,
        }
    }
}

/// Laurent orbit of a seeded state in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonRun<F> {
    pub forward: Vec<StateVector<LaurentSeries<F>>>,
    pub backward: Vec<StateVector<LaurentSeries<F>>>,
    pub truncation: i64,
}

/// Codimension 1 hypersurfaces u_k = 0 whose image collapses to higher
/// codimension, found by probing every k.
pub fn enumerate_codim1_singularities(p: &MapParams) -> Result<Vec<usize>, SingularityError> {
    let opts = ProbeOptions::for_order(p.q, 0x5eed);
    let mut out = Vec::new();
    for k in 1..=p.dim() {
        let states = probe_states::<Fp>(p, k, 1, 0, &opts)?;
        if states.0[1].codim > 1 {
            out.push(k);
        }
    }
    Ok(out)
}

fn check_k(p: &MapParams, k: usize) -> Result<(), SingularityError> {
    if k == 0 || k > p.dim() {
        return Err(SingularityError::BadHypersurface { k, dim: p.dim() });
    }
    Ok(())
}

fn seeded<F: Field>(samples: &[F], k: usize, truncation: i64) -> StateVector<LaurentSeries<F>> {
    StateVector::new(
        samples
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i + 1 == k {
                    LaurentSeries::epsilon(truncation)
                } else {
                    LaurentSeries::constant(v.clone(), truncation)
                }
            })
            .collect(),
    )
}

enum Failure {
    Undetermined(i64),
    ExactZero(i64),
    Map(MapError),
}

fn step_failure(e: MapError, step: i64, truncation: i64) -> Failure {
    match e {
        MapError::Series(SeriesError::UndeterminedLeading { .. }) => Failure::Undetermined(step),
        MapError::Series(SeriesError::ExactZeroReciprocal) => Failure::ExactZero(step),
        MapError::Series(SeriesError::NonInvertibleLeading) => Failure::ExactZero(step),
        other => {
            let _ = truncation;
            Failure::Map(other)
        }
    }
}

fn run_once<F: Field>(
    map: &ReducedMap<F>,
    k: usize,
    samples: &[F],
    n_forward: usize,
    n_backward: usize,
    truncation: i64,
) -> Result<EpsilonRun<F>, Failure> {
    let x0 = seeded(samples, k, truncation);
    let mut forward = Vec::with_capacity(n_forward + 1);
    forward.push(x0.clone());
    for j in 1..=n_forward {
        let next = map
            .forward(forward.last().unwrap())
            .map_err(|e| step_failure(e, j as i64, truncation))?;
        if next.entries().last().unwrap().is_undetermined() {
            return Err(Failure::Undetermined(j as i64));
        }
        forward.push(next);
    }
    let mut backward = Vec::with_capacity(n_backward + 1);
    backward.push(x0);
    for j in 1..=n_backward {
        let next = map
            .backward(backward.last().unwrap())
            .map_err(|e| step_failure(e, -(j as i64), truncation))?;
        if next.entries()[0].is_undetermined() {
            return Err(Failure::Undetermined(-(j as i64)));
        }
        backward.push(next);
    }
    Ok(EpsilonRun {
        forward,
        backward,
        truncation,
    })
}

/// Iterates the seeded state `n_forward` steps with φ_q and `n_backward`
/// steps with φ_q⁻¹ in Laurent arithmetic. `samples` holds q + 1 values;
/// the one at position k is replaced by ε. The truncation order doubles
/// whenever leading terms cancel completely; a cancellation that survives
/// doubling at the same step is reported as a degenerate sample.
pub fn epsilon_iterate<F: Field>(
    p: &MapParams,
    k: usize,
    samples: &[F],
    n_forward: usize,
    n_backward: usize,
    truncation: i64,
) -> Result<EpsilonRun<F>, SingularityError> {
    check_k(p, k)?;
    if samples.len() != p.dim() {
        return Err(SingularityError::BadSample {
            expected: p.dim(),
            got: samples.len(),
        });
    }
    let map = p.in_field::<F>()?;
    let mut t = truncation.max(2);
    let mut last_failure = None;
    for _ in 0..=MAX_DOUBLINGS {
        match run_once(&map, k, samples, n_forward, n_backward, t) {
            Ok(run) => return Ok(run),
            Err(Failure::Undetermined(step)) => {
                if last_failure == Some(step) {
                    return Err(SingularityError::DegenerateSample { step });
                }
                last_failure = Some(step);
                t *= 2;
            }
            Err(Failure::ExactZero(step)) => {
                return Err(SingularityError::DegenerateSample { step })
            }
            Err(Failure::Map(e)) => return Err(e.into()),
        }
    }
    Err(SingularityError::TruncationExhausted { truncation: t })
}

fn draw<F: GenericSample>(rng: &mut ChaCha8Rng, n: usize) -> Vec<F> {
    (0..n).map(|_| F::sample_generic(rng)).collect()
}

/// Runs `f` on fresh samples until it stops reporting a degenerate sample.
fn with_resampling<F: GenericSample, T>(
    rng: &mut ChaCha8Rng,
    n: usize,
    mut f: impl FnMut(&[F]) -> Result<T, SingularityError>,
) -> Result<(Vec<F>, T), SingularityError> {
    let mut last_step = 0;
    for _ in 0..MAX_RESAMPLES {
        let s = draw::<F>(rng, n);
        match f(&s) {
            Ok(v) => return Ok((s, v)),
            Err(SingularityError::DegenerateSample { step }) => last_step = step,
            Err(e) => return Err(e),
        }
    }
    Err(SingularityError::ProbableIdentityZero {
        step: last_step,
        attempts: MAX_RESAMPLES,
    })
}

fn limit_value<F: Field>(s: &LaurentSeries<F>) -> Result<Projective<F>, SingularityError> {
    s.limit().map_err(|e| match e {
        SeriesError::UndeterminedLeading { truncation } => {
            SingularityError::TruncationExhausted { truncation }
        }
        _ => SingularityError::DegenerateSample { step: 0 },
    })
}

/// Signature and Jacobian rows (one per regular entry) of a jet state.
fn jet_step<F: Field>(
    state: &StateVector<LaurentSeries<Jet<F>>>,
    step: i64,
    dim: usize,
) -> Result<(StepSignature, Vec<Vec<F>>), SingularityError> {
    let mut entries = Vec::with_capacity(dim);
    let mut rows = Vec::new();
    for e in state.entries() {
        let sig = e.classify().map_err(|_| SingularityError::TruncationExhausted {
            truncation: e.truncation_order().unwrap_or(0),
        })?;
        if sig.is_regular() {
            let lead = e.leading_coefficient().unwrap();
            rows.push((0..dim).map(|i| lead.partial(i)).collect());
        }
        entries.push(sig);
    }
    Ok((StepSignature { step, entries }, rows))
}

struct JetObservation<F> {
    signatures: Vec<StepSignature>,
    rows: Vec<Vec<Vec<F>>>,
    truncation: i64,
}

fn jet_run<F: GenericSample>(
    p: &MapParams,
    k: usize,
    base: &[F],
    n_forward: usize,
    n_backward: usize,
    truncation: i64,
) -> Result<(JetObservation<F>, JetObservation<F>), SingularityError> {
    let dim = p.dim();
    let samples: Vec<Jet<F>> = base
        .iter()
        .enumerate()
        .map(|(i, v)| Jet::variable(v.clone(), i, dim))
        .collect();
    let run = epsilon_iterate(p, k, &samples, n_forward, n_backward, truncation)?;
    let observe = |states: &[StateVector<LaurentSeries<Jet<F>>>], sign: i64| {
        let mut signatures = Vec::with_capacity(states.len());
        let mut rows = Vec::with_capacity(states.len());
        for (j, s) in states.iter().enumerate() {
            let (sig, r) = jet_step(s, sign * j as i64, dim)?;
            signatures.push(sig);
            rows.push(r);
        }
        Ok::<_, SingularityError>(JetObservation {
            signatures,
            rows,
            truncation: run.truncation,
        })
    };
    Ok((observe(&run.forward, 1)?, observe(&run.backward, -1)?))
}

fn merge_observations<F: Field>(
    dim: usize,
    obs: &[JetObservation<F>],
) -> Result<Vec<StepState>, SingularityError> {
    let first = &obs[0];
    let mut out = Vec::with_capacity(first.signatures.len());
    for (j, sig) in first.signatures.iter().enumerate() {
        let mut rank = 0;
        let mut deps = BTreeSet::new();
        for o in obs {
            if o.signatures[j] != *sig {
                return Err(SingularityError::InconclusiveProbe(alloc::format!(
                    "signature at step {} differs between samples: {} vs {}",
                    sig.step,
                    sig,
                    o.signatures[j]
                )));
            }
            rank = rank.max(matrix_rank(&o.rows[j]));
            for row in &o.rows[j] {
                for (i, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        deps.insert(i + 1);
                    }
                }
            }
        }
        out.push(StepState {
            signature: sig.clone(),
            codim: dim - rank,
            depends_on: deps,
        });
    }
    Ok(out)
}

/// Forward and backward step states from `opts.probe_count` independent
/// jet runs: codimension is the generic (maximal) Jacobian corank.
fn probe_states<F: GenericSample>(
    p: &MapParams,
    k: usize,
    n_forward: usize,
    n_backward: usize,
    opts: &ProbeOptions,
) -> Result<(Vec<StepState>, Vec<StepState>, i64), SingularityError> {
    check_k(p, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    let mut truncation = opts.truncation;
    for _ in 0..opts.probe_count.max(1) {
        let (_, (f, b)) = with_resampling::<F, _>(&mut rng, p.dim(), |s| {
            jet_run(p, k, s, n_forward, n_backward, truncation)
        })?;
        truncation = truncation.max(f.truncation);
        fwd.push(f);
        bwd.push(b);
    }
    Ok((
        merge_observations(p.dim(), &fwd)?,
        merge_observations(p.dim(), &bwd)?,
        truncation,
    ))
}

/// Dependence of the ε → 0 limit at `step` on each free coordinate, by
/// resampling one coordinate at a time with everything else fixed.
pub fn dependence_probe(
    p: &MapParams,
    k: usize,
    step: i64,
    probe_count: usize,
    seed: u64,
) -> Result<DependenceProfile, SingularityError> {
    dependence_probe_with::<Fp>(p, k, step, probe_count, seed)
}

pub fn dependence_probe_with<F: GenericSample>(
    p: &MapParams,
    k: usize,
    step: i64,
    probe_count: usize,
    seed: u64,
) -> Result<DependenceProfile, SingularityError> {
    check_k(p, k)?;
    let trunc = 2 * p.q as i64 + 6;
    let (nf, nb) = if step >= 0 {
        (step as usize, 0)
    } else {
        (0, (-step) as usize)
    };
    let limits = |s: &[F]| -> Result<Vec<Projective<F>>, SingularityError> {
        let run = epsilon_iterate(p, k, s, nf, nb, trunc)?;
        let st = if step >= 0 {
            &run.forward[nf]
        } else {
            &run.backward[nb]
        };
        st.entries().iter().map(limit_value).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (base, base_limits) = with_resampling::<F, _>(&mut rng, p.dim(), &limits)?;
    let mut depends_on = BTreeSet::new();
    for i in 1..=p.dim() {
        if i == k {
            continue;
        }
        for _ in 0..probe_count.max(1) {
            let mut varied = base.clone();
            let mut ok = None;
            for _ in 0..MAX_RESAMPLES {
                varied[i - 1] = F::sample_generic(&mut rng);
                match limits(&varied) {
                    Ok(v) => {
                        ok = Some(v);
                        break;
                    }
                    Err(SingularityError::DegenerateSample { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            let v = ok.ok_or(SingularityError::ProbableIdentityZero {
                step,
                attempts: MAX_RESAMPLES,
            })?;
            if v != base_limits {
                depends_on.insert(i);
                break;
            }
        }
    }
    Ok(DependenceProfile { step, depends_on })
}

/// Codimensions of X_0, …, X_{n_forward} and X_0, X_{-1}, …, X_{-n_backward}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodimProfile {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

/// Generic Jacobian corank of the limit map at each step, from
/// `probe_count` samples, cross-checked against twice as many.
pub fn codim_estimate(
    p: &MapParams,
    k: usize,
    n_forward: usize,
    n_backward: usize,
    probe_count: usize,
    seed: u64,
) -> Result<CodimProfile, SingularityError> {
    let mut opts = ProbeOptions::for_order(p.q, seed);
    opts.probe_count = probe_count;
    let (f1, b1, _) = probe_states::<Fp>(p, k, n_forward, n_backward, &opts)?;
    opts.probe_count = 2 * probe_count.max(1);
    opts.seed = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let (f2, b2, _) = probe_states::<Fp>(p, k, n_forward, n_backward, &opts)?;
    let codims = |v: &[StepState]| v.iter().map(|s| s.codim).collect::<Vec<_>>();
    let profile = CodimProfile {
        forward: codims(&f1),
        backward: codims(&b1),
    };
    if profile.forward != codims(&f2) || profile.backward != codims(&b2) {
        return Err(SingularityError::InconclusiveProbe(String::from(
            "codimension changed when the probe count was doubled",
        )));
    }
    Ok(profile)
}

/// Smallest period P, then smallest onset s, such that states repeat with
/// period P from s to the end of the window, at least two full periods are
/// observed, and the repeating block is singular.
pub fn find_period(states: &[StepState]) -> Option<(usize, usize)> {
    let n = states.len();
    for period in 1..=n / 3 {
        for onset in 0..n {
            if onset + 2 * period >= n {
                break;
            }
            let repeats = (onset..n - period).all(|j| states[j].same_shape(&states[j + period]));
            let singular = (onset..onset + period).any(|j| !states[j].signature.is_regular());
            if repeats && singular {
                return Some((period, onset));
            }
        }
    }
    None
}

fn all_regular(states: &[StepState]) -> bool {
    states.iter().all(|s| s.signature.is_regular())
}

/// Applies the classification rules to forward and backward states.
pub fn classify_states(
    forward: &[StepState],
    backward: &[StepState],
) -> Option<Classification> {
    let n = forward.len();
    if forward.iter().chain(backward).all(|s| s.codim == 1) {
        return Some(Classification::Nonsingular);
    }
    if let Some(period) = (1..n).find(|&t| forward[t].same_as(&forward[0])) {
        if forward[..period].iter().any(|s| s.codim > 1) {
            return Some(Classification::Cyclic { period });
        }
    }
    if forward.last().is_some_and(|s| s.signature.is_regular()) {
        let mut length = n;
        while length > 1 && forward[length - 1].codim == 1 {
            length -= 1;
        }
        if length < n && length >= 1 && forward[..length].iter().any(|s| s.codim > 1) {
            return Some(Classification::ConfinedOpen { length });
        }
    }
    let (fp, fo) = find_period(forward)?;
    if all_regular(&backward[1..]) {
        return Some(Classification::Unconfined {
            period: fp,
            onset: fo as i64,
        });
    }
    let (bp, bo) = find_period(backward)?;
    Some(Classification::Anticonfined {
        forward_period: fp,
        forward_onset: fo as i64,
        backward_period: bp,
        backward_onset: -(bo as i64),
    })
}

/// Classifies the pattern of u_k = 0 over the prime field with default
/// window 6q + 10, truncation 2q + 6 and three probes.
pub fn classify_pattern(
    p: &MapParams,
    k: usize,
    seed: u64,
) -> Result<SingularityPattern, SingularityError> {
    classify_pattern_with::<Fp>(p, k, &ProbeOptions::for_order(p.q, seed))
}

pub fn classify_pattern_with<F: GenericSample>(
    p: &MapParams,
    k: usize,
    opts: &ProbeOptions,
) -> Result<SingularityPattern, SingularityError> {
    let (forward, backward, truncation) = probe_states::<F>(p, k, opts.window, opts.window, opts)?;
    let classification = classify_states(&forward, &backward).ok_or_else(|| {
        let mut s = String::new();
        for st in forward.iter() {
            s.push_str(&alloc::format!("{} ", st.signature));
        }
        SingularityError::Unclassifiable(s)
    })?;
    Ok(SingularityPattern {
        q: p.q,
        hypersurface: k,
        forward,
        backward,
        classification,
        seed: opts.seed,
        truncation,
    })
}
