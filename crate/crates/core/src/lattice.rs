//! The lattice equation on (m, n) with initial data on a height-1 staircase.
//!
//! Step j of a staircase sits on row m₀ − j and covers columns
//! c_j, …, c_j + w_j, where c_0 = n₀ and c_{j+1} = c_j + w_j. Slot i (1-based)
//! of step j is the cell (m₀ − j, c_j + i − 1). Slot w_j + 1 is the protruding
//! corner, slot 1 the sunken one, slots 2..=w_j the interior.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exactnum::{
    format_rational, EntrySignature, Field, GenericSample, LaurentSeries, Projective, Rational,
    SeriesError,
};
use crate::mapping::{Direction, MapError, MapParams, ReducedMap, Scalar};

pub const INITIAL_TRUNCATION: i64 = 6;
pub const MAX_DOUBLINGS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid staircase: {0}")]
    BadStaircase(String),
    #[error("empty window")]
    EmptyWindow,
    #[error("indeterminate value at ({m}, {n})")]
    Indeterminate { m: i64, n: i64 },
    #[error("leading terms still undetermined at truncation {truncation}")]
    TruncationExhausted { truncation: i64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub width: usize,
    /// u_1, …, u_{width+1}; a zero entry is the seeded ε.
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staircase {
    pub steps: Vec<Step>,
    pub anchor: (i64, i64),
}

/// Position of an initial value inside its step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SlotKind {
    Sunken,
    Interior,
    Corner,
}

impl Staircase {
    pub fn new(anchor: (i64, i64), steps: Vec<Step>) -> Result<Self, LatticeError> {
        if steps.is_empty() {
            return Err(LatticeError::BadStaircase("no steps".into()));
        }
        for (j, s) in steps.iter().enumerate() {
            if s.width == 0 {
                return Err(LatticeError::BadStaircase(format!("step {j} has width 0")));
            }
            if s.values.len() != s.width + 1 {
                return Err(LatticeError::BadStaircase(format!(
                    "step {j} has {} values, expected {}",
                    s.values.len(),
                    s.width + 1
                )));
            }
        }
        Ok(Staircase { steps, anchor })
    }

    /// Steps of the given widths with random nonzero values and ε at the
    /// listed (step, slot) positions.
    pub fn random(
        anchor: (i64, i64),
        widths: &[usize],
        zeros: &[(usize, usize)],
        seed: u64,
    ) -> Result<Self, LatticeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = widths
            .iter()
            .enumerate()
            .map(|(j, &w)| Step {
                width: w,
                values: (1..=w + 1)
                    .map(|i| {
                        if zeros.contains(&(j, i)) {
                            Rational::from_integer(0.into())
                        } else {
                            Rational::sample_generic(&mut rng)
                        }
                    })
                    .collect(),
            })
            .collect();
        let s = Self::new(anchor, steps)?;
        for &(j, i) in zeros {
            if j >= s.steps.len() || i == 0 || i > s.steps[j].width + 1 {
                return Err(LatticeError::BadStaircase(format!("no slot {i} on step {j}")));
            }
        }
        Ok(s)
    }

    /// `count` copies of a width-q step carrying u_1, …, u_{q+1}, so that
    /// cell (m₀ + i, n₀ + n) corresponds to x_{n+qi} of the reduced orbit.
    pub fn periodic(
        anchor: (i64, i64),
        values: &[Rational],
        count: usize,
    ) -> Result<Self, LatticeError> {
        let w = values.len().saturating_sub(1);
        let steps = (0..count)
            .map(|_| Step {
                width: w,
                values: values.to_vec(),
            })
            .collect();
        Self::new(anchor, steps)
    }

    pub fn step_origin(&self, j: usize) -> (i64, i64) {
        let c: usize = self.steps[..j].iter().map(|s| s.width).sum();
        (self.anchor.0 - j as i64, self.anchor.1 + c as i64)
    }

    pub fn cell_of(&self, step: usize, slot: usize) -> (i64, i64) {
        let (m, c) = self.step_origin(step);
        (m, c + slot as i64 - 1)
    }

    pub fn slot_kind(&self, step: usize, slot: usize) -> SlotKind {
        if slot == 1 {
            SlotKind::Sunken
        } else if slot == self.steps[step].width + 1 {
            SlotKind::Corner
        } else {
            SlotKind::Interior
        }
    }

    /// (step, slot) of every ε.
    pub fn zero_marks(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (j, s) in self.steps.iter().enumerate() {
            for (i, v) in s.values.iter().enumerate() {
                if num_traits::Zero::is_zero(v) {
                    out.insert((j, i + 1));
                }
            }
        }
        out
    }

    /// Every staircase cell with its value and whether it carries ε.
    pub fn cells(&self) -> Vec<((i64, i64), Rational, bool)> {
        let mut out = Vec::new();
        for (j, s) in self.steps.iter().enumerate() {
            for (i, v) in s.values.iter().enumerate() {
                out.push((self.cell_of(j, i + 1), v.clone(), num_traits::Zero::is_zero(v)));
            }
        }
        out
    }

    /// Smallest window holding the staircase and everything it determines
    /// in both directions.
    pub fn hull(&self) -> Window {
        let cells = self.cells();
        let ms = cells.iter().map(|c| c.0 .0);
        let ns = cells.iter().map(|c| c.0 .1);
        Window {
            m_min: ms.clone().min().unwrap(),
            m_max: ms.max().unwrap(),
            n_min: ns.clone().min().unwrap(),
            n_max: ns.max().unwrap(),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("anchor ({}, {}); widths", self.anchor.0, self.anchor.1);
        for st in &self.steps {
            let _ = write!(s, " {}", st.width);
        }
        let z = self.zero_marks();
        if !z.is_empty() {
            s.push_str("; zeros");
            for (j, i) in z {
                let _ = write!(s, " ({j},{i})");
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub m_min: i64,
    pub m_max: i64,
    pub n_min: i64,
    pub n_max: i64,
}

impl Window {
    pub fn contains(&self, (m, n): (i64, i64)) -> bool {
        (self.m_min..=self.m_max).contains(&m) && (self.n_min..=self.n_max).contains(&n)
    }

    pub fn is_empty(&self) -> bool {
        self.m_min > self.m_max || self.n_min > self.n_max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LatticeValue<F> {
    Point(Projective<F>),
    Series(LaurentSeries<F>),
}

impl<F: Field> LatticeValue<F> {
    /// Exact zeros and infinities of projective values are reported with
    /// order 1.
    pub fn signature(&self) -> Result<EntrySignature, SeriesError> {
        match self {
            LatticeValue::Series(s) => s.classify(),
            LatticeValue::Point(p) => Ok(match p {
                Projective::Finite(x) if x.is_zero() => EntrySignature::ZeroLike(1),
                Projective::Finite(_) => EntrySignature::Regular,
                _ => EntrySignature::InfLike(1),
            }),
        }
    }

    pub fn limit(&self) -> Result<Projective<F>, SeriesError> {
        match self {
            LatticeValue::Series(s) => s.limit(),
            LatticeValue::Point(p) => Ok(p.clone()),
        }
    }

    pub fn as_series(&self) -> Option<&LaurentSeries<F>> {
        match self {
            LatticeValue::Series(s) => Some(s),
            LatticeValue::Point(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid<F = Rational> {
    pub cells: BTreeMap<(i64, i64), LatticeValue<F>>,
    pub initial: BTreeSet<(i64, i64)>,
    pub window: Window,
    pub direction: Direction,
    /// Truncation order used, when in Laurent mode.
    pub truncation: Option<i64>,
}

impl<F: Field> LatticeGrid<F> {
    pub fn get(&self, m: i64, n: i64) -> Option<&LatticeValue<F>> {
        self.cells.get(&(m, n))
    }

    pub fn signature(&self, m: i64, n: i64) -> Option<EntrySignature> {
        self.get(m, n).and_then(|v| v.signature().ok())
    }
}

fn fill<S: Scalar>(
    known: &mut BTreeMap<(i64, i64), S>,
    map: &ReducedMap<S::Coeff>,
    direction: Direction,
    w: &Window,
) -> Result<(), LatticeError> {
    let lo = w.m_min + w.n_min;
    let hi = w.m_max + w.n_max;
    let sums: Vec<i64> = match direction {
        Direction::NE => (lo..=hi).collect(),
        Direction::SW => (lo..=hi).rev().collect(),
    };
    for s in sums {
        for m in w.m_min..=w.m_max {
            let n = s - m;
            if n < w.n_min || n > w.n_max || known.contains_key(&(m, n)) {
                continue;
            }
            let (opp, left, other) = match direction {
                Direction::NE => ((m - 1, n - 1), (m, n - 1), (m - 1, n)),
                Direction::SW => ((m + 1, n + 1), (m + 1, n), (m, n + 1)),
            };
            let (Some(x), Some(y), Some(z)) = (known.get(&opp), known.get(&left), known.get(&other))
            else {
                continue;
            };
            let v = map.lattice_step(x, y, z, direction).map_err(|e| match e {
                MapError::IndeterminateStep => LatticeError::Indeterminate { m, n },
                MapError::Series(s) => LatticeError::Series(s),
                other => LatticeError::Map(other),
            })?;
            known.insert((m, n), v);
        }
    }
    Ok(())
}

/// Evolves exact rational data; Laurent mode when the staircase carries ε.
pub fn evolve(
    stair: &Staircase,
    p: &MapParams,
    direction: Direction,
    window: Window,
) -> Result<LatticeGrid<Rational>, LatticeError> {
    evolve_with::<Rational>(stair, p, direction, window)
}

pub fn evolve_with<F: Field>(
    stair: &Staircase,
    p: &MapParams,
    direction: Direction,
    window: Window,
) -> Result<LatticeGrid<F>, LatticeError> {
    let cells: Vec<((i64, i64), Option<F>)> = stair
        .cells()
        .into_iter()
        .map(|(c, v, z)| {
            if z {
                Ok((c, None))
            } else {
                F::from_rational(&v)
                    .filter(|x| !x.is_zero())
                    .map(|x| (c, Some(x)))
                    .ok_or(LatticeError::Map(MapError::Unrepresentable))
            }
        })
        .collect::<Result<_, _>>()?;
    evolve_cells(&cells, p, direction, window)
}

/// Evolves arbitrary seed cells; `None` marks ε.
pub fn evolve_cells<F: Field>(
    seeds: &[((i64, i64), Option<F>)],
    p: &MapParams,
    direction: Direction,
    window: Window,
) -> Result<LatticeGrid<F>, LatticeError> {
    if window.is_empty() {
        return Err(LatticeError::EmptyWindow);
    }
    let map: ReducedMap<F> = p.in_field()?;
    let initial: BTreeSet<(i64, i64)> = seeds.iter().map(|s| s.0).collect();
    let window_cells = |all: BTreeMap<(i64, i64), LatticeValue<F>>| {
        all.into_iter()
            .filter(|(c, _)| window.contains(*c) || initial.contains(c))
            .collect()
    };
    if seeds.iter().all(|s| s.1.is_some()) {
        let mut known: BTreeMap<(i64, i64), Projective<F>> = seeds
            .iter()
            .map(|(c, v)| (*c, Projective::Finite(v.clone().unwrap())))
            .collect();
        fill(&mut known, &map, direction, &window)?;
        let all = known
            .into_iter()
            .map(|(c, v)| (c, LatticeValue::Point(v)))
            .collect();
        return Ok(LatticeGrid {
            cells: window_cells(all),
            initial,
            window,
            direction,
            truncation: None,
        });
    }
    let mut t = INITIAL_TRUNCATION;
    for _ in 0..=MAX_DOUBLINGS {
        let mut known: BTreeMap<(i64, i64), LaurentSeries<F>> = seeds
            .iter()
            .map(|(c, v)| {
                let s = match v {
                    Some(x) => LaurentSeries::constant(x.clone(), t),
                    None => LaurentSeries::epsilon(t),
                };
                (*c, s)
            })
            .collect();
        let ok = match fill(&mut known, &map, direction, &window) {
            Ok(()) => known.values().all(|s| s.classify().is_ok()),
            Err(LatticeError::Series(SeriesError::UndeterminedLeading { .. })) => false,
            Err(e) => return Err(e),
        };
        if ok {
            let all = known
                .into_iter()
                .map(|(c, v)| (c, LatticeValue::Series(v)))
                .collect();
            return Ok(LatticeGrid {
                cells: window_cells(all),
                initial,
                window,
                direction,
                truncation: Some(t),
            });
        }
        t *= 2;
    }
    Err(LatticeError::TruncationExhausted { truncation: t / 2 })
}

/// Singular cells of a grid; regular cells are elided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMap {
    pub marks: BTreeMap<(i64, i64), EntrySignature>,
    pub initial: BTreeSet<(i64, i64)>,
    pub computed: BTreeSet<(i64, i64)>,
    pub window: Window,
    pub description: String,
    pub a: Rational,
    pub b: Rational,
    pub seed: Option<u64>,
}

impl PatternMap {
    pub fn from_grid<F: Field>(
        grid: &LatticeGrid<F>,
        p: &MapParams,
        description: String,
        seed: Option<u64>,
    ) -> Result<Self, LatticeError> {
        let mut marks = BTreeMap::new();
        let mut computed = BTreeSet::new();
        for (c, v) in &grid.cells {
            if !grid.initial.contains(c) {
                computed.insert(*c);
            }
            let s = v.signature()?;
            if !s.is_regular() {
                marks.insert(*c, s);
            }
        }
        Ok(PatternMap {
            marks,
            initial: grid.initial.clone(),
            computed,
            window: grid.window,
            description,
            a: p.a.clone(),
            b: p.b.clone(),
            seed,
        })
    }

    pub fn merge(&self, other: &PatternMap) -> PatternMap {
        let mut out = self.clone();
        out.marks.extend(other.marks.iter().map(|(k, v)| (*k, *v)));
        out.computed.extend(other.computed.iter().copied());
        out.window = Window {
            m_min: self.window.m_min.min(other.window.m_min),
            m_max: self.window.m_max.max(other.window.m_max),
            n_min: self.window.n_min.min(other.window.n_min),
            n_max: self.window.n_max.max(other.window.n_max),
        };
        out
    }

    pub fn zeros(&self) -> BTreeSet<(i64, i64)> {
        self.cells_where(|s| matches!(s, EntrySignature::ZeroLike(_)))
    }

    pub fn infinities(&self) -> BTreeSet<(i64, i64)> {
        self.cells_where(|s| matches!(s, EntrySignature::InfLike(_)))
    }

    fn cells_where(&self, f: impl Fn(EntrySignature) -> bool) -> BTreeSet<(i64, i64)> {
        self.marks
            .iter()
            .filter(|(_, s)| f(**s))
            .map(|(c, _)| *c)
            .collect()
    }

    pub fn legend(&self) -> String {
        format!(
            "a = {}, b = {}; {}{}",
            format_rational(&self.a),
            format_rational(&self.b),
            self.description,
            self.seed.map(|s| format!("; seed {s}")).unwrap_or_default()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Glyphs {
    pub zero: char,
    pub infinity: char,
    pub regular: char,
    pub initial: char,
    pub blank: char,
}

impl Default for Glyphs {
    fn default() -> Self {
        Glyphs {
            zero: '0',
            infinity: '8',
            regular: '.',
            initial: 'u',
            blank: ' ',
        }
    }
}

/// One text row per m, north at the top, n increasing to the right.
pub fn render_ascii(p: &PatternMap, g: &Glyphs) -> String {
    let w = &p.window;
    let mut out = String::new();
    for m in (w.m_min..=w.m_max).rev() {
        let mut line = String::new();
        for n in w.n_min..=w.n_max {
            let c = (m, n);
            let ch = match p.marks.get(&c) {
                Some(EntrySignature::ZeroLike(_)) => g.zero,
                Some(EntrySignature::InfLike(_)) => g.infinity,
                _ if p.initial.contains(&c) => g.initial,
                _ if p.computed.contains(&c) => g.regular,
                _ => g.blank,
            };
            line.push(ch);
        }
        let trimmed = line.trim_end();
        let _ = writeln!(out, "{m:>4} {trimmed}");
    }
    out
}

/// Lattice drawing with the staircase as a polyline through its cells.
pub fn render_svg(p: &PatternMap) -> String {
    const S: i64 = 24;
    let w = &p.window;
    let cols = w.n_max - w.n_min + 1;
    let rows = w.m_max - w.m_min + 1;
    let x = |n: i64| (n - w.n_min) * S + S;
    let y = |m: i64| (w.m_max - m) * S + S;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"monospace\" font-size=\"14\">\n",
        (cols + 1) * S,
        (rows + 1) * S
    );
    let _ = writeln!(out, "<title>{}</title>", p.legend());
    let mut path: Vec<(i64, i64)> = p
        .initial
        .iter()
        .copied()
        .filter(|c| w.contains(*c))
        .collect();
    path.sort_by_key(|&(m, n)| (n, -m));
    if !path.is_empty() {
        out.push_str("<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"");
        for (i, (m, n)) in path.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{},{}", x(*n), y(*m));
        }
        out.push_str("\"/>\n");
    }
    for m in w.m_min..=w.m_max {
        for n in w.n_min..=w.n_max {
            let c = (m, n);
            let (cx, cy) = (x(n), y(m));
            match p.marks.get(&c) {
                Some(EntrySignature::ZeroLike(_)) => {
                    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" fill=\"blue\">0</text>", cx - 4, cy + 5);
                }
                Some(EntrySignature::InfLike(_)) => {
                    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" fill=\"red\">∞</text>", cx - 5, cy + 5);
                }
                _ if p.initial.contains(&c) || p.computed.contains(&c) => {
                    let _ = writeln!(out, "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"2\" fill=\"gray\"/>");
                }
                _ => {}
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InteractionCase {
    /// Corner zero followed by the corner of a width-1 step: rhombus.
    Case1,
    /// Two open zeros on adjacent steps, not diagonally adjacent.
    Case2,
    /// Corner zero followed by an interior u_2 zero.
    Case3,
    /// Any other anticonfining + open pair on adjacent steps.
    Case4,
    /// Two interior zeros on adjacent steps.
    Case5,
    /// Steps not adjacent.
    NoInteraction,
    /// A zero in a sunken slot, which is never singular.
    NonSingular,
    /// Both zeros on one step; out of scope.
    SameStepUnsupported,
}

impl InteractionCase {
    pub fn label(self) -> &'static str {
        match self {
            InteractionCase::Case1 => "Case1",
            InteractionCase::Case2 => "Case2",
            InteractionCase::Case3 => "Case3",
            InteractionCase::Case4 => "Case4",
            InteractionCase::Case5 => "Case5",
            InteractionCase::NoInteraction => "NoInteraction",
            InteractionCase::NonSingular => "NonSingular",
            InteractionCase::SameStepUnsupported => "SameStepUnsupported",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interaction {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub case: InteractionCase,
}

/// Labels every pair of zeros; `first` is on the upper step.
pub fn classify_interaction(stair: &Staircase) -> Vec<Interaction> {
    let zeros: Vec<(usize, usize)> = stair.zero_marks().into_iter().collect();
    let mut out = Vec::new();
    for (i, &z1) in zeros.iter().enumerate() {
        for &z2 in &zeros[i + 1..] {
            out.push(Interaction {
                first: z1,
                second: z2,
                case: pair_case(stair, z1, z2),
            });
        }
    }
    out
}

fn pair_case(stair: &Staircase, (j1, i1): (usize, usize), (j2, i2): (usize, usize)) -> InteractionCase {
    use InteractionCase::*;
    use SlotKind::*;
    if j1 == j2 {
        return SameStepUnsupported;
    }
    let k1 = stair.slot_kind(j1, i1);
    let k2 = stair.slot_kind(j2, i2);
    if k1 == Sunken || k2 == Sunken {
        return NonSingular;
    }
    if j2 != j1 + 1 {
        return NoInteraction;
    }
    match (k1, k2) {
        (Corner, Corner) if stair.steps[j2].width == 1 => Case1,
        (Corner, Corner) => Case2,
        (Corner, Interior) if i2 == 2 => Case3,
        (Interior, Interior) => Case5,
        _ => Case4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use alloc::vec;

    fn one_one(steps: usize, zero_step: usize, seed: u64) -> Staircase {
        let half = (steps / 2) as i64;
        Staircase::random((half + 1, -half), &vec![1; steps], &[(zero_step, 2)], seed).unwrap()
    }

    #[test]
    fn geometry() {
        let s = Staircase::random((2, -1), &[1, 1, 1], &[(1, 2)], 1).unwrap();
        let cells: Vec<_> = s.cells().iter().map(|c| c.0).collect();
        assert_eq!(cells, vec![(2, -1), (2, 0), (1, 0), (1, 1), (0, 1), (0, 2)]);
        assert_eq!(s.zero_marks().into_iter().collect::<Vec<_>>(), vec![(1, 2)]);
        let s = Staircase::random((0, 0), &[3, 2], &[], 1).unwrap();
        assert_eq!(s.cell_of(1, 1), (-1, 3));
        assert_eq!(s.slot_kind(0, 4), SlotKind::Corner);
        assert_eq!(s.slot_kind(0, 2), SlotKind::Interior);
    }

    #[test]
    fn confined_rhombus() {
        let s = one_one(9, 4, 3);
        assert_eq!(s.cell_of(4, 2), (1, 1));
        let p = MapParams::new(int(1), int(1), 1).unwrap();
        let g = evolve(&s, &p, Direction::NE, Window { m_min: 0, m_max: 5, n_min: 0, n_max: 5 })
            .unwrap();
        let pm = PatternMap::from_grid(&g, &p, s.describe(), None).unwrap();
        let zeros: Vec<_> = pm.zeros().into_iter().collect();
        let infs: Vec<_> = pm.infinities().into_iter().collect();
        assert_eq!(zeros, vec![(1, 1), (2, 2)]);
        assert_eq!(infs, vec![(1, 2), (2, 1)]);
        assert_eq!(g.signature(3, 2), Some(EntrySignature::Regular));
        assert_eq!(g.signature(2, 3), Some(EntrySignature::Regular));
    }

    #[test]
    fn unequal_parameters_leading_term() {
        let s = one_one(9, 4, 5);
        let (a, b) = (rat(2, 3), int(5));
        let p = MapParams::new(a.clone(), b.clone(), 1).unwrap();
        let g = evolve(&s, &p, Direction::NE, Window { m_min: 0, m_max: 4, n_min: 0, n_max: 4 })
            .unwrap();
        let x22 = g.get(2, 2).unwrap().as_series().unwrap();
        assert_eq!(x22.valuation(), Some(1));
        let one = int(1);
        assert_eq!(x22.coeff(1).unwrap(), &one - &a / &b - &b / &a);
        assert!(matches!(g.signature(3, 2), Some(EntrySignature::InfLike(_))));
        assert!(matches!(g.signature(2, 3), Some(EntrySignature::InfLike(_))));
    }

    #[test]
    fn regular_staircase_has_no_marks() {
        let s = Staircase::random((3, -3), &[2, 2, 2], &[], 9).unwrap();
        let p = MapParams::new(int(1), int(1), 2).unwrap();
        let g = evolve(&s, &p, Direction::NE, s.hull()).unwrap();
        assert!(g.truncation.is_none());
        let pm = PatternMap::from_grid(&g, &p, s.describe(), Some(9)).unwrap();
        assert!(pm.marks.is_empty());
        assert!(!pm.computed.is_empty());
    }

    #[test]
    fn labels() {
        let case = |widths: &[usize], zeros: &[(usize, usize)]| {
            let s = Staircase::random((0, 0), widths, zeros, 1).unwrap();
            classify_interaction(&s)[0].case
        };
        assert_eq!(case(&[3, 1], &[(0, 4), (1, 2)]), InteractionCase::Case1);
        assert_eq!(case(&[3, 2], &[(0, 4), (1, 3)]), InteractionCase::Case2);
        assert_eq!(case(&[2, 3], &[(0, 3), (1, 2)]), InteractionCase::Case3);
        assert_eq!(case(&[2, 3], &[(0, 3), (1, 3)]), InteractionCase::Case4);
        assert_eq!(case(&[3, 3], &[(0, 2), (1, 3)]), InteractionCase::Case5);
        assert_eq!(case(&[2, 2, 2], &[(0, 3), (2, 3)]), InteractionCase::NoInteraction);
        assert_eq!(case(&[3], &[(0, 2), (0, 4)]), InteractionCase::SameStepUnsupported);
        assert_eq!(case(&[2, 2], &[(0, 3), (1, 1)]), InteractionCase::NonSingular);
    }

    #[test]
    fn ascii_rows() {
        let s = one_one(9, 4, 3);
        let p = MapParams::new(int(1), int(1), 1).unwrap();
        let g = evolve(&s, &p, Direction::NE, Window { m_min: 0, m_max: 3, n_min: 0, n_max: 3 })
            .unwrap();
        let pm = PatternMap::from_grid(&g, &p, s.describe(), None).unwrap();
        let txt = render_ascii(&pm, &Glyphs::default());
        let rows: Vec<&str> = txt.lines().collect();
        assert_eq!(rows, vec!["   3 ....", "   2 u80.", "   1 u08.", "   0  uu."]);
        assert!(render_svg(&pm).contains("∞"));
    }
}
