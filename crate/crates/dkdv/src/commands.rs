//! Dispatch from a validated [`RunConfig`] to the analysis modules.

use std::fmt::Write as _;
use std::time::Instant;

use dkdv_core::degree::{
    cyclotomic_factorization, degree_sequence, diophantine_degree, express_char_poly,
    largest_real_root, quadratic_envelope, CharPolynomial, DegreeError, DegreeMode,
    RootEstimate, ValueCountPattern,
};
use dkdv_core::exactnum::{format_rational, rat, EntrySignature, EXACT_ZERO_ORDER};
use dkdv_core::lattice::{
    classify_interaction, evolve, render_ascii, render_svg, Glyphs, LatticeError, PatternMap,
    Staircase, Window,
};
use dkdv_core::mapping::{Direction, MapParams};
use dkdv_core::singularity::{
    classify_pattern_with, Classification, ProbeOptions, SingularityError, SingularityPattern,
    StepState,
};
use dkdv_core::exactnum::Fp;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{Command, ConfigError, Format, RunConfig};
use crate::report::*;
use crate::staircase_file::{step_data, StaircaseFile, StaircaseFileError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Staircase(#[from] StaircaseFileError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A report plus, for ascii/svg output, the rendered text.
#[derive(Debug, Clone)]
pub struct Output {
    pub envelope: ReportEnvelope,
    pub artifact: Option<String>,
}

impl Output {
    /// What gets written for the configured format.
    pub fn text(&self) -> String {
        match &self.artifact {
            Some(a) => a.clone(),
            None => self.envelope.to_json(),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, RunError> {
    let t = Instant::now();
    let (results, artifact) = match cfg.command {
        Command::Lattice => {
            let (rec, pm) = lattice(cfg)?;
            let art = match cfg.format()? {
                Format::Json => None,
                Format::Ascii => Some(pm_ascii(&pm, cfg)?),
                Format::Svg => Some(render_svg(&pm)),
            };
            (Results::Lattice(rec), art)
        }
        Command::Sweep => (sweep(cfg)?, None),
        c => (single(c, cfg)?, None),
    };
    let artifact = match (artifact, cfg.format()?) {
        (Some(a), _) => Some(a),
        (None, Format::Ascii) => Some(summary(&results)),
        (None, _) => None,
    };
    let envelope = ReportEnvelope {
        schema: SCHEMA_NAME.to_string(),
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: cfg.command.name().to_string(),
        config: cfg.values.clone(),
        results,
        timing: Timing {
            elapsed_ms: t.elapsed().as_millis() as u64,
        },
    };
    Ok(Output { envelope, artifact })
}

fn single(c: Command, cfg: &RunConfig) -> Result<Results, RunError> {
    let q = cfg.q()?;
    Ok(match c {
        Command::Analyze => Results::Pattern(analyze(cfg, q)?),
        Command::Express => Results::Express(express(cfg, q)?),
        Command::Dyndeg => Results::Estimate(dyndeg(cfg, q)?),
        Command::Degrees => Results::Degrees(degrees(cfg, q)?),
        Command::Lattice | Command::Sweep => unreachable!("dispatched in run"),
    })
}

fn sweep(cfg: &RunConfig) -> Result<Results, RunError> {
    let (lo, hi) = cfg.q_range()?;
    let target = cfg.target()?;
    let entries = (lo..=hi)
        .into_par_iter()
        .map(|q| {
            let sub = cfg.with("q", q.to_string());
            Ok(SweepEntry {
                q,
                results: single(target, &sub)?,
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(Results::Sweep(SweepRecord {
        target: target.name().to_string(),
        entries,
    }))
}

fn probe_options(cfg: &RunConfig, q: usize) -> Result<ProbeOptions, RunError> {
    let d = ProbeOptions::for_order(q, cfg.seed()?);
    Ok(ProbeOptions {
        window: cfg.usize_or("window", d.window)?,
        truncation: cfg.usize_or("truncation", d.truncation as usize)? as i64,
        probe_count: cfg.usize_or("probes", d.probe_count)?,
        seed: d.seed,
    })
}

fn pattern(cfg: &RunConfig, p: &MapParams, k: usize) -> Result<SingularityPattern, RunError> {
    Ok(classify_pattern_with::<Fp>(p, k, &probe_options(cfg, p.q)?)?)
}

pub fn classification_record(c: &Classification) -> ClassificationRecord {
    let mut r = ClassificationRecord {
        name: String::new(),
        display: c.to_string(),
        length: None,
        period: None,
        onset: None,
        backward_period: None,
        backward_onset: None,
    };
    match *c {
        Classification::Nonsingular => r.name = "Nonsingular".into(),
        Classification::ConfinedOpen { length } => {
            r.name = "ConfinedOpen".into();
            r.length = Some(length);
        }
        Classification::Cyclic { period } => {
            r.name = "Cyclic".into();
            r.period = Some(period);
        }
        Classification::Unconfined { period, onset } => {
            r.name = "Unconfined".into();
            r.period = Some(period);
            r.onset = Some(onset);
        }
        Classification::Anticonfined {
            forward_period,
            forward_onset,
            backward_period,
            backward_onset,
        } => {
            r.name = "Anticonfined".into();
            r.period = Some(forward_period);
            r.onset = Some(forward_onset);
            r.backward_period = Some(backward_period);
            r.backward_onset = Some(backward_onset);
        }
    }
    r
}

fn step_record(s: &StepState) -> StepRecord {
    StepRecord {
        step: s.step(),
        signature: s.signature.to_string(),
        codim: s.codim,
        depends_on: s.depends_on.iter().copied().collect(),
    }
}

fn analyze(cfg: &RunConfig, q: usize) -> Result<PatternRecord, RunError> {
    let p = cfg.params(q)?;
    let k = cfg.k(q)?;
    let pat = pattern(cfg, &p, k)?;
    Ok(PatternRecord {
        q,
        k,
        a: format_rational(&p.a),
        b: format_rational(&p.b),
        classification: classification_record(&pat.classification),
        forward: pat.forward.iter().map(step_record).collect(),
        backward: pat.backward.iter().map(step_record).collect(),
        truncation: pat.truncation,
        seed: pat.seed,
    })
}

const ROOT_DIGITS: u32 = 12;

fn root_tolerance() -> dkdv_core::exactnum::Rational {
    rat(1, 1_000_000_000_000_000)
}

fn root_record(r: &RootEstimate) -> RootRecord {
    RootRecord {
        decimal: r.decimal(ROOT_DIGITS),
        lower: format_rational(&r.lower),
        upper: format_rational(&r.upper),
        tolerance: format_rational(&root_tolerance()),
        exact: r.exact.as_ref().map(format_rational),
    }
}

fn factorization_text(c: &CharPolynomial, cyc: &[(usize, usize)], rest: &CharPolynomial) -> String {
    if cyc.is_empty() {
        return format!("{c} has no cyclotomic factor");
    }
    let mut s = format!("{c} =");
    for (i, (n, m)) in cyc.iter().enumerate() {
        if i > 0 {
            s.push_str(" ·");
        }
        let _ = write!(s, " Φ{n}");
        if *m > 1 {
            let _ = write!(s, "^{m}");
        }
    }
    if rest.degree() > 0 {
        let _ = write!(s, " · ({rest})");
    }
    s
}

pub fn express_for(p: &MapParams, pat: &SingularityPattern) -> Result<ExpressRecord, RunError> {
    let vc = ValueCountPattern::from_pattern(pat)?;
    let c = express_char_poly(&vc)?;
    let root = largest_real_root(&c, &root_tolerance())?;
    let (cyc, rest) = cyclotomic_factorization(&c);
    Ok(ExpressRecord {
        q: p.q,
        a: format_rational(&p.a),
        b: format_rational(&p.b),
        pattern: pat.classification.to_string(),
        polynomial: c.to_string(),
        coefficients: c.coefficients.iter().map(|x| x.to_string()).collect(),
        root: root_record(&root),
        cyclotomic_factors: cyc
            .iter()
            .map(|&(n, multiplicity)| CyclotomicRecord { n, multiplicity })
            .collect(),
        residual_factor: rest.to_string(),
        factorization: factorization_text(&c, &cyc, &rest),
    })
}

fn express(cfg: &RunConfig, q: usize) -> Result<ExpressRecord, RunError> {
    let p = cfg.params(q)?;
    let pat = pattern(cfg, &p, q + 1)?;
    express_for(&p, &pat)
}

fn decimal(x: f64) -> String {
    format!("{x:.6}")
}

fn dyndeg(cfg: &RunConfig, q: usize) -> Result<EstimateRecord, RunError> {
    let p = cfg.params(q)?;
    let iterations = cfg.usize_or("iterations", 34)?;
    let burn_in = cfg.usize_or("burn-in", q + 1)?;
    let seed = cfg.seed()?;
    let est = diophantine_degree(&p, iterations, seed, burn_in)?;
    let reference = express(cfg, q)?;
    let root: f64 = reference.root.decimal.parse().unwrap_or(f64::NAN);
    let (c, holds) = quadratic_envelope(&est.series);
    Ok(EstimateRecord {
        q,
        a: format_rational(&p.a),
        b: format_rational(&p.b),
        iterations,
        burn_in,
        seed,
        lambda_hat: decimal(est.lambda_hat),
        tolerance: "0.0000005".into(),
        fit_start: est.fit_start,
        fit_end: est.fit_end,
        residual: decimal(est.residual),
        express_root: reference.root.decimal,
        relative_error: decimal((est.lambda_hat - root).abs() / root),
        quadratic_envelope: EnvelopeRecord {
            constant: decimal(c),
            holds,
        },
        heights: est.series.heights.iter().map(|h| decimal(*h)).collect(),
        truncated_at: est.series.truncated_at,
    })
}

fn degrees(cfg: &RunConfig, q: usize) -> Result<DegreeRecord, RunError> {
    let p = cfg.params(q)?;
    let (mode, name) = match cfg.get("mode").unwrap_or("single") {
        "line" => (DegreeMode::GenericLine, "line"),
        _ => (DegreeMode::SingleVariable, "single"),
    };
    let n = cfg.usize_or("steps", 12)?;
    let seed = cfg.seed()?;
    let d = degree_sequence(&p, mode, n, seed)?;
    Ok(DegreeRecord {
        q,
        a: format_rational(&p.a),
        b: format_rational(&p.b),
        mode: name.into(),
        seed,
        first_index: q,
        degrees: d,
    })
}

/// Staircase hull widened by three times the largest width around the zeros.
pub fn default_window(s: &Staircase) -> Window {
    let mut w = s.hull();
    let margin = 3 * s.steps.iter().map(|st| st.width).max().unwrap_or(1) as i64;
    for (j, i) in s.zero_marks() {
        let (m, n) = s.cell_of(j, i);
        w.m_min = w.m_min.min(m - margin);
        w.m_max = w.m_max.max(m + margin);
        w.n_min = w.n_min.min(n - margin);
        w.n_max = w.n_max.max(n + margin);
    }
    w
}

fn parse_window(v: &str) -> Result<Window, ConfigError> {
    let bad = || ConfigError::Invalid {
        field: "lattice-window".into(),
        message: format!("expected m_min,m_max,n_min,n_max, got {v:?}"),
    };
    let xs: Vec<i64> = v
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if xs.len() != 4 || xs[0] > xs[1] || xs[2] > xs[3] {
        return Err(bad());
    }
    Ok(Window {
        m_min: xs[0],
        m_max: xs[1],
        n_min: xs[2],
        n_max: xs[3],
    })
}

/// NE and SW evolution of a staircase, merged into one pattern map.
pub fn lattice_pattern(
    s: &Staircase,
    p: &MapParams,
    w: Window,
) -> Result<(PatternMap, Option<i64>), RunError> {
    let ne = evolve(s, p, Direction::NE, w)?;
    let sw = evolve(s, p, Direction::SW, w)?;
    let a = PatternMap::from_grid(&ne, p, s.describe(), None)?;
    let b = PatternMap::from_grid(&sw, p, s.describe(), None)?;
    let t = match (ne.truncation, sw.truncation) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    };
    Ok((a.merge(&b), t))
}

fn glyphs(cfg: &RunConfig) -> Glyphs {
    match cfg.get("glyphs") {
        Some(g) => {
            let c: Vec<char> = g.chars().collect();
            Glyphs {
                zero: c[0],
                infinity: c[1],
                regular: c[2],
                initial: c[3],
                blank: c[4],
            }
        }
        None => Glyphs::default(),
    }
}

fn pm_ascii(pm: &PatternMap, cfg: &RunConfig) -> Result<String, RunError> {
    let mut s = render_ascii(pm, &glyphs(cfg));
    if !s.ends_with('\n') {
        s.push('\n');
    }
    Ok(s)
}

fn mark_record(pm: &PatternMap, (m, n): (i64, i64), s: EntrySignature) -> MarkRecord {
    let order = match s.order() {
        EXACT_ZERO_ORDER => None,
        k => Some(k),
    };
    MarkRecord {
        m,
        n,
        class: s.class_name().to_string(),
        order,
        initial: pm.initial.contains(&(m, n)),
    }
}

pub fn lattice_record(
    s: &Staircase,
    p: &MapParams,
    w: Window,
    g: &Glyphs,
) -> Result<(LatticeRecord, PatternMap), RunError> {
    let (pm, truncation) = lattice_pattern(s, p, w)?;
    let slot = |(step, slot): (usize, usize)| {
        let (m, n) = s.cell_of(step, slot);
        SlotRecord { step, slot, m, n }
    };
    let rec = LatticeRecord {
        params: ParamsRecord {
            a: format_rational(&p.a),
            b: format_rational(&p.b),
        },
        anchor: [s.anchor.0, s.anchor.1],
        staircase: step_data(s),
        window: WindowRecord {
            m_min: w.m_min,
            m_max: w.m_max,
            n_min: w.n_min,
            n_max: w.n_max,
        },
        truncation,
        marks: pm.marks.iter().map(|(c, sig)| mark_record(&pm, *c, *sig)).collect(),
        cases: classify_interaction(s)
            .into_iter()
            .map(|i| CaseRecord {
                first: slot(i.first),
                second: slot(i.second),
                case: i.case.label().to_string(),
            })
            .collect(),
        ascii: render_ascii(&pm, g).lines().map(str::to_string).collect(),
    };
    Ok((rec, pm))
}

fn lattice(cfg: &RunConfig) -> Result<(LatticeRecord, PatternMap), RunError> {
    let path = cfg.get("staircase").expect("validated");
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_string(),
        source,
    })?;
    let s = StaircaseFile::parse(&text)?;
    let (a, b) = cfg.params_ab()?;
    let p = MapParams::new(a, b, 1).map_err(|e| ConfigError::Invalid {
        field: "a".into(),
        message: e.to_string(),
    })?;
    let w = match cfg.get("lattice-window") {
        Some(v) => parse_window(v)?,
        None => default_window(&s),
    };
    lattice_record(&s, &p, w, &glyphs(cfg))
}

/// Plain-text rendering of a results section.
pub fn summary(r: &Results) -> String {
    let mut s = String::new();
    match r {
        Results::Pattern(p) => {
            let _ = writeln!(s, "q = {}, k = {}, a = {}, b = {}", p.q, p.k, p.a, p.b);
            let _ = writeln!(s, "classification: {}", p.classification.display);
            // regular tail cut after one row
            let last = p
                .forward
                .iter()
                .rposition(|st| st.signature.contains(['0', '∞']))
                .map_or(p.forward.len(), |i| (i + 2).min(p.forward.len()));
            for st in &p.forward[..last] {
                let _ = writeln!(s, "X_{:<4} {}  codim {}", st.step, st.signature, st.codim);
            }
        }
        Results::Express(e) => {
            let _ = writeln!(s, "q = {}, a = {}, b = {}: {}", e.q, e.a, e.b, e.pattern);
            let _ = writeln!(s, "polynomial: {}", e.polynomial);
            let _ = writeln!(s, "largest real root: {}", e.root.decimal);
            let _ = writeln!(s, "{}", e.factorization);
        }
        Results::Estimate(e) => {
            let _ = writeln!(s, "q = {}, a = {}, b = {}", e.q, e.a, e.b);
            let _ = writeln!(
                s,
                "lambda_hat = {} (express root {}, relative error {})",
                e.lambda_hat, e.express_root, e.relative_error
            );
            let _ = writeln!(
                s,
                "quadratic envelope C = {}: {}",
                e.quadratic_envelope.constant,
                if e.quadratic_envelope.holds { "holds" } else { "fails" }
            );
        }
        Results::Degrees(d) => {
            let _ = writeln!(s, "q = {}, a = {}, b = {}, mode {}", d.q, d.a, d.b, d.mode);
            let list: Vec<String> = d.degrees.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "degrees of x_{}..: {}", d.first_index, list.join(" "));
        }
        Results::Lattice(l) => {
            for line in &l.ascii {
                let _ = writeln!(s, "{line}");
            }
            for c in &l.cases {
                let _ = writeln!(s, "{}: ({}, {}) and ({}, {})", c.case, c.first.m, c.first.n, c.second.m, c.second.n);
            }
        }
        Results::Sweep(sw) => {
            for e in &sw.entries {
                let _ = writeln!(s, "== q = {}", e.q);
                s.push_str(&summary(&e.results));
            }
        }
    }
    s
}
