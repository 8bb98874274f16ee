//! Run configuration: flags merged over an optional `key = value` file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use dkdv_core::exactnum::{format_rational, parse_rational, Rational};
use dkdv_core::mapping::MapParams;
use thiserror::Error;

/// Environment variable naming the default directory for report files.
pub const OUTPUT_DIR_ENV: &str = "DKDV_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("config file line {line}: {message}")]
    FileSyntax { line: usize, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Command {
    Analyze,
    Express,
    Dyndeg,
    Degrees,
    Lattice,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Express => "express",
            Command::Dyndeg => "dyndeg",
            Command::Degrees => "degrees",
            Command::Lattice => "lattice",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "analyze" => Command::Analyze,
            "express" => Command::Express,
            "dyndeg" => Command::Dyndeg,
            "degrees" => Command::Degrees,
            "lattice" => Command::Lattice,
            "sweep" => Command::Sweep,
            _ => return Err(invalid("target", format!("unknown command {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Ascii,
    Svg,
}

/// Every flag a subcommand accepts. Values stay strings until
/// [`RunConfig`] validates them so rationals never pass through floats.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// key = value file supplying defaults for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// order q of the reduction
    #[arg(long)]
    pub q: Option<String>,
    /// inclusive range "lo..hi" for sweep
    #[arg(long = "q-range")]
    pub q_range: Option<String>,
    /// lattice parameter a, as "p/q"
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// lattice parameter b, as "p/q"
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// seeded coordinate u_k = 0
    #[arg(long)]
    pub k: Option<String>,
    /// steps followed in each direction
    #[arg(long)]
    pub window: Option<String>,
    /// initial truncation order in ε
    #[arg(long)]
    pub truncation: Option<String>,
    /// resamples per dependence probe
    #[arg(long)]
    pub probes: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// orbit length for dyndeg
    #[arg(long)]
    pub iterations: Option<String>,
    #[arg(long = "burn-in")]
    pub burn_in: Option<String>,
    /// single or line
    #[arg(long)]
    pub mode: Option<String>,
    /// number of iterates for degrees
    #[arg(long)]
    pub steps: Option<String>,
    /// integrable or nonintegrable
    #[arg(long)]
    pub regime: Option<String>,
    /// staircase JSON file
    #[arg(long)]
    pub staircase: Option<PathBuf>,
    /// lattice window "m_min,m_max,n_min,n_max"
    #[arg(long = "lattice-window", allow_hyphen_values = true)]
    pub lattice_window: Option<String>,
    /// json, ascii or svg
    #[arg(long)]
    pub format: Option<String>,
    /// report path; "-" for stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// five glyphs: zero, infinity, regular, initial, blank
    #[arg(long)]
    pub glyphs: Option<String>,
    /// command run by sweep
    #[arg(long)]
    pub target: Option<String>,
}

pub const KEYS: &[&str] = &[
    "q",
    "q-range",
    "a",
    "b",
    "k",
    "window",
    "truncation",
    "probes",
    "seed",
    "iterations",
    "burn-in",
    "mode",
    "steps",
    "regime",
    "staircase",
    "lattice-window",
    "format",
    "output",
    "glyphs",
    "target",
];

impl Flags {
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let pairs = [
            ("q", self.q.clone()),
            ("q-range", self.q_range.clone()),
            ("a", self.a.clone()),
            ("b", self.b.clone()),
            ("k", self.k.clone()),
            ("window", self.window.clone()),
            ("truncation", self.truncation.clone()),
            ("probes", self.probes.clone()),
            ("seed", self.seed.clone()),
            ("iterations", self.iterations.clone()),
            ("burn-in", self.burn_in.clone()),
            ("mode", self.mode.clone()),
            ("steps", self.steps.clone()),
            ("regime", self.regime.clone()),
            ("staircase", path(&self.staircase)),
            ("lattice-window", self.lattice_window.clone()),
            ("format", self.format.clone()),
            ("output", path(&self.output)),
            ("glyphs", self.glyphs.clone()),
            ("target", self.target.clone()),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

/// Parses `key = value` lines. `#` starts a comment; keys may use `-` or `_`.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::FileSyntax {
            line: i + 1,
            message: "expected key = value".into(),
        })?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::FileSyntax {
                line: i + 1,
                message: format!("unknown key {key:?}"),
            });
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Validated settings for one run. `values` is the merged key map and is
/// echoed verbatim into reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// File values first, flags on top; then validates what `command` needs.
    pub fn new(
        command: Command,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Result<Self, ConfigError> {
        let mut values = file;
        values.extend(flags);
        let cfg = RunConfig { command, values };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_pairs(command: Command, pairs: &[(&str, &str)]) -> Result<Self, ConfigError> {
        let flags = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self::new(command, BTreeMap::new(), flags)
    }

    pub fn with(&self, key: &str, value: impl Into<String>) -> Self {
        let mut c = self.clone();
        c.values.insert(key.to_string(), value.into());
        c
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| invalid(key, format!("cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn q(&self) -> Result<usize, ConfigError> {
        let q: usize = self.parsed("q")?.ok_or_else(|| invalid("q", "required"))?;
        if q == 0 {
            return Err(invalid("q", "must be at least 1"));
        }
        Ok(q)
    }

    pub fn q_range(&self) -> Result<(usize, usize), ConfigError> {
        let v = self.get("q-range").ok_or_else(|| invalid("q-range", "required"))?;
        let (lo, hi) = v
            .split_once("..")
            .ok_or_else(|| invalid("q-range", "expected lo..hi"))?;
        let p = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| invalid("q-range", format!("cannot parse {v:?}")))
        };
        let (lo, hi) = (p(lo)?, p(hi)?);
        if lo == 0 || hi < lo {
            return Err(invalid("q-range", "need 1 ≤ lo ≤ hi"));
        }
        Ok((lo, hi))
    }

    pub fn rational(&self, key: &str, default: &str) -> Result<Rational, ConfigError> {
        let v = self.get(key).unwrap_or(default);
        let r = parse_rational(v).map_err(|e| invalid(key, e.to_string()))?;
        if num_is_zero(&r) {
            return Err(invalid(key, "must be nonzero"));
        }
        Ok(r)
    }

    /// (a, b), defaulting by regime: integrable 1, 1; nonintegrable 1, 2.
    pub fn params_ab(&self) -> Result<(Rational, Rational), ConfigError> {
        let b_default = match self.get("regime") {
            None | Some("integrable") => "1",
            Some("nonintegrable") => "2",
            Some(r) => return Err(invalid("regime", format!("unknown regime {r:?}"))),
        };
        let a = self.rational("a", "1")?;
        let b = self.rational("b", b_default)?;
        if let Some(r) = self.get("regime") {
            let eq = a == b;
            if (r == "integrable") != eq && (self.get("a").is_some() || self.get("b").is_some()) {
                return Err(invalid("regime", format!("{r} contradicts a = {}, b = {}", format_rational(&a), format_rational(&b))));
            }
        }
        Ok((a, b))
    }

    pub fn params(&self, q: usize) -> Result<MapParams, ConfigError> {
        let (a, b) = self.params_ab()?;
        MapParams::new(a, b, q).map_err(|e| invalid("q", e.to_string()))
    }

    pub fn k(&self, q: usize) -> Result<usize, ConfigError> {
        let k = self.usize_or("k", q + 1)?;
        if !(2..=q + 1).contains(&k) {
            return Err(invalid("k", format!("must lie in 2..={}", q + 1)));
        }
        Ok(k)
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        Ok(self.parsed("seed")?.unwrap_or(1))
    }

    pub fn format(&self) -> Result<Format, ConfigError> {
        match self.get("format").unwrap_or("json") {
            "json" => Ok(Format::Json),
            "ascii" => Ok(Format::Ascii),
            "svg" if self.command == Command::Lattice => Ok(Format::Svg),
            "svg" => Err(invalid("format", "svg is only available for lattice")),
            f => Err(invalid("format", format!("unknown format {f:?}"))),
        }
    }

    pub fn target(&self) -> Result<Command, ConfigError> {
        let t: Command = self.get("target").unwrap_or("analyze").parse()?;
        if matches!(t, Command::Sweep | Command::Lattice) {
            return Err(invalid("target", format!("{t} cannot be swept over q")));
        }
        Ok(t)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.params_ab()?;
        self.seed()?;
        self.format()?;
        match self.command {
            Command::Sweep => {
                self.q_range()?;
                self.target()?;
            }
            Command::Lattice => {
                if self.get("staircase").is_none() {
                    return Err(invalid("staircase", "required"));
                }
            }
            _ => {
                let q = self.q()?;
                if self.command == Command::Analyze {
                    self.k(q)?;
                }
            }
        }
        if let Some(m) = self.get("mode") {
            if m != "single" && m != "line" {
                return Err(invalid("mode", format!("expected single or line, got {m:?}")));
            }
        }
        if let Some(g) = self.get("glyphs") {
            if g.chars().count() != 5 {
                return Err(invalid("glyphs", "expected exactly five characters"));
            }
        }
        Ok(())
    }

    /// Where the report goes: the output flag, else a file under
    /// `$DKDV_OUTPUT_DIR`, else stdout (`None`).
    pub fn output_path(&self, env_dir: Option<&str>) -> Option<PathBuf> {
        match self.get("output") {
            Some("-") => None,
            Some(p) => Some(PathBuf::from(p)),
            None => env_dir.map(|d| {
                let ext = match self.get("format").unwrap_or("json") {
                    "svg" => "svg",
                    "ascii" => "txt",
                    _ => "json",
                };
                PathBuf::from(d).join(format!("{}-{}.{ext}", self.command, self.seed().unwrap_or(1)))
            }),
        }
    }
}

fn num_is_zero(r: &Rational) -> bool {
    *r == Rational::from_integer(0.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = parse_config_file("# defaults\nq = 3\na = 1\nb=2 # detuned\nburn_in = 4\n").unwrap();
        assert_eq!(file.get("burn-in").map(String::as_str), Some("4"));
        let flags = [("b".to_string(), "1".to_string())].into_iter().collect();
        let c = RunConfig::new(Command::Analyze, file, flags).unwrap();
        assert_eq!(c.get("b"), Some("1"));
        assert_eq!(c.q().unwrap(), 3);
    }

    #[test]
    fn field_level_errors() {
        let e = RunConfig::from_pairs(Command::Analyze, &[("q", "3"), ("k", "7")]).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { ref field, .. } if field == "k"));
        let e = RunConfig::from_pairs(Command::Analyze, &[("q", "3"), ("a", "0")]).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { ref field, .. } if field == "a"));
        let e = RunConfig::from_pairs(Command::Express, &[("q", "3"), ("a", "0.5")]).unwrap_err();
        assert!(matches!(e, ConfigError::Invalid { ref field, .. } if field == "a"));
        assert!(parse_config_file("colour = red").is_err());
        assert!(parse_config_file("q 3").is_err());
        assert!(RunConfig::from_pairs(Command::Lattice, &[]).is_err());
        assert!(RunConfig::from_pairs(Command::Sweep, &[("q-range", "4..2")]).is_err());
    }

    #[test]
    fn regime_defaults() {
        let c = RunConfig::from_pairs(Command::Express, &[("q", "5"), ("regime", "nonintegrable")]).unwrap();
        let (a, b) = c.params_ab().unwrap();
        assert_ne!(a, b);
        assert!(RunConfig::from_pairs(Command::Express, &[("q", "5"), ("regime", "integrable"), ("b", "3")]).is_err());
    }

    #[test]
    fn output_location() {
        let c = RunConfig::from_pairs(Command::Analyze, &[("q", "2"), ("seed", "9")]).unwrap();
        assert_eq!(c.output_path(None), None);
        assert_eq!(c.output_path(Some("/tmp/r")), Some(PathBuf::from("/tmp/r/analyze-9.json")));
        assert_eq!(c.with("output", "-").output_path(Some("/tmp/r")), None);
    }
}
