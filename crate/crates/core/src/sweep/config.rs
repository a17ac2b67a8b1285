use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::moments::EngineKind;
use crate::witnesses::WitnessKind;

use super::SweepError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateFamily {
    Ngbs,
    Binomial,
    Fock,
    Coherent,
}

impl StateFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            StateFamily::Ngbs => "ngbs",
            StateFamily::Binomial => "binomial",
            StateFamily::Fock => "fock",
            StateFamily::Coherent => "coherent",
        }
    }
}

impl FromStr for StateFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ngbs" => Ok(StateFamily::Ngbs),
            "binomial" | "bs" => Ok(StateFamily::Binomial),
            "fock" => Ok(StateFamily::Fock),
            "coherent" => Ok(StateFamily::Coherent),
            other => Err(format!("unknown state family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSelection {
    One(EngineKind),
    Both,
}

impl EngineSelection {
    pub fn engines(&self) -> Vec<EngineKind> {
        match self {
            EngineSelection::One(e) => vec![*e],
            EngineSelection::Both => EngineKind::ALL.to_vec(),
        }
    }
}

impl FromStr for EngineSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("both") {
            Ok(EngineSelection::Both)
        } else {
            s.parse().map(EngineSelection::One)
        }
    }
}

/// Inclusive linear grid `start, ..., end` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl PGrid {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self, SweepError> {
        let g = Self { start, end, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.start.is_finite() && self.end.is_finite()) || self.start >= self.end || self.steps < 2 {
            return Err(SweepError::Config(format!(
                "p grid needs start < end and steps >= 2, got {}:{}:{}",
                self.start, self.end, self.steps
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.end
                } else {
                    self.start + i as f64 * h
                }
            })
            .collect()
    }
}

impl FromStr for PGrid {
    type Err = SweepError;

    /// `start:end:steps`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::Config(format!("p grid must be start:end:steps, got '{s}'"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        PGrid::new(
            a.parse().map_err(|_| bad())?,
            b.parse().map_err(|_| bad())?,
            n.parse().map_err(|_| bad())?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    SvgCsv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "svg+csv" | "csv+svg" | "svg" => Ok(OutputFormat::SvgCsv),
            other => Err(format!("unknown output format '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub state_family: StateFamily,
    pub m: usize,
    pub q_list: Vec<f64>,
    pub p_grid: PGrid,
    pub witnesses: Vec<WitnessKind>,
    pub engine: EngineSelection,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.p_grid.validate()?;
        if self.witnesses.is_empty() {
            return Err(SweepError::Config("no witnesses selected".into()));
        }
        if self.q_list.is_empty() {
            return Err(SweepError::Config("empty q list".into()));
        }
        if self.q_list.iter().any(|q| !q.is_finite()) {
            return Err(SweepError::Config("non-finite q".into()));
        }
        if self.state_family != StateFamily::Ngbs && self.q_list.iter().any(|&q| q != 0.0) {
            return Err(SweepError::Config(format!(
                "state family '{}' has no q parameter; use q = 0",
                self.state_family.tag()
            )));
        }
        if self.state_family == StateFamily::Coherent && self.engine != EngineSelection::One(EngineKind::Oracle) {
            return Err(SweepError::Config(
                "coherent states have no fixed photon number; use --engine oracle".into(),
            ));
        }
        Ok(())
    }

    /// Build from flat `key = value` pairs (file lines or CLI flags).
    ///
    /// Keys: `state`, `M`, `q`, `p`, `witness` (alias `witnesses`),
    /// `engine`, `out`, `format`. Lists are comma-separated; inside a list
    /// an antibunching order is written `hoa:L:M`.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self, SweepError> {
        let cfg = |e: String| SweepError::Config(e);
        let get = |k: &str| pairs.get(k).map(String::as_str);

        for key in pairs.keys() {
            if ![
                "state",
                "M",
                "q",
                "p",
                "witness",
                "witnesses",
                "engine",
                "out",
                "format",
            ]
            .contains(&key.as_str())
            {
                return Err(cfg(format!("unknown key '{key}'")));
            }
        }

        let state_family = get("state").unwrap_or("ngbs").parse().map_err(cfg)?;
        let m = get("M")
            .ok_or_else(|| cfg("missing M".into()))?
            .trim()
            .parse()
            .map_err(|_| cfg(format!("bad M '{}'", get("M").unwrap_or_default())))?;
        let q_list = match get("q") {
            Some(s) => parse_list(s, |x| x.parse::<f64>().map_err(|_| format!("bad q '{x}'"))).map_err(cfg)?,
            None => vec![0.0],
        };
        let p_grid = get("p").ok_or_else(|| cfg("missing p grid".into()))?.parse()?;
        let witness_src = get("witness")
            .or_else(|| get("witnesses"))
            .ok_or_else(|| cfg("missing witness".into()))?;
        let witnesses = parse_witness_list(witness_src).map_err(cfg)?;
        let engine = get("engine").unwrap_or("paper").parse().map_err(cfg)?;
        let output_path = PathBuf::from(get("out").unwrap_or("."));
        let output_format = get("format").unwrap_or("csv").parse().map_err(cfg)?;

        let c = SweepConfig {
            state_family,
            m,
            q_list,
            p_grid,
            witnesses,
            engine,
            output_path,
            output_format,
        };
        c.validate()?;
        Ok(c)
    }

    /// Parse a `key = value` file; `#` starts a comment.
    pub fn parse_file_text(text: &str) -> Result<BTreeMap<String, String>, SweepError> {
        let mut pairs = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SweepError::Config(format!("line {}: expected key = value", no + 1)))?;
            pairs.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(pairs)
    }
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(f).collect()
}

/// Comma-separated witnesses. Bare integers directly after an `hoa:L`
/// token are folded back into it, so `hoa:9,1` also works inside a list.
pub fn parse_witness_list(s: &str) -> Result<Vec<WitnessKind>, String> {
    let mut tokens: Vec<String> = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tokens.last_mut() {
            Some(prev)
                if tok.chars().all(|c| c.is_ascii_digit())
                    && prev.to_ascii_lowercase().starts_with("hoa:")
                    && !prev[4..].contains([',', ':']) =>
            {
                prev.push(',');
                prev.push_str(tok);
            }
            _ => tokens.push(tok.to_string()),
        }
    }
    tokens.iter().map(|t| t.parse()).collect()
}
