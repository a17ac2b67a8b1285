//! Parameter sweeps over state families, with CSV and SVG output.

mod config;
mod figures;
mod svg;
mod table1;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::fock::FixedTotalState;
use crate::moments::{Engine, EngineKind};
use crate::states::{binomial_state, coherent_product, fock_pair, ngbs, NgbsParams};
use crate::witnesses::{evaluate, EprForm, WitnessKind};

pub use config::{parse_witness_list, EngineSelection, OutputFormat, PGrid, StateFamily, SweepConfig};
pub use figures::{reproduce_figures, FIGURE_P_GRID};
pub use svg::{line_chart, Series};
pub use table1::{table1_report, Table1Grid, Table1Report, Table1Row};

pub const CSV_HEADER: &str = "state,M,p,q,witness,l,m,theta,form,engine,value,nonclassical,status";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SweepError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Config(_) => 1,
            SweepError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        SweepError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Round to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12 significant digits, printed as the shortest string that parses back
/// to the rounded value.
pub fn fmt12(x: f64) -> String {
    format!("{}", round12(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Degenerate,
    InvalidParams,
}

impl RowStatus {
    pub fn tag(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Degenerate => "degenerate",
            RowStatus::InvalidParams => "invalid_params",
        }
    }
}

impl FromStr for RowStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(RowStatus::Ok),
            "degenerate" => Ok(RowStatus::Degenerate),
            "invalid_params" => Ok(RowStatus::InvalidParams),
            other => Err(format!("unknown status '{other}'")),
        }
    }
}

/// One evaluated (grid point, witness, engine) triple. Floating-point
/// fields hold the 12-digit values written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub state: StateFamily,
    pub m: usize,
    pub p: f64,
    pub q: f64,
    pub witness: String,
    pub l: Option<u32>,
    pub m_order: Option<u32>,
    pub theta: Option<f64>,
    pub form: Option<EprForm>,
    pub engine: EngineKind,
    pub value: Option<f64>,
    pub nonclassical: bool,
    pub status: RowStatus,
}

impl SweepRow {
    fn blank(state: StateFamily, m: usize, p: f64, q: f64, kind: WitnessKind, engine: EngineKind) -> Self {
        let (l, m_order) = kind.orders().unzip();
        Self {
            state,
            m,
            p: round12(p),
            q: round12(q),
            witness: kind.tag().to_string(),
            l,
            m_order,
            theta: kind.theta().map(round12),
            form: kind.epr_form(),
            engine,
            value: None,
            nonclassical: false,
            status: RowStatus::InvalidParams,
        }
    }

    pub fn to_csv_line(&self) -> String {
        let opt_u = |x: Option<u32>| x.map(|v| v.to_string()).unwrap_or_default();
        let opt_f = |x: Option<f64>| x.map(fmt12).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.state.tag(),
            self.m,
            fmt12(self.p),
            fmt12(self.q),
            self.witness,
            opt_u(self.l),
            opt_u(self.m_order),
            opt_f(self.theta),
            self.form.map(|f| f.tag()).unwrap_or_default(),
            self.engine.tag(),
            opt_f(self.value),
            self.nonclassical,
            self.status.tag()
        )
    }

    pub fn from_csv_line(line: &str) -> Result<Self, String> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(format!("expected 13 fields, got {}", f.len()));
        }
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad {what} '{s}'"))
        }
        fn opt<T: FromStr>(s: &str, what: &str) -> Result<Option<T>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, what).map(Some)
            }
        }
        Ok(Self {
            state: f[0].parse()?,
            m: num(f[1], "M")?,
            p: num(f[2], "p")?,
            q: num(f[3], "q")?,
            witness: f[4].to_string(),
            l: opt(f[5], "l")?,
            m_order: opt(f[6], "m")?,
            theta: opt(f[7], "theta")?,
            form: if f[8].is_empty() { None } else { Some(f[8].parse()?) },
            engine: f[9].parse()?,
            value: opt(f[10], "value")?,
            nonclassical: num(f[11], "nonclassical")?,
            status: f[12].parse()?,
        })
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err("missing or unexpected CSV header".into()),
    }
    lines.filter(|l| !l.is_empty()).map(SweepRow::from_csv_line).collect()
}

/// A prepared state at one grid point.
pub(crate) enum Prepared {
    Fixed(FixedTotalState),
    Grid(crate::fock::TwoModeState),
}

impl Prepared {
    pub(crate) fn engine(&self, kind: EngineKind) -> Option<Engine> {
        match self {
            Prepared::Fixed(st) => Some(Engine::for_fixed(st, kind)),
            Prepared::Grid(st) => Engine::for_grid(st, kind).ok(),
        }
    }
}

/// Build the state of `family` at `(m, p, q)`; `None` for parameters
/// outside the family's domain.
pub(crate) fn prepare(family: StateFamily, m: usize, p: f64, q: f64) -> Option<Prepared> {
    match family {
        StateFamily::Ngbs => ngbs(NgbsParams::new(m, p, q)).ok().map(Prepared::Fixed),
        StateFamily::Binomial => binomial_state(m, p).ok().map(Prepared::Fixed),
        StateFamily::Fock => {
            if !(0.0..=1.0).contains(&p) {
                return None;
            }
            let n = (p * m as f64).round() as usize;
            FixedTotalState::try_from(&fock_pair(n, m - n))
                .ok()
                .map(Prepared::Fixed)
        }
        StateFamily::Coherent => {
            if !(0.0..=1.0).contains(&p) {
                return None;
            }
            let a1 = C64::new((m as f64 * p).sqrt(), 0.0);
            let a2 = C64::new((m as f64 * (1.0 - p)).sqrt(), 0.0);
            let cutoff = m + (12.0 * (m as f64).sqrt()).ceil() as usize + 30;
            coherent_product(a1, a2, cutoff).ok().map(Prepared::Grid)
        }
    }
}

/// Fixed-total-photon state of `family` at `(m, p, q)`, for engine
/// comparisons.
pub fn prepare_fixed(family: StateFamily, m: usize, p: f64, q: f64) -> Result<FixedTotalState, SweepError> {
    if family == StateFamily::Coherent {
        return Err(SweepError::Config("coherent states have no fixed photon number".into()));
    }
    if family != StateFamily::Ngbs && q != 0.0 {
        return Err(SweepError::Config(format!(
            "state family '{}' has no q parameter",
            family.tag()
        )));
    }
    match prepare(family, m, p, q) {
        Some(Prepared::Fixed(st)) => Ok(st),
        _ => Err(SweepError::Config(format!(
            "no {} state at M={m}, p={p}, q={q}",
            family.tag()
        ))),
    }
}

/// Rows for one `(q, p)` point: witnesses in the given order, each with
/// every engine in the given order.
pub(crate) fn evaluate_point(
    family: StateFamily,
    m: usize,
    p: f64,
    q: f64,
    witnesses: &[WitnessKind],
    engines: &[EngineKind],
) -> Vec<SweepRow> {
    let state = prepare(family, m, p, q);
    let built: Vec<Option<Engine>> = engines
        .iter()
        .map(|&e| state.as_ref().and_then(|s| s.engine(e)))
        .collect();
    let mut rows = Vec::with_capacity(witnesses.len() * engines.len());
    for &w in witnesses {
        for (&e, eng) in engines.iter().zip(&built) {
            let mut row = SweepRow::blank(family, m, p, q, w, e);
            if let Some(eng) = eng {
                match evaluate(w, eng) {
                    Ok(res) if res.value.is_finite() => {
                        row.value = Some(round12(res.value));
                        row.nonclassical = res.nonclassical;
                        row.status = RowStatus::Ok;
                    }
                    _ => row.status = RowStatus::Degenerate,
                }
            }
            rows.push(row);
        }
    }
    rows
}

fn sorted_qs(qs: &[f64]) -> Vec<f64> {
    let mut v = qs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Evaluate the sweep without touching the filesystem.
pub fn sweep_rows(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    config.validate()?;
    let engines = config.engine.engines();
    let points: Vec<(f64, f64)> = sorted_qs(&config.q_list)
        .into_iter()
        .flat_map(|q| config.p_grid.points().into_iter().map(move |p| (q, p)))
        .collect();
    let chunks: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(q, p)| evaluate_point(config.state_family, config.m, p, q, &config.witnesses, &engines))
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// File-name fragment identifying a witness.
pub fn witness_slug(kind: &WitnessKind) -> String {
    match kind {
        WitnessKind::Hoa { l, m } => format!("hoa_{l}_{m}"),
        WitnessKind::SumSqueeze { theta } => format!("ssd_theta_{}", fmt12(*theta)),
        WitnessKind::Epr(form) => format!("epr_{}", form.tag()),
        other => other.tag().to_string(),
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), SweepError> {
    fs::write(path, contents).map_err(|e| SweepError::io(path, e))
}

/// Outcome of [`run_sweep`].
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub files: Vec<PathBuf>,
}

/// Run the sweep and write `sweep.csv` (plus one SVG per witness when
/// requested) into `config.output_path`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput, SweepError> {
    let rows = sweep_rows(config)?;
    let dir = &config.output_path;
    fs::create_dir_all(dir).map_err(|e| SweepError::io(dir, e))?;
    let csv_path = dir.join("sweep.csv");
    write_file(&csv_path, &rows_to_csv(&rows))?;
    let mut files = vec![csv_path];

    if config.output_format == OutputFormat::SvgCsv {
        let engines = config.engine.engines();
        let per_point = config.witnesses.len() * engines.len();
        let steps = config.p_grid.steps;
        let qs = sorted_qs(&config.q_list);
        for (wi, w) in config.witnesses.iter().enumerate() {
            let mut series = Vec::new();
            for (qi, q) in qs.iter().enumerate() {
                for (ei, e) in engines.iter().enumerate() {
                    let points = (0..steps)
                        .map(|pi| {
                            let r = &rows[(qi * steps + pi) * per_point + wi * engines.len() + ei];
                            (r.p, r.value)
                        })
                        .collect();
                    let label = if engines.len() > 1 {
                        format!("q={} ({})", fmt12(*q), e.tag())
                    } else {
                        format!("q={}", fmt12(*q))
                    };
                    series.push(Series { label, points });
                }
            }
            let title = format!("{} {} M={}", config.state_family.tag(), w, config.m);
            let path = dir.join(format!("sweep_{}.svg", witness_slug(w)));
            write_file(&path, &line_chart(&title, "p", &w.to_string(), &series))?;
            files.push(path);
        }
    }
    Ok(SweepOutput { rows, files })
}

/// Every spec with all four exponents in `0..=max_order`, identity excluded,
/// in lexicographic `(j,k,r,s)` order.
pub fn all_specs(max_order: u32) -> Vec<crate::fock::MomentSpec> {
    let mut out = Vec::new();
    for j in 0..=max_order {
        for k in 0..=max_order {
            for r in 0..=max_order {
                for s in 0..=max_order {
                    if j + k + r + s > 0 {
                        out.push(crate::fock::MomentSpec::new(j, k, r, s));
                    }
                }
            }
        }
    }
    out
}

pub const REPORT_HEADER: &str = "j,k,r,s,paper_re,paper_im,oracle_re,oracle_im,abs_discrepancy,degenerate";

/// One CSV line per report, columns as in [`REPORT_HEADER`].
pub fn report_line(r: &crate::moments::MomentReport) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{},{},{},{},{},{},{},{},{},{}",
        r.spec.j,
        r.spec.k,
        r.spec.r,
        r.spec.s,
        fmt12(r.paper_value.re),
        fmt12(r.paper_value.im),
        fmt12(r.oracle_value.re),
        fmt12(r.oracle_value.im),
        fmt12(r.abs_discrepancy),
        r.degenerate
    );
    s
}
