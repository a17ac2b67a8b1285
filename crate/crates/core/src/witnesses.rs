//! Nonclassicality and entanglement witnesses as combinations of normally
//! ordered moments.
//!
//! Every witness is negative exactly when its criterion flags the state.
//! Antinormally ordered terms are rewritten with `<a a†> = <a† a> + 1` and
//! `<a1 a1† a2 a2†> = <(n1 + 1)(n2 + 1)>` before the moments are requested.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::MomentSpec;
use crate::moments::{EngineKind, MomentSource};

/// A witness value counts as negative only below `-STRICT_TOL * scale`,
/// where `scale >= 1` is the magnitude of the terms that were combined.
pub const STRICT_TOL: f64 = 1e-12;

/// Denominators at or below this are treated as zero.
pub const DENOM_TOL: f64 = 1e-14;

/// Angles used for sum squeezing when none are given.
pub const DEFAULT_THETAS: [f64; 4] = [0.0, PI / 6.0, PI / 3.0, PI];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("{kind}: denominator {denominator:e} is numerically zero")]
    DegenerateDenominator { kind: WitnessKind, denominator: f64 },
    #[error("antibunching order needs l >= m >= 1, got l={l}, m={m}")]
    InvalidOrder { l: u32, m: u32 },
}

/// Reading of the EPR (Mancini) products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EprForm {
    /// `I1`, `I2` taken literally, squared means added.
    Literal,
    /// Squared means subtracted and the number terms symmetrized, as a
    /// product of variances would require.
    VarianceConsistent,
}

impl EprForm {
    pub fn tag(&self) -> &'static str {
        match self {
            EprForm::Literal => "literal",
            EprForm::VarianceConsistent => "variance",
        }
    }
}

impl FromStr for EprForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(EprForm::Literal),
            "variance" | "varianceconsistent" | "variance-consistent" => Ok(EprForm::VarianceConsistent),
            other => Err(format!("unknown EPR form '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessKind {
    /// Two-mode higher-order antibunching `D_{l,m}`.
    Hoa {
        l: u32,
        m: u32,
    },
    QuadX,
    QuadY,
    /// Sum squeezing at local-oscillator angle `theta` (radians).
    SumSqueeze {
        theta: f64,
    },
    /// Shchukin–Vogel.
    Sv,
    Epr(EprForm),
    Su11,
    /// Intermode Cauchy-Schwarz in its usual two-mode form.
    CauchySchwarz,
}

impl WitnessKind {
    pub fn hoa(l: u32, m: u32) -> Result<Self, WitnessError> {
        if l >= m && m >= 1 {
            Ok(WitnessKind::Hoa { l, m })
        } else {
            Err(WitnessError::InvalidOrder { l, m })
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            WitnessKind::Hoa { .. } => "hoa",
            WitnessKind::QuadX => "sx",
            WitnessKind::QuadY => "sy",
            WitnessKind::SumSqueeze { .. } => "ssd",
            WitnessKind::Sv => "sv",
            WitnessKind::Epr(_) => "epr",
            WitnessKind::Su11 => "su11",
            WitnessKind::CauchySchwarz => "cs",
        }
    }

    pub fn orders(&self) -> Option<(u32, u32)> {
        match self {
            WitnessKind::Hoa { l, m } => Some((*l, *m)),
            _ => None,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            WitnessKind::SumSqueeze { theta } => Some(*theta),
            _ => None,
        }
    }

    pub fn epr_form(&self) -> Option<EprForm> {
        match self {
            WitnessKind::Epr(f) => Some(*f),
            _ => None,
        }
    }

    /// The Cauchy-Schwarz witness uses the standard form from the wider
    /// literature.
    pub fn is_literature_form(&self) -> bool {
        matches!(self, WitnessKind::CauchySchwarz)
    }

    /// Moments the witness reads.
    pub fn required_moments(&self) -> Vec<MomentSpec> {
        let s = MomentSpec::new;
        match *self {
            WitnessKind::Hoa { l, m } => vec![
                s(l + 1, l + 1, m.saturating_sub(1), m.saturating_sub(1)),
                s(m.saturating_sub(1), m.saturating_sub(1), l + 1, l + 1),
                s(l, l, m, m),
                s(m, m, l, l),
            ],
            WitnessKind::QuadX | WitnessKind::QuadY | WitnessKind::Epr(_) => vec![
                s(0, 2, 0, 0),
                s(0, 0, 0, 2),
                s(0, 1, 1, 0),
                s(0, 1, 0, 1),
                s(1, 1, 0, 0),
                s(0, 0, 1, 1),
                s(0, 1, 0, 0),
                s(0, 0, 0, 1),
            ],
            WitnessKind::SumSqueeze { .. } => vec![
                s(1, 1, 1, 1),
                s(1, 1, 0, 0),
                s(0, 0, 1, 1),
                s(0, 2, 0, 2),
                s(0, 1, 0, 1),
            ],
            WitnessKind::Sv => vec![s(1, 1, 0, 0), s(0, 0, 1, 1), s(1, 0, 1, 0), s(0, 1, 0, 1)],
            WitnessKind::Su11 => vec![
                s(1, 1, 1, 1),
                s(1, 1, 0, 0),
                s(0, 0, 1, 1),
                s(0, 2, 2, 0),
                s(1, 0, 0, 1),
            ],
            WitnessKind::CauchySchwarz => vec![s(2, 2, 0, 0), s(0, 0, 2, 2), s(1, 1, 1, 1)],
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessKind::Hoa { l, m } => write!(f, "hoa({l},{m})"),
            WitnessKind::SumSqueeze { theta } => write!(f, "ssd(theta={theta})"),
            WitnessKind::Epr(form) => write!(f, "epr({})", form.tag()),
            other => f.write_str(other.tag()),
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim().to_ascii_lowercase();
    let bad = || format!("bad angle '{s}'");
    if let Some(rest) = s.strip_prefix("pi") {
        let rest = rest.trim();
        if rest.is_empty() {
            return Ok(PI);
        }
        let den: f64 = rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        return Ok(PI / den);
    }
    s.parse().map_err(|_| bad())
}

impl FromStr for WitnessKind {
    type Err = String;

    /// `hoa:L,M` (or `hoa:L:M`), `sx`, `sy`, `ssd:THETA` (radians, or `pi`,
    /// `pi/N`), `sv`, `epr[:literal|variance]`, `su11`, `cs`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim().to_ascii_lowercase(), Some(a.trim())),
            None => (s.to_ascii_lowercase(), None),
        };
        match (name.as_str(), arg) {
            ("hoa", Some(a)) => {
                let parts: Vec<&str> = a.split([',', ':']).map(str::trim).collect();
                let [l, m] = parts.as_slice() else {
                    return Err(format!("hoa needs two orders, got '{a}'"));
                };
                let l: u32 = l.parse().map_err(|_| format!("bad order '{l}'"))?;
                let m: u32 = m.parse().map_err(|_| format!("bad order '{m}'"))?;
                WitnessKind::hoa(l, m).map_err(|e| e.to_string())
            }
            ("sx", None) => Ok(WitnessKind::QuadX),
            ("sy", None) => Ok(WitnessKind::QuadY),
            ("ssd", a) => Ok(WitnessKind::SumSqueeze {
                theta: a.map(parse_angle).transpose()?.unwrap_or(0.0),
            }),
            ("sv", None) => Ok(WitnessKind::Sv),
            ("epr", a) => Ok(WitnessKind::Epr(
                a.map(str::parse).transpose()?.unwrap_or(EprForm::Literal),
            )),
            ("su11", None) => Ok(WitnessKind::Su11),
            ("cs", None) => Ok(WitnessKind::CauchySchwarz),
            _ => Err(format!("unknown witness '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessResult {
    pub kind: WitnessKind,
    pub value: f64,
    /// Magnitude of the terms combined into `value`; sets the zero threshold.
    pub scale: f64,
    pub nonclassical: bool,
    pub engine: EngineKind,
}

impl WitnessResult {
    fn new(kind: WitnessKind, t: Tracked, engine: EngineKind) -> Self {
        let scale = t.mag.max(1.0);
        Self {
            kind,
            value: t.v,
            scale,
            nonclassical: t.v < -STRICT_TOL * scale,
            engine,
        }
    }
}

/// A value with the running magnitude of everything summed into it.
#[derive(Debug, Clone, Copy)]
struct Tracked {
    v: f64,
    mag: f64,
}

fn tr(v: f64) -> Tracked {
    Tracked { v, mag: v.abs() }
}

impl Add for Tracked {
    type Output = Tracked;
    fn add(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v + o.v,
            mag: self.mag + o.mag,
        }
    }
}

impl Sub for Tracked {
    type Output = Tracked;
    fn sub(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v - o.v,
            mag: self.mag + o.mag,
        }
    }
}

impl Mul for Tracked {
    type Output = Tracked;
    fn mul(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v * o.v,
            mag: self.mag * o.mag,
        }
    }
}

impl Mul<Tracked> for f64 {
    type Output = Tracked;
    fn mul(self, o: Tracked) -> Tracked {
        Tracked {
            v: self * o.v,
            mag: self.abs() * o.mag,
        }
    }
}

impl Div for Tracked {
    type Output = Tracked;
    fn div(self, o: Tracked) -> Tracked {
        Tracked {
            v: self.v / o.v,
            mag: self.mag / o.v.abs(),
        }
    }
}

impl Tracked {
    fn sqrt(self) -> Tracked {
        Tracked {
            v: self.v.max(0.0).sqrt(),
            mag: self.mag.sqrt(),
        }
    }
}

/// Shorthand for the moments every witness reads.
struct Reader<'a, S: MomentSource + ?Sized> {
    src: &'a S,
}

impl<'a, S: MomentSource + ?Sized> Reader<'a, S> {
    fn m(&self, j: u32, k: u32, r: u32, s: u32) -> C64 {
        self.src.moment(MomentSpec::new(j, k, r, s))
    }

    fn re(&self, j: u32, k: u32, r: u32, s: u32) -> Tracked {
        tr(self.m(j, k, r, s).re)
    }

    fn n1(&self) -> Tracked {
        self.re(1, 1, 0, 0)
    }

    fn n2(&self) -> Tracked {
        self.re(0, 0, 1, 1)
    }

    /// `<a1 a1† a2 a2†> = <n1 n2> + <n1> + <n2> + 1`.
    fn antinormal_pair(&self) -> Tracked {
        self.re(1, 1, 1, 1) + self.n1() + self.n2() + tr(1.0)
    }
}

/// Two-mode higher-order antibunching,
/// `D_{l,m} = <a1†^{l+1} a1^{l+1} a2†^{m-1} a2^{m-1} + (1<->2)>
///          / <a1†^l a1^l a2†^m a2^m + (1<->2)> - 1`.
pub fn hoa<S: MomentSource + ?Sized>(src: &S, l: u32, m: u32) -> Result<WitnessResult, WitnessError> {
    let kind = WitnessKind::hoa(l, m)?;
    let q = Reader { src };
    let num = q.re(l + 1, l + 1, m - 1, m - 1) + q.re(m - 1, m - 1, l + 1, l + 1);
    let den = q.re(l, l, m, m) + q.re(m, m, l, l);
    if den.v <= DENOM_TOL {
        return Err(WitnessError::DegenerateDenominator {
            kind,
            denominator: den.v,
        });
    }
    Ok(WitnessResult::new(kind, num / den - tr(1.0), src.engine()))
}

/// Quadrature squeezing factors `(S_x, S_y)`.
pub fn quad_squeeze<S: MomentSource + ?Sized>(src: &S) -> (WitnessResult, WitnessResult) {
    let q = Reader { src };
    let a1sq = q.m(0, 2, 0, 0);
    let a2sq = q.m(0, 0, 0, 2);
    let a1a2d = q.m(0, 1, 1, 0);
    let a1a2 = q.m(0, 1, 0, 1);
    let mean = q.m(0, 1, 0, 0) + q.m(0, 0, 0, 1);
    let anti = q.n1() + q.n2() + tr(2.0);

    let sx = tr(a1sq.re) + tr(a2sq.re) + 2.0 * (tr(a1a2d.re) + tr(a1a2.re)) + anti
        - 2.0 * (tr(mean.re) * tr(mean.re))
        - tr(2.0);
    let sy = tr(0.0) - (tr(a1sq.re) + tr(a2sq.re) - 2.0 * (tr(a1a2d.re) - tr(a1a2.re))) + anti
        - 2.0 * (tr(mean.im) * tr(mean.im))
        - tr(2.0);
    (
        WitnessResult::new(WitnessKind::QuadX, sx, src.engine()),
        WitnessResult::new(WitnessKind::QuadY, sy, src.engine()),
    )
}

/// Degree of sum squeezing at angle `theta`.
pub fn sum_squeeze<S: MomentSource + ?Sized>(src: &S, theta: f64) -> Result<WitnessResult, WitnessError> {
    let kind = WitnessKind::SumSqueeze { theta };
    let q = Reader { src };
    let den = q.n1() + q.n2() + tr(1.0);
    if den.v <= DENOM_TOL {
        return Err(WitnessError::DegenerateDenominator {
            kind,
            denominator: den.v,
        });
    }
    let quartic = (C64::from_polar(1.0, -2.0 * theta) * q.m(0, 2, 0, 2)).re;
    let pair = (C64::from_polar(1.0, -theta) * q.m(0, 1, 0, 1)).re;
    let num = 2.0 * q.antinormal_pair() + 2.0 * tr(quartic) - 4.0 * (tr(pair) * tr(pair));
    Ok(WitnessResult::new(kind, num / den - tr(2.0), src.engine()))
}

/// Shchukin–Vogel: `<n1 - 1/2><n2 - 1/2> - <a1† a2†><a1 a2>`.
pub fn sv<S: MomentSource + ?Sized>(src: &S) -> WitnessResult {
    let q = Reader { src };
    let cross = (q.m(1, 0, 1, 0) * q.m(0, 1, 0, 1)).re;
    let v = (q.n1() - tr(0.5)) * (q.n2() - tr(0.5)) - tr(cross);
    WitnessResult::new(WitnessKind::Sv, v, src.engine())
}

/// EPR (Mancini) product `I1 I2 - 1`.
pub fn epr<S: MomentSource + ?Sized>(src: &S, form: EprForm) -> WitnessResult {
    let q = Reader { src };
    let a1sq = tr(q.m(0, 2, 0, 0).re);
    let a2sq = tr(q.m(0, 0, 0, 2).re);
    let a1a2 = tr(q.m(0, 1, 0, 1).re);
    let a1a2d = tr(q.m(0, 1, 1, 0).re);
    let a1 = q.m(0, 1, 0, 0);
    let a2 = q.m(0, 0, 0, 1);
    let sum_re = tr((a1 + a2).re);
    let diff_im = tr((a1 - a2).im);
    let (n1, n2) = (q.n1(), q.n2());

    let common1 = a1sq + a2sq + 2.0 * a1a2 + 2.0 * a1a2d;
    let common2 = tr(0.0) - a1sq - a2sq + 2.0 * a1a2 - 2.0 * a1a2d;
    let (i1, i2) = match form {
        // <a1 a1† + a2† a2> in I1 but <a1 a1† + a2 a2†> in I2, squared means added
        EprForm::Literal => (
            common1 + (n1 + tr(1.0) + n2) + 2.0 * (sum_re * sum_re) - tr(1.0),
            common2 + (n1 + n2 + tr(2.0)) + 2.0 * (diff_im * diff_im) - tr(1.0),
        ),
        EprForm::VarianceConsistent => (
            common1 + (n1 + n2 + tr(2.0)) - 2.0 * (sum_re * sum_re) - tr(1.0),
            common2 + (n1 + n2 + tr(2.0)) - 2.0 * (diff_im * diff_im) - tr(1.0),
        ),
    };
    WitnessResult::new(WitnessKind::Epr(form), i1 * i2 - tr(1.0), src.engine())
}

/// SU(1,1) uncertainty criterion `S_U`; negative values violate the
/// inequality.
pub fn su11<S: MomentSource + ?Sized>(src: &S) -> WitnessResult {
    let q = Reader { src };
    let (n1, n2) = (q.n1(), q.n2());
    let base = 2.0 * q.antinormal_pair() - (n1 + tr(1.0)) - (n2 + tr(1.0));
    let swap = tr(q.m(0, 2, 2, 0).re);
    let hop = q.m(1, 0, 0, 1);
    let b1 = base + 2.0 * swap - 4.0 * (tr(hop.re) * tr(hop.re));
    let b2 = base - 2.0 * swap - 4.0 * (tr(hop.im) * tr(hop.im));
    let imbalance = (n1 + tr(1.0)) - (n2 + tr(1.0));
    WitnessResult::new(WitnessKind::Su11, b1 * b2 - imbalance * imbalance, src.engine())
}

/// `sqrt(<a1†² a1²><a2†² a2²>) - |<a1† a1 a2† a2>|`.
pub fn cauchy_schwarz<S: MomentSource + ?Sized>(src: &S) -> WitnessResult {
    let q = Reader { src };
    let geo = (q.re(2, 2, 0, 0) * q.re(0, 0, 2, 2)).sqrt();
    let v = geo - tr(q.m(1, 1, 1, 1).norm());
    WitnessResult::new(WitnessKind::CauchySchwarz, v, src.engine())
}

/// Evaluate any witness kind.
pub fn evaluate<S: MomentSource + ?Sized>(kind: WitnessKind, src: &S) -> Result<WitnessResult, WitnessError> {
    match kind {
        WitnessKind::Hoa { l, m } => hoa(src, l, m),
        WitnessKind::QuadX => Ok(quad_squeeze(src).0),
        WitnessKind::QuadY => Ok(quad_squeeze(src).1),
        WitnessKind::SumSqueeze { theta } => sum_squeeze(src, theta),
        WitnessKind::Sv => Ok(sv(src)),
        WitnessKind::Epr(form) => Ok(epr(src, form)),
        WitnessKind::Su11 => Ok(su11(src)),
        WitnessKind::CauchySchwarz => Ok(cauchy_schwarz(src)),
    }
}
