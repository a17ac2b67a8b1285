//! Closed-form moments of fixed-total-photon states and the two moment
//! engines the witnesses draw from.
//!
//! The single-mode closed forms are evaluated term by term as literal sums,
//! including their off-diagonal values, which are nonzero even though the
//! total-photon-number selection rule forces the true expectation to zero.
//! [`compare_engines`] quantifies that difference against the ladder oracle.

use num_complex::Complex64 as C64;

use crate::fock::{log_factorial, log_falling, moment_oracle, FixedTotalState, FockError, MomentSpec, TwoModeState};

/// Which moment evaluation backs a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    /// Literal closed-form sums. Single-mode moments use the per-mode
    /// sums verbatim; number-changing two-mode moments are products of the
    /// per-mode sums; number-conserving two-mode moments use the exact
    /// closed form [`cross_moment_closed`].
    PaperLiteral,
    /// Literal ladder-operator application on the amplitude grid.
    Oracle,
}

impl EngineKind {
    pub const ALL: [EngineKind; 2] = [EngineKind::PaperLiteral, EngineKind::Oracle];

    pub fn tag(&self) -> &'static str {
        match self {
            EngineKind::PaperLiteral => "paper",
            EngineKind::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" | "paperliteral" | "paper-literal" | "literal" => Ok(EngineKind::PaperLiteral),
            "oracle" => Ok(EngineKind::Oracle),
            other => Err(format!("unknown engine '{other}'")),
        }
    }
}

/// True when the closed-form sum for `<a†^k a^l>` on a total of `m` photons
/// has no terms.
pub fn paper_sum_is_empty(m: usize, k: u32, l: u32) -> bool {
    k.max(l) as usize > m
}

/// `<a1†^k a1^l>` from the mode-1 closed form:
/// `sum_n C_n C_{n-l+k} sqrt(n! (n-l+k)!) / (n-l)!`, summed over
/// `n = l ..= M - max(0, k-l)`. Returns 0 when the range is empty.
pub fn moment_mode1_paper(state: &FixedTotalState, k: u32, l: u32) -> C64 {
    let m = state.total_photons() as i64;
    let (k, l) = (k as i64, l as i64);
    let hi = m - (k - l).max(0);
    (l..=hi)
        .map(|n| {
            let shifted = n - l + k;
            let w =
                0.5 * (log_factorial(n as usize) + log_factorial(shifted as usize)) - log_factorial((n - l) as usize);
            state.amplitude(shifted).conj() * state.amplitude(n) * w.exp()
        })
        .sum()
}

/// `<a2†^k a2^l>` from the mode-2 closed form:
/// `sum_n C_n C_{n+l-k} sqrt((M-n)! (M-n-l+k)!) / (M-n-l)!`, summed over
/// `n = max(0, k-l) ..= M - l`. Returns 0 when the range is empty.
pub fn moment_mode2_paper(state: &FixedTotalState, k: u32, l: u32) -> C64 {
    let m = state.total_photons() as i64;
    let (k, l) = (k as i64, l as i64);
    let lo = (k - l).max(0);
    (lo..=m - l)
        .map(|n| {
            let shifted = n + l - k;
            let w = 0.5 * (log_factorial((m - n) as usize) + log_factorial((m - shifted) as usize))
                - log_factorial((m - n - l) as usize);
            state.amplitude(shifted).conj() * state.amplitude(n) * w.exp()
        })
        .sum()
}

/// Exact `<a1†^j a1^k a2†^r a2^s>` on a fixed-total state.
///
/// Number-changing specs are exactly zero. Otherwise, with `d = k - j`, the
/// ket `|n, M-n>` only overlaps the bra `|n-d, M-n+d>` and the sum collapses
/// to a single index.
pub fn cross_moment_closed(state: &FixedTotalState, spec: MomentSpec) -> C64 {
    if !spec.is_number_conserving() {
        return C64::default();
    }
    let m = state.total_photons();
    let d = spec.k as i64 - spec.j as i64;
    (0..=m)
        .filter_map(|n| {
            let bra = n as i64 - d;
            if bra < 0 || bra > m as i64 {
                return None;
            }
            let bra = bra as usize;
            let w = log_falling(n, spec.k as usize)?
                + log_falling(m - n, spec.s as usize)?
                + log_falling(bra, spec.j as usize)?
                + log_falling(m - bra, spec.r as usize)?;
            Some(state.amplitudes()[bra].conj() * state.amplitudes()[n] * (0.5 * w).exp())
        })
        .sum()
}

/// A source of normally ordered moments for one state.
pub trait MomentSource {
    fn moment(&self, spec: MomentSpec) -> C64;
    fn engine(&self) -> EngineKind;
}

/// Closed-form engine on a fixed-total state.
#[derive(Debug, Clone)]
pub struct PaperEngine<'a> {
    state: &'a FixedTotalState,
}

impl<'a> PaperEngine<'a> {
    pub fn new(state: &'a FixedTotalState) -> Self {
        Self { state }
    }
}

impl MomentSource for PaperEngine<'_> {
    fn moment(&self, spec: MomentSpec) -> C64 {
        let MomentSpec { j, k, r, s } = spec;
        if r == 0 && s == 0 {
            moment_mode1_paper(self.state, j, k)
        } else if j == 0 && k == 0 {
            moment_mode2_paper(self.state, r, s)
        } else if spec.is_number_conserving() {
            cross_moment_closed(self.state, spec)
        } else {
            moment_mode1_paper(self.state, j, k) * moment_mode2_paper(self.state, r, s)
        }
    }

    fn engine(&self) -> EngineKind {
        EngineKind::PaperLiteral
    }
}

/// Ladder-oracle engine on any grid state.
#[derive(Debug, Clone)]
pub struct OracleEngine {
    state: TwoModeState,
}

impl OracleEngine {
    pub fn new(state: TwoModeState) -> Self {
        Self { state }
    }

    pub fn from_fixed(state: &FixedTotalState) -> Self {
        Self::new(state.to_two_mode())
    }
}

impl MomentSource for OracleEngine {
    fn moment(&self, spec: MomentSpec) -> C64 {
        moment_oracle(&self.state, spec)
    }

    fn engine(&self) -> EngineKind {
        EngineKind::Oracle
    }
}

/// Either engine, owning what it needs.
#[derive(Debug, Clone)]
pub enum Engine {
    Paper(FixedTotalState),
    Oracle(OracleEngine),
}

impl Engine {
    pub fn for_fixed(state: &FixedTotalState, kind: EngineKind) -> Self {
        match kind {
            EngineKind::PaperLiteral => Engine::Paper(state.clone()),
            EngineKind::Oracle => Engine::Oracle(OracleEngine::from_fixed(state)),
        }
    }

    /// The closed-form engine needs the state to sit on a single
    /// total-photon-number shell.
    pub fn for_grid(state: &TwoModeState, kind: EngineKind) -> Result<Self, FockError> {
        match kind {
            EngineKind::PaperLiteral => Ok(Engine::Paper(FixedTotalState::try_from(state)?)),
            EngineKind::Oracle => Ok(Engine::Oracle(OracleEngine::new(state.clone()))),
        }
    }
}

impl MomentSource for Engine {
    fn moment(&self, spec: MomentSpec) -> C64 {
        match self {
            Engine::Paper(st) => PaperEngine::new(st).moment(spec),
            Engine::Oracle(o) => o.moment(spec),
        }
    }

    fn engine(&self) -> EngineKind {
        match self {
            Engine::Paper(_) => EngineKind::PaperLiteral,
            Engine::Oracle(_) => EngineKind::Oracle,
        }
    }
}

/// One moment evaluated by both engines.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub spec: MomentSpec,
    pub paper_value: C64,
    pub oracle_value: C64,
    pub abs_discrepancy: f64,
    /// A closed-form sum used for `paper_value` had no terms.
    pub degenerate: bool,
}

/// Evaluate every spec with both engines.
pub fn compare_engines(state: &FixedTotalState, specs: &[MomentSpec]) -> Vec<MomentReport> {
    if specs.is_empty() {
        return Vec::new();
    }
    let paper = PaperEngine::new(state);
    let oracle = OracleEngine::from_fixed(state);
    let m = state.total_photons();
    specs
        .iter()
        .map(|&spec| {
            let paper_value = paper.moment(spec);
            let oracle_value = oracle.moment(spec);
            let degenerate = (spec.r == 0 && spec.s == 0 && paper_sum_is_empty(m, spec.j, spec.k))
                || (spec.j == 0 && spec.k == 0 && paper_sum_is_empty(m, spec.r, spec.s))
                || (!spec.is_single_mode()
                    && !spec.is_number_conserving()
                    && (paper_sum_is_empty(m, spec.j, spec.k) || paper_sum_is_empty(m, spec.r, spec.s)));
            MomentReport {
                spec,
                paper_value,
                oracle_value,
                abs_discrepancy: (paper_value - oracle_value).norm(),
                degenerate,
            }
        })
        .collect()
}

/// Every single-mode spec `(j,k,0,0)` and `(0,0,r,s)` with exponents up to
/// `max_order`, the identity excluded.
pub fn single_mode_specs(max_order: u32) -> Vec<MomentSpec> {
    let mut out = Vec::new();
    for a in 0..=max_order {
        for b in 0..=max_order {
            if a == 0 && b == 0 {
                continue;
            }
            out.push(MomentSpec::mode1(a, b));
        }
    }
    for a in 0..=max_order {
        for b in 0..=max_order {
            if a == 0 && b == 0 {
                continue;
            }
            out.push(MomentSpec::mode2(a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::binomial_state;

    fn close(a: C64, b: f64, tol: f64) -> bool {
        (a - C64::new(b, 0.0)).norm() <= tol
    }

    #[test]
    fn mode1_examples() {
        let one = FixedTotalState::from_real(&[0.0, 1.0]).unwrap();
        assert!(close(moment_mode1_paper(&one, 1, 1), 1.0, 1e-15));

        let b = binomial_state(2, 0.5).unwrap();
        assert!(close(moment_mode1_paper(&b, 1, 1), 1.0, 1e-14));
        // (1/sqrt2)(1/2) + (1/2)(1/sqrt2)sqrt2
        let want = 0.5 * std::f64::consts::FRAC_1_SQRT_2 + 0.5;
        assert!(close(moment_mode1_paper(&b, 0, 1), want, 1e-14));
        assert!((want - 0.8536).abs() < 1e-4);
    }

    #[test]
    fn mode2_examples() {
        let one = FixedTotalState::from_real(&[1.0, 0.0]).unwrap();
        assert!(close(moment_mode2_paper(&one, 1, 1), 1.0, 1e-15));

        let b = binomial_state(2, 0.5).unwrap();
        assert!(close(moment_mode2_paper(&b, 1, 1), 1.0, 1e-14));
        assert!(close(moment_mode2_paper(&b, 2, 2), 0.5, 1e-14));
    }

    #[test]
    fn empty_sums_are_zero() {
        let b = binomial_state(2, 0.5).unwrap();
        assert_eq!(moment_mode1_paper(&b, 3, 3), C64::default());
        assert_eq!(moment_mode2_paper(&b, 0, 5), C64::default());
        assert!(paper_sum_is_empty(2, 3, 0));
        assert!(!paper_sum_is_empty(2, 2, 1));
    }

    #[test]
    fn cross_examples() {
        let b = binomial_state(4, 0.3).unwrap();
        assert_eq!(cross_moment_closed(&b, MomentSpec::new(0, 1, 0, 1)), C64::default());

        let pair = FixedTotalState::from_real(&[0.0, 1.0, 0.0]).unwrap();
        assert!(close(
            cross_moment_closed(&pair, MomentSpec::new(0, 1, 1, 0)),
            0.0,
            1e-15
        ));

        let b1 = binomial_state(1, 0.5).unwrap();
        assert!(close(cross_moment_closed(&b1, MomentSpec::new(0, 1, 1, 0)), 0.5, 1e-15));
    }

    #[test]
    fn compare_reports_the_selection_rule_gap() {
        let b = binomial_state(2, 0.5).unwrap();
        let rep = compare_engines(&b, &[MomentSpec::mode1(0, 1), MomentSpec::mode1(1, 1)]);
        assert!((rep[0].paper_value.re - 0.853_553_390_593_273_8).abs() < 1e-14);
        assert_eq!(rep[0].oracle_value, C64::default());
        assert!((rep[0].abs_discrepancy - rep[0].paper_value.norm()).abs() < 1e-15);
        assert!(rep[1].abs_discrepancy <= 1e-9);
        assert!(compare_engines(&b, &[]).is_empty());
    }

    #[test]
    fn engine_for_grid() {
        let grid = crate::states::fock_pair(1, 1);
        let e = Engine::for_grid(&grid, EngineKind::PaperLiteral).unwrap();
        assert!(close(e.moment(MomentSpec::new(1, 1, 1, 1)), 1.0, 1e-15));
        let coh = crate::states::coherent_product(C64::new(0.5, 0.0), C64::new(0.5, 0.0), 10).unwrap();
        assert!(Engine::for_grid(&coh, EngineKind::PaperLiteral).is_err());
        assert!(Engine::for_grid(&coh, EngineKind::Oracle).is_ok());
    }

    #[test]
    fn single_mode_spec_list() {
        let specs = single_mode_specs(2);
        assert_eq!(specs.len(), 16);
        assert!(specs.iter().all(|s| s.is_single_mode()));
    }
}
