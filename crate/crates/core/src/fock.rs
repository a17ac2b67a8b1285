//! Finite two-mode Fock-space states and a ladder-operator oracle for
//! normally ordered moments.
//!
//! States are dense amplitude grids `C[n1, n2]` on a truncated lattice
//! `0 <= n1 <= N1`, `0 <= n2 <= N2`. Moments are computed by literally
//! applying annihilation operators to the bra and ket sides and taking the
//! overlap, so no operator matrices are ever built.

use std::sync::OnceLock;

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Tolerance on `|<psi|psi> - 1|` for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("creation on mode {mode} would push amplitude past the fixed cutoff {cutoff}")]
    CutoffOverflow { mode: Mode, cutoff: usize },
    #[error("amplitude grid contains a non-finite entry")]
    NonFinite,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("state is not normalized: <psi|psi> = {0}")]
    NotNormalized(f64),
    #[error("state has support on more than one total photon number")]
    NotFixedTotal,
    #[error("amplitude vector is empty")]
    Empty,
}

// ---------------------------------------------------------------------------
// log factorial

const LN_TABLE_LEN: usize = 1024;

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_TABLE_LEN);
        t.push(0.0);
        let mut acc = 0.0_f64;
        for k in 1..LN_TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// ln(n!).
///
/// Table lookup below 1024, Stirling series with four correction terms above
/// (truncation error < 1e-19 there).
pub fn log_factorial(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n < LN_TABLE_LEN {
        return ln_table()[n];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

/// ln of the falling factorial n (n-1) ... (n-k+1); `None` when k > n
/// (the product contains a zero factor).
pub(crate) fn log_falling(n: usize, k: usize) -> Option<f64> {
    (k <= n).then(|| log_factorial(n) - log_factorial(n - k))
}

// ---------------------------------------------------------------------------
// operators

/// Which of the two modes an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::One => write!(f, "1"),
            Mode::Two => write!(f, "2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// What `create` does when the target mode is already populated at its
/// cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffPolicy {
    /// Grow the grid by one along the target mode on every creation.
    #[default]
    Extend,
    /// Keep the grid; fail with `CutoffOverflow` if amplitude would be lost.
    Fixed,
}

/// Exponents of the normally ordered product `a1†^j a1^k a2†^r a2^s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentSpec {
    pub j: u32,
    pub k: u32,
    pub r: u32,
    pub s: u32,
}

impl MomentSpec {
    pub const fn new(j: u32, k: u32, r: u32, s: u32) -> Self {
        Self { j, k, r, s }
    }

    /// `<a1†^j a1^k>`.
    pub const fn mode1(j: u32, k: u32) -> Self {
        Self::new(j, k, 0, 0)
    }

    /// `<a2†^r a2^s>`.
    pub const fn mode2(r: u32, s: u32) -> Self {
        Self::new(0, 0, r, s)
    }

    /// Net change in total photon number, `(j - k) + (r - s)`.
    pub fn imbalance(&self) -> i64 {
        (self.j as i64 - self.k as i64) + (self.r as i64 - self.s as i64)
    }

    pub fn is_number_conserving(&self) -> bool {
        self.imbalance() == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.j == self.k && self.r == self.s
    }

    /// True if only one mode carries operators (or the spec is the identity).
    pub fn is_single_mode(&self) -> bool {
        (self.r == 0 && self.s == 0) || (self.j == 0 && self.k == 0)
    }

    /// The adjoint operator's spec: `(j,k,r,s) -> (k,j,s,r)`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.k, self.j, self.s, self.r)
    }
}

impl std::fmt::Display for MomentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.j, self.k, self.r, self.s)
    }
}

// ---------------------------------------------------------------------------
// states

/// A pure two-mode state on a truncated Fock lattice.
///
/// Constructors check that every amplitude is finite; normalization is only
/// enforced by [`TwoModeState::normalized`] and the state-family
/// constructors, since ladder operators return unnormalized vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amps: Array2<C64>,
}

impl TwoModeState {
    /// Wrap an amplitude grid indexed `[n1, n2]`.
    pub fn from_grid(amps: Array2<C64>) -> Result<Self, FockError> {
        if amps.is_empty() {
            return Err(FockError::Empty);
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(FockError::NonFinite);
        }
        Ok(Self { amps })
    }

    /// All-zero grid with the given cutoffs.
    pub fn zeros(cutoff1: usize, cutoff2: usize) -> Self {
        Self {
            amps: Array2::zeros((cutoff1 + 1, cutoff2 + 1)),
        }
    }

    /// `|n1>|n2>` on the smallest grid that holds it.
    pub fn basis(n1: usize, n2: usize) -> Self {
        let mut st = Self::zeros(n1, n2);
        st.amps[[n1, n2]] = C64::new(1.0, 0.0);
        st
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        let (a, b) = self.amps.dim();
        (a - 1, b - 1)
    }

    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amps
    }

    /// Amplitude of `|n1>|n2>`; zero outside the grid.
    pub fn amplitude(&self, n1: usize, n2: usize) -> C64 {
        self.amps.get([n1, n2]).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(mut self) -> Result<Self, FockError> {
        let n = self.norm_sqr();
        if n == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        self.amps.mapv_inplace(|c| c * scale);
        Ok(self)
    }

    /// Apply a single ladder operator. The result is not renormalized.
    pub fn apply_ladder(&self, mode: Mode, kind: Ladder, policy: CutoffPolicy) -> Result<Self, FockError> {
        let (c1, c2) = self.cutoffs();
        match kind {
            Ladder::Annihilate => {
                // a|n> = sqrt(n)|n-1>; grid shape is unchanged
                let mut out = Array2::zeros(self.amps.dim());
                match mode {
                    Mode::One => {
                        for n in 1..=c1 {
                            let w = (n as f64).sqrt();
                            let src = self.amps.slice(s![n, ..]);
                            out.slice_mut(s![n - 1, ..]).assign(&src.mapv(|c| c * w));
                        }
                    }
                    Mode::Two => {
                        for n in 1..=c2 {
                            let w = (n as f64).sqrt();
                            let src = self.amps.slice(s![.., n]);
                            out.slice_mut(s![.., n - 1]).assign(&src.mapv(|c| c * w));
                        }
                    }
                }
                Ok(Self { amps: out })
            }
            Ladder::Create => {
                let (cutoff, edge_occupied) = match mode {
                    Mode::One => (c1, self.amps.slice(s![c1, ..]).iter().any(|c| *c != C64::default())),
                    Mode::Two => (c2, self.amps.slice(s![.., c2]).iter().any(|c| *c != C64::default())),
                };
                let (n1, n2) = match (policy, mode) {
                    (CutoffPolicy::Extend, Mode::One) => (c1 + 1, c2),
                    (CutoffPolicy::Extend, Mode::Two) => (c1, c2 + 1),
                    (CutoffPolicy::Fixed, _) => {
                        if edge_occupied {
                            return Err(FockError::CutoffOverflow { mode, cutoff });
                        }
                        (c1, c2)
                    }
                };
                // a†|n> = sqrt(n+1)|n+1>
                let mut out = Array2::zeros((n1 + 1, n2 + 1));
                match mode {
                    Mode::One => {
                        for n in 0..c1.min(n1) {
                            let w = ((n + 1) as f64).sqrt();
                            let src = self.amps.slice(s![n, ..]);
                            out.slice_mut(s![n + 1, ..c2 + 1]).assign(&src.mapv(|c| c * w));
                        }
                        if policy == CutoffPolicy::Extend {
                            let w = ((c1 + 1) as f64).sqrt();
                            let src = self.amps.slice(s![c1, ..]);
                            out.slice_mut(s![c1 + 1, ..c2 + 1]).assign(&src.mapv(|c| c * w));
                        }
                    }
                    Mode::Two => {
                        for n in 0..c2.min(n2) {
                            let w = ((n + 1) as f64).sqrt();
                            let src = self.amps.slice(s![.., n]);
                            out.slice_mut(s![..c1 + 1, n + 1]).assign(&src.mapv(|c| c * w));
                        }
                        if policy == CutoffPolicy::Extend {
                            let w = ((c2 + 1) as f64).sqrt();
                            let src = self.amps.slice(s![.., c2]);
                            out.slice_mut(s![..c1 + 1, c2 + 1]).assign(&src.mapv(|c| c * w));
                        }
                    }
                }
                Ok(Self { amps: out })
            }
        }
    }

    /// `a1^k1 a2^k2 |psi>` (unnormalized).
    pub fn lowered(&self, k1: u32, k2: u32) -> Self {
        let mut st = self.clone();
        for _ in 0..k1 {
            st = st
                .apply_ladder(Mode::One, Ladder::Annihilate, CutoffPolicy::Fixed)
                .expect("annihilation never overflows");
        }
        for _ in 0..k2 {
            st = st
                .apply_ladder(Mode::Two, Ladder::Annihilate, CutoffPolicy::Fixed)
                .expect("annihilation never overflows");
        }
        st
    }
}

/// `<bra|ket>`, antilinear in `bra`. Grids of different shape are compared on
/// their overlap; entries outside a grid are zero.
pub fn inner_product(bra: &TwoModeState, ket: &TwoModeState) -> C64 {
    let (b1, b2) = bra.cutoffs();
    let (k1, k2) = ket.cutoffs();
    let (n1, n2) = (b1.min(k1), b2.min(k2));
    let lhs = bra.amps.slice(s![..=n1, ..=n2]);
    let rhs = ket.amps.slice(s![..=n1, ..=n2]);
    lhs.iter().zip(rhs.iter()).map(|(b, k)| b.conj() * k).sum()
}

/// `<psi| a1†^j a1^k a2†^r a2^s |psi>` by explicit ladder application.
///
/// The daggered factors are moved onto the bra, so this is
/// `<a1^j a2^r psi | a1^k a2^s psi>`. Only annihilators are ever applied,
/// so the cutoff never matters.
pub fn moment_oracle(state: &TwoModeState, spec: MomentSpec) -> C64 {
    let ket = state.lowered(spec.k, spec.s);
    if spec.j == spec.k && spec.r == spec.s {
        return C64::new(ket.norm_sqr(), 0.0);
    }
    let bra = state.lowered(spec.j, spec.r);
    inner_product(&bra, &ket)
}

/// A two-mode state with a fixed total photon number M:
/// `sum_n C_n |n>|M-n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedTotalState {
    amps: Vec<C64>,
}

impl FixedTotalState {
    /// Amplitudes `C_0..=C_M`; must be finite and normalized to [`NORM_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self, FockError> {
        let st = Self::new_unchecked_norm(amps)?;
        let n = st.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(FockError::NotNormalized(n));
        }
        Ok(st)
    }

    /// Same as [`FixedTotalState::new`] but rescales to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self, FockError> {
        let mut st = Self::new_unchecked_norm(amps)?;
        let n = st.norm_sqr();
        if n == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        let scale = 1.0 / n.sqrt();
        st.amps.iter_mut().for_each(|c| *c *= scale);
        Ok(st)
    }

    /// Real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self, FockError> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub(crate) fn new_unchecked_norm(amps: Vec<C64>) -> Result<Self, FockError> {
        if amps.is_empty() {
            return Err(FockError::Empty);
        }
        if amps.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(FockError::NonFinite);
        }
        Ok(Self { amps })
    }

    pub fn total_photons(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// `C_n`, zero outside `0..=M`.
    pub fn amplitude(&self, n: i64) -> C64 {
        if n < 0 {
            return C64::default();
        }
        self.amps.get(n as usize).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Embed on the `(M+1) x (M+1)` grid: entry `(n, M-n) = C_n`.
    pub fn to_two_mode(&self) -> TwoModeState {
        let m = self.total_photons();
        let mut st = TwoModeState::zeros(m, m);
        for (n, c) in self.amps.iter().enumerate() {
            st.amps[[n, m - n]] = *c;
        }
        st
    }
}

impl TryFrom<&TwoModeState> for FixedTotalState {
    type Error = FockError;

    /// Succeeds when all nonzero amplitudes lie on one anti-diagonal
    /// `n1 + n2 = M`.
    fn try_from(st: &TwoModeState) -> Result<Self, FockError> {
        let mut total = None;
        for ((n1, n2), c) in st.amps.indexed_iter() {
            if *c != C64::default() {
                match total {
                    None => total = Some(n1 + n2),
                    Some(t) if t == n1 + n2 => {}
                    Some(_) => return Err(FockError::NotFixedTotal),
                }
            }
        }
        let m = total.ok_or(FockError::ZeroNorm)?;
        let amps = (0..=m).map(|n| st.amplitude(n, m - n)).collect();
        FixedTotalState::new(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn log_factorial_small() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let want = 3_628_800f64.ln();
        assert!((log_factorial(10) - want).abs() <= 1e-12 * want);
        assert!((log_factorial(10) - 15.104_412_573_075_516).abs() < 1e-12);
    }

    #[test]
    fn log_factorial_table_meets_stirling() {
        // continuity across the table boundary
        let below = log_factorial(LN_TABLE_LEN - 1) + (LN_TABLE_LEN as f64).ln();
        let above = log_factorial(LN_TABLE_LEN);
        assert!((below - above).abs() <= 1e-13 * above);
    }

    #[test]
    fn annihilate_vacuum_is_zero() {
        let out = TwoModeState::basis(0, 0)
            .apply_ladder(Mode::One, Ladder::Annihilate, CutoffPolicy::Extend)
            .unwrap();
        assert_eq!(out.norm_sqr(), 0.0);
    }

    #[test]
    fn create_mode2_on_vacuum() {
        let out = TwoModeState::basis(0, 0)
            .apply_ladder(Mode::Two, Ladder::Create, CutoffPolicy::Extend)
            .unwrap();
        assert_eq!(out.cutoffs(), (0, 1));
        assert_eq!(out.amplitude(0, 1), c(1.0));
        assert_eq!(out.norm_sqr(), 1.0);
    }

    #[test]
    fn annihilate_two_photons() {
        let out = TwoModeState::basis(2, 0)
            .apply_ladder(Mode::One, Ladder::Annihilate, CutoffPolicy::Extend)
            .unwrap();
        assert!((out.amplitude(1, 0) - c(2f64.sqrt())).norm() < 1e-15);
        assert!((out.norm_sqr() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_cutoff_overflow() {
        let err = TwoModeState::basis(2, 0)
            .apply_ladder(Mode::One, Ladder::Create, CutoffPolicy::Fixed)
            .unwrap_err();
        assert_eq!(
            err,
            FockError::CutoffOverflow {
                mode: Mode::One,
                cutoff: 2
            }
        );

        // room below the edge: fixed mode keeps the shape
        let st = TwoModeState::from_grid({
            let mut g = Array2::zeros((4, 2));
            g[[1, 0]] = c(1.0);
            g
        })
        .unwrap();
        let out = st.apply_ladder(Mode::One, Ladder::Create, CutoffPolicy::Fixed).unwrap();
        assert_eq!(out.cutoffs(), (3, 1));
        assert!((out.amplitude(2, 0) - c(2f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn inner_products_of_basis_kets() {
        let a = TwoModeState::basis(1, 1);
        assert_eq!(inner_product(&a, &a), c(1.0));
        let x = TwoModeState::basis(1, 0);
        let y = TwoModeState::basis(0, 1);
        assert_eq!(inner_product(&x, &y), c(0.0));
    }

    #[test]
    fn oracle_examples() {
        let st = TwoModeState::basis(1, 1);
        assert_eq!(moment_oracle(&st, MomentSpec::mode1(1, 1)), c(1.0));
        let st = TwoModeState::basis(2, 0);
        assert!((moment_oracle(&st, MomentSpec::mode1(2, 2)) - c(2.0)).norm() < 1e-14);
    }

    #[test]
    fn fixed_total_embedding() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let st = FixedTotalState::from_real(&[h, 0.0, h]).unwrap();
        let grid = st.to_two_mode();
        assert_eq!(grid.cutoffs(), (2, 2));
        assert_eq!(grid.amplitude(0, 2), c(h));
        assert_eq!(grid.amplitude(2, 0), c(h));
        assert_eq!(grid.amplitude(1, 1), c(0.0));
        let back = FixedTotalState::try_from(&grid).unwrap();
        assert_eq!(back, st);
    }

    #[test]
    fn rejects_bad_amplitudes() {
        assert_eq!(FixedTotalState::from_real(&[]), Err(FockError::Empty));
        assert_eq!(FixedTotalState::from_real(&[f64::NAN]), Err(FockError::NonFinite));
        assert!(matches!(
            FixedTotalState::from_real(&[1.0, 1.0]),
            Err(FockError::NotNormalized(_))
        ));
        assert!(TwoModeState::zeros(1, 1).normalized().is_err());
    }

    #[test]
    fn spec_helpers() {
        let sp = MomentSpec::new(2, 0, 0, 2);
        assert_eq!(sp.imbalance(), 0);
        assert!(!sp.is_single_mode());
        assert_eq!(sp.adjoint(), MomentSpec::new(0, 2, 2, 0));
        assert_eq!(MomentSpec::mode1(0, 1).imbalance(), -1);
    }
}
