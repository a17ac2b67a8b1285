//! State families: the two-mode generalized binomial state, its binomial
//! reduction, Fock pairs and truncated coherent products.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{log_factorial, FixedTotalState, FockError, TwoModeState};

/// Largest allowed `|sum C_n^2 - 1|` for a generalized binomial state.
pub const ABEL_TOL: f64 = 1e-8;

/// Slack on the `0 <= p + n q <= 1 + M q` bounds, so that grid points such
/// as `p = 0.1, q = -0.01, M = 10` are not rejected over a rounding error.
const BOUND_SLACK: f64 = 1e-12;

/// Largest allowed norm deficit before renormalizing a truncated coherent
/// state.
pub const TRUNCATION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("coefficients do not form a distribution: sum C_n^2 = {0}")]
    NormalizationAnomaly(f64),
    #[error("cutoff {cutoff} too small: norm deficit {deficit:e}")]
    TruncationInadequate { cutoff: usize, deficit: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Parameters of the generalized binomial state: total photon number `m`,
/// probability `p` and the deformation ("cavity factor") `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgbsParams {
    pub m: usize,
    pub p: f64,
    pub q: f64,
}

impl NgbsParams {
    pub fn new(m: usize, p: f64, q: f64) -> Self {
        Self { m, p, q }
    }

    /// Every bracketed factor of the coefficient formula must be a real
    /// non-negative number.
    pub fn validate(&self) -> Result<(), StateError> {
        let Self { m, p, q } = *self;
        if !p.is_finite() || !q.is_finite() {
            return Err(StateError::InvalidParams(format!("non-finite p={p} or q={q}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(StateError::InvalidParams(format!("p={p} outside [0,1]")));
        }
        let denom = 1.0 + m as f64 * q;
        if denom <= 0.0 {
            return Err(StateError::InvalidParams(format!("1 + Mq = {denom} <= 0")));
        }
        for n in 0..=m {
            let x = p + n as f64 * q;
            if x < -BOUND_SLACK || x > denom + BOUND_SLACK {
                return Err(StateError::InvalidParams(format!(
                    "p + nq = {x} outside [0, 1 + Mq = {denom}] at n={n}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

/// `x^e` in log space, `None` when the power is exactly zero. `0^0 = 1`.
fn ln_pow(x: f64, e: usize) -> Option<f64> {
    if e == 0 {
        Some(0.0)
    } else if x <= 0.0 {
        None
    } else {
        Some(e as f64 * x.ln())
    }
}

/// Squared coefficient `C_n^2`, assembled in log space.
fn ngbs_weight(params: &NgbsParams, n: usize) -> f64 {
    let NgbsParams { m, p, q } = *params;
    let denom = 1.0 + m as f64 * q;
    let x = ((p + n as f64 * q) / denom).clamp(0.0, 1.0);
    let tail = ln_pow(1.0 - x, m - n);
    if n == 0 {
        // p/(1+Mq) * (p/(1+Mq))^{-1} cancels to 1, defined by continuity at p = 0
        return tail.map_or(0.0, f64::exp);
    }
    let lead = p / denom;
    if lead <= 0.0 {
        return 0.0;
    }
    let ln_binom = log_factorial(m) - log_factorial(n) - log_factorial(m - n);
    match (ln_pow(x, n - 1), tail) {
        (Some(a), Some(b)) => (lead.ln() + ln_binom + a + b).exp(),
        _ => 0.0,
    }
}

/// The two-mode generalized binomial state `sum_n C_n |n>|M-n>`.
///
/// The coefficients are a generalized (Abel) binomial distribution, so the
/// state comes out normalized without rescaling; a deviation beyond
/// [`ABEL_TOL`] is reported as [`StateError::NormalizationAnomaly`].
pub fn ngbs(params: NgbsParams) -> Result<FixedTotalState, StateError> {
    params.validate()?;
    let weights: Vec<f64> = (0..=params.m).map(|n| ngbs_weight(&params, n)).collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > ABEL_TOL {
        return Err(StateError::NormalizationAnomaly(total));
    }
    let amps = weights.into_iter().map(|w| C64::new(w.sqrt(), 0.0)).collect();
    Ok(FixedTotalState::new_unchecked_norm(amps)?)
}

/// Binomial state, `C_n = sqrt(binom(M,n) p^n (1-p)^(M-n))`; the `q = 0`
/// member of [`ngbs`] and evaluated through it.
pub fn binomial_state(m: usize, p: f64) -> Result<FixedTotalState, StateError> {
    ngbs(NgbsParams::new(m, p, 0.0))
}

/// `|n1>|n2>`.
pub fn fock_pair(n1: usize, n2: usize) -> TwoModeState {
    TwoModeState::basis(n1, n2)
}

/// Product of two coherent states truncated at `cutoff` photons per mode and
/// renormalized on the truncated grid.
pub fn coherent_product(alpha1: C64, alpha2: C64, cutoff: usize) -> Result<TwoModeState, StateError> {
    let column = |alpha: C64| -> Vec<C64> {
        // alpha^n / sqrt(n!) with the e^{-|alpha|^2/2} prefactor folded in
        let ln_r = alpha.norm().ln();
        let phase = alpha.arg();
        let half = -0.5 * alpha.norm_sqr();
        (0..=cutoff)
            .map(|n| {
                if alpha.norm() == 0.0 {
                    return if n == 0 { C64::new(1.0, 0.0) } else { C64::default() };
                }
                let mag = (half + n as f64 * ln_r - 0.5 * log_factorial(n)).exp();
                C64::from_polar(mag, n as f64 * phase)
            })
            .collect()
    };
    let c1 = column(alpha1);
    let c2 = column(alpha2);
    let grid = Array2::from_shape_fn((cutoff + 1, cutoff + 1), |(i, j)| c1[i] * c2[j]);
    let state = TwoModeState::from_grid(grid)?;
    let deficit = 1.0 - state.norm_sqr();
    if deficit > TRUNCATION_TOL {
        return Err(StateError::TruncationInadequate { cutoff, deficit });
    }
    Ok(state.normalized()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{moment_oracle, MomentSpec};

    fn real(st: &FixedTotalState) -> Vec<f64> {
        st.amplitudes().iter().map(|c| c.re).collect()
    }

    #[test]
    fn fock_limit() {
        assert_eq!(real(&ngbs(NgbsParams::new(2, 1.0, 0.0)).unwrap()), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn symmetric_binomial_m2() {
        let c = real(&ngbs(NgbsParams::new(2, 0.5, 0.0)).unwrap());
        let want = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, b) in c.iter().zip(want) {
            assert!((a - b).abs() < 1e-15, "{c:?}");
        }
    }

    #[test]
    fn negative_q_is_normalized() {
        let st = ngbs(NgbsParams::new(10, 0.5, -0.01)).unwrap();
        assert_eq!(st.amplitudes().len(), 11);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(real(&binomial_state(3, 0.0).unwrap()), vec![1.0, 0.0, 0.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = real(&binomial_state(1, 0.5).unwrap());
        assert!((c[0] - h).abs() < 1e-15 && (c[1] - h).abs() < 1e-15);
        assert_eq!(
            binomial_state(20, 0.3).unwrap(),
            ngbs(NgbsParams::new(20, 0.3, 0.0)).unwrap()
        );
    }

    #[test]
    fn invalid_params() {
        assert!(matches!(binomial_state(3, 1.5), Err(StateError::InvalidParams(_))));
        assert!(matches!(binomial_state(3, -0.1), Err(StateError::InvalidParams(_))));
        // 1 + Mq <= 0
        assert!(matches!(
            ngbs(NgbsParams::new(10, 0.5, -0.1)),
            Err(StateError::InvalidParams(_))
        ));
        // p + Mq < 0
        assert!(matches!(
            ngbs(NgbsParams::new(10, 0.05, -0.01)),
            Err(StateError::InvalidParams(_))
        ));
        // boundary p + Mq == 0 up to rounding is accepted
        assert!(ngbs(NgbsParams::new(10, 0.1, -0.01)).is_ok());
    }

    #[test]
    fn fock_pairs() {
        assert_eq!(fock_pair(0, 0).norm_sqr(), 1.0);
        assert_eq!(fock_pair(2, 5).amplitude(2, 5), C64::new(1.0, 0.0));
        assert_eq!(fock_pair(2, 5).cutoffs(), (2, 5));
    }

    #[test]
    fn coherent_vacuum_and_mean() {
        let vac = coherent_product(C64::default(), C64::default(), 5).unwrap();
        assert_eq!(vac.amplitude(0, 0), C64::new(1.0, 0.0));
        assert_eq!(vac.norm_sqr(), 1.0);

        let st = coherent_product(C64::new(1.0, 0.0), C64::new(1.0, 0.0), 30).unwrap();
        let n1 = moment_oracle(&st, MomentSpec::mode1(1, 1));
        assert!((n1.re - 1.0).abs() < 1e-9 && n1.im.abs() < 1e-12);
    }

    #[test]
    fn coherent_truncation_guard() {
        let err = coherent_product(C64::new(3.0, 0.0), C64::default(), 5).unwrap_err();
        assert!(matches!(err, StateError::TruncationInadequate { cutoff: 5, .. }));
    }

    #[test]
    fn coherent_phase_is_carried() {
        let a = C64::new(0.0, 0.7);
        let st = coherent_product(a, C64::default(), 30).unwrap();
        let mean = moment_oracle(&st, MomentSpec::mode1(0, 1));
        assert!((mean - a).norm() < 1e-12);
    }
}
