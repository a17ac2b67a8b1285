use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use tmngbs::fock::{
    inner_product, log_factorial, moment_oracle, CutoffPolicy, FixedTotalState, Ladder, Mode, MomentSpec, TwoModeState,
};
use tmngbs::moments::{cross_moment_closed, moment_mode1_paper, moment_mode2_paper, Engine, EngineKind, OracleEngine};
use tmngbs::states::{binomial_state, coherent_product, ngbs, NgbsParams};
use tmngbs::witnesses::{hoa, sum_squeeze, sv};

/// sqrt(n! / (n-k)!) by repeated multiplication; None if k > n.
fn sqrt_falling(n: usize, k: usize) -> Option<f64> {
    (k <= n).then(|| ((n - k + 1)..=n).map(|x| x as f64).product::<f64>().sqrt())
}

/// Moment by direct index arithmetic on the amplitude grid:
/// a1^k a2^s maps |n1,n2> to sqrt(..)|n1-k,n2-s>, and the bra side likewise.
fn direct_moment(amps: &Array2<C64>, spec: MomentSpec) -> C64 {
    let (j, k, r, s) = (spec.j as usize, spec.k as usize, spec.r as usize, spec.s as usize);
    let mut acc = C64::default();
    for ((n1, n2), c) in amps.indexed_iter() {
        let (Some(fk), Some(fs)) = (sqrt_falling(n1, k), sqrt_falling(n2, s)) else {
            continue;
        };
        let (b1, b2) = (n1 - k + j, n2 - s + r);
        let Some(cb) = amps.get((b1, b2)) else {
            continue;
        };
        let fj = sqrt_falling(b1, j).unwrap();
        let fr = sqrt_falling(b2, r).unwrap();
        acc += cb.conj() * c * (fk * fs * fj * fr);
    }
    acc
}

fn amps_strategy(max_m: usize) -> impl Strategy<Value = Vec<C64>> {
    (0..=max_m)
        .prop_flat_map(|m| prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m + 1))
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

fn fixed_state(max_m: usize) -> impl Strategy<Value = FixedTotalState> {
    amps_strategy(max_m).prop_filter_map("zero norm", |v| FixedTotalState::normalized(v).ok())
}

fn grid_state() -> impl Strategy<Value = TwoModeState> {
    (0..5usize, 0..5usize)
        .prop_flat_map(|(a, b)| {
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), (a + 1) * (b + 1)).prop_map(move |v| (a, b, v))
        })
        .prop_filter_map("zero norm", |(a, b, v)| {
            let grid =
                Array2::from_shape_vec((a + 1, b + 1), v.into_iter().map(|(x, y)| C64::new(x, y)).collect()).ok()?;
            TwoModeState::from_grid(grid).ok()?.normalized().ok()
        })
}

fn ngbs_state() -> impl Strategy<Value = FixedTotalState> {
    (1..=20usize, 0.0..=1.0f64, -0.05..0.15f64)
        .prop_filter_map("invalid parameters", |(m, p, q)| ngbs(NgbsParams::new(m, p, q)).ok())
}

fn spec(max: u32) -> impl Strategy<Value = MomentSpec> {
    (0..=max, 0..=max, 0..=max, 0..=max).prop_map(|(j, k, r, s)| MomentSpec::new(j, k, r, s))
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn selection_rule(st in fixed_state(20), sp in spec(10).prop_filter("number conserving", |s| !s.is_number_conserving())) {
        let v = moment_oracle(&st.to_two_mode(), sp);
        prop_assert!(v.norm() <= 1e-12, "{sp}: {v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_matches_direct_sum(st in grid_state(), sp in spec(4)) {
        let want = direct_moment(st.amplitudes(), sp);
        let got = moment_oracle(&st, sp);
        prop_assert!(close(got, want, 1e-12 * want.norm().max(1.0)), "{sp}: {got} vs {want}");
    }

    #[test]
    fn hermiticity(st in grid_state(), sp in spec(4)) {
        let a = moment_oracle(&st, sp);
        let b = moment_oracle(&st, sp.adjoint()).conj();
        prop_assert!(close(a, b, 1e-12 * a.norm().max(1.0)), "{sp}: {a} vs {b}");
    }

    #[test]
    fn diagonal_positivity(st in grid_state(), k in 0..5u32, s in 0..5u32) {
        let v = moment_oracle(&st, MomentSpec::new(k, k, s, s));
        prop_assert!(v.im.abs() <= 1e-12 && v.re >= -1e-12, "{v}");
    }

    #[test]
    fn ladder_adjointness(phi in grid_state(), psi in grid_state(), two in any::<bool>()) {
        let mode = if two { Mode::Two } else { Mode::One };
        let lhs = inner_product(&phi.apply_ladder(mode, Ladder::Create, CutoffPolicy::Extend).unwrap(), &psi);
        let rhs = inner_product(&phi, &psi.apply_ladder(mode, Ladder::Annihilate, CutoffPolicy::Extend).unwrap());
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn constructors_are_normalized(st in ngbs_state(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        prop_assert!((st.norm_sqr() - 1.0).abs() <= 1e-10);
        let coh = coherent_product(C64::new(re, im), C64::new(im, -re), 40).unwrap();
        prop_assert!((coh.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn ngbs_coefficients_real_nonnegative(st in ngbs_state()) {
        for c in st.amplitudes() {
            prop_assert!(c.im == 0.0 && c.re >= 0.0);
        }
    }

    #[test]
    fn cross_closed_form_matches_oracle(st in ngbs_state(), sp in spec(6).prop_filter("number changing", |s| s.is_number_conserving())) {
        let closed = cross_moment_closed(&st, sp);
        let oracle = moment_oracle(&st.to_two_mode(), sp);
        prop_assert!(close(closed, oracle, 1e-12 * oracle.norm()), "{sp}: {closed} vs {oracle}");
    }

    #[test]
    fn diagonal_closed_forms_match_oracle(st in ngbs_state(), k in 0..=10u32) {
        let grid = st.to_two_mode();
        let m1 = moment_oracle(&grid, MomentSpec::mode1(k, k));
        let m2 = moment_oracle(&grid, MomentSpec::mode2(k, k));
        let p1 = moment_mode1_paper(&st, k, k);
        let p2 = moment_mode2_paper(&st, k, k);
        prop_assert!(close(p1, m1, 1e-9 * m1.norm().max(1.0)), "mode 1 k={k}: {p1} vs {m1}");
        prop_assert!(close(p2, m2, 1e-9 * m2.norm().max(1.0)), "mode 2 k={k}: {p2} vs {m2}");
        prop_assert!(m1.re >= 0.0 && m2.re >= 0.0);
    }

    #[test]
    fn hoa_engine_independent(st in ngbs_state(), l in 1..=9u32, dm in 0..=8u32) {
        let m = 1 + dm.min(l - 1);
        let a = hoa(&Engine::for_fixed(&st, EngineKind::PaperLiteral), l, m);
        let b = hoa(&Engine::for_fixed(&st, EngineKind::Oracle), l, m);
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a.value - b.value).abs() <= 1e-9 * b.value.abs().max(1.0), "{} vs {}", a.value, b.value),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "engines disagree on degeneracy: {other:?}"),
        }
    }

    #[test]
    fn sv_factorizes(st in fixed_state(20)) {
        let m = st.total_photons() as f64;
        let n1: f64 = st.amplitudes().iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        let want = (n1 - 0.5) * (m - n1 - 0.5);
        let got = sv(&OracleEngine::from_fixed(&st)).value;
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} vs {want}");
    }

    #[test]
    fn ssd_is_pi_periodic(st in fixed_state(20), theta in -4.0..4.0f64) {
        for kind in EngineKind::ALL {
            let eng = Engine::for_fixed(&st, kind);
            let a = sum_squeeze(&eng, theta).unwrap().value;
            let b = sum_squeeze(&eng, theta + std::f64::consts::PI).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12, "{kind}: {a} vs {b}");
        }
    }

    #[test]
    fn q_zero_is_binomial(m in 0..=30usize, p in 0.0..=1.0f64) {
        prop_assert_eq!(ngbs(NgbsParams::new(m, p, 0.0)).unwrap(), binomial_state(m, p).unwrap());
    }
}

#[test]
fn log_factorial_matches_reference() {
    for n in 0..=500u64 {
        let want = statrs::function::factorial::ln_factorial(n);
        let got = log_factorial(n as usize);
        let err = (got - want).abs();
        assert!(err <= 1e-12 * want.abs().max(1.0), "n={n}: {got} vs {want}");
    }
}

#[test]
fn abel_normalization_grid() {
    for m in [5usize, 10, 20] {
        for i in 1..=19 {
            let p = 0.05 * i as f64;
            for q in [-0.01, -0.005, 0.0, 0.005, 0.01, 0.1] {
                let params = NgbsParams::new(m, p, q);
                if !params.is_valid() {
                    continue;
                }
                let st = ngbs(params).unwrap();
                let total: f64 = st.amplitudes().iter().map(|c| c.norm_sqr()).sum();
                assert!((total - 1.0).abs() <= 1e-8, "M={m} p={p} q={q}: {total}");
            }
        }
    }
}
