use proptest::prelude::*;

use uncertainty::explorer::{
    linspace_grid, log_grid, minimize, probe, run_sequence, shapiro_growth, sweep, Monotonicity, Proposition,
    SearchConfig, SequenceParams, SweepConfig,
};
use uncertainty::families::Family;
use uncertainty::field::{Exponent, GridSpec};
use uncertainty::inequalities::{generalized_up_bound, FunctionalSpec, Variant};
use uncertainty::operators::{Convention, LinearOperator};

fn fourier() -> LinearOperator {
    LinearOperator::fourier(Convention::TwoPi)
}

fn f12_search(seed: u64) -> SearchConfig {
    SearchConfig {
        spec: FunctionalSpec::new(Variant::FPq, 1).p(1.0).q(2.0),
        family: Family::Gc { dim: 1, c: 0.5 },
        parameters: vec!["c".into(), "dilation".into()],
        bounds: Some(vec![(0.1, 1.0), (0.5, 2.0)]),
        budget: 60,
        seed,
        operator: Some(fourier()),
        field_grid: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn minimize_best_never_exceeds_trace(seed in any::<u64>()) {
        let r = minimize(&f12_search(seed)).unwrap();
        prop_assert!(r.trace.iter().all(|t| r.best_value <= t.value && t.value.is_finite()));
        prop_assert_eq!(r.evaluations, r.trace.len() + r.failed_evaluations);
    }
}

#[test]
fn minimize_is_seeded() {
    let a = serde_json::to_string(&minimize(&f12_search(5)).unwrap()).unwrap();
    let b = serde_json::to_string(&minimize(&f12_search(5)).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn minimized_f12_respects_the_generalized_bound() {
    let r = minimize(&f12_search(1)).unwrap();
    let bound = generalized_up_bound(1, Exponent::ONE, Exponent::TWO, Convention::TwoPi).unwrap();
    assert!(r.best_value >= bound - 1e-9, "{} < {bound}", r.best_value);
}

#[test]
fn sweep_reproduces_from_serialized_config() {
    let cfg = SweepConfig {
        spec: FunctionalSpec::new(Variant::FPq, 1).p(Exponent::Infinity).q(2.0),
        family: Family::Gc { dim: 1, c: 1.0 },
        parameter: "c".into(),
        grid: log_grid(0.02, 1.0, 7),
        operator: Some(fourier()),
        field_grid: None,
    };
    let first = serde_json::to_string(&sweep(&cfg).unwrap()).unwrap();
    let cfg2: SweepConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(first, serde_json::to_string(&sweep(&cfg2).unwrap()).unwrap());
}

#[test]
fn f_inf_2_on_gc_is_unbounded() {
    // ‖g_c‖_∞ ~ c^{−1/2} while ‖g_c‖₂ stays bounded, so F_{∞,2} ~ 1/c.
    let cfg = SweepConfig {
        spec: FunctionalSpec::new(Variant::FPq, 1).p(Exponent::Infinity).q(2.0),
        family: Family::Gc { dim: 1, c: 1.0 },
        parameter: "c".into(),
        grid: log_grid(0.01, 1.0, 9),
        operator: Some(fourier()),
        field_grid: None,
    };
    let r = sweep(&cfg).unwrap();
    assert_eq!(r.monotone, Monotonicity::Decreasing);
    assert!(r.values[0] > 20.0 * r.values[8]);
}

#[test]
fn embedding_ratio_over_hermite_is_bounded() {
    let cfg = SweepConfig {
        spec: FunctionalSpec::new(Variant::Embedding, 1).p(1.0).q(2.0),
        family: Family::Hermite { index: vec![0] },
        parameter: "k".into(),
        grid: linspace_grid(0.0, 32.0, 33),
        operator: Some(fourier()),
        field_grid: Some(GridSpec::desk(1).unwrap()),
    };
    let r = sweep(&cfg).unwrap();
    assert!(r.max_value < 10.0 * r.min_value, "{} .. {}", r.min_value, r.max_value);
}

#[test]
fn probe_between_one_and_two_stays_above_the_bound() {
    let ks: Vec<f64> = (1..=64).map(|k| k as f64).collect();
    let r = probe(Exponent::Finite(1.5), &log_grid(0.01, 1.0, 9), &ks).unwrap();
    let b = r.lower_bound.unwrap();
    assert!(r.attained.0 >= b - 1e-9, "{} < {b}", r.attained.0);
}

#[test]
fn probe_at_infinity_spans_two_decades() {
    let ks: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let r = probe(Exponent::Infinity, &log_grid(4e-3, 1.0, 9), &ks).unwrap();
    assert!(r.lower_bound.is_none());
    assert!(r.gc.max_value / r.gc.min_value >= 100.0, "{} .. {}", r.gc.min_value, r.gc.max_value);
}

#[test]
fn probe_above_two_decays_along_hermite() {
    let ks: Vec<f64> = (8..=64).map(|k| k as f64).collect();
    let r = probe(Exponent::Finite(6.0), &log_grid(0.1, 1.0, 5), &ks).unwrap();
    assert!(r.hermite.slope().unwrap() < -0.1);
}

#[test]
fn shapiro_product_increases() {
    let r = shapiro_growth(Exponent::ONE, 64).unwrap();
    let tail = r.window(8.0, 64.0).unwrap();
    assert_eq!(tail.monotone, Monotonicity::Increasing);
    assert_eq!(r.predicted_slope, Some(0.5));
}

#[test]
#[ignore = "k ≤ 64 is pre-asymptotic for ‖h_k‖₁: the fitted exponent is 0.38"]
fn shapiro_exponent_at_q_one() {
    let r = shapiro_growth(Exponent::ONE, 64).unwrap();
    assert!((r.slope().unwrap() - 0.5).abs() <= 0.1, "{}", r.slope().unwrap());
}

#[test]
fn prop_two_finite_q_decays() {
    // n = 3, q = 4 > 2, critical β: predicted rate (q−2)n(n−2)/((n+2)q−2n) = 3/7.
    let params = SequenceParams::new(3).q(4.0);
    let r = run_sequence(Proposition::Two, &params, &log_grid(1e-2, 1e-1, 7)).unwrap();
    assert!((r.predicted_slope.unwrap() - 3.0 / 7.0).abs() < 1e-12);
    assert!(r.slope().unwrap() > 0.0);
    assert_eq!(r.monotone, Monotonicity::Increasing);
}

#[test]
fn sequence_windows_are_named() {
    let e = run_sequence(Proposition::ThreeGc, &SequenceParams::new(3).q(4.0), &[0.1; 5]).unwrap_err();
    assert!(e.to_string().contains("q > 2n/(n−2)"), "{e}");
    let e = run_sequence(Proposition::ThreeHermite, &SequenceParams::new(2).q(1.0), &[1.0; 5]).unwrap_err();
    assert!(e.to_string().contains("n ≥ 3"), "{e}");
}
