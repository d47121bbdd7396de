use num_complex::Complex64;
use proptest::prelude::*;

use uncertainty::classify::estimate_k;
use uncertainty::families::{make_hermite, random_fields, standard_family};
use uncertainty::field::{lp_norm, Exponent, GridSpec, SampledField};
use uncertainty::operators::{Convention, DiffeoSpec, LinearOperator, Partition, PhaseSpec};

fn desk() -> GridSpec {
    GridSpec::desk(1).unwrap()
}

fn random_field(seed: u64) -> SampledField {
    random_fields(desk(), 1, seed, "p").unwrap().remove(0)
}

fn l2(f: &SampledField) -> f64 {
    lp_norm(f, Exponent::TWO).unwrap().value
}

fn rel_diff(a: &SampledField, b: &SampledField) -> f64 {
    l2(&a.sub(b).unwrap()) / l2(b)
}

fn invertible() -> impl Strategy<Value = LinearOperator> {
    prop_oneof![
        Just(LinearOperator::fourier(Convention::TwoPi)),
        Just(LinearOperator::fourier(Convention::Unitary)),
        Just(LinearOperator::inverse_fourier(Convention::TwoPi)),
        (0.1f64..4.0, 0.1f64..4.0).prop_map(|(a, b)| LinearOperator::step(Partition::half_space(0, 0.3, a, b).unwrap())),
        (-3.0f64..3.0).prop_map(|w| LinearOperator::phase(PhaseSpec::PlaneWave { frequency: vec![w] }).unwrap()),
        (-1.0f64..1.0).prop_map(|r| LinearOperator::phase(PhaseSpec::Chirp { rate: r }).unwrap()),
        (0.5f64..3.0).prop_map(LinearOperator::scale).prop_map(Result::unwrap),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverse_round_trip(seed in 0u64..10_000, a in invertible()) {
        let f = random_field(seed);
        let back = a.inverse().unwrap().apply(&a.apply(&f).unwrap()).unwrap();
        prop_assert!(rel_diff(&back, &f) <= 1e-8);
    }

    #[test]
    fn special_identity(seed in 0u64..10_000, a in invertible()) {
        prop_assume!(a.special);
        let k = a.claimed_k.unwrap();
        let f = random_field(seed);
        let g = a.adjoint().unwrap().apply(&a.apply(&f).unwrap()).unwrap();
        prop_assert!(rel_diff(&g, &f.scale(Complex64::new(k, 0.0)).unwrap()) <= 1e-8);
    }

    #[test]
    fn parseval_for_unitary_kinds(seed in 0u64..10_000, conv in prop_oneof![Just(Convention::TwoPi), Just(Convention::Unitary)]) {
        let f = random_field(seed);
        let a = LinearOperator::fourier(conv);
        prop_assert!((l2(&a.apply(&f).unwrap()) / l2(&f) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn step_and_phase_norm_bounds(seed in 0u64..10_000, lo in 0.1f64..1.0, hi in 1.0f64..5.0, p in 0.5f64..5.0) {
        let f = random_field(seed);
        let p = Exponent::Finite(p);
        let step = LinearOperator::step(Partition::half_space(0, -0.5, lo, hi).unwrap());
        let n = lp_norm(&f, p).unwrap().value;
        let m = lp_norm(&step.apply(&f).unwrap(), p).unwrap().value;
        prop_assert!(m >= lo * n * (1.0 - 1e-12) && m <= hi * n * (1.0 + 1e-12));
        let phase = LinearOperator::phase(PhaseSpec::Chirp { rate: hi }).unwrap();
        prop_assert!((lp_norm(&phase.apply(&f).unwrap(), p).unwrap().value / n - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fractional_composition(a in -1.5f64..1.5, b in -1.5f64..1.5, k in 0usize..6) {
        let g = desk();
        let f = make_hermite(&[k], g).unwrap().add(&make_hermite(&[k + 1], g).unwrap()).unwrap();
        let fa = LinearOperator::fractional_fourier(a).unwrap();
        let fb = LinearOperator::fractional_fourier(b).unwrap();
        let fab = LinearOperator::fractional_fourier(a + b).unwrap();
        let two = fa.apply(&fb.apply(&f).unwrap()).unwrap();
        prop_assert!(rel_diff(&two, &fab.apply(&f).unwrap()) <= 1e-6);
    }
}

#[test]
fn estimate_k_is_monotone_under_inclusion() {
    let all = standard_family(desk()).unwrap();
    let a = LinearOperator::step(Partition::half_space(0, 0.0, 0.5, 2.0).unwrap());
    let whole = estimate_k(&a, &all).unwrap().value;
    for chunk in all.chunks(8) {
        assert!(estimate_k(&a, chunk).unwrap().value >= whole);
    }
}

#[test]
fn composition_with_unimodular_or_scaling_maps() {
    // Random members carry spectral phase near the frequency grid's Nyquist
    // limit, which cubic resampling cannot follow; use the smooth members.
    let fields: Vec<_> = standard_family(desk())
        .unwrap()
        .into_iter()
        .filter(|f| !f.label.starts_with("random"))
        .collect();
    let f = LinearOperator::fourier(Convention::TwoPi);
    let base = estimate_k(&f, &fields).unwrap().value;
    let phase = LinearOperator::phase(PhaseSpec::PlaneWave { frequency: vec![0.7] }).unwrap();
    let with_phase = estimate_k(&LinearOperator::compose(vec![phase, f.clone()]).unwrap(), &fields).unwrap().value;
    assert!((with_phase / base - 1.0).abs() <= 0.05, "{with_phase} vs {base}");
    // ψ(x) = 2x with weight 1: U*U = I/C with C = |det| = 2 on L².
    let stretch = LinearOperator::diffeo(DiffeoSpec::Linear { matrix: vec![vec![2.0]] }, 1.0).unwrap();
    let with_diffeo = estimate_k(&LinearOperator::compose(vec![stretch, f]).unwrap(), &fields).unwrap().value;
    assert!((with_diffeo / base - 0.5).abs() <= 0.05 * 0.5, "{with_diffeo} vs {base}");
}
