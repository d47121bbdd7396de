use proptest::prelude::*;

use uncertainty::families::{gaussian_field, make_hermite, random_fields};
use uncertainty::field::{dilate, entropy, lp_norm, variance, weighted_norm, Exponent, GridSpec, SampledField};

fn exponents() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (0.5f64..6.0).prop_map(Exponent::Finite),
        Just(Exponent::ONE),
        Just(Exponent::TWO),
        Just(Exponent::Infinity),
    ]
}

fn random_field(seed: u64) -> SampledField {
    random_fields(GridSpec::desk(1).unwrap(), 1, seed, "p").unwrap().remove(0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn norms_are_nonnegative_and_vanish_only_on_zero(seed in 0u64..10_000, p in exponents(), scale in 0.0f64..3.0) {
        let f = random_field(seed).scale(scale.into()).unwrap();
        let v = lp_norm(&f, p).unwrap().value;
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v == 0.0, scale == 0.0);
    }

    #[test]
    fn dilation_laws_are_exact(seed in 0u64..10_000, q in exponents(), lambda in 0.2f64..5.0) {
        let f = random_field(seed);
        let g = dilate(&f, lambda).unwrap();
        let want = lambda.powf(-q.recip()) * lp_norm(&f, q).unwrap().value;
        prop_assert!(rel(lp_norm(&g, q).unwrap().value, want) <= 1e-12);
        prop_assert!(rel(variance(&g).unwrap(), lambda.powi(-3) * variance(&f).unwrap()) <= 1e-12);
    }

    #[test]
    fn variance_is_the_squared_weighted_norm(seed in 0u64..10_000) {
        let f = random_field(seed);
        let w = weighted_norm(&f, 1.0, Exponent::TWO).unwrap().value;
        prop_assert!(rel(variance(&f).unwrap(), w * w) <= 1e-14);
    }

    #[test]
    fn entropy_shifts_by_log_lambda(k in 0usize..8, lambda in 0.5f64..2.0) {
        let f = make_hermite(&[k], GridSpec::desk(1).unwrap()).unwrap();
        let d = entropy(&dilate(&f, lambda).unwrap()).unwrap() - entropy(&f).unwrap() + lambda.ln();
        prop_assert!(d.abs() <= 1e-8, "{}", d);
    }
}

#[test]
fn gaussian_quadrature_improves_as_points_double() {
    // ‖e^{−πx²}‖_p = p^{−1/(2p)}
    for p in [1.0f64, 2.0, 3.0] {
        let want = p.powf(-1.0 / (2.0 * p));
        let errs: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| {
                let f = gaussian_field(1.0, GridSpec::new(1, 10.0, n).unwrap()).unwrap();
                (lp_norm(&f, Exponent::Finite(p)).unwrap().value - want).abs()
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0], "p = {p}: {errs:?}");
        }
        assert!(errs[3] < 1e-12, "p = {p}: {errs:?}");
    }
}

#[test]
fn desk_gaussian_accuracy_by_dimension() {
    for (n, tol) in [(1, 1e-8), (2, 1e-6), (3, 1e-4)] {
        let f = gaussian_field(1.0, GridSpec::desk(n).unwrap()).unwrap();
        // ‖e^{−π|x|²}‖₁ = 1, V = n/(4π)·2^{−n/2}
        assert!((lp_norm(&f, Exponent::ONE).unwrap().value - 1.0).abs() < tol);
        let v = n as f64 / (4.0 * std::f64::consts::PI) * 2f64.powf(-(n as f64) / 2.0);
        assert!(rel(variance(&f).unwrap(), v) < tol, "n = {n}");
    }
}
