//! Acceptance criteria for the toolkit, each returning a verdict and a
//! one-line measurement summary. Tolerances are fixed here, not tuned to
//! results; `tests/acceptance.rs` runs them all.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use uncertainty::classify::{estimate_k, matrix_check, special_residual};
use uncertainty::explorer::{
    log_grid, minimize, run_sequence, sweep, Proposition, SearchConfig, SequenceParams, SweepConfig,
};
use uncertainty::families::{
    make_falpha, make_gc, make_hermite, random_fields, standard_family, Family,
};
use uncertainty::explorer::{falpha_grid, gc_grid};
use uncertainty::field::{babenko_beckner, dilate, lp_norm, variance, Exponent, GridSpec, SampledField};
use uncertainty::inequalities::{
    check_generalized_up, check_hausdorff_young, check_heisenberg_nd, entropic_gap, evaluate, norm_up,
    primary_up, FunctionalSpec, Variant,
};
use uncertainty::operators::{ComplexMatrix, Convention, LinearOperator, Partition};
use uncertainty::Result;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn fourier() -> LinearOperator {
    LinearOperator::fourier(Convention::TwoPi)
}

/// Closed-form family oracles, all under one minute.
pub fn criterion_1() -> Result<Outcome> {
    let t = Instant::now();
    let mut herm: f64 = 0.0;
    for n in 1..=2usize {
        let grid = GridSpec::desk(n)?;
        for total in 0..=10usize {
            let indices: Vec<Vec<usize>> = if n == 1 {
                vec![vec![total]]
            } else {
                (0..=total).map(|a| vec![a, total - a]).collect()
            };
            for a in indices {
                let f = make_hermite(&a, grid)?;
                herm = herm.max((variance(&f)? - (total as f64 + n as f64 / 2.0)).abs());
            }
        }
    }
    let mut gc: f64 = 0.0;
    for n in 1..=2usize {
        for c in [0.25, 1.0, 4.0] {
            let (h, f) = make_gc(n, c, gc_grid(n, c, None)?)?;
            gc = gc.max(rel(lp_norm(&f, Exponent::ONE)?.value, h.get("norm_1").unwrap()));
            gc = gc.max(rel(lp_norm(&f, Exponent::Infinity)?.value, h.get("norm_inf").unwrap()));
            gc = gc.max(rel(lp_norm(&f, Exponent::TWO)?.value.powi(2), h.get("norm_2_sq").unwrap()));
            gc = gc.max(rel(variance(&f)?, h.get("variance").unwrap()));
        }
    }
    let mut fa: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        let (h, f) = make_falpha(alpha, falpha_grid(alpha)?)?;
        fa = fa.max(rel(lp_norm(&f, Exponent::ONE)?.value, h.get("norm_1").unwrap()));
        fa = fa.max(rel(variance(&f)?, h.get("variance").unwrap()));
    }
    let secs = t.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: herm <= 1e-8 && gc <= 1e-8 && fa <= 5e-3 && secs < 60.0,
        detail: format!(
            "Hermite variance abs err {herm:.2e} (≤1e-8), g_c rel err {gc:.2e} (≤1e-8), f_α rel err {fa:.2e} (≤5e-3), {secs:.1}s (<60s)"
        ),
    })
}

/// Gaussian saturation of Hausdorff–Young, Heisenberg and entropy.
pub fn criterion_2() -> Result<Outcome> {
    let t = Instant::now();
    let mut hy: f64 = 0.0;
    let mut heis: f64 = 0.0;
    for n in 1..=2usize {
        let g = uncertainty::families::gaussian_field(1.0, GridSpec::desk(n)?)?;
        for p in [1.0, 1.25, 1.5, 2.0] {
            let r = check_hausdorff_young(&g, &fourier(), p.into())?;
            hy = hy.max((r.ratio.unwrap() - babenko_beckner(p.into())?.powi(n as i32)).abs());
        }
        let r = check_heisenberg_nd(&g, &fourier(), 2.0.into())?;
        heis = heis.max((r.ratio.unwrap() - (n * n) as f64 / (16.0 * PI * PI)).abs());
    }
    let g = uncertainty::families::gaussian_field(1.0, GridSpec::new(1, 20.0, 4096)?)?;
    let ent = (entropic_gap(&g, &fourier())?.lhs - (1.0 - LN_2)).abs();
    let secs = t.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: hy <= 1e-6 && heis <= 1e-6 && ent <= 1e-4 && secs < 60.0,
        detail: format!(
            "HY err {hy:.2e} (≤1e-6), Heisenberg err {heis:.2e} (≤1e-6), entropy err {ent:.2e} (≤1e-4), {secs:.1}s"
        ),
    })
}

/// 4 × 5 exponent grid on [1, 2] × [p, p′], linear in 1/q.
fn exponent_grid() -> Vec<(Exponent, Exponent)> {
    let mut out = Vec::new();
    for i in 0..4 {
        let p = 1.0 + i as f64 / 3.0;
        let pe = Exponent::from(p);
        let (lo, hi) = (1.0 - 1.0 / p, 1.0 / p);
        for j in 0..5 {
            let iq = hi - (hi - lo) * j as f64 / 4.0;
            let q = if j == 0 {
                pe
            } else if j == 4 {
                pe.dual().unwrap()
            } else {
                Exponent::from(1.0 / iq)
            };
            out.push((pe, q));
        }
    }
    out
}

/// Generalized norm-UP bound on the standard family.
pub fn criterion_3() -> Result<Outcome> {
    let fields = standard_family(GridSpec::desk(1)?)?;
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    let mut checks = 0;
    for f in &fields {
        for (p, q) in exponent_grid() {
            let r = check_generalized_up(f, &fourier(), p, q)?;
            let b = r.bound_constant.unwrap();
            worst = worst.min(r.lhs - b);
            checks += 1;
            if r.lhs < b - 1e-9 {
                violations += 1;
            }
        }
    }
    Ok(Outcome {
        pass: violations == 0,
        detail: format!("{checks} checks, {violations} violations, min(lhs − bound) = {worst:.3e}"),
    })
}

/// Variance-ratio decay along Hermite tensors and g_c in n = 3.
pub fn criterion_4() -> Result<Outcome> {
    let t = Instant::now();
    let ks: Vec<f64> = (4..=64).map(|k| k as f64).collect();
    let h = run_sequence(Proposition::ThreeHermite, &SequenceParams::new(3).q(1.0), &ks)?;
    let cs = log_grid(1e-2, 1.0, 9);
    let g = run_sequence(Proposition::ThreeGc, &SequenceParams::new(3).q(12.0), &cs)?;
    let (sh, sg) = (h.slope().unwrap(), g.slope().unwrap());
    let secs = t.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: (sh + 1.0).abs() <= 0.15 && (sg - 1.0).abs() <= 0.2 && secs < 300.0,
        detail: format!(
            "Hermite q=1 slope {sh:.3} (want −1 ± 0.15), g_c q=12 slope {sg:.3} (want 1 ± 0.2), {secs:.1}s"
        ),
    })
}

/// G_{n/(n+2),∞} decay on g_c (n = 3) and the f_α closed form (n = 2).
pub fn criterion_5() -> Result<Outcome> {
    let cs = log_grid(1e-2, 1e-1, 9);
    let g = run_sequence(Proposition::One, &SequenceParams::new(3), &cs)?;
    let s = g.slope().unwrap();
    let alphas = [0.25, 0.5, 0.75, 1.0, 1.5];
    let fa = run_sequence(Proposition::One, &SequenceParams::new(2), &alphas)?;
    let mut err: f64 = 0.0;
    for (a, v) in fa.grid.iter().zip(&fa.values) {
        if [0.25, 0.5, 1.0].contains(a) {
            err = err.max(rel(*v, (5.0 * PI * a / 32.0).sqrt()));
        }
    }
    Ok(Outcome {
        pass: (s - 0.6).abs() <= 0.2 && err <= 0.01,
        detail: format!(
            "g_c slope {s:.3} over c ∈ [1e-2, 1e-1] (want 0.6 ± 0.2), f_α rel err {err:.2e} (≤1e-2)"
        ),
    })
}

/// Classification witnesses.
pub fn criterion_6() -> Result<Outcome> {
    let fields = standard_family(GridSpec::desk(1)?)?;
    let theta = 0.3;
    let sum = LinearOperator::sum(vec![
        LinearOperator::fractional_fourier(theta)?,
        LinearOperator::fractional_fourier(theta + PI / 2.0)?,
    ])?;
    let k_sum = estimate_k(&sum, &fields)?;
    let res_f = special_residual(&fourier(), 1.0, &fields)?;
    let step = LinearOperator::step(Partition::half_space(0, 0.0, 0.5, 2.0)?);
    let fb = LinearOperator::compose(vec![fourier(), step])?;
    let mut res_fb = f64::INFINITY;
    for k in log_grid(0.1, 10.0, 10) {
        res_fb = res_fb.min(special_residual(&fb, k, &fields)?.value);
    }
    let mut mat: f64 = 0.0;
    for size in [2, 3, 8, 17, 32, 64] {
        let m = ComplexMatrix::unitary_dft(size).scaled(0.5);
        let c = matrix_check(&m);
        mat = mat.max(c.gram_deviation).max((c.k - 0.25).abs()).max(c.special_deviation.unwrap());
    }
    Ok(Outcome {
        pass: k_sum.value <= 1e-6 && res_f.value <= 1e-8 && res_fb >= 0.1 && mat <= 1e-12,
        detail: format!(
            "k(F_θ+F_θ+π/2) = {:.2e} at {} (≤1e-6), SH residual F = {:.2e} (≤1e-8), min_k residual F∘B = {res_fb:.3} (≥0.1), matrix dev {mat:.2e} (≤1e-12)",
            k_sum.value, k_sum.witness, res_f.value
        ),
    })
}

/// Exact dilation laws on the grid-rescaling representation.
pub fn criterion_7() -> Result<Outcome> {
    let g1 = GridSpec::desk(1)?;
    let mut fields: Vec<SampledField> = vec![
        uncertainty::families::gaussian_field(1.0, g1)?,
        uncertainty::families::gaussian_field(1.0, GridSpec::desk(2)?)?,
    ];
    for c in [0.25, 1.0] {
        fields.push(make_gc(1, c, gc_grid(1, c, None)?)?.1);
    }
    fields.push(make_gc(2, 1.0, GridSpec::desk(2)?)?.1);
    let mut worst: f64 = 0.0;
    for f in &fields {
        let n = f.grid().dim() as f64;
        for lambda in [0.5, 2.0] {
            let fl = dilate(f, lambda)?;
            for q in [Exponent::ONE, Exponent::TWO, Exponent::Infinity] {
                let want = lambda.powf(-n * q.recip()) * lp_norm(f, q)?.value;
                worst = worst.max(rel(lp_norm(&fl, q)?.value, want));
            }
            worst = worst.max(rel(variance(&fl)?, lambda.powf(-n - 2.0) * variance(f)?));
        }
    }
    Ok(Outcome { pass: worst <= 1e-12, detail: format!("max rel err {worst:.2e} (≤1e-12)") })
}

/// One valid spec per variant and single-constraint violations of it.
fn window_cases() -> Vec<(FunctionalSpec, Vec<(FunctionalSpec, &'static str)>)> {
    use Variant::*;
    let inf = Exponent::Infinity;
    let s = FunctionalSpec::new;
    let weighted_gen = s(WeightedUpSpecialGen, 1).r(1.0).p(2.0).q(2.0).theta(1.0).phi(1.0).alpha(1.0).beta(1.0);
    let hadamard = s(WeightedUpHadamard, 1).p(2.0).q(2.0).theta(1.0).phi(1.0).alpha(1.0).beta(1.0).s(2.0);
    let infty = s(WeightedUpInfty, 1).p(2.0).q(2.0).theta(1.0).phi(1.0).alpha(1.0).beta(1.0);
    let sob = s(SobolevGeneral, 1).u(1.0).r(1.0).t(inf).p(2.0).theta(1.0);
    vec![
        (s(FPq, 1).p(1.0).q(2.0), vec![(s(FPq, 1).p(0.5).q(2.0), "p ≥ 1"), (s(FPq, 1).p(1.0).q(0.5), "q ≥ 1")]),
        (
            s(GBetaQ, 1).beta_exp(0.3).q(inf),
            vec![(s(GBetaQ, 1).beta_exp(-0.3).q(inf), "β > 0"), (s(GBetaQ, 1).beta_exp(0.3).q(0.5), "q ≥ 1")],
        ),
        (s(NormUp, 1).q(2.0), vec![(s(NormUp, 1).q(inf), "q < ∞"), (s(NormUp, 1).q(0.5), "q ≥ 1")]),
        (
            s(GeneralizedUp, 1).p(1.5).q(2.0),
            vec![
                (s(GeneralizedUp, 1).p(2.5).q(2.5), "p ≤ 2"),
                (s(GeneralizedUp, 1).p(1.5).q(1.2), "q ≥ p"),
                (s(GeneralizedUp, 1).p(1.5).q(4.0), "q ≤ p′"),
            ],
        ),
        (s(Embedding, 1).p(1.0).q(2.0), vec![(s(Embedding, 1).p(0.8).q(0.9), "p ≥ 1")]),
        (
            sob.clone(),
            vec![
                (sob.clone().p(1.0).theta(1.0), "p > u"),
                (sob.clone().r(0.5), "r ≥ u"),
                (sob.clone().t(1.0), "1 < t ≤ ∞"),
                (sob.clone().theta(0.5), "θ > n(1/u − 1/p)"),
            ],
        ),
        (
            s(SobolevSimple, 1).theta(1.0).p(2.0).q(inf),
            vec![
                (s(SobolevSimple, 1).theta(1.0).p(2.0).q(2.0), "q ∈ (p, ∞]"),
                (s(SobolevSimple, 1).theta(-1.0).p(2.0).q(inf), "θ > 0"),
            ],
        ),
        (
            s(FractionalLaplacian, 1).s_frac(0.5).p(1.0),
            vec![
                (s(FractionalLaplacian, 1).s_frac(0.5).p(2.0), "p < 2"),
                (s(FractionalLaplacian, 1).s_frac(-0.5).p(1.0), "s > 0"),
                (s(FractionalLaplacian, 1).s_frac(1.0).p(1.999), "|α| ≥ 1e−3 with α = (n/2s)(1/2 − 1/p)"),
            ],
        ),
        (
            infty.clone(),
            vec![
                (infty.clone().theta(0.1), "θ/n + 1/p > 1"),
                (infty.clone().beta(1.000001), "α(θ/n + 1/p) = β(φ/n + 1/q)"),
            ],
        ),
        (
            hadamard.clone(),
            vec![
                (hadamard.clone().p(1.0), "p > 1"),
                (hadamard.clone().beta(1.000001), "α(θ − n(1 − 1/p)) = β(φ − n(1 − 1/q))"),
                (hadamard.clone().s(0.5), "s ∈ [1, ∞]"),
            ],
        ),
        (
            s(WeightedUpSpecialSym, 1).theta(1.0).p(1.5).q(2.0),
            vec![
                (s(WeightedUpSpecialSym, 1).theta(1.0).p(2.0).q(2.0), "p < 2"),
                (s(WeightedUpSpecialSym, 1).theta(0.0).p(1.5).q(2.0), "θ > 0"),
            ],
        ),
        (
            weighted_gen.clone(),
            vec![
                (weighted_gen.clone().r(2.0), "r < 2"),
                (weighted_gen.clone().beta(1.000001), "α[θ − n(1/r − 1/p)] = β[φ − n(1/r − 1/q)]"),
                (weighted_gen.clone().p(1.0).q(1.0), "p > r"),
            ],
        ),
        (
            s(HeisenbergNd, 3).q(2.0),
            vec![(s(HeisenbergNd, 3).q(1.0), "q ∈ (1.2, 6)"), (s(HeisenbergNd, 3).q(6.0), "q ∈ (1.2, 6)")],
        ),
        (s(Entropic, 1), vec![(s(Entropic, 0), "n ≥ 1")]),
        (s(HausdorffYoung, 1).p(1.5), vec![(s(HausdorffYoung, 1).p(3.0), "p ≤ 2")]),
        (s(PrimaryUp, 1), vec![(s(PrimaryUp, 1).tolerance(-1.0), "tolerance ≥ 0")]),
    ]
}

/// Window rejection, sweep determinism, optimizer consistency and the
/// falsification-never-found protocol.
pub fn criterion_8() -> Result<Outcome> {
    let mut problems = Vec::new();
    let cases = window_cases();
    let covered: std::collections::BTreeSet<_> = cases.iter().map(|(v, _)| format!("{:?}", v.variant)).collect();
    if covered.len() != Variant::ALL.len() {
        problems.push(format!("only {} of {} variants covered", covered.len(), Variant::ALL.len()));
    }
    for (valid, bad) in &cases {
        if let Err(e) = valid.validate() {
            problems.push(format!("valid {:?} rejected: {e}", valid.variant));
        }
        for (spec, name) in bad {
            let names: Vec<String> = spec.violations().into_iter().map(|v| v.constraint).collect();
            if !names.iter().any(|n| n == name) {
                problems.push(format!("{:?}: expected '{name}', got {names:?}", spec.variant));
            }
        }
    }

    let cfg = SweepConfig {
        spec: FunctionalSpec::new(Variant::FPq, 1).p(1.0).q(2.0),
        family: Family::Gc { dim: 1, c: 1.0 },
        parameter: "c".into(),
        grid: log_grid(0.1, 1.0, 6),
        operator: Some(fourier()),
        field_grid: None,
    };
    let a = serde_json::to_string(&sweep(&cfg)?)?;
    let b = serde_json::to_string(&sweep(&cfg)?)?;
    if a != b {
        problems.push("sweep JSON differs between runs".into());
    }

    let search = SearchConfig {
        spec: FunctionalSpec::new(Variant::FPq, 1).p(1.0).q(2.0),
        family: Family::Gc { dim: 1, c: 0.5 },
        parameters: vec!["c".into()],
        bounds: Some(vec![(0.2, 5.0)]),
        budget: 60,
        seed: 11,
        operator: Some(fourier()),
        field_grid: None,
    };
    let r = minimize(&search)?;
    if r.trace.iter().any(|t| r.best_value > t.value || !t.value.is_finite()) {
        problems.push("optimizer best exceeds a trace value".into());
    }

    let grid = GridSpec::desk(1)?;
    let mut fields = standard_family(grid)?;
    fields.extend(random_fields(grid, 100, 2024, "protocol")?);
    let mut checked = 0;
    for f in &fields {
        let mut reports = vec![
            primary_up(f, &fourier())?,
            norm_up(f, &fourier(), 2.0.into())?,
            norm_up(f, &fourier(), 4.0.into())?,
            check_heisenberg_nd(f, &fourier(), 2.0.into())?,
            entropic_gap(f, &fourier())?,
            check_hausdorff_young(f, &fourier(), 1.5.into())?,
        ];
        for (p, q) in [(1.0, 2.0), (1.5, 2.5), (1.25, 1.5)] {
            reports.push(check_generalized_up(f, &fourier(), p.into(), q.into())?);
        }
        reports.push(evaluate(&FunctionalSpec::new(Variant::Entropic, 1), f, Some(&LinearOperator::fourier(Convention::Unitary)))?);
        for r in reports {
            checked += 1;
            if r.pass == Some(false) {
                problems.push(format!("{:?} falsified on {}: lhs {} rhs {}", r.spec.variant, f.label, r.lhs, r.rhs));
            }
        }
    }
    Ok(Outcome {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} variants' windows, sweep bit-identical, optimizer consistent over {} evaluations, {checked} inequality checks on {} fields with no witness",
                covered.len(),
                r.evaluations,
                fields.len()
            )
        } else {
            problems.join("; ")
        },
    })
}

/// Every criterion with its title, in order.
pub const CRITERIA: [(&str, fn() -> Result<Outcome>); 8] = [
    ("closed-form family oracles", criterion_1),
    ("Gaussian saturation suite", criterion_2),
    ("generalized norm-UP bound on the standard family", criterion_3),
    ("n = 3 variance-ratio decay rates", criterion_4),
    ("vanishing G functional", criterion_5),
    ("classification witnesses", criterion_6),
    ("exact dilation laws", criterion_7),
    ("property suites", criterion_8),
];
