use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::SweepResult;
use super::grids::{auto_grid, gc_grid, hermite_grid};
use crate::error::{Error, Result};
use crate::families::{make_gc_field, make_hermite, Family, MAX_HERMITE_INDEX};
use crate::field::{Exponent, GridSpec, SampledField};
use crate::inequalities::{evaluate, functional_F, generalized_up_bound, FunctionalSpec, VerificationReport};
use crate::operators::{Convention, LinearOperator};

/// A functional spec evaluated over one family parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub spec: FunctionalSpec,
    pub family: Family,
    pub parameter: String,
    pub grid: Vec<f64>,
    #[serde(default)]
    pub operator: Option<LinearOperator>,
    /// Fixed sampling grid; chosen per family member when absent.
    #[serde(default)]
    pub field_grid: Option<GridSpec>,
}

/// Largest finite exponent the spec uses, for grid sizing.
pub fn largest_exponent(spec: &FunctionalSpec) -> Option<Exponent> {
    [spec.p, spec.q, spec.r, spec.s, spec.t, spec.u]
        .into_iter()
        .flatten()
        .filter(|e| !e.is_infinite())
        .max_by(|a, b| a.value().total_cmp(&b.value()))
}

/// Sample `family` on the fixed grid or on its automatic grid.
pub(crate) fn sample(family: &Family, fixed: Option<GridSpec>, q: Option<Exponent>) -> Result<SampledField> {
    let grid = match fixed {
        Some(g) => g,
        None => auto_grid(family, q)?,
    };
    Ok(family.sample(grid)?.1)
}

/// Evaluate the configured spec on one family member.
pub fn sweep_point(cfg: &SweepConfig, value: f64) -> Result<VerificationReport> {
    let member = cfg.family.with_param(&cfg.parameter, value)?;
    let f = sample(&member, cfg.field_grid, largest_exponent(&cfg.spec))?;
    evaluate(&cfg.spec, &f, cfg.operator.as_ref())
}

/// Ratio at every grid point, in grid order.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.spec.validate()?;
    let reports = cfg
        .grid
        .par_iter()
        .map(|&x| sweep_point(cfg, x))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(reports.len());
    for (x, r) in cfg.grid.iter().zip(&reports) {
        values.push(r.ratio.ok_or_else(|| {
            Error::InvalidParameter(format!("right side vanished at {} = {x}", cfg.parameter))
        })?);
    }
    let bound = reports[0].bound_constant.filter(|b| reports.iter().all(|r| r.bound_constant == Some(*b)));
    let failures = reports.iter().filter(|r| r.pass == Some(false)).count();
    let mut label = format!("{:?} over {:?}", cfg.spec.variant, cfg.family);
    if let Some(a) = &cfg.operator {
        label.push_str(&format!(" A={}", a.label()));
    }
    let mut out = SweepResult::new(label, cfg.parameter.clone(), cfg.grid.clone(), values)?.with_bound(bound);
    if failures > 0 {
        out = out.with_note(format!("{failures} point(s) fail the attached bound"));
    }
    Ok(out)
}

/// Values of F_{p,2} (2π Fourier, n = 1) reached by g_c and Hermite sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub p: Exponent,
    pub gc: SweepResult,
    pub hermite: SweepResult,
    /// Smallest and largest value seen over both sweeps.
    pub attained: (f64, f64),
    /// Generalized norm-UP bound keeping the image away from 0, for 1 < p < 2.
    pub lower_bound: Option<f64>,
}

/// Probe the image of F_{p,2} over g_c (c ∈ (0, 1]) and h_k (k ≤ 64).
pub fn probe(p: Exponent, c_grid: &[f64], k_grid: &[f64]) -> Result<ProbeResult> {
    if p.value() == 2.0 {
        return Err(Error::InvalidParameter("p = 2 is excluded: F_{2,2} ≡ 1".into()));
    }
    if p.recip() >= 1.0 {
        return Err(Error::InvalidParameter(format!("p ∈ (1, ∞] required, got {p}")));
    }
    if let Some(c) = c_grid.iter().find(|c| !(**c > 0.0 && **c <= 1.0)) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1]")));
    }
    if let Some(k) = k_grid.iter().find(|k| !(k.fract() == 0.0 && **k >= 0.0 && **k <= MAX_HERMITE_INDEX as f64)) {
        return Err(Error::InvalidParameter(format!("k = {k} outside 0..={MAX_HERMITE_INDEX}")));
    }
    let a = LinearOperator::fourier(Convention::TwoPi);
    let two = Exponent::TWO;
    let q_hint = if p.is_infinite() { Some(two) } else { Some(Exponent::Finite(p.value().max(2.0))) };
    let gc_vals = c_grid
        .par_iter()
        .map(|&c| functional_F(&make_gc_field(c, gc_grid(1, c, q_hint)?)?, &a, p, two))
        .collect::<Result<Vec<_>>>()?;
    let grid = hermite_grid()?;
    let h_vals = k_grid
        .par_iter()
        .map(|&k| functional_F(&make_hermite(&[k as usize], grid)?, &a, p, two))
        .collect::<Result<Vec<_>>>()?;
    let lower_bound = if p.value() < 2.0 {
        Some(generalized_up_bound(1, p, two, Convention::TwoPi)?)
    } else {
        None
    };
    let gc = SweepResult::new(format!("F_{{{p},2}}(g_c)"), "c", c_grid.to_vec(), gc_vals)?.with_bound(lower_bound);
    let hermite = SweepResult::new(format!("F_{{{p},2}}(h_k)"), "k", k_grid.to_vec(), h_vals)?.with_bound(lower_bound);
    let attained = (gc.min_value.min(hermite.min_value), gc.max_value.max(hermite.max_value));
    Ok(ProbeResult { p, gc, hermite, attained, lower_bound })
}

/// Growth of ‖h_k‖_q‖ĥ_k‖_q over k = 1..=K (2π Fourier), with the
/// predicted exponent 1/q − 1/2.
pub fn shapiro_growth(q: Exponent, max_k: usize) -> Result<SweepResult> {
    if !(q.recip() <= 1.0 && q.value() < 2.0) {
        return Err(Error::InvalidParameter(format!("q ∈ [1, 2) required, got {q}")));
    }
    if !(5..=MAX_HERMITE_INDEX).contains(&max_k) {
        return Err(Error::InvalidParameter(format!("K = {max_k} outside 5..={MAX_HERMITE_INDEX}")));
    }
    let grid = hermite_grid()?;
    let a = LinearOperator::fourier(Convention::TwoPi);
    let ks: Vec<f64> = (1..=max_k).map(|k| k as f64).collect();
    let vals = ks
        .par_iter()
        .map(|&k| {
            let h = make_hermite(&[k as usize], grid)?;
            let hh = a.apply(&h)?;
            Ok(crate::field::lp_norm(&h, q)?.value * crate::field::lp_norm(&hh, q)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::new(format!("‖h_k‖_{q}‖ĥ_k‖_{q}"), "k", ks, vals)?.with_prediction(Some(q.recip() - 0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::fit::log_grid;
    use crate::inequalities::Variant;

    #[test]
    fn generalized_up_gaussian_dilations_constant() {
        let cfg = SweepConfig {
            spec: FunctionalSpec::new(Variant::GeneralizedUp, 1).p(1.0).q(2.0),
            family: Family::Gaussian { dim: 1, lambda: 1.0 },
            parameter: "lambda".into(),
            grid: log_grid(0.5, 2.0, 5),
            operator: Some(LinearOperator::fourier(Convention::TwoPi)),
            field_grid: Some(GridSpec::desk(1).unwrap()),
        };
        let r = sweep(&cfg).unwrap();
        for v in &r.values {
            assert!((v - 2f64.sqrt()).abs() < 1e-8, "{v}");
        }
        assert_eq!(r.bound_constant, Some(1.0));
    }

    #[test]
    fn probe_rejects_two() {
        assert!(probe(2.0.into(), &[0.1], &[1.0]).is_err());
        assert!(probe(1.0.into(), &[0.1], &[1.0]).is_err());
    }

    #[test]
    fn shapiro_window() {
        assert!(shapiro_growth(2.0.into(), 16).is_err());
        assert!(shapiro_growth(1.0.into(), 65).is_err());
        let r = shapiro_growth(1.5.into(), 16).unwrap();
        assert_eq!(r.grid.len(), 16);
    }
}
