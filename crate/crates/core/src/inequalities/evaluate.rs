use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::spec::{FunctionalSpec, Variant};
use crate::error::{Error, Result};
use crate::field::{babenko_beckner, entropy, lp_norm, variance, weighted_norm, Exponent, SampledField};
use crate::operators::{Convention, LinearOperator, OperatorKind};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

const GRID_MAX_NOTE: &str = "‖·‖_∞ is the grid max (lower bound of ess-sup)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub spec: FunctionalSpec,
    pub operator: Option<String>,
    pub field: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs; `None` when rhs = 0.
    pub ratio: Option<f64>,
    pub rhs_zero: bool,
    pub bound_constant: Option<f64>,
    /// Defined only when a concrete bound constant exists.
    pub pass: Option<bool>,
    pub tolerance: f64,
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(spec: &FunctionalSpec, a: Option<&LinearOperator>, f: &SampledField, lhs: f64, rhs: f64) -> Self {
        let rhs_zero = rhs == 0.0;
        let mut notes = Vec::new();
        if rhs_zero {
            notes.push("rhs = 0: ratio undefined".to_string());
        }
        let exps = [spec.p, spec.q, spec.r, spec.s, spec.t, spec.u];
        let uses_inf = exps.iter().flatten().any(|e| e.is_infinite())
            || matches!(
                spec.variant,
                Variant::PrimaryUp | Variant::WeightedUpInfty | Variant::SobolevGeneral
            );
        if uses_inf {
            notes.push(GRID_MAX_NOTE.to_string());
        }
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            spec: spec.clone(),
            operator: a.map(|a| a.label()),
            field: f.label.clone(),
            lhs,
            rhs,
            ratio: if rhs_zero { None } else { Some(lhs / rhs) },
            rhs_zero,
            bound_constant: None,
            pass: None,
            tolerance: spec.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            extras: BTreeMap::new(),
            notes,
        }
    }

    /// Attach a lower bound on the ratio.
    fn ratio_at_least(mut self, bound: f64) -> Self {
        self.bound_constant = Some(bound);
        self.pass = self.ratio.map(|r| r >= bound - self.tolerance);
        self
    }

    /// Attach a lower bound on the left side.
    fn lhs_at_least(mut self, bound: f64) -> Self {
        self.bound_constant = Some(bound);
        self.pass = Some(self.lhs >= bound - self.tolerance);
        self
    }

    fn extra(mut self, key: &str, v: f64) -> Self {
        self.extras.insert(key.to_string(), v);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }
}

/// Convention of A when it reduces to the plain (inverse) Fourier transform.
fn fourier_convention(a: &LinearOperator) -> Option<Convention> {
    match a.simplify().ok()?.kind {
        OperatorKind::Fourier { convention } | OperatorKind::InverseFourier { convention } => Some(convention),
        _ => None,
    }
}

fn norm(f: &SampledField, p: Exponent) -> Result<f64> {
    Ok(lp_norm(f, p)?.value)
}

fn nonzero(v: f64) -> Result<f64> {
    if v == 0.0 { Err(Error::ZeroField) } else { Ok(v) }
}

fn need_op<'a>(a: Option<&'a LinearOperator>, variant: Variant) -> Result<&'a LinearOperator> {
    a.ok_or_else(|| Error::OperatorPrecondition(format!("{variant:?} needs an operator")))
}

fn need_special_or_fourier(a: &LinearOperator) -> Result<()> {
    if fourier_convention(a).is_some() || (a.special && a.claimed_k.is_some()) {
        Ok(())
    } else {
        Err(Error::OperatorPrecondition(format!(
            "{} is neither the Fourier transform nor claimed special",
            a.label()
        )))
    }
}

fn check_dim(spec: &FunctionalSpec, f: &SampledField) -> Result<()> {
    if f.grid().dim() != spec.dim {
        return Err(Error::IncompatibleGrids(format!(
            "spec is {}-D but the field is {}-D",
            spec.dim,
            f.grid().dim()
        )));
    }
    Ok(())
}

/// Generalized norm-UP lower bound on F_{p,q} for the Fourier transform.
pub fn generalized_up_bound(n: usize, p: Exponent, q: Exponent, convention: Convention) -> Result<f64> {
    let (ip, iq) = (p.recip(), q.recip());
    let nf = n as f64;
    let base = if ip == 0.5 {
        1.0
    } else {
        (1.0 / babenko_beckner(p)?).powf(nf * (ip - iq) / (ip - 0.5))
    };
    Ok(match convention {
        Convention::TwoPi => base,
        Convention::Unitary => base * (2.0 * PI).powf(nf * (ip - iq)),
    })
}

/// Sharp Hausdorff–Young constant ‖F‖_{p→p′} in dimension n.
pub fn hausdorff_young_bound(n: usize, p: Exponent, convention: Convention) -> Result<f64> {
    let nf = n as f64;
    let c = babenko_beckner(p)?.powf(nf);
    Ok(match convention {
        Convention::TwoPi => c,
        Convention::Unitary => c * (2.0 * PI).powf(nf * (0.5 - p.recip())),
    })
}

/// Gaussian value of H[f] + H[Ff] in dimension n.
pub fn entropic_bound(n: usize, convention: Convention) -> f64 {
    let nf = n as f64;
    match convention {
        Convention::TwoPi => nf * (1.0 - LN_2),
        Convention::Unitary => nf * (1.0 + PI.ln()),
    }
}

/// Gaussian value of V(f)V(Ff)/‖f‖₂⁴ in dimension n.
pub fn heisenberg_bound(n: usize, convention: Convention) -> f64 {
    let nf = n as f64;
    match convention {
        Convention::TwoPi => nf * nf / (16.0 * PI * PI),
        Convention::Unitary => nf * nf / 4.0,
    }
}

/// (‖f‖_p‖Af‖_p)/(‖f‖_q‖Af‖_q).
#[allow(non_snake_case)]
pub fn functional_F(f: &SampledField, a: &LinearOperator, p: Exponent, q: Exponent) -> Result<f64> {
    let af = a.apply(f)?;
    functional_F_with(f, &af, p, q)
}

#[allow(non_snake_case)]
fn functional_F_with(f: &SampledField, af: &SampledField, p: Exponent, q: Exponent) -> Result<f64> {
    let num = norm(f, p)? * norm(af, p)?;
    let den = nonzero(norm(f, q)? * norm(af, q)?)?;
    Ok(num / den)
}

/// (V(f)/‖f‖_q²)^β · ‖f‖_q/‖f‖_1.
#[allow(non_snake_case)]
pub fn functional_G(f: &SampledField, beta: f64, q: Exponent) -> Result<f64> {
    let fq = nonzero(norm(f, q)?)?;
    let f1 = nonzero(norm(f, Exponent::ONE)?)?;
    Ok((variance(f)? / (fq * fq)).powf(beta) * fq / f1)
}

/// Validate `spec` and evaluate it on `f` (and `A` where the variant uses one).
pub fn evaluate(spec: &FunctionalSpec, f: &SampledField, a: Option<&LinearOperator>) -> Result<VerificationReport> {
    spec.validate()?;
    check_dim(spec, f)?;
    let n = spec.dim;
    let nf = n as f64;
    let v = spec.variant;
    let p = || spec.p.expect("validated");
    let q = || spec.q.expect("validated");
    let r = || spec.r.expect("validated");

    let report = match v {
        Variant::FPq => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let lhs = norm(f, p())? * norm(&af, p())?;
            let rhs = norm(f, q())? * norm(&af, q())?;
            VerificationReport::new(spec, Some(a), f, lhs, nonzero(rhs)?)
        }
        Variant::GBetaQ => {
            let beta = spec.beta_exp.expect("validated");
            let fq = nonzero(norm(f, q())?)?;
            let f1 = nonzero(norm(f, Exponent::ONE)?)?;
            let lhs = (variance(f)? / (fq * fq)).powf(beta);
            VerificationReport::new(spec, None, f, lhs, f1 / fq)
        }
        Variant::PrimaryUp | Variant::NormUp => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let qq = if v == Variant::PrimaryUp { Exponent::Infinity } else { q() };
            let lhs = norm(f, Exponent::ONE)? * norm(&af, Exponent::ONE)?;
            let rhs = norm(f, qq)? * norm(&af, qq)?;
            let rep = VerificationReport::new(spec, Some(a), f, lhs, rhs);
            let k = a.claimed_k.or_else(|| fourier_convention(a).filter(|c| *c == Convention::TwoPi).map(|_| 1.0));
            match k {
                Some(k) => rep.ratio_at_least(k.powf(1.0 - qq.recip())),
                None => rep.note("no Hadamard constant claimed: ratio only"),
            }
        }
        Variant::GeneralizedUp => {
            let a = need_op(a, v)?;
            need_special_or_fourier(a)?;
            let af = a.apply(f)?;
            let lhs = functional_F_with(f, &af, p(), q())?;
            match fourier_convention(a) {
                Some(c) => {
                    let b = generalized_up_bound(n, p(), q(), c)?;
                    VerificationReport::new(spec, Some(a), f, lhs, b).lhs_at_least(b)
                }
                None => VerificationReport::new(spec, Some(a), f, lhs, 1.0)
                    .note("constant C_{p,q,n} unspecified for special operators: value only"),
            }
        }
        Variant::Embedding => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let lhs = norm(f, q())? + norm(&af, q())?;
            let rhs = norm(f, p())? + norm(&af, p())?;
            VerificationReport::new(spec, Some(a), f, lhs, rhs)
        }
        Variant::SobolevGeneral => {
            let (u, t) = (spec.u.expect("validated"), spec.t.expect("validated"));
            let theta = spec.theta.expect("validated");
            let lhs = weighted_norm(f, theta, p())?.value;
            let finf = nonzero(norm(f, Exponent::Infinity)?)?;
            let fr = norm(f, r())?;
            let rv = r().value();
            let gap = theta / nf - u.recip() + p().recip();
            let (frt, e) = match t {
                Exponent::Infinity => (finf, rv * gap),
                Exponent::Finite(tv) => (norm(f, Exponent::Finite(rv * tv))?, rv * tv / (tv - 1.0) * gap),
            };
            let rhs = finf * (fr / finf).powf(rv * u.recip()) * (fr / nonzero(frt)?).powf(e);
            VerificationReport::new(spec, None, f, lhs, rhs)
        }
        Variant::SobolevSimple => {
            let theta = spec.theta.expect("validated");
            let lhs = weighted_norm(f, theta, p())?.value;
            let fp = norm(f, p())?;
            let fq = nonzero(norm(f, q())?)?;
            let e = theta / (nf * (p().recip() - q().recip()));
            VerificationReport::new(spec, None, f, lhs, (fp / fq).powf(e) * fp)
        }
        Variant::FractionalLaplacian => {
            let base = a.cloned().unwrap_or_else(|| LinearOperator::fourier(Convention::TwoPi));
            let s = spec.s_frac.expect("validated");
            let lap = LinearOperator::fractional_laplacian(base.clone(), s)?;
            let lhs = norm(&lap.apply(f)?, Exponent::TWO)?;
            let f2 = nonzero(norm(f, Exponent::TWO)?)?;
            let fp = norm(f, p())?;
            let alpha = nf / (2.0 * s) * (0.5 - p().recip());
            let mut rep = VerificationReport::new(spec, Some(&lap), f, lhs, (fp / f2).powf(1.0 / alpha) * f2)
                .extra("alpha", alpha);
            if s == 0.5 && p().recip() == 1.0 && fourier_convention(&base) == Some(Convention::TwoPi) {
                // ‖∇f‖₂ = 2π‖(−Δ)^{1/2}f‖₂ for the 2π-convention symbol |ξ|.
                let grad = 2.0 * PI * lhs;
                let nash_lhs = fp.powf(2.0 / nf) * grad;
                let nash_rhs = f2.powf(1.0 + 2.0 / nf);
                rep = rep
                    .extra("grad_l2", grad)
                    .extra("nash_lhs", nash_lhs)
                    .extra("nash_rhs", nash_rhs)
                    .extra("nash_ratio", nash_lhs / nash_rhs);
            }
            rep
        }
        Variant::WeightedUpInfty | Variant::WeightedUpHadamard | Variant::WeightedUpSpecialGen => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let (al, be) = (spec.alpha.expect("validated"), spec.beta.expect("validated"));
            let (th, ph) = (spec.theta.expect("validated"), spec.phi.expect("validated"));
            let lhs = weighted_norm(f, th, p())?.value.powf(al) * weighted_norm(&af, ph, q())?.value.powf(be);
            let pair = |e: Exponent| -> Result<f64> { Ok(norm(f, e)?.powf(al) * norm(&af, e)?.powf(be)) };
            let rhs = match v {
                Variant::WeightedUpInfty => pair(Exponent::Infinity)?,
                Variant::WeightedUpHadamard => match spec.s {
                    Some(s) => norm(f, s)? * norm(&af, s)?,
                    None => pair(Exponent::ONE)?,
                },
                _ => pair(r())?,
            };
            VerificationReport::new(spec, Some(a), f, lhs, rhs)
        }
        Variant::WeightedUpSpecialSym => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let th = spec.theta.expect("validated");
            let lhs = weighted_norm(f, th, p())?.value * weighted_norm(&af, th, p())?.value;
            let rhs = norm(f, q())? * norm(&af, q())?;
            VerificationReport::new(spec, Some(a), f, lhs, rhs)
        }
        Variant::HeisenbergNd => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let lhs = variance(f)? * variance(&af)?;
            let rhs = (norm(f, q())? * norm(&af, q())?).powi(2);
            let rep = VerificationReport::new(spec, Some(a), f, lhs, rhs);
            match fourier_convention(a) {
                Some(c) if q().value() == 2.0 => rep.ratio_at_least(heisenberg_bound(n, c)),
                _ => rep,
            }
        }
        Variant::Entropic => {
            let a = need_op(a, v)?;
            let af = a.apply(f)?;
            let lhs = entropy(f)? + entropy(&af)?;
            match fourier_convention(a) {
                Some(c) => {
                    let b = entropic_bound(n, c);
                    VerificationReport::new(spec, Some(a), f, lhs, b).lhs_at_least(b).extra("gap", lhs - b)
                }
                None => VerificationReport::new(spec, Some(a), f, lhs, 1.0)
                    .note("no entropic constant for this operator: lhs only"),
            }
        }
        Variant::HausdorffYoung => {
            let a = need_op(a, v)?;
            need_special_or_fourier(a)?;
            let af = a.apply(f)?;
            let pd = p().dual()?;
            let lhs = norm(&af, pd)?;
            let rhs = nonzero(norm(f, p())?)?;
            let reverse = norm(f, pd)? / nonzero(norm(&af, p())?)?;
            let mut rep = VerificationReport::new(spec, Some(a), f, lhs, rhs).extra("reverse_ratio", reverse);
            if let Some(c) = fourier_convention(a) {
                let b = hausdorff_young_bound(n, p(), c)?;
                rep.bound_constant = Some(b);
                let tol = rep.tolerance;
                rep.pass = rep.ratio.map(|x| x <= b + tol);
            }
            rep
        }
    };
    Ok(report)
}

pub fn check_generalized_up(f: &SampledField, a: &LinearOperator, p: Exponent, q: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::GeneralizedUp, f.grid().dim()).p(p).q(q);
    evaluate(&spec, f, Some(a))
}

pub fn check_embedding(f: &SampledField, a: &LinearOperator, p: Exponent, q: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::Embedding, f.grid().dim()).p(p).q(q);
    evaluate(&spec, f, Some(a))
}

pub fn sobolev_rhs_general(
    f: &SampledField,
    u: Exponent,
    r: Exponent,
    p: Exponent,
    theta: f64,
    t: Exponent,
) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::SobolevGeneral, f.grid().dim()).u(u).r(r).p(p).theta(theta).t(t);
    evaluate(&spec, f, None)
}

pub fn sobolev_rhs_simple(f: &SampledField, theta: f64, p: Exponent, q: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::SobolevSimple, f.grid().dim()).theta(theta).p(p).q(q);
    evaluate(&spec, f, None)
}

/// Uses the 2π-convention Fourier transform as the base operator.
pub fn check_fractional_laplacian(f: &SampledField, s: f64, p: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::FractionalLaplacian, f.grid().dim()).s_frac(s).p(p);
    evaluate(&spec, f, None)
}

/// One of the four weighted variants, selected by `spec.variant`.
pub fn check_weighted_up(f: &SampledField, a: &LinearOperator, spec: &FunctionalSpec) -> Result<VerificationReport> {
    if !matches!(
        spec.variant,
        Variant::WeightedUpInfty | Variant::WeightedUpHadamard | Variant::WeightedUpSpecialSym | Variant::WeightedUpSpecialGen
    ) {
        return Err(Error::InvalidParameter(format!("{:?} is not a weighted variant", spec.variant)));
    }
    evaluate(spec, f, Some(a))
}

pub fn check_heisenberg_nd(f: &SampledField, a: &LinearOperator, q: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::HeisenbergNd, f.grid().dim()).q(q);
    evaluate(&spec, f, Some(a))
}

pub fn entropic_gap(f: &SampledField, a: &LinearOperator) -> Result<VerificationReport> {
    evaluate(&FunctionalSpec::new(Variant::Entropic, f.grid().dim()), f, Some(a))
}

pub fn check_hausdorff_young(f: &SampledField, a: &LinearOperator, p: Exponent) -> Result<VerificationReport> {
    let spec = FunctionalSpec::new(Variant::HausdorffYoung, f.grid().dim()).p(p);
    evaluate(&spec, f, Some(a))
}

pub fn primary_up(f: &SampledField, a: &LinearOperator) -> Result<VerificationReport> {
    evaluate(&FunctionalSpec::new(Variant::PrimaryUp, f.grid().dim()), f, Some(a))
}

pub fn norm_up(f: &SampledField, a: &LinearOperator, q: Exponent) -> Result<VerificationReport> {
    evaluate(&FunctionalSpec::new(Variant::NormUp, f.grid().dim()).q(q), f, Some(a))
}

/// Evaluate several specs on the same field, in parallel, keeping input order.
pub fn evaluate_batch(
    specs: &[FunctionalSpec],
    f: &SampledField,
    a: Option<&LinearOperator>,
) -> Vec<Result<VerificationReport>> {
    use rayon::prelude::*;
    specs.par_iter().map(|s| evaluate(s, f, a)).collect()
}
