use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::SweepResult;
use super::grids::{falpha_grid, gc_grid, hermite_grid};
use crate::error::{Error, Result, Violation};
use crate::families::{make_falpha_field, make_gc_field, make_hermite, MAX_HERMITE_INDEX};
use crate::field::{Exponent, TensorPower};
use crate::inequalities::functional_G;
use crate::operators::{Convention, LinearOperator};

/// Smallest c the g_c sequences accept.
pub const MIN_C: f64 = 1e-3;

/// Which vanishing-ratio sequence to drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposition {
    /// G_{β,∞} → 0: g_c with c → 0⁺ for n ≥ 3, f_α with α → 0⁺ for n = 2.
    One,
    /// G_{β,q} → 0 for finite q, same sequences.
    Two,
    /// V(f)V(Af)/(‖f‖_q²‖Af‖_q²) → 0 along h_{(k,…,k)}, q < 2n/(n+2).
    ThreeHermite,
    /// The same ratio along g_c with c → 0⁺, q > 2n/(n−2).
    ThreeGc,
}

impl std::str::FromStr for Proposition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(Proposition::One),
            "two" | "2" => Ok(Proposition::Two),
            "three_hermite" => Ok(Proposition::ThreeHermite),
            "three_gc" => Ok(Proposition::ThreeGc),
            _ => Err(Error::InvalidParameter(format!(
                "unknown sequence '{s}' (one, two, three_hermite, three_gc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceParams {
    pub dim: usize,
    #[serde(default)]
    pub q: Option<Exponent>,
    /// Exponent of G; defaults to the dilation-critical value.
    #[serde(default)]
    pub beta: Option<f64>,
    /// One-axis operator A₁ for the variance ratio, acting as A₁^{⊗n};
    /// defaults to the 2π-convention Fourier transform.
    #[serde(default)]
    pub operator: Option<LinearOperator>,
}

impl SequenceParams {
    pub fn new(dim: usize) -> Self {
        Self { dim, q: None, beta: None, operator: None }
    }

    pub fn q(mut self, q: impl Into<Exponent>) -> Self {
        self.q = Some(q.into());
        self
    }

    pub fn beta(mut self, b: f64) -> Self {
        self.beta = Some(b);
        self
    }
}

/// β making G_{β,q} dilation invariant: n/(n+2) at q = ∞,
/// n(q−1)/((n+2)q−2n) otherwise; `None` when that value is not positive.
pub fn critical_beta(n: usize, q: Exponent) -> Option<f64> {
    let nf = n as f64;
    let b = match q {
        Exponent::Infinity => nf / (nf + 2.0),
        Exponent::Finite(qv) => nf * (qv - 1.0) / ((nf + 2.0) * qv - 2.0 * nf),
    };
    (b > 0.0 && b.is_finite()).then_some(b)
}

fn window(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (2.0 * nf / (nf + 2.0), 2.0 * nf / (nf - 2.0))
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

/// Effective (q, β) after defaults, or the violated windows.
fn resolve(prop: Proposition, p: &SequenceParams) -> std::result::Result<(Exponent, Option<f64>), Vec<Violation>> {
    let mut v = Vec::new();
    let n = p.dim;
    let mut need = |ok: bool, c: &str, d: String| {
        if !ok {
            v.push(Violation::new(c, d));
        }
    };
    let q = match prop {
        Proposition::One => p.q.unwrap_or(Exponent::Infinity),
        _ => p.q.unwrap_or(Exponent::TWO),
    };
    match prop {
        Proposition::One | Proposition::Two => {
            need(n >= 2, "n ≥ 2", format!("n = {n}"));
            need(n <= 3, "n ≤ 3", format!("n = {n}"));
            if prop == Proposition::One {
                need(q.is_infinite(), "q = ∞", format!("q = {q}"));
            } else {
                need(p.q.is_some(), "q given", "q is required".into());
                need(!q.is_infinite(), "q < ∞", format!("q = {q}"));
                need(q.recip() <= 1.0, "q ≥ 1", format!("q = {q}"));
                if n > 2 {
                    let lo = window(n).0;
                    let qv = q.value();
                    need(!(qv > lo && qv <= 2.0), &format!("q ∉ ({lo}, 2]"), format!("q = {q}"));
                }
            }
            if let Some(b) = p.beta {
                need(b > 0.0 && b.is_finite(), "β > 0", format!("β = {b}"));
            } else if n >= 2 && critical_beta(n, q).is_none() {
                need(false, "β > 0 (critical β_{n,q} is not positive here, give β)", format!("n = {n}, q = {q}"));
            }
        }
        Proposition::ThreeHermite => {
            need(n >= 3, "n ≥ 3", format!("n = {n}"));
            need(q.recip() <= 1.0, "q ≥ 1", format!("q = {q}"));
            if n >= 3 {
                let lo = window(n).0;
                need(q.value() < lo, &format!("q < 2n/(n+2) = {lo}"), format!("q = {q}"));
            }
        }
        Proposition::ThreeGc => {
            need(n >= 3, "n ≥ 3", format!("n = {n}"));
            if n >= 3 {
                let hi = window(n).1;
                need(q.value() > hi, &format!("q > 2n/(n−2) = {hi}"), format!("q = {q}"));
            }
        }
    }
    if !v.is_empty() {
        return Err(v);
    }
    let beta = match prop {
        Proposition::One | Proposition::Two => p.beta.or_else(|| critical_beta(n, q)),
        _ => None,
    };
    Ok((q, beta))
}

/// Every violated window for the sequence, empty when valid.
pub fn sequence_violations(prop: Proposition, params: &SequenceParams) -> Vec<Violation> {
    resolve(prop, params).err().unwrap_or_default()
}

/// Slope of the ratio against the sequence index predicted by the
/// closed-form asymptotics, when one applies.
pub fn predicted_slope(prop: Proposition, n: usize, q: Exponent, beta: Option<f64>) -> Option<f64> {
    let nf = n as f64;
    let crit = critical_beta(n, q);
    let is_crit = matches!((beta, crit), (Some(b), Some(c)) if same(b, c));
    match prop {
        Proposition::One | Proposition::Two if n == 2 => {
            // G_{β,q}(f_α): (5πα/32)^β·(‖f‖_q/‖f‖₁)^{1−2β}.
            let b = beta?;
            if q.recip() == 1.0 {
                Some(b)
            } else if same(b, 0.5) {
                Some(0.5)
            } else {
                None
            }
        }
        Proposition::One if is_crit => Some(nf * (nf - 2.0) / (nf + 2.0)),
        Proposition::Two if is_crit && q.value() > 2.0 => {
            let qv = q.value();
            Some((qv - 2.0) * nf * (nf - 2.0) / ((nf + 2.0) * qv - 2.0 * nf))
        }
        Proposition::ThreeHermite => Some(2.0 * (1.0 - nf * (q.recip() - 0.5))),
        Proposition::ThreeGc => Some(2.0 * (nf * (1.0 - 2.0 * q.recip()) - 2.0)),
        _ => None,
    }
}

fn check_indices(prop: Proposition, n: usize, indices: &[f64]) -> Result<()> {
    let bad = |msg: String| Err(Error::Constraint(vec![Violation::new("sequence index range", msg)]));
    for &x in indices {
        match (prop, n) {
            (Proposition::ThreeHermite, _) => {
                if !(x >= 1.0 && x.fract() == 0.0 && x <= MAX_HERMITE_INDEX as f64) {
                    return bad(format!("k = {x} must be an integer in [1, {MAX_HERMITE_INDEX}]"));
                }
            }
            (Proposition::One | Proposition::Two, 2) => {
                if !(x > 0.0 && x.is_finite()) {
                    return bad(format!("α = {x} must be positive"));
                }
            }
            _ => {
                if !(x >= MIN_C && x <= 1.0) {
                    return bad(format!("c = {x} must lie in [{MIN_C}, 1]"));
                }
            }
        }
    }
    Ok(())
}

fn g_value(t: &TensorPower, beta: f64, q: Exponent) -> Result<f64> {
    let fq = t.lp_norm(q)?;
    let f1 = t.lp_norm(Exponent::ONE)?;
    if fq == 0.0 || f1 == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((t.variance()? / (fq * fq)).powf(beta) * fq / f1)
}

fn variance_ratio(f: &TensorPower, af: &TensorPower, q: Exponent) -> Result<f64> {
    let den = (f.lp_norm(q)? * af.lp_norm(q)?).powi(2);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(f.variance()? * af.variance()? / den)
}

fn point(prop: Proposition, params: &SequenceParams, q: Exponent, beta: Option<f64>, x: f64) -> Result<f64> {
    let n = params.dim;
    let qhint = Some(q);
    match prop {
        Proposition::One | Proposition::Two if n == 2 => {
            let f = make_falpha_field(x, falpha_grid(x)?)?;
            functional_G(&f, beta.expect("resolved"), q)
        }
        Proposition::One | Proposition::Two => {
            let f = make_gc_field(x, gc_grid(1, x, qhint)?)?;
            g_value(&TensorPower::new(f, n)?, beta.expect("resolved"), q)
        }
        Proposition::ThreeHermite | Proposition::ThreeGc => {
            let f = if prop == Proposition::ThreeHermite {
                make_hermite(&[x as usize], hermite_grid()?)?
            } else {
                make_gc_field(x, gc_grid(1, x, qhint)?)?
            };
            let a = params.operator.clone().unwrap_or_else(|| LinearOperator::fourier(Convention::TwoPi));
            let af = a.apply(&f)?;
            variance_ratio(&TensorPower::new(f, n)?, &TensorPower::new(af, n)?, q)
        }
    }
}

/// Evaluate the sequence's ratio at each index and fit its log–log slope.
///
/// Indices are c for g_c sequences, α for f_α (n = 2) and k for Hermite
/// tensors h_{(k,…,k)}. Tensor-product fields in n ≥ 3 are evaluated from
/// their one-axis factor through exact separable identities.
pub fn run_sequence(prop: Proposition, params: &SequenceParams, indices: &[f64]) -> Result<SweepResult> {
    let (q, beta) = resolve(prop, params).map_err(Error::Constraint)?;
    let n = params.dim;
    check_indices(prop, n, indices)?;
    let values = indices
        .par_iter()
        .map(|&x| point(prop, params, q, beta, x))
        .collect::<Result<Vec<f64>>>()?;
    let parameter = match (prop, n) {
        (Proposition::ThreeHermite, _) => "k",
        (Proposition::One | Proposition::Two, 2) => "alpha",
        _ => "c",
    };
    let mut label = format!("{prop:?} n={n} q={q}");
    if let Some(b) = beta {
        label.push_str(&format!(" beta={b}"));
    }
    if let Some(a) = &params.operator {
        label.push_str(&format!(" A={}", a.label()));
    }
    Ok(SweepResult::new(label, parameter, indices.to_vec(), values)?
        .with_prediction(predicted_slope(prop, n, q, beta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::fit::log_grid;

    #[test]
    fn windows_are_named() {
        let v = sequence_violations(Proposition::ThreeHermite, &SequenceParams::new(3).q(1.5));
        assert_eq!(v.len(), 1);
        assert!(v[0].constraint.starts_with("q < 2n/(n+2)"));
        let v = sequence_violations(Proposition::ThreeGc, &SequenceParams::new(3).q(6.0));
        assert!(v[0].constraint.starts_with("q > 2n/(n−2)"));
        let v = sequence_violations(Proposition::One, &SequenceParams::new(1));
        assert_eq!(v[0].constraint, "n ≥ 2");
        let v = sequence_violations(Proposition::Two, &SequenceParams::new(3).q(1.5));
        assert!(v[0].constraint.starts_with("q ∉"));
    }

    #[test]
    fn critical_betas() {
        assert_eq!(critical_beta(3, Exponent::Infinity), Some(0.6));
        assert_eq!(critical_beta(2, Exponent::Finite(3.0)), Some(0.5));
        assert_eq!(critical_beta(3, Exponent::Finite(1.0)), None);
    }

    #[test]
    fn predicted_rates() {
        let p = predicted_slope(Proposition::ThreeHermite, 3, 1.0.into(), None).unwrap();
        assert_eq!(p, -1.0);
        let p = predicted_slope(Proposition::ThreeGc, 3, 12.0.into(), None).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let p = predicted_slope(Proposition::One, 3, Exponent::Infinity, Some(0.6)).unwrap();
        assert!((p - 0.6).abs() < 1e-12);
    }

    #[test]
    fn prop_one_matches_closed_form() {
        // G_{n/(n+2),∞}(g_c) from the closed-form norms and variance.
        let n = 3;
        let cs = log_grid(0.05, 1.0, 5);
        let r = run_sequence(Proposition::One, &SequenceParams::new(n), &cs).unwrap();
        for (c, v) in cs.iter().zip(&r.values) {
            let s = c.sqrt() + 1.0 / c.sqrt();
            let m2 = 2f64.sqrt() + 2.0 * c / (c.powi(4) + 1.0).sqrt();
            let v1 = ((c.powi(4) + 1.0) / (4.0 * 2f64.sqrt() * c * c) + c.powi(3) / (c.powi(4) + 1.0).powf(1.5))
                / std::f64::consts::PI;
            let var = 3.0 * m2 * m2 * v1;
            let want = (var / s.powi(6)).powf(0.6) * s.powi(3) / s.powi(3);
            assert!((v - want).abs() < 1e-8 * want, "c = {c}: {v} vs {want}");
        }
    }

    #[test]
    fn prop_one_falpha_closed_form() {
        let r = run_sequence(Proposition::One, &SequenceParams::new(2), &[0.5, 0.75, 1.0, 1.5, 2.0]).unwrap();
        for (a, v) in r.grid.iter().zip(&r.values) {
            let want = (5.0 * std::f64::consts::PI * a / 32.0).sqrt();
            assert!((v / want - 1.0).abs() < 0.01, "α = {a}: {v} vs {want}");
        }
        assert!((r.slope().unwrap() - 0.5).abs() < 0.05);
    }

    #[test]
    fn index_ranges() {
        let p = SequenceParams::new(3).q(1.0);
        assert!(run_sequence(Proposition::ThreeHermite, &p, &[1.0, 2.0, 3.0, 4.0, 65.0]).is_err());
        assert!(run_sequence(Proposition::One, &SequenceParams::new(3), &[1e-4, 1e-3, 1e-2, 0.1, 1.0]).is_err());
    }
}
