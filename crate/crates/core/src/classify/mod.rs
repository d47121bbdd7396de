//! Numerical membership testing for the Hadamard classes H_k, SH_k and
//! A_{p,q}. Membership is never proven: a class is either falsified by a
//! concrete witness field or reported consistent on a named test set.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, Exponent, GridSpec, SampledField};
use crate::operators::{ComplexMatrix, LinearOperator};

/// Extremal ratio over a test set with the field that attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub witness: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Falsified { witness: String, value: f64, reason: String },
    /// Neither falsified nor testable (e.g. no structural inverse).
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_falsified(&self) -> bool {
        matches!(self, Verdict::Falsified { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub class: String,
    pub verdict: Verdict,
}

/// Per-field ratios, reported sorted by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub label: String,
    pub one_to_inf: f64,
    pub k_ratio: f64,
    pub special_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub operator: String,
    pub test_set: String,
    pub test_set_size: usize,
    /// Lower bound on ‖A‖_{1→∞}.
    pub one_to_inf: Extremum,
    pub k_estimate: Extremum,
    /// k used for the special residual: the claimed constant, else the estimate.
    pub residual_k: f64,
    pub special_residual: Option<Extremum>,
    pub a_pq: Vec<(Exponent, Exponent, Extremum)>,
    pub tolerance: f64,
    pub verdicts: Vec<ClassVerdict>,
    pub rows: Vec<FieldRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Relative tolerance for "consistent".
    pub tolerance: f64,
    /// (p, q) pairs for the A_{p,q} ratio.
    pub a_pq: Vec<(Exponent, Exponent)>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, a_pq: vec![(Exponent::ONE, Exponent::TWO)] }
    }
}

fn norm(f: &SampledField, p: Exponent) -> Result<f64> {
    Ok(lp_norm(f, p)?.value)
}

fn extremum(values: &[f64], fields: &[SampledField], max: bool) -> Extremum {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        let better = if max { *v > values[best] } else { *v < values[best] };
        if better {
            best = i;
        }
    }
    Extremum { value: values[best], witness: fields[best].label.clone(), index: best }
}

fn nonempty(fields: &[SampledField]) -> Result<()> {
    if fields.is_empty() { Err(Error::EmptyTestSet) } else { Ok(()) }
}

fn one_to_inf_ratios(a: &LinearOperator, fields: &[SampledField]) -> Result<Vec<f64>> {
    fields
        .par_iter()
        .map(|f| Ok(norm(&a.apply(f)?, Exponent::Infinity)? / norm(f, Exponent::ONE)?))
        .collect()
}

fn k_ratios(a: &LinearOperator, fields: &[SampledField]) -> Result<Vec<f64>> {
    let adj = a.adjoint()?;
    fields
        .par_iter()
        .map(|f| {
            let g = adj.apply(&a.apply(f)?)?;
            Ok(norm(&g, Exponent::Infinity)? / norm(f, Exponent::Infinity)?)
        })
        .collect()
}

fn residuals(a: &LinearOperator, k: f64, fields: &[SampledField]) -> Result<Vec<f64>> {
    let adj = a.adjoint()?;
    let inv = a.inverse()?;
    fields
        .par_iter()
        .map(|g| {
            let lhs = adj.apply(g)?;
            let rhs = inv.apply(g)?;
            if !lhs.grid().matches(rhs.grid()) {
                return Err(Error::IncompatibleGrids("A* and A⁻¹ land on different grids".into()));
            }
            let diff = lhs.sub(&rhs.scale(Complex64::new(k, 0.0))?)?;
            Ok(norm(&diff, Exponent::TWO)? / norm(g, Exponent::TWO)?)
        })
        .collect()
}

/// max ‖Af‖_∞/‖f‖_1 over the test set: a lower bound on ‖A‖_{1→∞}.
pub fn estimate_1_to_inf(a: &LinearOperator, fields: &[SampledField]) -> Result<Extremum> {
    nonempty(fields)?;
    Ok(extremum(&one_to_inf_ratios(a, fields)?, fields, true))
}

/// min ‖A*Af‖_∞/‖f‖_∞ over the test set, with its minimizer.
pub fn estimate_k(a: &LinearOperator, fields: &[SampledField]) -> Result<Extremum> {
    nonempty(fields)?;
    Ok(extremum(&k_ratios(a, fields)?, fields, false))
}

/// sup ‖A*g − kA⁻¹g‖₂/‖g‖₂ over the test set.
pub fn special_residual(a: &LinearOperator, k: f64, fields: &[SampledField]) -> Result<Extremum> {
    nonempty(fields)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k = {k} must be positive")));
    }
    Ok(extremum(&residuals(a, k, fields)?, fields, true))
}

/// min (‖Af‖_p‖f‖_p)/(‖Af‖_q‖f‖_q) over the test set.
pub fn estimate_a_pq(a: &LinearOperator, p: Exponent, q: Exponent, fields: &[SampledField]) -> Result<Extremum> {
    nonempty(fields)?;
    let values: Vec<f64> = fields
        .par_iter()
        .map(|f| {
            let af = a.apply(f)?;
            let num = norm(&af, p)? * norm(f, p)?;
            let den = norm(&af, q)? * norm(f, q)?;
            Ok(if den == 0.0 { 0.0 } else { num / den })
        })
        .collect::<Result<_>>()?;
    Ok(extremum(&values, fields, false))
}

/// Full classification of `a` on a named test set.
pub fn classify(
    a: &LinearOperator,
    test_set: &str,
    fields: &[SampledField],
    options: &ClassifyOptions,
) -> Result<ClassReport> {
    nonempty(fields)?;
    let tol = options.tolerance;
    let norms = one_to_inf_ratios(a, fields)?;
    let ks = k_ratios(a, fields)?;
    let one_to_inf = extremum(&norms, fields, true);
    let k_estimate = extremum(&ks, fields, false);
    let residual_k = a.claimed_k.unwrap_or(k_estimate.value);

    let mut verdicts = Vec::new();

    let h = if one_to_inf.value > 1.0 + tol {
        Verdict::Falsified {
            witness: one_to_inf.witness.clone(),
            value: one_to_inf.value,
            reason: "‖Af‖_∞ > ‖f‖_1".into(),
        }
    } else if k_estimate.value <= tol || a.claimed_k.is_some_and(|k| k_estimate.value < k * (1.0 - tol)) {
        Verdict::Falsified {
            witness: k_estimate.witness.clone(),
            value: k_estimate.value,
            reason: match a.claimed_k {
                Some(k) => format!("‖A*Af‖_∞ < {k}·‖f‖_∞"),
                None => "‖A*Af‖_∞ vanishes relative to ‖f‖_∞".into(),
            },
        }
    } else {
        Verdict::Consistent
    };
    let h_class = match a.claimed_k {
        Some(k) => format!("H_{k}"),
        None => "H".into(),
    };
    let h_falsified = h.is_falsified();
    verdicts.push(ClassVerdict { class: h_class, verdict: h });

    let (res_rows, special) = match residuals(a, residual_k, fields) {
        Ok(r) => {
            let ext = extremum(&r, fields, true);
            (r.into_iter().map(Some).collect(), Some(ext))
        }
        Err(Error::NotInvertible(_)) => (vec![None; fields.len()], None),
        Err(e) => return Err(e),
    };
    let sh = if h_falsified {
        // SH_k ⊂ H_k, so any H witness also falsifies SH
        match &verdicts[0].verdict {
            Verdict::Falsified { witness, value, reason } => Verdict::Falsified {
                witness: witness.clone(),
                value: *value,
                reason: format!("not Hadamard: {reason}"),
            },
            _ => unreachable!(),
        }
    } else {
        match &special {
            Some(ext) if ext.value > tol => Verdict::Falsified {
                witness: ext.witness.clone(),
                value: ext.value,
                reason: format!("A*g ≠ {residual_k}·A⁻¹g"),
            },
            Some(_) => Verdict::Consistent,
            None => Verdict::Inconclusive { reason: "no structural inverse".into() },
        }
    };
    verdicts.push(ClassVerdict { class: format!("SH_{residual_k}"), verdict: sh });

    let mut a_pq = Vec::new();
    for &(p, q) in &options.a_pq {
        let ext = estimate_a_pq(a, p, q, fields)?;
        let v = if ext.value <= tol {
            Verdict::Falsified {
                witness: ext.witness.clone(),
                value: ext.value,
                reason: "F_{p,q} ratio vanishes".into(),
            }
        } else {
            Verdict::Consistent
        };
        verdicts.push(ClassVerdict { class: format!("A_{{{p},{q}}}"), verdict: v });
        a_pq.push((p, q, ext));
    }

    let mut rows: Vec<FieldRow> = fields
        .iter()
        .enumerate()
        .map(|(i, f)| FieldRow {
            label: f.label.clone(),
            one_to_inf: norms[i],
            k_ratio: ks[i],
            special_residual: res_rows[i],
        })
        .collect();
    rows.sort_by(|x, y| x.label.cmp(&y.label));

    Ok(ClassReport {
        operator: a.label(),
        test_set: test_set.into(),
        test_set_size: fields.len(),
        one_to_inf,
        k_estimate,
        residual_k,
        special_residual: special,
        a_pq,
        tolerance: tol,
        verdicts,
        rows,
    })
}

/// Exact A*A = kI check for a matrix operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCheck {
    pub size: usize,
    /// Read off the first diagonal entry of A*A.
    pub k: f64,
    /// max |A*A − kI| over entries.
    pub gram_deviation: f64,
    /// max |A* − kA⁻¹| over entries (None if singular).
    pub special_deviation: Option<f64>,
}

pub fn matrix_check(m: &ComplexMatrix) -> MatrixCheck {
    let gram = m.gram();
    let k = gram.get(0, 0).re;
    let special_deviation = m.inverse().ok().map(|inv| {
        let adj = m.adjoint();
        let n = m.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((adj.get(i, j) - inv.get(i, j) * k).norm());
            }
        }
        worst
    });
    MatrixCheck { size: m.size(), k, gram_deviation: gram.distance_to_scaled_identity(k), special_deviation }
}

/// One row of the identity-operator divergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub points: usize,
    pub norm_1: f64,
    pub sup: f64,
}

/// f(x) = 1/√x on (0, 1], sampled on [−1, 1) at each resolution:
/// ‖f‖_1 stays bounded (→ 2) while ‖If‖_∞ = max sample grows like √N,
/// so the identity is not Hadamard.
pub fn divergence_demo_identity(resolutions: &[usize]) -> Result<Vec<DivergenceRow>> {
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("resolutions must be increasing".into()));
    }
    let id = LinearOperator::identity();
    resolutions
        .iter()
        .map(|&n| {
            let grid = GridSpec::new(1, 1.0, n)?;
            let f = SampledField::from_real_fn(grid, format!("x^(-1/2), N={n}"), |x| {
                if x[0] > 0.0 { x[0].powf(-0.5) } else { 0.0 }
            })?;
            let out = id.apply(&f)?;
            Ok(DivergenceRow { points: n, norm_1: norm(&f, Exponent::ONE)?, sup: norm(&out, Exponent::Infinity)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gaussian_field, make_hermite};
    use crate::operators::{Convention, OperatorKind};

    #[test]
    fn empty_test_set_errors() {
        let a = LinearOperator::fourier(Convention::TwoPi);
        assert!(matches!(estimate_k(&a, &[]), Err(Error::EmptyTestSet)));
        assert!(matches!(estimate_1_to_inf(&a, &[]), Err(Error::EmptyTestSet)));
    }

    #[test]
    fn fourier_norm_approaches_one_on_wide_gaussians() {
        let grid = GridSpec::desk(1).unwrap();
        let a = LinearOperator::fourier(Convention::TwoPi);
        // a positive f has ‖f̂‖_∞ = f̂(0) = ‖f‖_1, so every Gaussian attains the bound
        for lambda in [2.0, 1.0, 0.5, 0.25] {
            let g = gaussian_field(lambda, grid).unwrap();
            let v = estimate_1_to_inf(&a, &[g]).unwrap().value;
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        let two = LinearOperator::compose(vec![LinearOperator::scale(2.0).unwrap(), a]).unwrap();
        let g = gaussian_field(1.0, grid).unwrap();
        assert!(estimate_1_to_inf(&two, &[g]).unwrap().value > 1.0);
    }

    #[test]
    fn divergence_table() {
        let rows = divergence_demo_identity(&[256, 1024, 4096, 16384]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].sup > w[0].sup);
            assert!((w[1].norm_1 - 2.0).abs() < (w[0].norm_1 - 2.0).abs());
        }
        let last = rows.last().unwrap();
        assert!((last.sup - (last.points as f64 / 2.0).sqrt()).abs() < 1e-9);
        assert!((last.norm_1 - 2.0).abs() < 0.02);
        assert!(divergence_demo_identity(&[64, 32]).is_err());
    }

    #[test]
    fn fourier_inverse_pair_is_identity_kind() {
        let c = LinearOperator::compose(vec![
            LinearOperator::fourier(Convention::TwoPi),
            LinearOperator::inverse_fourier(Convention::TwoPi),
        ])
        .unwrap();
        assert_eq!(c.simplify().unwrap().kind, OperatorKind::Identity);
    }

    #[test]
    fn dft_matrix_is_special() {
        let m = ComplexMatrix::unitary_dft(64).scaled(0.5);
        let c = matrix_check(&m);
        assert!((c.k - 0.25).abs() < 1e-12);
        assert!(c.gram_deviation < 1e-12);
        assert!(c.special_deviation.unwrap() < 1e-12);
    }

    #[test]
    fn report_rows_sorted() {
        let grid = GridSpec::new(1, 8.0, 256).unwrap();
        let fields = vec![
            make_hermite(&[3], grid).unwrap().with_label("z"),
            make_hermite(&[1], grid).unwrap().with_label("a"),
        ];
        let r = classify(&LinearOperator::fourier(Convention::TwoPi), "two", &fields, &Default::default()).unwrap();
        assert_eq!(r.rows[0].label, "a");
        assert!(r.verdicts.iter().all(|v| !v.verdict.is_falsified()));
    }
}
