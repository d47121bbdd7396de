use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::diffeo::{apply_diffeo, DiffeoSpec};
use super::fourier::{transform, Convention};
use super::fractional::apply_fractional;
use super::matrix::ComplexMatrix;
use super::multipliers::{Partition, PhaseSpec};
use crate::error::{Error, Result};
use crate::field::SampledField;

/// Entry tolerance for exact matrix identities.
const MATRIX_TOL: f64 = 1e-12;

/// Operator kinds. `Compose { factors: [A, B] }` is A∘B, so B acts first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    Identity,
    /// Multiplication by a real constant.
    Scale { factor: f64 },
    Fourier { convention: Convention },
    InverseFourier { convention: Convention },
    /// Unitary convention only.
    FractionalFourier { angle: f64 },
    Phase { phase: PhaseSpec },
    /// f ↦ w·f∘ψ.
    Diffeo { map: DiffeoSpec, weight: f64 },
    Step { partition: Partition },
    Matrix { matrix: ComplexMatrix },
    Sum { terms: Vec<LinearOperator> },
    Compose { factors: Vec<LinearOperator> },
    /// k·A*[|ξ|^{2s}·Af] for a base operator with a Hadamard constant k.
    FractionalLaplacian { base: Box<LinearOperator>, s: f64 },
}

/// Operator descriptor plus its asserted class membership.
///
/// `claimed_k` is the Hadamard constant asserted by the constructor (or by a
/// config file); `special` additionally asserts A* = kA⁻¹. Neither is trusted
/// by the classifier, which re-estimates both numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOperator {
    #[serde(flatten)]
    pub kind: OperatorKind,
    #[serde(default)]
    pub claimed_k: Option<f64>,
    #[serde(default)]
    pub special: bool,
}

impl LinearOperator {
    fn plain(kind: OperatorKind) -> Self {
        Self { kind, claimed_k: None, special: false }
    }

    fn special_with(kind: OperatorKind, k: f64) -> Self {
        Self { kind, claimed_k: Some(k), special: true }
    }

    /// Override the asserted class membership.
    pub fn with_claim(mut self, k: Option<f64>, special: bool) -> Self {
        self.claimed_k = k;
        self.special = special && k.is_some();
        self
    }

    pub fn identity() -> Self {
        Self::plain(OperatorKind::Identity)
    }

    pub fn scale(factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        Ok(Self::plain(OperatorKind::Scale { factor }))
    }

    pub fn fourier(convention: Convention) -> Self {
        Self::special_with(OperatorKind::Fourier { convention }, 1.0)
    }

    pub fn inverse_fourier(convention: Convention) -> Self {
        Self::special_with(OperatorKind::InverseFourier { convention }, 1.0)
    }

    /// Hadamard (k = 1) only when the kernel bound 1/√(2π|sin θ|) is ≤ 1.
    pub fn fractional_fourier(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::InvalidParameter(format!("fractional angle {angle}")));
        }
        let kind = OperatorKind::FractionalFourier { angle };
        if 2.0 * PI * angle.sin().abs() >= 1.0 {
            Ok(Self::special_with(kind, 1.0))
        } else {
            Ok(Self::plain(kind))
        }
    }

    pub fn phase(phase: PhaseSpec) -> Result<Self> {
        phase.validate()?;
        Ok(Self::plain(OperatorKind::Phase { phase }))
    }

    pub fn diffeo(map: DiffeoSpec, weight: f64) -> Result<Self> {
        map.validate()?;
        if !(weight.is_finite() && weight != 0.0) {
            return Err(Error::InvalidParameter(format!("diffeo weight {weight}")));
        }
        Ok(Self::plain(OperatorKind::Diffeo { map, weight }))
    }

    pub fn step(partition: Partition) -> Self {
        Self::plain(OperatorKind::Step { partition })
    }

    /// Claims k when A*A = kI and every entry has modulus ≤ 1.
    pub fn matrix(matrix: ComplexMatrix) -> Self {
        let k = matrix_k(&matrix);
        let bounded = (0..matrix.size())
            .all(|i| (0..matrix.size()).all(|j| matrix.get(i, j).norm() <= 1.0 + MATRIX_TOL));
        match k {
            Some(k) if bounded && k > 0.0 => Self::special_with(OperatorKind::Matrix { matrix }, k),
            _ => Self::plain(OperatorKind::Matrix { matrix }),
        }
    }

    pub fn sum(terms: Vec<LinearOperator>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("sum of zero operators".into()));
        }
        Ok(Self::plain(OperatorKind::Sum { terms }))
    }

    /// A∘B∘… applied right to left.
    ///
    /// Carries a claim when exactly one factor is special and the others are
    /// unimodular-type factors (phase, diffeo, scale) with U*U = αI whose
    /// sup-norm scalings multiply to at most 1; the claim is then αk.
    pub fn compose(factors: Vec<LinearOperator>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("composition of zero operators".into()));
        }
        let mut k = None;
        let mut alpha = 1.0;
        let mut sup_scale = 1.0;
        let mut claim_ok = true;
        for f in &factors {
            if f.special {
                if k.is_some() {
                    claim_ok = false;
                }
                k = f.claimed_k;
                continue;
            }
            match &f.kind {
                OperatorKind::Identity => {}
                OperatorKind::Phase { .. } => {}
                OperatorKind::Scale { factor } => {
                    alpha *= factor * factor;
                    sup_scale *= factor.abs();
                }
                OperatorKind::Diffeo { map, weight } => {
                    let c = map.jacobian_constant()?;
                    alpha *= weight * weight / c;
                    sup_scale *= weight.abs().max(weight.abs() / c);
                }
                _ => claim_ok = false,
            }
        }
        let op = Self::plain(OperatorKind::Compose { factors });
        match k {
            Some(k) if claim_ok && sup_scale <= 1.0 + 1e-12 => Ok(op.with_claim(Some(alpha * k), true)),
            _ => Ok(op),
        }
    }

    /// Requires a Hadamard constant on the base operator.
    pub fn fractional_laplacian(base: LinearOperator, s: f64) -> Result<Self> {
        if base.claimed_k.is_none() {
            return Err(Error::MissingHadamardConstant(base.label()));
        }
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidParameter(format!("fractional order s = {s}")));
        }
        Ok(Self::plain(OperatorKind::FractionalLaplacian { base: Box::new(base), s }))
    }

    /// D_ψ∘F for the twist ψ(ξ₁, ξ₂) = (ξ₁e^{γξ₁ξ₂}, ξ₂e^{−γξ₁ξ₂}); special with k = 1.
    pub fn twist_fourier(gamma: f64, dim: usize) -> Result<Self> {
        if dim != 2 {
            return Err(Error::OperatorPrecondition(format!("the twist needs n = 2, got n = {dim}")));
        }
        let d = Self::diffeo(DiffeoSpec::Twist { gamma }, 1.0)?;
        Self::compose(vec![d, Self::fourier(Convention::TwoPi)])
    }

    /// A*A = kI structurally, when known.
    pub fn structural_k(&self) -> Option<f64> {
        match &self.kind {
            OperatorKind::Identity
            | OperatorKind::Fourier { .. }
            | OperatorKind::InverseFourier { .. }
            | OperatorKind::FractionalFourier { .. }
            | OperatorKind::Phase { .. } => Some(1.0),
            OperatorKind::Scale { factor } => Some(factor * factor),
            OperatorKind::Diffeo { map, weight } => {
                map.jacobian_constant().ok().map(|c| weight * weight / c)
            }
            OperatorKind::Step { partition } => {
                let (m, big) = partition.bounds();
                (m == big).then_some(m * m)
            }
            OperatorKind::Matrix { matrix } => matrix_k(matrix),
            OperatorKind::Compose { factors } => {
                factors.iter().try_fold(1.0, |acc, f| f.structural_k().map(|k| acc * k))
            }
            OperatorKind::Sum { .. } | OperatorKind::FractionalLaplacian { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.claimed_k {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidParameter(format!("claimed_k = {k} must be positive")));
            }
        }
        match &self.kind {
            OperatorKind::Scale { factor } if !factor.is_finite() => {
                Err(Error::InvalidParameter(format!("scale factor {factor}")))
            }
            OperatorKind::FractionalFourier { angle } if !angle.is_finite() => {
                Err(Error::InvalidParameter(format!("fractional angle {angle}")))
            }
            OperatorKind::Phase { phase } => phase.validate(),
            OperatorKind::Diffeo { map, weight } => {
                map.validate()?;
                if weight.is_finite() && *weight != 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("diffeo weight {weight}")))
                }
            }
            OperatorKind::Sum { terms } | OperatorKind::Compose { factors: terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidParameter("empty operator list".into()));
                }
                terms.iter().try_for_each(|t| t.validate())
            }
            OperatorKind::FractionalLaplacian { base, s } => {
                if base.claimed_k.is_none() {
                    return Err(Error::MissingHadamardConstant(base.label()));
                }
                if !(s.is_finite() && *s >= 0.0) {
                    return Err(Error::InvalidParameter(format!("fractional order s = {s}")));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            OperatorKind::Identity => "I".into(),
            OperatorKind::Scale { factor } => format!("{factor}·I"),
            OperatorKind::Fourier { convention } => format!("F({})", convention_name(*convention)),
            OperatorKind::InverseFourier { convention } => {
                format!("F⁻¹({})", convention_name(*convention))
            }
            OperatorKind::FractionalFourier { angle } => format!("F_{angle}"),
            OperatorKind::Phase { phase } => format!("M[{phase:?}]"),
            OperatorKind::Diffeo { map, weight } => format!("{weight}·D[{map:?}]"),
            OperatorKind::Step { partition } => format!("B{:?}", partition.weights()),
            OperatorKind::Matrix { matrix } => format!("Mat{}", matrix.size()),
            OperatorKind::Sum { terms } => {
                format!("({})", terms.iter().map(|t| t.label()).collect::<Vec<_>>().join(" + "))
            }
            OperatorKind::Compose { factors } => {
                factors.iter().map(|t| t.label()).collect::<Vec<_>>().join("∘")
            }
            OperatorKind::FractionalLaplacian { base, s } => format!("(−Δ_{})^{s}", base.label()),
        }
    }

    /// Structural adjoint.
    pub fn adjoint(&self) -> Result<Self> {
        let op = match &self.kind {
            OperatorKind::Identity => Self::identity(),
            OperatorKind::Scale { factor } => Self::scale(*factor)?,
            OperatorKind::Fourier { convention } => Self::inverse_fourier(*convention),
            OperatorKind::InverseFourier { convention } => Self::fourier(*convention),
            OperatorKind::FractionalFourier { angle } => Self::fractional_fourier(-angle)?,
            OperatorKind::Phase { phase } => Self::phase(phase.conj())?,
            OperatorKind::Diffeo { map, weight } => {
                Self::diffeo(map.inverse()?, weight / map.jacobian_constant()?)?
            }
            OperatorKind::Step { partition } => Self::step(partition.clone()),
            OperatorKind::Matrix { matrix } => Self::matrix(matrix.adjoint()),
            OperatorKind::Sum { terms } => {
                Self::sum(terms.iter().map(|t| t.adjoint()).collect::<Result<_>>()?)?
            }
            OperatorKind::Compose { factors } => {
                Self::compose(factors.iter().rev().map(|t| t.adjoint()).collect::<Result<_>>()?)?
            }
            OperatorKind::FractionalLaplacian { .. } => self.clone(),
        };
        Ok(op)
    }

    pub fn inverse(&self) -> Result<Self> {
        let op = match &self.kind {
            OperatorKind::Identity => Self::identity(),
            OperatorKind::Scale { factor } => {
                if *factor == 0.0 {
                    return Err(Error::NotInvertible("zero scale".into()));
                }
                Self::scale(1.0 / factor)?
            }
            OperatorKind::Fourier { convention } => Self::inverse_fourier(*convention),
            OperatorKind::InverseFourier { convention } => Self::fourier(*convention),
            OperatorKind::FractionalFourier { angle } => Self::fractional_fourier(-angle)?,
            OperatorKind::Phase { phase } => Self::phase(phase.conj())?,
            OperatorKind::Diffeo { map, weight } => Self::diffeo(map.inverse()?, 1.0 / weight)?,
            OperatorKind::Step { partition } => {
                let w = partition.weights().iter().map(|a| 1.0 / a).collect();
                Self::step(partition.with_weights(w)?)
            }
            OperatorKind::Matrix { matrix } => Self::matrix(matrix.inverse()?),
            OperatorKind::Sum { .. } => {
                return Err(Error::NotInvertible("sums have no structural inverse".into()))
            }
            OperatorKind::Compose { factors } => {
                Self::compose(factors.iter().rev().map(|t| t.inverse()).collect::<Result<_>>()?)?
            }
            OperatorKind::FractionalLaplacian { .. } => {
                return Err(Error::NotInvertible("fractional Laplacian".into()))
            }
        };
        Ok(op)
    }

    /// Flattens compositions, drops identities and cancels adjacent inverse pairs.
    pub fn simplify(&self) -> Result<Self> {
        let factors = match &self.kind {
            OperatorKind::Compose { factors } => factors,
            OperatorKind::Diffeo { .. } if is_identity_factor(self) => return Ok(Self::identity()),
            _ => return Ok(self.clone()),
        };
        let mut flat = Vec::new();
        for f in factors {
            let s = f.simplify()?;
            match s.kind {
                OperatorKind::Compose { factors } => flat.extend(factors),
                _ => flat.push(s),
            }
        }
        let mut out: Vec<LinearOperator> = Vec::new();
        for f in flat {
            if is_identity_factor(&f) {
                continue;
            }
            if let Some(last) = out.last() {
                if let Some(merged) = merge(last, &f)? {
                    out.pop();
                    if !is_identity_factor(&merged) {
                        out.push(merged);
                    }
                    continue;
                }
            }
            out.push(f);
        }
        match out.len() {
            0 => Ok(Self::identity()),
            1 => Ok(out.pop().expect("one factor")),
            _ => Self::compose(out),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let op: Self = serde_json::from_str(s)?;
        op.validate()?;
        Ok(op)
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        match &self.kind {
            OperatorKind::Identity => Ok(f.clone()),
            OperatorKind::Scale { factor } => {
                f.map(format!("{factor}·{}", f.label), |_, v| v * *factor)
            }
            OperatorKind::Fourier { convention } => transform(f, *convention, false),
            OperatorKind::InverseFourier { convention } => transform(f, *convention, true),
            OperatorKind::FractionalFourier { angle } => apply_fractional(f, *angle),
            OperatorKind::Phase { phase } => phase.apply(f),
            OperatorKind::Diffeo { map, weight } => apply_diffeo(f, map, *weight),
            OperatorKind::Step { partition } => partition.apply(f),
            OperatorKind::Matrix { matrix } => matrix.apply(f),
            OperatorKind::Sum { terms } => {
                let mut acc = terms[0].apply(f)?;
                for t in &terms[1..] {
                    let next = t.apply(f)?;
                    if !acc.grid().matches(next.grid()) {
                        return Err(Error::IncompatibleGrids(format!(
                            "sum terms map to different grids ({} vs {})",
                            terms[0].label(),
                            t.label()
                        )));
                    }
                    acc = acc.add(&next)?;
                }
                Ok(acc.with_label(format!("{}[{}]", self.label(), f.label)))
            }
            OperatorKind::Compose { factors } => {
                let mut g = f.clone();
                for a in factors.iter().rev() {
                    g = a.apply(&g)?;
                }
                Ok(g)
            }
            OperatorKind::FractionalLaplacian { base, s } => {
                let k = base.claimed_k.ok_or_else(|| Error::MissingHadamardConstant(base.label()))?;
                let af = base.apply(f)?;
                let grid = *af.grid();
                let weighted = af.map(af.label.clone(), |i, v| v * grid.radius_sq(i).powf(*s))?;
                let out = base.adjoint()?.apply(&weighted)?;
                out.map(format!("(−Δ)^{s}[{}]", f.label), |_, v| v * k)
            }
        }
    }
}

fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::TwoPi => "2π",
        Convention::Unitary => "unitary",
    }
}

/// k with A*A = kI to entry tolerance, if any.
fn matrix_k(m: &ComplexMatrix) -> Option<f64> {
    let g = m.gram();
    let k = g.get(0, 0).re;
    (g.distance_to_scaled_identity(k) <= MATRIX_TOL * k.abs().max(1.0)).then_some(k)
}

fn is_identity_factor(op: &LinearOperator) -> bool {
    match &op.kind {
        OperatorKind::Identity => true,
        OperatorKind::Scale { factor } => *factor == 1.0,
        OperatorKind::FractionalFourier { angle } => angle.rem_euclid(2.0 * PI) == 0.0,
        OperatorKind::Phase { phase: PhaseSpec::Constant { angle } } => angle.rem_euclid(2.0 * PI) == 0.0,
        OperatorKind::Diffeo { map, weight } => {
            *weight == 1.0
                && match map {
                    DiffeoSpec::Twist { gamma } => *gamma == 0.0,
                    DiffeoSpec::Translate { offset } => offset.iter().all(|v| *v == 0.0),
                    DiffeoSpec::Linear { matrix } => matrix.iter().enumerate().all(|(i, r)| {
                        r.iter().enumerate().all(|(j, v)| *v == if i == j { 1.0 } else { 0.0 })
                    }),
                }
        }
        OperatorKind::Step { partition } => partition.weights().iter().all(|w| *w == 1.0),
        OperatorKind::Matrix { matrix } => {
            matrix.distance_to_scaled_identity(1.0) <= MATRIX_TOL
        }
        _ => false,
    }
}

/// a∘b collapsed into one factor, if the pair has a structural product.
fn merge(a: &LinearOperator, b: &LinearOperator) -> Result<Option<LinearOperator>> {
    use OperatorKind as K;
    let merged = match (&a.kind, &b.kind) {
        (K::Fourier { convention: x }, K::InverseFourier { convention: y })
        | (K::InverseFourier { convention: x }, K::Fourier { convention: y })
            if x == y =>
        {
            Some(LinearOperator::identity())
        }
        (K::FractionalFourier { angle: x }, K::FractionalFourier { angle: y }) => {
            Some(LinearOperator::fractional_fourier(x + y)?)
        }
        (K::Scale { factor: x }, K::Scale { factor: y }) => Some(LinearOperator::scale(x * y)?),
        (K::Phase { phase: p }, K::Phase { phase: q }) if *q == p.conj() => {
            Some(LinearOperator::identity())
        }
        (K::Diffeo { map: m, weight: w }, K::Diffeo { map: n, weight: v })
            if m.inverse().ok().as_ref() == Some(n) && w * v == 1.0 =>
        {
            Some(LinearOperator::identity())
        }
        (K::Step { partition: p }, K::Step { partition: q }) if p.regions() == q.regions() => {
            let w = p.weights().iter().zip(q.weights()).map(|(x, y)| x * y).collect();
            Some(LinearOperator::step(p.with_weights(w)?))
        }
        (K::Matrix { matrix: m }, K::Matrix { matrix: n }) if m.size() == n.size() => {
            Some(LinearOperator::matrix(m.mul(n)))
        }
        _ => None,
    };
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::families::make_hermite;
    use crate::field::{lp_norm, Exponent, GridSpec};
    use crate::operators::multipliers::Regions;

    fn rel_l2(a: &SampledField, b: &SampledField) -> f64 {
        let d = lp_norm(&a.sub(b).unwrap(), Exponent::TWO).unwrap().value;
        d / lp_norm(b, Exponent::TWO).unwrap().value
    }

    fn bump(grid: GridSpec) -> SampledField {
        SampledField::from_fn(grid, "bump", |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2).exp() * (1.0 + 0.3 * x[0]), 0.2 * (-2.0 * r2).exp())
        })
        .unwrap()
    }

    #[test]
    fn compose_applies_right_factor_first() {
        let grid = GridSpec::new(1, 6.0, 64).unwrap();
        let f = bump(grid);
        let b = LinearOperator::step(Partition::half_space(0, 0.0, 2.0, 3.0).unwrap());
        let a = LinearOperator::fourier(Convention::TwoPi);
        let ab = LinearOperator::compose(vec![a.clone(), b.clone()]).unwrap();
        let direct = a.apply(&b.apply(&f).unwrap()).unwrap();
        assert_eq!(ab.apply(&f).unwrap().values(), direct.values());
    }

    #[test]
    fn adjoint_examples() {
        let f = LinearOperator::fourier(Convention::Unitary);
        assert_eq!(f.adjoint().unwrap(), LinearOperator::inverse_fourier(Convention::Unitary));
        let b = LinearOperator::step(Partition::half_space(0, 0.0, 0.5, 2.0).unwrap());
        assert_eq!(b.adjoint().unwrap(), b);
        let u = LinearOperator::phase(PhaseSpec::Chirp { rate: 0.5 }).unwrap();
        let c = LinearOperator::compose(vec![u.clone(), b.clone()]).unwrap();
        let expect = LinearOperator::compose(vec![b.adjoint().unwrap(), u.adjoint().unwrap()]).unwrap();
        assert_eq!(c.adjoint().unwrap(), expect);
    }

    #[test]
    fn inverse_examples() {
        let fr = LinearOperator::fractional_fourier(0.4).unwrap();
        assert_eq!(fr.inverse().unwrap(), LinearOperator::fractional_fourier(-0.4).unwrap());
        assert_eq!(LinearOperator::identity().inverse().unwrap(), LinearOperator::identity());
        let sum = LinearOperator::sum(vec![fr.clone(), fr]).unwrap();
        assert!(matches!(sum.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn step_inverse_is_pointwise_reciprocal() {
        let grid = GridSpec::new(2, 4.0, 32).unwrap();
        let p = Partition::new(Regions::Ball { radius: 1.5 }, vec![0.25, 3.0]).unwrap();
        let b = LinearOperator::step(p);
        let f = bump(grid);
        let back = b.inverse().unwrap().apply(&b.apply(&f).unwrap()).unwrap();
        assert!(rel_l2(&back, &f) < 1e-15);
    }

    #[test]
    fn fourier_then_inverse_simplifies_to_identity() {
        let c = LinearOperator::compose(vec![
            LinearOperator::fourier(Convention::TwoPi),
            LinearOperator::inverse_fourier(Convention::TwoPi),
        ])
        .unwrap();
        assert_eq!(c.simplify().unwrap(), LinearOperator::identity());
    }

    #[test]
    fn zero_twist_is_plain_fourier() {
        let t = LinearOperator::twist_fourier(0.0, 2).unwrap();
        assert!(t.special);
        assert_eq!(t.claimed_k, Some(1.0));
        assert_eq!(t.simplify().unwrap(), LinearOperator::fourier(Convention::TwoPi));
        assert!(LinearOperator::twist_fourier(0.3, 3).is_err());
        let grid = GridSpec::new(2, 8.0, 64).unwrap();
        let f = bump(grid);
        let a = t.apply(&f).unwrap();
        let b = LinearOperator::fourier(Convention::TwoPi).apply(&f).unwrap();
        assert!(rel_l2(&a, &b) < 1e-15);
    }

    #[test]
    fn twist_preserves_l2_away_from_the_boundary() {
        let grid = GridSpec::new(2, 8.0, 256).unwrap();
        let f = SampledField::from_real_fn(grid, "g", |x| (-(x[0] * x[0] + x[1] * x[1])).exp()).unwrap();
        let d = LinearOperator::diffeo(DiffeoSpec::Twist { gamma: 0.2 }, 1.0).unwrap();
        let out = d.apply(&f).unwrap();
        let a = lp_norm(&out, Exponent::TWO).unwrap().value;
        let b = lp_norm(&f, Exponent::TWO).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-6, "{}", a / b);
    }

    #[test]
    fn twist_jacobian_is_one() {
        let m = DiffeoSpec::Twist { gamma: 0.7 };
        for i in 0..21 {
            for j in 0..21 {
                let x = [-2.0 + 0.2 * i as f64, -2.0 + 0.2 * j as f64];
                assert!((m.jacobian_det(&x) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fractional_special_flag_follows_kernel_bound() {
        assert!(LinearOperator::fractional_fourier(PI / 2.0).unwrap().special);
        assert!(!LinearOperator::fractional_fourier(0.05).unwrap().special);
    }

    #[test]
    fn compose_claims_scaled_constant() {
        let d = LinearOperator::diffeo(DiffeoSpec::Linear { matrix: vec![vec![2.0]] }, 1.0).unwrap();
        let c = LinearOperator::compose(vec![d, LinearOperator::fourier(Convention::TwoPi)]).unwrap();
        assert_eq!(c.claimed_k, Some(0.5));
        let ff = LinearOperator::compose(vec![
            LinearOperator::fourier(Convention::TwoPi),
            LinearOperator::fourier(Convention::TwoPi),
        ])
        .unwrap();
        assert_eq!(ff.claimed_k, None);
    }

    #[test]
    fn laplacian_needs_a_constant() {
        let b = LinearOperator::step(Partition::half_space(0, 0.0, 1.0, 2.0).unwrap());
        assert!(matches!(
            LinearOperator::fractional_laplacian(b, 0.5),
            Err(Error::MissingHadamardConstant(_))
        ));
    }

    #[test]
    fn laplacian_order_zero_is_identity() {
        let grid = GridSpec::desk(1).unwrap();
        let f = bump(grid);
        let l = LinearOperator::fractional_laplacian(LinearOperator::fourier(Convention::TwoPi), 0.0).unwrap();
        assert!(rel_l2(&l.apply(&f).unwrap(), &f) < 1e-12);
    }

    #[test]
    fn json_round_trip_nested() {
        let op = LinearOperator::compose(vec![
            LinearOperator::phase(PhaseSpec::PlaneWave { frequency: vec![0.5] }).unwrap(),
            LinearOperator::sum(vec![
                LinearOperator::fractional_fourier(0.3).unwrap(),
                LinearOperator::step(Partition::half_space(0, 0.0, 1.0, 2.0).unwrap()),
            ])
            .unwrap(),
            LinearOperator::matrix(ComplexMatrix::unitary_dft(4)),
        ])
        .unwrap();
        let s = op.to_json().unwrap();
        assert!(s.contains("\"kind\": \"compose\""));
        assert_eq!(LinearOperator::from_json(&s).unwrap(), op);
        assert!(LinearOperator::from_json(r#"{"kind":"fourier","convention":"two_pi","claimed_k":-1}"#).is_err());
    }

    #[test]
    fn sum_on_h2_cancels() {
        let grid = GridSpec::new(1, (PI * 128.0).sqrt(), 256).unwrap();
        let h2 = make_hermite(&[2], grid).unwrap();
        let a = LinearOperator::sum(vec![
            LinearOperator::fractional_fourier(0.3).unwrap(),
            LinearOperator::fractional_fourier(0.3 + PI / 2.0).unwrap(),
        ])
        .unwrap();
        let out = a.apply(&h2).unwrap();
        assert!(lp_norm(&out, Exponent::Infinity).unwrap().value < 1e-12);
    }
}
