use super::exponent::Exponent;
use super::quadrature::{lp_norm, variance};
use super::sampled::SampledField;
use crate::error::{Error, Result};

/// f₁^{⊗n}: an n-dimensional tensor power kept as its one-axis factor.
///
/// Norms and the variance follow from exact separable identities applied
/// to the factor's rectangle-rule sums, so the result equals full n-D
/// quadrature on the tensor grid up to rounding while costing O(N).
#[derive(Debug, Clone)]
pub struct TensorPower {
    factor: SampledField,
    dim: usize,
}

impl TensorPower {
    pub fn new(factor: SampledField, dim: usize) -> Result<Self> {
        if factor.grid().dim() != 1 {
            return Err(Error::InvalidParameter("tensor factor must be one-dimensional".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("tensor power needs dim ≥ 1".into()));
        }
        Ok(Self { factor, dim })
    }

    pub fn factor(&self) -> &SampledField {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// ‖f₁‖_p^n.
    pub fn lp_norm(&self, p: Exponent) -> Result<f64> {
        Ok(lp_norm(&self.factor, p)?.value.powi(self.dim as i32))
    }

    /// n·V(f₁)·‖f₁‖₂^{2(n−1)}.
    pub fn variance(&self) -> Result<f64> {
        let v1 = variance(&self.factor)?;
        let m = lp_norm(&self.factor, Exponent::TWO)?.value.powi(2);
        Ok(self.dim as f64 * v1 * m.powi(self.dim as i32 - 1))
    }

    pub fn materialize(&self) -> Result<SampledField> {
        let refs: Vec<&SampledField> = std::iter::repeat_n(&self.factor, self.dim).collect();
        SampledField::tensor(&refs, format!("{}^⊗{}", self.factor.label, self.dim))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    #[test]
    fn separable_identities_match_full_grid() {
        let g = GridSpec::new(1, 6.0, 64).unwrap();
        let f = SampledField::from_real_fn(g, "f", |x| (1.0 + 0.3 * x[0]) * (-x[0] * x[0]).exp()).unwrap();
        for dim in 1..=3 {
            let t = TensorPower::new(f.clone(), dim).unwrap();
            let full = t.materialize().unwrap();
            for p in [Exponent::ONE, Exponent::Finite(3.0), Exponent::Infinity] {
                let a = t.lp_norm(p).unwrap();
                let b = lp_norm(&full, p).unwrap().value;
                assert!((a - b).abs() <= 1e-12 * b, "dim {dim} p {p}: {a} vs {b}");
            }
            let a = t.variance().unwrap();
            let b = variance(&full).unwrap();
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}
