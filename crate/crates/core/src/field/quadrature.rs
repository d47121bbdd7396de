use serde::{Deserialize, Serialize};

use super::exponent::Exponent;
use super::sampled::SampledField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// (Σ|f|^p h^n)^{1/p}
    Rectangle,
    /// Largest sample modulus; a lower bound on the essential supremum.
    GridMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub p: Exponent,
    pub value: f64,
    pub quadrature: Quadrature,
}

fn check_finite(f: &SampledField) -> Result<()> {
    if f.is_divergence_demo() {
        if let Some(index) = f.first_non_finite() {
            return Err(Error::Divergent { index });
        }
    }
    Ok(())
}

/// ‖ |x|^θ f ‖_p with the Euclidean radius; θ = 0 is the plain L^p norm.
pub fn weighted_norm(f: &SampledField, theta: f64, p: Exponent) -> Result<NormResult> {
    check_finite(f)?;
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("weight exponent θ = {theta} must be ≥ 0")));
    }
    let grid = f.grid();
    let vals = f.values();
    match p {
        Exponent::Infinity => {
            let value = if theta == 0.0 {
                vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
            } else {
                vals.iter()
                    .enumerate()
                    .map(|(i, v)| grid.radius_sq(i).powf(theta / 2.0) * v.norm())
                    .fold(0.0, f64::max)
            };
            Ok(NormResult { p, value, quadrature: Quadrature::GridMax })
        }
        Exponent::Finite(pv) => {
            let modp = |v: &num_complex::Complex64| {
                if pv == 2.0 {
                    v.norm_sqr()
                } else if pv == 1.0 {
                    v.norm()
                } else {
                    v.norm().powf(pv)
                }
            };
            let sum: f64 = if theta == 0.0 {
                vals.iter().map(modp).sum()
            } else {
                let e = theta * pv / 2.0;
                vals.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let r2 = grid.radius_sq(i);
                        let w = if e == 1.0 { r2 } else { r2.powf(e) };
                        w * modp(v)
                    })
                    .sum()
            };
            let integral = sum * grid.cell_volume();
            let value = if pv == 1.0 {
                integral
            } else if pv == 2.0 {
                integral.sqrt()
            } else {
                integral.powf(1.0 / pv)
            };
            Ok(NormResult { p, value, quadrature: Quadrature::Rectangle })
        }
    }
}

pub fn lp_norm(f: &SampledField, p: Exponent) -> Result<NormResult> {
    weighted_norm(f, 0.0, p)
}

/// V(f) = ∫|x|²|f|², no mean subtraction.
pub fn variance(f: &SampledField) -> Result<f64> {
    Ok(weighted_norm(f, 1.0, Exponent::TWO)?.value.powi(2))
}

/// Shannon entropy −∫ρ ln ρ of ρ = |f|²/‖f‖₂², with 0·ln 0 = 0.
pub fn entropy(f: &SampledField) -> Result<f64> {
    check_finite(f)?;
    let mass: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().cell_volume();
    if mass == 0.0 {
        return Err(Error::ZeroField);
    }
    let s: f64 = f
        .values()
        .iter()
        .map(|v| {
            let rho = v.norm_sqr() / mass;
            if rho > 0.0 { rho * rho.ln() } else { 0.0 }
        })
        .sum();
    Ok(-s * f.grid().cell_volume())
}

/// f_λ(x) = f(λx): same samples on a grid of extent L/λ.
pub fn dilate(f: &SampledField, lambda: f64) -> Result<SampledField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("dilation λ = {lambda} must be positive")));
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    let grid = f.grid().dilated(lambda)?;
    f.regrid(grid, f.values().to_vec(), format!("{}@λ={lambda}", f.label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn gaussian(grid: GridSpec) -> SampledField {
        SampledField::from_real_fn(grid, "gauss", |x| {
            (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp()
        })
        .unwrap()
    }

    #[test]
    fn gaussian_l2_norm() {
        let f = gaussian(GridSpec::desk(1).unwrap());
        let n = lp_norm(&f, Exponent::TWO).unwrap();
        assert!((n.value - 2f64.powf(-0.25)).abs() < 1e-14);
        assert_eq!(n.quadrature, Quadrature::Rectangle);
        let m = lp_norm(&f, Exponent::Infinity).unwrap();
        assert_eq!(m.value, 1.0);
        assert_eq!(m.quadrature, Quadrature::GridMax);
    }

    #[test]
    fn gaussian_variance_two_dims() {
        let f = gaussian(GridSpec::desk(2).unwrap());
        let v = variance(&f).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn hermite_ground_state_weighted_norm() {
        let g = GridSpec::desk(1).unwrap();
        let h0 = SampledField::from_real_fn(g, "h0", |x| PI.powf(-0.25) * (-x[0] * x[0] / 2.0).exp())
            .unwrap();
        let w = weighted_norm(&h0, 1.0, Exponent::TWO).unwrap().value;
        assert!((w * w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_entropy() {
        let f = gaussian(GridSpec::desk(1).unwrap());
        let h = entropy(&f).unwrap();
        assert!((h - (1.0 - 2f64.ln()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_entropy_is_zero() {
        // h = 1/128, so [0, 1) holds exactly 128 samples
        let g = GridSpec::new(1, 16.0, 4096).unwrap();
        let f = SampledField::from_real_fn(g, "ind", |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 })
            .unwrap();
        assert!(entropy(&f).unwrap().abs() < 1e-14);
    }

    #[test]
    fn zero_field_entropy_errors() {
        let g = GridSpec::new(1, 1.0, 8).unwrap();
        let f = SampledField::new(g, vec![Complex64::new(0.0, 0.0); 8], "0").unwrap();
        assert!(matches!(entropy(&f), Err(Error::ZeroField)));
        assert_eq!(lp_norm(&f, Exponent::ONE).unwrap().value, 0.0);
    }

    #[test]
    fn divergent_field_reports_divergence() {
        let g = GridSpec::new(1, 1.0, 8).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 8];
        v[4] = Complex64::new(f64::INFINITY, 0.0);
        let f = SampledField::divergence_demo(g, v, "d").unwrap();
        assert!(matches!(lp_norm(&f, Exponent::ONE), Err(Error::Divergent { index: 4 })));
    }

    #[test]
    fn dilation_identity_and_laws() {
        let f = gaussian(GridSpec::desk(1).unwrap());
        assert_eq!(dilate(&f, 1.0).unwrap(), f);
        let d = dilate(&f, 2.0).unwrap();
        for q in [Exponent::ONE, Exponent::TWO] {
            let a = lp_norm(&d, q).unwrap().value;
            let b = 2f64.powf(-q.recip()) * lp_norm(&f, q).unwrap().value;
            assert!((a - b).abs() <= 1e-12 * b);
        }
        assert!(dilate(&f, 0.0).is_err());
    }

    #[test]
    fn quasi_norm_uses_same_formula() {
        let f = gaussian(GridSpec::desk(1).unwrap());
        // ‖g‖_p = p^{-1/(2p)}
        let p = 0.5;
        let v = lp_norm(&f, Exponent::Finite(p)).unwrap().value;
        assert!((v - p.powf(-1.0 / (2.0 * p))).abs() < 1e-12);
    }
}
