use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermite::make_hermite;
use crate::error::{Error, Result};
use crate::field::{Exponent, GridSpec, SampledField};

/// A named oracle value and how it is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub value: f64,
    pub provenance: String,
}

/// Parametric families with closed-form oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Normalized Hermite tensor h_α.
    Hermite { index: Vec<usize> },
    /// c^{−1/2}e^{−π|x|²/c²} + c^{1/2}e^{−πc²|x|²} per axis, tensored.
    Gc { dim: usize, c: f64 },
    /// |x|^{α−2} sin(|x|^α) on the annulus (2π)^{1/α} ≤ |x| ≤ (3π)^{1/α}, n = 2.
    Falpha { alpha: f64 },
    /// e^{−π|λx|²}.
    Gaussian { dim: usize, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyHandle {
    pub family: Family,
    pub closed_forms: BTreeMap<String, ClosedForm>,
}

impl FamilyHandle {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.closed_forms.get(name).map(|c| c.value)
    }

    fn insert(&mut self, name: &str, value: f64, provenance: &str) {
        self.closed_forms
            .insert(name.into(), ClosedForm { value, provenance: provenance.into() });
    }
}

impl Family {
    pub fn dim(&self) -> usize {
        match self {
            Family::Hermite { index } => index.len(),
            Family::Gc { dim, .. } | Family::Gaussian { dim, .. } => *dim,
            Family::Falpha { .. } => 2,
        }
    }

    pub fn handle(&self) -> Result<FamilyHandle> {
        let mut h = FamilyHandle { family: self.clone(), closed_forms: BTreeMap::new() };
        match self {
            Family::Hermite { index } => {
                let n = index.len() as f64;
                let order: usize = index.iter().sum();
                h.insert("norm_2", 1.0, "orthonormal basis");
                h.insert("variance", order as f64 + n / 2.0, "harmonic-oscillator eigenvalue |α| + n/2");
            }
            Family::Gc { dim, c } => {
                check_positive("c", *c)?;
                let n = *dim as i32;
                let s = c.sqrt() + 1.0 / c.sqrt();
                let m2 = 2f64.sqrt() + 2.0 * c / (c.powi(4) + 1.0).sqrt();
                let v1 = ((c.powi(4) + 1.0) / (4.0 * 2f64.sqrt() * c * c)
                    + c.powi(3) / (c.powi(4) + 1.0).powf(1.5))
                    / PI;
                h.insert("norm_1", s.powi(n), "positive field peaked at 0: ‖g‖₁ = ĝ(0) = g(0)");
                h.insert("norm_inf", s.powi(n), "value at the origin");
                h.insert("norm_2_sq", m2.powi(n), "Gaussian integrals of the two summands and cross term");
                h.insert(
                    "variance",
                    *dim as f64 * m2.powi(n - 1) * v1,
                    "second moments of the summands and cross term, tensorized",
                );
            }
            Family::Falpha { alpha } => {
                check_positive("alpha", *alpha)?;
                h.insert("norm_1", 4.0 * PI / alpha, "polar coordinates with t = r^α");
                h.insert("variance", 5.0 * PI.powi(3) / (2.0 * alpha), "polar coordinates with t = r^α");
                h.insert(
                    "g_half_inf",
                    (5.0 * PI * alpha / 32.0).sqrt(),
                    "√V / ‖f‖₁ from the two closed forms",
                );
            }
            Family::Gaussian { dim, lambda } => {
                check_positive("lambda", *lambda)?;
                let n = *dim as f64;
                h.insert("norm_1", lambda.powf(-n), "Gaussian integral");
                h.insert("norm_2", lambda.powf(-n / 2.0) * 2f64.powf(-n / 4.0), "Gaussian integral");
                h.insert("norm_inf", 1.0, "value at the origin");
                h.insert(
                    "variance",
                    lambda.powf(-n - 2.0) * n / (4.0 * PI) * 2f64.powf(-n / 2.0),
                    "Gaussian second moment",
                );
                h.insert(
                    "entropy",
                    n * (1.0 - 2f64.ln()) / 2.0 - n * lambda.ln(),
                    "entropy of a normal density",
                );
            }
        }
        Ok(h)
    }

    /// Samples the family on `grid` and returns its oracle handle.
    pub fn sample(&self, grid: GridSpec) -> Result<(FamilyHandle, SampledField)> {
        if grid.dim() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "family is {}-dimensional, grid is {}-dimensional",
                self.dim(),
                grid.dim()
            )));
        }
        let handle = self.handle()?;
        let field = match self {
            Family::Hermite { index } => make_hermite(index, grid)?,
            Family::Gc { c, .. } => make_gc_field(*c, grid)?,
            Family::Falpha { alpha } => make_falpha_field(*alpha, grid)?,
            Family::Gaussian { lambda, .. } => gaussian_field(*lambda, grid)?,
        };
        Ok((handle, field))
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        match (self, name) {
            (Family::Hermite { index }, "k") => index.first().map(|&k| k as f64),
            (Family::Gc { c, .. }, "c") => Some(*c),
            (Family::Falpha { alpha }, "alpha") => Some(*alpha),
            (Family::Gaussian { lambda, .. }, "lambda") => Some(*lambda),
            _ => None,
        }
    }

    /// Copy with one named parameter replaced. Hermite `k` sets every
    /// component and must be a non-negative integer.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Family> {
        let bad = || Error::InvalidParameter(format!("family {self:?} has no parameter '{name}'"));
        match (self, name) {
            (Family::Hermite { index }, "k") => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("Hermite k = {value} must be a non-negative integer")));
                }
                Ok(Family::Hermite { index: vec![value as usize; index.len()] })
            }
            (Family::Gc { dim, .. }, "c") => Ok(Family::Gc { dim: *dim, c: value }),
            (Family::Falpha { .. }, "alpha") => Ok(Family::Falpha { alpha: value }),
            (Family::Gaussian { dim, .. }, "lambda") => Ok(Family::Gaussian { dim: *dim, lambda: value }),
            _ => Err(bad()),
        }
    }

    /// Names of the continuous parameters.
    pub fn continuous_params(&self) -> &'static [&'static str] {
        match self {
            Family::Hermite { .. } => &[],
            Family::Gc { .. } => &["c"],
            Family::Falpha { .. } => &["alpha"],
            Family::Gaussian { .. } => &["lambda"],
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    /// `hermite:k=5[,n=2]`, `hermite:alpha=1,2`, `gc:c=0.25,n=2`,
    /// `falpha:alpha=0.5`, `gaussian:lambda=2,n=1`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFamily(s.to_string());
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        let mut last_key: Option<String> = None;
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            if let Some((k, v)) = part.split_once('=') {
                kv.insert(k.trim().to_string(), v.trim().to_string());
                last_key = Some(k.trim().to_string());
            } else if let Some(k) = &last_key {
                // continuation of a list value, e.g. alpha=1,2
                let e = kv.get_mut(k).ok_or_else(unknown)?;
                e.push(',');
                e.push_str(part.trim());
            } else {
                return Err(unknown());
            }
        }
        let num = |k: &str, default: Option<f64>| -> Result<f64> {
            match kv.get(k) {
                Some(v) => v.parse().map_err(|_| unknown()),
                None => default.ok_or_else(unknown),
            }
        };
        let dim = num("n", Some(1.0))? as usize;
        match name.trim() {
            "hermite" => {
                if let Some(list) = kv.get("alpha") {
                    let index = list
                        .split(',')
                        .map(|v| v.trim().parse::<usize>().map_err(|_| unknown()))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Family::Hermite { index })
                } else {
                    let k = num("k", None)?;
                    if k < 0.0 || k.fract() != 0.0 {
                        return Err(unknown());
                    }
                    Ok(Family::Hermite { index: vec![k as usize; dim] })
                }
            }
            "gc" => Ok(Family::Gc { dim, c: num("c", Some(1.0))? }),
            "falpha" => Ok(Family::Falpha { alpha: num("alpha", Some(1.0))? }),
            "gaussian" => Ok(Family::Gaussian { dim, lambda: num("lambda", Some(1.0))? }),
            _ => Err(unknown()),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive")))
    }
}

/// One-axis g_c values.
pub fn gc_axis(c: f64, x: f64) -> f64 {
    (-PI * x * x / (c * c)).exp() / c.sqrt() + c.sqrt() * (-PI * c * c * x * x).exp()
}

pub fn make_gc_field(c: f64, grid: GridSpec) -> Result<SampledField> {
    check_positive("c", c)?;
    let axis: Vec<f64> = grid.axis_coords().into_iter().map(|x| gc_axis(c, x)).collect();
    let values = (0..grid.len())
        .map(|i| {
            let m = grid.multi_index(i);
            Complex64::new((0..grid.dim()).map(|a| axis[m[a]]).product(), 0.0)
        })
        .collect();
    SampledField::new(grid, values, format!("gc(c={c})"))
}

/// g_c^{(n)} on `grid` with its oracle handle.
pub fn make_gc(dim: usize, c: f64, grid: GridSpec) -> Result<(FamilyHandle, SampledField)> {
    Family::Gc { dim, c }.sample(grid)
}

/// Inclusive annulus radii ((2π)^{1/α}, (3π)^{1/α}).
pub fn falpha_radii(alpha: f64) -> (f64, f64) {
    ((2.0 * PI).powf(1.0 / alpha), (3.0 * PI).powf(1.0 / alpha))
}

pub fn make_falpha_field(alpha: f64, grid: GridSpec) -> Result<SampledField> {
    check_positive("alpha", alpha)?;
    if grid.dim() != 2 {
        return Err(Error::InvalidParameter("f_α is defined on a 2-D grid".into()));
    }
    let (r0, r1) = falpha_radii(alpha);
    if grid.extent() < r1 {
        return Err(Error::GridTooSmall(format!(
            "extent {} cannot contain the annulus of outer radius {r1}",
            grid.extent()
        )));
    }
    SampledField::from_real_fn(grid, format!("falpha(α={alpha})"), |x| {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r >= r0 && r <= r1 {
            r.powf(alpha - 2.0) * r.powf(alpha).sin()
        } else {
            0.0
        }
    })
}

pub fn make_falpha(alpha: f64, grid: GridSpec) -> Result<(FamilyHandle, SampledField)> {
    Family::Falpha { alpha }.sample(grid)
}

pub fn gaussian_field(lambda: f64, grid: GridSpec) -> Result<SampledField> {
    check_positive("lambda", lambda)?;
    SampledField::from_real_fn(grid, format!("gaussian(λ={lambda})"), |x| {
        (-PI * lambda * lambda * x.iter().map(|v| v * v).sum::<f64>()).exp()
    })
}

/// Two-sided L^q bracket for g_c^{(n)}, q ∈ (1, ∞), q ≠ 2:
/// ((c^{1/q−1/2} + c^{1/2−1/q}) / (2q^{1/(2q)}))^n < ‖g_c‖_q < twice the base, to the n.
pub fn gc_lq_bracket(dim: usize, c: f64, q: Exponent) -> Result<(f64, f64)> {
    let qv = match q {
        Exponent::Finite(v) if v > 1.0 => v,
        _ => return Err(Error::InvalidParameter(format!("bracket needs finite q > 1, got {q}"))),
    };
    let e = 1.0 / qv - 0.5;
    let base = (c.powf(e) + c.powf(-e)) / qv.powf(1.0 / (2.0 * qv));
    let n = dim as i32;
    Ok(((base / 2.0).powi(n), base.powi(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, variance};

    #[test]
    fn parses_descriptors() {
        assert_eq!("hermite:k=5".parse::<Family>().unwrap(), Family::Hermite { index: vec![5] });
        assert_eq!("hermite:k=2,n=3".parse::<Family>().unwrap(), Family::Hermite { index: vec![2, 2, 2] });
        assert_eq!("hermite:alpha=1,2".parse::<Family>().unwrap(), Family::Hermite { index: vec![1, 2] });
        assert_eq!("gc:c=0.25,n=2".parse::<Family>().unwrap(), Family::Gc { dim: 2, c: 0.25 });
        assert_eq!("falpha:alpha=0.5".parse::<Family>().unwrap(), Family::Falpha { alpha: 0.5 });
        assert!("bogus:x=1".parse::<Family>().is_err());
        assert!("hermite:k=1.5".parse::<Family>().is_err());
    }

    #[test]
    fn gc_at_one_matches_hand_values() {
        let h = Family::Gc { dim: 1, c: 1.0 }.handle().unwrap();
        assert!((h.get("norm_1").unwrap() - 2.0).abs() < 1e-15);
        assert!((h.get("norm_2_sq").unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((h.get("variance").unwrap() - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn gc_quadrature_matches_closed_forms() {
        let grid = GridSpec::desk(1).unwrap();
        let (h, f) = make_gc(1, 0.5, grid).unwrap();
        let n1 = lp_norm(&f, Exponent::ONE).unwrap().value;
        let n2 = lp_norm(&f, Exponent::TWO).unwrap().value;
        assert!((n1 - h.get("norm_1").unwrap()).abs() < 1e-10);
        assert!((n2 * n2 - h.get("norm_2_sq").unwrap()).abs() < 1e-10);
        assert!((variance(&f).unwrap() - h.get("variance").unwrap()).abs() < 1e-10);
    }

    #[test]
    fn falpha_requires_room_for_annulus() {
        let g = GridSpec::new(2, 5.0, 64).unwrap();
        assert!(matches!(make_falpha(1.0, g), Err(Error::GridTooSmall(_))));
        assert!(make_falpha(-1.0, g).is_err());
        assert!(make_gc(1, 0.0, GridSpec::desk(1).unwrap()).is_err());
    }

    #[test]
    fn with_param_replaces_value() {
        let f = Family::Gc { dim: 2, c: 1.0 }.with_param("c", 0.3).unwrap();
        assert_eq!(f, Family::Gc { dim: 2, c: 0.3 });
        assert!(f.with_param("k", 1.0).is_err());
        let h = Family::Hermite { index: vec![0, 0] }.with_param("k", 3.0).unwrap();
        assert_eq!(h, Family::Hermite { index: vec![3, 3] });
    }
}
