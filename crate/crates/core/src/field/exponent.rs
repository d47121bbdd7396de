use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lebesgue exponent in (0, ∞]. Serialized as a number or the string "inf".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExponentRepr", into = "ExponentRepr")]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<ExponentRepr> for Exponent {
    type Error = String;
    fn try_from(r: ExponentRepr) -> std::result::Result<Self, String> {
        match r {
            ExponentRepr::Number(p) => Exponent::new(p).map_err(|e| e.to_string()),
            ExponentRepr::Text(s) => s.parse::<Exponent>().map_err(|e| e.to_string()),
        }
    }
}

impl From<Exponent> for ExponentRepr {
    fn from(e: Exponent) -> Self {
        match e {
            Exponent::Finite(p) => ExponentRepr::Number(p),
            Exponent::Infinity => ExponentRepr::Text("inf".into()),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse exponent '{s}'")))?;
                Exponent::new(p)
            }
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl From<f64> for Exponent {
    /// Panics on invalid input; use [`Exponent::new`] for fallible construction.
    fn from(p: f64) -> Self {
        Exponent::new(p).expect("invalid exponent")
    }
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);
    pub const TWO: Exponent = Exponent::Finite(2.0);

    /// `f64::INFINITY` maps to `Infinity`; non-positive or NaN is rejected.
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p > 0.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// 1/p, with 1/∞ = 0.
    pub fn recip(&self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// Hölder dual p′. The cases 1 ↦ ∞, 2 ↦ 2 and ∞ ↦ 1 are exact.
    pub fn dual(&self) -> Result<Exponent> {
        match *self {
            Exponent::Infinity => Ok(Exponent::ONE),
            Exponent::Finite(p) if p == 1.0 => Ok(Exponent::Infinity),
            Exponent::Finite(p) if p == 2.0 => Ok(Exponent::TWO),
            Exponent::Finite(p) if p > 1.0 => Ok(Exponent::Finite(p / (p - 1.0))),
            Exponent::Finite(p) => Err(Error::InvalidParameter(format!(
                "Hölder dual needs p ≥ 1, got {p}"
            ))),
        }
    }
}

/// Sharp Hausdorff–Young constant per dimension, √(p^{1/p} / p′^{1/p′}).
/// C_1 = C_2 = 1.
pub fn babenko_beckner(p: Exponent) -> Result<f64> {
    let pd = p.dual()?;
    let term = |e: Exponent| match e {
        Exponent::Infinity => 1.0,
        Exponent::Finite(x) => x.powf(1.0 / x),
    };
    Ok((term(p) / term(pd)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_endpoints_are_symbolic() {
        assert_eq!(Exponent::ONE.dual().unwrap(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.dual().unwrap(), Exponent::ONE);
        assert_eq!(Exponent::TWO.dual().unwrap(), Exponent::TWO);
        assert_eq!(Exponent::Finite(1.5).dual().unwrap(), Exponent::Finite(3.0));
        assert!(Exponent::Finite(0.5).dual().is_err());
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(Exponent::new(0.0).is_err());
        assert!(Exponent::new(-1.0).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v: Vec<Exponent> = serde_json::from_str(r#"[1.5, "inf", 2]"#).unwrap();
        assert_eq!(v, vec![Exponent::Finite(1.5), Exponent::Infinity, Exponent::TWO]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"inf",2.0]"#);
    }

    #[test]
    fn babenko_beckner_endpoints() {
        assert_eq!(babenko_beckner(Exponent::ONE).unwrap(), 1.0);
        assert!((babenko_beckner(Exponent::TWO).unwrap() - 1.0).abs() < 1e-15);
        // p = 4/3, p' = 4: sqrt((4/3)^{3/4} / 4^{1/4})
        let c = babenko_beckner(Exponent::Finite(4.0 / 3.0)).unwrap();
        let expect = ((4.0f64 / 3.0).powf(0.75) / 4f64.powf(0.25)).sqrt();
        assert!((c - expect).abs() < 1e-15);
        assert!(c < 1.0);
    }
}
