use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::field::Exponent;

/// Relative tolerance for balance (equality) constraints.
pub const BALANCE_TOL: f64 = 1e-12;

/// Guard on |α| in the fractional Laplacian bound, whose exponent is 1/α.
pub const ALPHA_GUARD: f64 = 1e-3;

/// Slack on reciprocal exponents so exact window endpoints like q = p′ pass.
const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// (‖f‖_p‖Af‖_p)/(‖f‖_q‖Af‖_q)
    #[serde(rename = "F_pq")]
    FPq,
    /// (V(f)/‖f‖_q²)^β ‖f‖_q/‖f‖_1
    #[serde(rename = "G_beta_q")]
    GBetaQ,
    PrimaryUp,
    NormUp,
    GeneralizedUp,
    Embedding,
    SobolevGeneral,
    SobolevSimple,
    FractionalLaplacian,
    WeightedUpInfty,
    WeightedUpHadamard,
    WeightedUpSpecialSym,
    WeightedUpSpecialGen,
    HeisenbergNd,
    Entropic,
    HausdorffYoung,
}

impl Variant {
    pub const ALL: [Variant; 16] = [
        Variant::FPq,
        Variant::GBetaQ,
        Variant::PrimaryUp,
        Variant::NormUp,
        Variant::GeneralizedUp,
        Variant::Embedding,
        Variant::SobolevGeneral,
        Variant::SobolevSimple,
        Variant::FractionalLaplacian,
        Variant::WeightedUpInfty,
        Variant::WeightedUpHadamard,
        Variant::WeightedUpSpecialSym,
        Variant::WeightedUpSpecialGen,
        Variant::HeisenbergNd,
        Variant::Entropic,
        Variant::HausdorffYoung,
    ];
}

/// Parameter record selecting one functional or inequality.
/// Unused parameters are ignored by the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    pub variant: Variant,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Order of the fractional Laplacian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_frac: Option<f64>,
    /// Exponent β of the G functional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_exp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

macro_rules! setter {
    ($name:ident, Exponent) => {
        pub fn $name(mut self, v: impl Into<Exponent>) -> Self {
            self.$name = Some(v.into());
            self
        }
    };
    ($name:ident, f64) => {
        pub fn $name(mut self, v: f64) -> Self {
            self.$name = Some(v);
            self
        }
    };
}

impl FunctionalSpec {
    pub fn new(variant: Variant, dim: usize) -> Self {
        Self {
            variant,
            dim,
            p: None,
            q: None,
            r: None,
            s: None,
            t: None,
            u: None,
            theta: None,
            phi: None,
            alpha: None,
            beta: None,
            s_frac: None,
            beta_exp: None,
            tolerance: None,
        }
    }

    setter!(p, Exponent);
    setter!(q, Exponent);
    setter!(r, Exponent);
    setter!(s, Exponent);
    setter!(t, Exponent);
    setter!(u, Exponent);
    setter!(theta, f64);
    setter!(phi, f64);
    setter!(alpha, f64);
    setter!(beta, f64);
    setter!(s_frac, f64);
    setter!(beta_exp, f64);
    setter!(tolerance, f64);

    /// Every violated constraint of the variant, empty when valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut c = Checks::default();
        let n = self.dim as f64;
        c.require(self.dim >= 1, "n ≥ 1", format!("n = {}", self.dim));
        if let Some(tol) = self.tolerance {
            c.require(tol >= 0.0 && tol.is_finite(), "tolerance ≥ 0", format!("tolerance = {tol}"));
        }
        for (name, e) in [("p", self.p), ("q", self.q), ("r", self.r), ("s", self.s), ("t", self.t), ("u", self.u)] {
            if let Some(Exponent::Finite(v)) = e {
                c.require(v > 0.0 && v.is_finite(), &format!("{name} > 0"), format!("{name} = {v}"));
            }
        }
        if !c.0.is_empty() {
            return c.0;
        }

        match self.variant {
            Variant::FPq => {
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let Some(p) = p {
                    c.require(p.recip() <= 1.0 + ENDPOINT_TOL, "p ≥ 1", format!("p = {p}"));
                }
                if let Some(q) = q {
                    c.require(q.recip() <= 1.0 + ENDPOINT_TOL, "q ≥ 1", format!("q = {q}"));
                }
            }
            Variant::GBetaQ => {
                let b = c.real("β", self.beta_exp);
                let q = c.exp("q", self.q);
                if let Some(b) = b {
                    c.require(b > 0.0, "β > 0", format!("β = {b}"));
                }
                if let Some(q) = q {
                    c.require(q.recip() <= 1.0 + ENDPOINT_TOL, "q ≥ 1", format!("q = {q}"));
                }
            }
            Variant::PrimaryUp => {}
            Variant::NormUp => {
                if let Some(q) = c.exp("q", self.q) {
                    c.require(q.recip() <= 1.0 + ENDPOINT_TOL, "q ≥ 1", format!("q = {q}"));
                    c.require(!q.is_infinite(), "q < ∞", "q = inf".into());
                }
            }
            Variant::GeneralizedUp | Variant::Embedding => {
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let Some(p) = p {
                    c.p_in_one_two(p, true);
                    if let Some(q) = q {
                        c.q_in_p_window(p, q);
                    }
                }
            }
            Variant::SobolevGeneral => {
                let u = c.exp("u", self.u);
                let r = c.exp("r", self.r);
                let p = c.exp("p", self.p);
                let t = c.exp("t", self.t);
                let theta = c.real("θ", self.theta);
                if let Some(th) = theta {
                    c.require(th > 0.0, "θ > 0", format!("θ = {th}"));
                }
                if let (Some(p), Some(u)) = (p, u) {
                    c.require(p.recip() < u.recip(), "p > u", format!("p = {p}, u = {u}"));
                }
                if let (Some(r), Some(u)) = (r, u) {
                    c.require(r.recip() <= u.recip(), "r ≥ u", format!("r = {r}, u = {u}"));
                }
                if let Some(t) = t {
                    c.require(t.recip() < 1.0, "1 < t ≤ ∞", format!("t = {t}"));
                }
                if let (Some(th), Some(u), Some(p)) = (theta, u, p) {
                    let edge = n * (u.recip() - p.recip());
                    c.require(th > edge, "θ > n(1/u − 1/p)", format!("θ = {th}, n(1/u − 1/p) = {edge}"));
                }
            }
            Variant::SobolevSimple => {
                let theta = c.real("θ", self.theta);
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let Some(th) = theta {
                    c.require(th > 0.0, "θ > 0", format!("θ = {th}"));
                }
                if let Some(p) = p {
                    c.require(!p.is_infinite(), "p < ∞", "p = inf".into());
                    if let Some(q) = q {
                        c.require(q.recip() < p.recip(), "q ∈ (p, ∞]", format!("p = {p}, q = {q}"));
                    }
                }
            }
            Variant::FractionalLaplacian => {
                let s = c.real("s", self.s_frac);
                let p = c.exp("p", self.p);
                if let Some(s) = s {
                    c.require(s > 0.0 && s.is_finite(), "s > 0", format!("s = {s}"));
                }
                if let Some(p) = p {
                    c.require(p.recip() <= 1.0 + ENDPOINT_TOL, "p ≥ 1", format!("p = {p}"));
                    c.require(p.recip() > 0.5, "p < 2", format!("p = {p}"));
                    if let Some(s) = s.filter(|s| *s > 0.0) {
                        let a = n / (2.0 * s) * (0.5 - p.recip());
                        c.require(
                            a.abs() >= ALPHA_GUARD,
                            "|α| ≥ 1e−3 with α = (n/2s)(1/2 − 1/p)",
                            format!("α = {a}"),
                        );
                    }
                }
            }
            Variant::WeightedUpInfty => {
                let (al, be, th, ph) = c.weights(self);
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let (Some(th), Some(p)) = (th, p) {
                    let v = th / n + p.recip();
                    c.require(v > 1.0, "θ/n + 1/p > 1", format!("θ/n + 1/p = {v}"));
                }
                if let (Some(ph), Some(q)) = (ph, q) {
                    let v = ph / n + q.recip();
                    c.require(v > 1.0, "φ/n + 1/q > 1", format!("φ/n + 1/q = {v}"));
                }
                if let (Some(al), Some(be), Some(th), Some(ph), Some(p), Some(q)) = (al, be, th, ph, p, q) {
                    c.balance(
                        al * (th / n + p.recip()),
                        be * (ph / n + q.recip()),
                        "α(θ/n + 1/p) = β(φ/n + 1/q)",
                    );
                }
            }
            Variant::WeightedUpHadamard => {
                let (al, be, th, ph) = c.weights(self);
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let Some(s) = self.s {
                    c.require(s.recip() <= 1.0 + ENDPOINT_TOL, "s ∈ [1, ∞]", format!("s = {s}"));
                }
                if let Some(p) = p {
                    c.require(p.recip() < 1.0, "p > 1", format!("p = {p}"));
                }
                if let Some(q) = q {
                    c.require(q.recip() < 1.0, "q > 1", format!("q = {q}"));
                }
                if let (Some(th), Some(p)) = (th, p) {
                    let e = n * (1.0 - p.recip());
                    c.require(th > e, "θ > n(1 − 1/p)", format!("θ = {th}, n(1 − 1/p) = {e}"));
                }
                if let (Some(ph), Some(q)) = (ph, q) {
                    let e = n * (1.0 - q.recip());
                    c.require(ph > e, "φ > n(1 − 1/q)", format!("φ = {ph}, n(1 − 1/q) = {e}"));
                }
                if let (Some(al), Some(be), Some(th), Some(ph), Some(p), Some(q)) = (al, be, th, ph, p, q) {
                    c.balance(
                        al * (th - n * (1.0 - p.recip())),
                        be * (ph - n * (1.0 - q.recip())),
                        "α(θ − n(1 − 1/p)) = β(φ − n(1 − 1/q))",
                    );
                }
                if self.s.is_some() {
                    if let (Some(al), Some(be)) = (al, be) {
                        c.require(al == be, "α = β when s is given", format!("α = {al}, β = {be}"));
                    }
                }
            }
            Variant::WeightedUpSpecialSym => {
                let th = c.real("θ", self.theta);
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                if let Some(th) = th {
                    c.require(th > 0.0, "θ > 0", format!("θ = {th}"));
                }
                if let Some(p) = p {
                    c.p_in_one_two(p, false);
                    if let Some(q) = q {
                        c.q_in_p_window(p, q);
                    }
                }
            }
            Variant::WeightedUpSpecialGen => {
                let (al, be, th, ph) = c.weights(self);
                let p = c.exp("p", self.p);
                let q = c.exp("q", self.q);
                let r = c.exp("r", self.r);
                if let Some(r) = r {
                    c.require(r.recip() <= 1.0 + ENDPOINT_TOL, "r ≥ 1", format!("r = {r}"));
                    c.require(r.recip() > 0.5, "r < 2", format!("r = {r}"));
                    if let Some(p) = p {
                        c.require(p.recip() < r.recip(), "p > r", format!("p = {p}, r = {r}"));
                    }
                    if let Some(q) = q {
                        c.require(q.recip() < r.recip(), "q > r", format!("q = {q}, r = {r}"));
                    }
                    if let (Some(th), Some(p)) = (th, p) {
                        let e = n * (r.recip() - p.recip());
                        c.require(th > e, "θ > n(1/r − 1/p)", format!("θ = {th}, n(1/r − 1/p) = {e}"));
                    }
                    if let (Some(ph), Some(q)) = (ph, q) {
                        let e = n * (r.recip() - q.recip());
                        c.require(ph > e, "φ > n(1/r − 1/q)", format!("φ = {ph}, n(1/r − 1/q) = {e}"));
                    }
                    if let (Some(al), Some(be), Some(th), Some(ph), Some(p), Some(q)) = (al, be, th, ph, p, q) {
                        c.balance(
                            al * (th - n * (r.recip() - p.recip())),
                            be * (ph - n * (r.recip() - q.recip())),
                            "α[θ − n(1/r − 1/p)] = β[φ − n(1/r − 1/q)]",
                        );
                    }
                }
            }
            Variant::HeisenbergNd => {
                if let Some(q) = c.exp("q", self.q) {
                    let (ok, window) = heisenberg_window(self.dim, q);
                    c.require(ok, &format!("q ∈ {window}"), format!("q = {q}, n = {}", self.dim));
                }
            }
            Variant::Entropic => {}
            Variant::HausdorffYoung => {
                if let Some(p) = c.exp("p", self.p) {
                    c.p_in_one_two(p, true);
                }
            }
        }
        c.0
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() { Ok(()) } else { Err(Error::Constraint(v)) }
    }
}

/// Whether q lies in the dimension-dependent window of the n-D Heisenberg
/// inequality, and the window as text.
pub fn heisenberg_window(n: usize, q: Exponent) -> (bool, String) {
    let iq = q.recip();
    match n {
        0 => (false, "∅".into()),
        1 => (iq <= 1.0 + ENDPOINT_TOL, "[1, ∞]".into()),
        2 => (iq < 1.0 && iq > 0.0, "(1, ∞)".into()),
        _ => {
            let nf = n as f64;
            let lo = 2.0 * nf / (nf + 2.0);
            let hi = 2.0 * nf / (nf - 2.0);
            // q ∈ (lo, hi) ⟺ 1/q ∈ (1/hi, 1/lo)
            (iq > 1.0 / hi && iq < 1.0 / lo, format!("({lo}, {hi})"))
        }
    }
}

#[derive(Default)]
struct Checks(Vec<Violation>);

impl Checks {
    fn require(&mut self, ok: bool, constraint: &str, detail: String) {
        if !ok {
            self.0.push(Violation::new(constraint, detail));
        }
    }

    fn exp(&mut self, name: &str, e: Option<Exponent>) -> Option<Exponent> {
        self.require(e.is_some(), &format!("{name} given"), format!("{name} is required"));
        e
    }

    fn real(&mut self, name: &str, v: Option<f64>) -> Option<f64> {
        match v {
            None => {
                self.require(false, &format!("{name} given"), format!("{name} is required"));
                None
            }
            Some(x) if !x.is_finite() => {
                self.require(false, &format!("{name} finite"), format!("{name} = {x}"));
                None
            }
            Some(x) => Some(x),
        }
    }

    /// α, β, θ, φ > 0.
    fn weights(&mut self, s: &FunctionalSpec) -> (Option<f64>, Option<f64>, Option<f64>, Option<f64>) {
        let al = self.real("α", s.alpha);
        let be = self.real("β", s.beta);
        let th = self.real("θ", s.theta);
        let ph = self.real("φ", s.phi);
        for (name, v) in [("α", al), ("β", be), ("θ", th), ("φ", ph)] {
            if let Some(v) = v {
                self.require(v > 0.0, &format!("{name} > 0"), format!("{name} = {v}"));
            }
        }
        (al, be, th, ph)
    }

    fn p_in_one_two(&mut self, p: Exponent, closed: bool) {
        let ip = p.recip();
        self.require(ip <= 1.0 + ENDPOINT_TOL, "p ≥ 1", format!("p = {p}"));
        if closed {
            self.require(ip >= 0.5 - ENDPOINT_TOL, "p ≤ 2", format!("p = {p}"));
        } else {
            self.require(ip > 0.5, "p < 2", format!("p = {p}"));
        }
    }

    /// q ∈ [p, p′] ⟺ 1 − 1/p ≤ 1/q ≤ 1/p.
    fn q_in_p_window(&mut self, p: Exponent, q: Exponent) {
        let (ip, iq) = (p.recip(), q.recip());
        self.require(iq <= ip + ENDPOINT_TOL, "q ≥ p", format!("p = {p}, q = {q}"));
        self.require(iq >= 1.0 - ip - ENDPOINT_TOL, "q ≤ p′", format!("p = {p}, q = {q}"));
    }

    fn balance(&mut self, a: f64, b: f64, constraint: &str) {
        let scale = a.abs().max(b.abs()).max(1.0);
        self.require((a - b).abs() <= BALANCE_TOL * scale, constraint, format!("{a} vs {b}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &FunctionalSpec) -> Vec<String> {
        s.violations().into_iter().map(|v| v.constraint).collect()
    }

    #[test]
    fn sobolev_theta_boundary_rejected() {
        let s = FunctionalSpec::new(Variant::SobolevGeneral, 1)
            .u(1.0)
            .r(1.0)
            .t(Exponent::Infinity)
            .p(2.0)
            .theta(0.5);
        assert_eq!(names(&s), vec!["θ > n(1/u − 1/p)"]);
        assert!(s.clone().theta(0.5000001).validate().is_ok());
    }

    #[test]
    fn heisenberg_window_n3() {
        let s = FunctionalSpec::new(Variant::HeisenbergNd, 3).q(1.0);
        let v = s.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].constraint.contains("(1.2, 6)"));
        assert!(FunctionalSpec::new(Variant::HeisenbergNd, 3).q(2.0).validate().is_ok());
        assert!(FunctionalSpec::new(Variant::HeisenbergNd, 1).q(Exponent::Infinity).validate().is_ok());
        assert!(FunctionalSpec::new(Variant::HeisenbergNd, 2).q(1.0).validate().is_err());
    }

    #[test]
    fn balance_off_by_1e6_rejected() {
        let s = FunctionalSpec::new(Variant::WeightedUpSpecialGen, 1)
            .r(1.0)
            .p(2.0)
            .q(2.0)
            .theta(1.0)
            .phi(1.0)
            .alpha(1.0)
            .beta(1.0);
        assert!(s.validate().is_ok());
        let bad = s.beta(1.0 + 1e-6);
        assert_eq!(names(&bad), vec!["α[θ − n(1/r − 1/p)] = β[φ − n(1/r − 1/q)]"]);
    }

    #[test]
    fn generalized_window_endpoints_accepted() {
        for p in [1.0, 1.25, 1.5, 2.0] {
            let p = Exponent::from(p);
            let pd = p.dual().unwrap();
            for q in [p, pd] {
                let s = FunctionalSpec::new(Variant::GeneralizedUp, 2).p(p).q(q);
                assert!(s.validate().is_ok(), "{p} {q}");
            }
        }
        let s = FunctionalSpec::new(Variant::GeneralizedUp, 1).p(1.5).q(3.5);
        assert_eq!(names(&s), vec!["q ≤ p′"]);
    }

    #[test]
    fn fractional_alpha_guard() {
        let s = FunctionalSpec::new(Variant::FractionalLaplacian, 1).s_frac(1.0).p(1.999);
        assert!(names(&s).iter().any(|c| c.starts_with("|α|")));
        let ok = FunctionalSpec::new(Variant::FractionalLaplacian, 1).s_frac(0.5).p(1.0);
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn missing_parameters_are_named() {
        let s = FunctionalSpec::new(Variant::WeightedUpInfty, 2);
        let n = names(&s);
        for want in ["α given", "β given", "θ given", "φ given", "p given", "q given"] {
            assert!(n.iter().any(|c| c == want), "{want}");
        }
    }

    #[test]
    fn json_round_trip() {
        let s = FunctionalSpec::new(Variant::FPq, 1).p(1.0).q(Exponent::Infinity);
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains("\"F_pq\"") && j.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<FunctionalSpec>(&j).unwrap(), s);
    }
}
