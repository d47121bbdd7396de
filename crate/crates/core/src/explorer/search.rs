use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sweep::{largest_exponent, sample};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::field::{dilate, GridSpec};
use crate::inequalities::{evaluate, FunctionalSpec};
use crate::operators::LinearOperator;

pub const MIN_BUDGET: usize = 50;

/// Extra parameter available on every family: f ↦ f(λx).
pub const DILATION: &str = "dilation";

const FTOL: f64 = 1e-10;
const XTOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub spec: FunctionalSpec,
    pub family: Family,
    /// 1–4 names among the family's continuous parameters and `dilation`.
    pub parameters: Vec<String>,
    /// Per-parameter box; defaults from [`default_bounds`].
    #[serde(default)]
    pub bounds: Option<Vec<(f64, f64)>>,
    pub budget: usize,
    pub seed: u64,
    #[serde(default)]
    pub operator: Option<LinearOperator>,
    #[serde(default)]
    pub field_grid: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub parameters: Vec<String>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Every finite evaluation in order.
    pub trace: Vec<TracePoint>,
    /// The last simplex contracted before the budget ran out. Not a
    /// global-optimality claim.
    pub converged: bool,
    pub evaluations: usize,
    pub failed_evaluations: usize,
    pub restarts: usize,
}

/// Search box for a parameter name.
pub fn default_bounds(name: &str) -> Option<(f64, f64)> {
    match name {
        "c" => Some((0.05, 20.0)),
        "alpha" => Some((0.25, 4.0)),
        "lambda" | DILATION => Some((0.25, 4.0)),
        _ => None,
    }
}

struct Objective<'a> {
    cfg: &'a SearchConfig,
    lo: Vec<f64>,
    hi: Vec<f64>,
    trace: Vec<TracePoint>,
    evaluations: usize,
    failed: usize,
}

impl Objective<'_> {
    fn clamp(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i], self.hi[i]);
        }
    }

    fn value_at(&self, params: &[f64]) -> Result<f64> {
        let mut family = self.cfg.family.clone();
        let mut lambda = 1.0;
        for (name, v) in self.cfg.parameters.iter().zip(params) {
            if name == DILATION {
                lambda = *v;
            } else {
                family = family.with_param(name, *v)?;
            }
        }
        let mut f = sample(&family, self.cfg.field_grid, largest_exponent(&self.cfg.spec))?;
        if lambda != 1.0 {
            f = dilate(&f, lambda)?;
        }
        let r = evaluate(&self.cfg.spec, &f, self.cfg.operator.as_ref())?;
        r.ratio.ok_or(Error::ZeroField)
    }

    /// Evaluate at log-coordinates `x` (clamped in place).
    fn eval(&mut self, x: &mut [f64]) -> f64 {
        self.clamp(x);
        let params: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        self.evaluations += 1;
        match self.value_at(&params) {
            Ok(v) if v.is_finite() => {
                self.trace.push(TracePoint { params, value: v });
                v
            }
            _ => {
                self.failed += 1;
                f64::INFINITY
            }
        }
    }

    fn exhausted(&self) -> bool {
        self.evaluations >= self.cfg.budget
    }
}

/// Nelder–Mead from `start`; true when the simplex contracted.
fn nelder_mead(obj: &mut Objective, start: &[f64], steps: &[f64], rng: &mut ChaCha8Rng) -> bool {
    let d = start.len();
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let mut x0 = start.to_vec();
    let f0 = obj.eval(&mut x0);
    pts.push((x0, f0));
    for i in 0..d {
        let mut x = start.to_vec();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        x[i] += sign * steps[i] * (1.0 + 0.1 * rng.random::<f64>());
        // Stay inside the box by flipping direction at the boundary.
        if x[i] > obj.hi[i] || x[i] < obj.lo[i] {
            x[i] = start[i] - (x[i] - start[i]);
        }
        let f = obj.eval(&mut x);
        pts.push((x, f));
        if obj.exhausted() {
            return false;
        }
    }
    loop {
        pts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (fb, fw) = (pts[0].1, pts[d].1);
        let fspread = fw - fb;
        let xspread = pts
            .iter()
            .skip(1)
            .flat_map(|(x, _)| x.iter().zip(&pts[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        // Scale-invariant functionals are flat along dilations, so a collapsed
        // value spread counts as contraction on its own.
        if fb.is_finite() && (fspread <= FTOL * (1.0 + fb.abs()) || xspread <= XTOL) {
            return true;
        }
        if obj.exhausted() {
            return false;
        }
        let mut c = vec![0.0; d];
        for (x, _) in &pts[..d] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { c.iter().zip(&pts[d].0).map(|(ci, wi)| ci + t * (ci - wi)).collect() };
        let mut xr = along(1.0);
        let fr = obj.eval(&mut xr);
        if fr < pts[0].1 {
            let mut xe = along(2.0);
            let fe = obj.eval(&mut xe);
            pts[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < pts[d - 1].1 {
            pts[d] = (xr, fr);
        } else {
            let t = if fr < fw { 0.5 } else { -0.5 };
            let mut xc = along(t);
            let fc = obj.eval(&mut xc);
            if fc < fw.min(fr) {
                pts[d] = (xc, fc);
            } else {
                let best = pts[0].0.clone();
                for (x, f) in pts.iter_mut().skip(1) {
                    let mut xs: Vec<f64> = x.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    *f = obj.eval(&mut xs);
                    *x = xs;
                    if obj.exhausted() {
                        return false;
                    }
                }
            }
        }
    }
}

/// Derivative-free search for the smallest ratio over a family, in the
/// logarithms of the parameters, restarting around the incumbent until a
/// restart stops improving or the budget runs out.
pub fn minimize(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.spec.validate()?;
    let d = cfg.parameters.len();
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidParameter(format!("1–4 parameters required, got {d}")));
    }
    if cfg.budget < MIN_BUDGET {
        return Err(Error::InvalidParameter(format!("budget {} below the minimum {MIN_BUDGET}", cfg.budget)));
    }
    let allowed = cfg.family.continuous_params();
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    let mut start = Vec::with_capacity(d);
    for (i, name) in cfg.parameters.iter().enumerate() {
        if name != DILATION && !allowed.contains(&name.as_str()) {
            return Err(Error::InvalidParameter(format!("family has no continuous parameter '{name}'")));
        }
        let (a, b) = match &cfg.bounds {
            Some(bs) => *bs.get(i).ok_or_else(|| {
                Error::InvalidParameter(format!("{} bounds for {d} parameters", bs.len()))
            })?,
            None => default_bounds(name).expect("known parameter"),
        };
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("bounds ({a}, {b}) for '{name}' must satisfy 0 < lo < hi")));
        }
        lo.push(a.ln());
        hi.push(b.ln());
        let s = if name == DILATION { 1.0 } else { cfg.family.param(name).unwrap_or(1.0) };
        start.push(s.clamp(a, b).ln());
    }
    let mut steps: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut obj = Objective { cfg, lo, hi, trace: Vec::new(), evaluations: 0, failed: 0 };

    let mut converged;
    let mut restarts = 0;
    let mut prev = f64::INFINITY;
    loop {
        converged = nelder_mead(&mut obj, &start, &steps, &mut rng);
        let Some(best) = best_point(&obj.trace) else { break };
        if !converged || obj.exhausted() || prev - best.value <= FTOL * (1.0 + best.value.abs()) {
            break;
        }
        prev = best.value;
        start = best.params.iter().map(|v| v.ln()).collect();
        for s in &mut steps {
            *s *= 0.5;
        }
        restarts += 1;
    }
    let best = best_point(&obj.trace)
        .ok_or_else(|| Error::InvalidParameter("every evaluation failed".into()))?
        .clone();
    Ok(SearchResult {
        parameters: cfg.parameters.clone(),
        best_params: best.params,
        best_value: best.value,
        converged,
        evaluations: obj.evaluations,
        failed_evaluations: obj.failed,
        restarts,
        trace: obj.trace,
    })
}

fn best_point(trace: &[TracePoint]) -> Option<&TracePoint> {
    trace.iter().min_by(|a, b| a.value.total_cmp(&b.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::Variant;
    use crate::operators::Convention;

    fn heisenberg_cfg(budget: usize) -> SearchConfig {
        SearchConfig {
            spec: FunctionalSpec::new(Variant::HeisenbergNd, 1).q(2.0),
            family: Family::Gaussian { dim: 1, lambda: 1.0 },
            parameters: vec!["lambda".into()],
            bounds: None,
            budget,
            seed: 7,
            operator: Some(LinearOperator::fourier(Convention::TwoPi)),
            field_grid: None,
        }
    }

    #[test]
    fn heisenberg_gaussian_minimum() {
        let r = minimize(&heisenberg_cfg(60)).unwrap();
        let want = 1.0 / (16.0 * std::f64::consts::PI.powi(2));
        assert!((r.best_value - want).abs() < 1e-8);
        assert!(r.trace.iter().all(|t| r.best_value <= t.value));
        assert!(r.converged);
    }

    #[test]
    fn constant_family_converges_at_once() {
        let mut cfg = heisenberg_cfg(50);
        cfg.spec = FunctionalSpec::new(Variant::FPq, 1).p(1.5).q(1.5);
        let r = minimize(&cfg).unwrap();
        assert!(r.converged);
        assert!(r.trace.iter().all(|t| t.value == 1.0));
        assert!(r.evaluations <= 4);
    }

    #[test]
    fn budget_floor() {
        assert!(minimize(&heisenberg_cfg(49)).is_err());
    }

    #[test]
    fn unknown_parameter() {
        let mut cfg = heisenberg_cfg(60);
        cfg.parameters = vec!["c".into()];
        assert!(minimize(&cfg).is_err());
    }
}
