use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of points for a slope fit.
pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares line through (ln x, ln y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Two standard errors of the slope.
    pub width: f64,
    /// RMS of the log residuals.
    pub residual_rms: f64,
    pub points: usize,
}

pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<LogLogFit> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs ≥ {MIN_FIT_POINTS} points, got {}",
            x.len()
        )));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("log–log fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (ss / (m - 2.0) / sxx).sqrt();
    Ok(LogLogFit { slope, intercept, width: 2.0 * se, residual_rms: (ss / m).sqrt(), points: x.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    None,
}

pub fn monotonicity(values: &[f64]) -> Monotonicity {
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    if d.iter().all(|v| *v == 0.0) {
        Monotonicity::Constant
    } else if d.iter().all(|v| *v >= 0.0) {
        Monotonicity::Increasing
    } else if d.iter().all(|v| *v <= 0.0) {
        Monotonicity::Decreasing
    } else {
        Monotonicity::None
    }
}

/// Functional values along a strictly increasing parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub label: String,
    pub parameter: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Absent when some value is not positive.
    pub fit: Option<LogLogFit>,
    pub predicted_slope: Option<f64>,
    pub monotone: Monotonicity,
    /// Smallest value over the sweep: the empirical constant candidate.
    pub min_value: f64,
    pub argmin: f64,
    pub max_value: f64,
    pub bound_constant: Option<f64>,
    pub notes: Vec<String>,
}

impl SweepResult {
    pub fn new(label: impl Into<String>, parameter: impl Into<String>, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), found: values.len() });
        }
        if grid.len() < MIN_FIT_POINTS {
            return Err(Error::InvalidParameter(format!(
                "sweep needs ≥ {MIN_FIT_POINTS} points, got {}",
                grid.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at {}", grid[i])));
        }
        let (mut imin, mut imax) = (0, 0);
        for i in 1..values.len() {
            if values[i] < values[imin] {
                imin = i;
            }
            if values[i] > values[imax] {
                imax = i;
            }
        }
        Ok(Self {
            label: label.into(),
            parameter: parameter.into(),
            fit: fit_loglog(&grid, &values).ok(),
            predicted_slope: None,
            monotone: monotonicity(&values),
            min_value: values[imin],
            argmin: grid[imin],
            max_value: values[imax],
            bound_constant: None,
            notes: Vec::new(),
            grid,
            values,
        })
    }

    pub fn with_prediction(mut self, slope: Option<f64>) -> Self {
        self.predicted_slope = slope;
        self
    }

    pub fn with_bound(mut self, b: Option<f64>) -> Self {
        self.bound_constant = b;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    /// |fitted − predicted| when both exist.
    pub fn slope_error(&self) -> Option<f64> {
        Some((self.slope()? - self.predicted_slope?).abs())
    }

    /// Restriction to grid points in [lo, hi], refitted.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let (g, v): (Vec<f64>, Vec<f64>) = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(x, y)| (*x, *y))
            .unzip();
        let mut out = Self::new(self.label.clone(), self.parameter.clone(), g, v)?;
        out.predicted_slope = self.predicted_slope;
        out.bound_constant = self.bound_constant;
        out.notes = self.notes.clone();
        out.notes.push(format!("window {} ∈ [{lo}, {hi}]", self.parameter));
        Ok(out)
    }

    /// Two columns: the parameter and the value, full precision.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{},value", self.parameter)?;
        for (x, y) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{x:e},{y:e}")?;
        }
        Ok(())
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| if i == count - 1 { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
        .collect()
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}
