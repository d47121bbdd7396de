use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, SampledField};

/// Unimodular multiplier φ with |φ(x)| = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PhaseSpec {
    /// e^{iθ}
    Constant { angle: f64 },
    /// e^{2πi ω·x}
    PlaneWave { frequency: Vec<f64> },
    /// e^{iπ a|x|²}
    Chirp { rate: f64 },
}

impl PhaseSpec {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let angle = match self {
            PhaseSpec::Constant { angle } => *angle,
            PhaseSpec::PlaneWave { frequency } => {
                2.0 * PI * frequency.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            }
            PhaseSpec::Chirp { rate } => PI * rate * x.iter().map(|v| v * v).sum::<f64>(),
        };
        Complex64::from_polar(1.0, angle)
    }

    pub fn conj(&self) -> PhaseSpec {
        match self {
            PhaseSpec::Constant { angle } => PhaseSpec::Constant { angle: -angle },
            PhaseSpec::PlaneWave { frequency } => {
                PhaseSpec::PlaneWave { frequency: frequency.iter().map(|v| -v).collect() }
            }
            PhaseSpec::Chirp { rate } => PhaseSpec::Chirp { rate: -rate },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            PhaseSpec::Constant { angle } => angle.is_finite(),
            PhaseSpec::PlaneWave { frequency } => frequency.iter().all(|v| v.is_finite()),
            PhaseSpec::Chirp { rate } => rate.is_finite(),
        };
        if ok { Ok(()) } else { Err(Error::InvalidParameter(format!("non-finite phase {self:?}"))) }
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        if let PhaseSpec::PlaneWave { frequency } = self {
            if frequency.len() != f.grid().dim() {
                return Err(Error::OperatorPrecondition(format!(
                    "plane wave has {} components for a {}-D field",
                    frequency.len(),
                    f.grid().dim()
                )));
            }
        }
        let grid = *f.grid();
        let n = grid.dim();
        f.map(format!("M[{}]", f.label), |i, v| v * self.eval(&grid.coords(i)[..n]))
    }
}

/// Cell partition rule for step operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Regions {
    /// Ω₀ = {x_axis < threshold}, Ω₁ = the rest.
    HalfSpace { axis: usize, threshold: f64 },
    /// Ω₀ = {|x| ≤ radius}, Ω₁ = the rest.
    Ball { radius: f64 },
    /// Explicit region index per grid cell (row-major).
    Labels { labels: Vec<usize> },
}

/// B = Σ α_j P_j over a partition {Ω_j} of the grid cells.
///
/// A label map makes the sets disjoint and covering by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    regions: Regions,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    regions: Regions,
    weights: Vec<f64>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = String;
    fn try_from(r: PartitionRepr) -> std::result::Result<Self, String> {
        Partition::new(r.regions, r.weights).map_err(|e| e.to_string())
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr { regions: p.regions, weights: p.weights }
    }
}

impl Partition {
    pub fn new(regions: Regions, weights: Vec<f64>) -> Result<Self> {
        let needed = match &regions {
            Regions::HalfSpace { .. } | Regions::Ball { .. } => 2,
            Regions::Labels { labels } => labels.iter().max().map_or(1, |m| m + 1),
        };
        if weights.len() != needed {
            return Err(Error::InvalidParameter(format!(
                "partition has {needed} regions but {} weights",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter(format!("step weight {w} must be positive")));
        }
        Ok(Self { regions, weights })
    }

    pub fn half_space(axis: usize, threshold: f64, inside: f64, outside: f64) -> Result<Self> {
        Self::new(Regions::HalfSpace { axis, threshold }, vec![inside, outside])
    }

    pub fn regions(&self) -> &Regions {
        &self.regions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// (m, M): smallest and largest weight.
    pub fn bounds(&self) -> (f64, f64) {
        let m = self.weights.iter().cloned().fold(f64::INFINITY, f64::min);
        let big = self.weights.iter().cloned().fold(0.0, f64::max);
        (m, big)
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.regions.clone(), weights)
    }

    pub fn labels(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        match &self.regions {
            Regions::HalfSpace { axis, threshold } => {
                if *axis >= grid.dim() {
                    return Err(Error::OperatorPrecondition(format!(
                        "half-space axis {axis} on a {}-D grid",
                        grid.dim()
                    )));
                }
                Ok((0..grid.len())
                    .map(|i| usize::from(grid.coords(i)[*axis] >= *threshold))
                    .collect())
            }
            Regions::Ball { radius } => Ok((0..grid.len())
                .map(|i| usize::from(grid.radius_sq(i) > radius * radius))
                .collect()),
            Regions::Labels { labels } => {
                if labels.len() != grid.len() {
                    return Err(Error::SizeMismatch { expected: grid.len(), found: labels.len() });
                }
                Ok(labels.clone())
            }
        }
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        let labels = self.labels(f.grid())?;
        f.map(format!("B[{}]", f.label), |i, v| v * self.weights[labels[i]])
    }
}
