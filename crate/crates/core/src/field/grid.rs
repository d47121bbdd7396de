use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform tensor grid {−L + j·h : 0 ≤ j < N}^n with h = 2L/N.
///
/// The origin is always a grid point (j = N/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct GridSpec {
    dim: usize,
    extent: f64,
    points: usize,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    dim: usize,
    extent: f64,
    points: usize,
}

impl TryFrom<GridRepr> for GridSpec {
    type Error = String;
    fn try_from(r: GridRepr) -> std::result::Result<Self, String> {
        GridSpec::new(r.dim, r.extent, r.points).map_err(|e| e.to_string())
    }
}

impl From<GridSpec> for GridRepr {
    fn from(g: GridSpec) -> Self {
        GridRepr { dim: g.dim, extent: g.extent, points: g.points }
    }
}

impl GridSpec {
    pub fn new(dim: usize, extent: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent {extent} must be positive")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points} must be a power of two ≥ 8"
            )));
        }
        Ok(Self { dim, extent, points })
    }

    /// Default working scale per dimension: (4096, 20), (512, 12), (128, 8).
    pub fn desk(dim: usize) -> Result<Self> {
        match dim {
            1 => Self::new(1, 20.0, 4096),
            2 => Self::new(2, 12.0, 512),
            3 => Self::new(3, 8.0, 128),
            _ => Err(Error::InvalidGrid(format!("no desk scale for dimension {dim}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn extent(&self) -> f64 {
        self.extent
    }
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    /// h^n, the rectangle-rule weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of samples N^n.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axis_coord(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.axis_coord(j)).collect()
    }

    /// Per-axis indices of a row-major flat index (axis 0 slowest).
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.points;
            rem /= self.points;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn coords(&self, flat: usize) -> [f64; 3] {
        let m = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.axis_coord(m[a]);
        }
        x
    }

    pub fn radius_sq(&self, flat: usize) -> f64 {
        self.coords(flat).iter().map(|v| v * v).sum()
    }

    /// Grid representing f(λ·) with the same samples: extent L/λ.
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        Self::new(self.dim, self.extent / lambda, self.points)
    }

    pub fn with_extent(&self, extent: f64) -> Result<Self> {
        Self::new(self.dim, extent, self.points)
    }

    /// One-axis grid with the same extent and N.
    pub fn axis_grid(&self) -> Self {
        Self { dim: 1, ..*self }
    }

    /// Same extent and N in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(dim, self.extent, self.points)
    }

    /// Equality up to a relative tolerance on the extent.
    pub fn matches(&self, other: &GridSpec) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.extent - other.extent).abs() <= 1e-12 * self.extent.max(other.extent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(0, 1.0, 8).is_err());
        assert!(GridSpec::new(4, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 0.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 12).is_err());
        assert!(GridSpec::new(1, 1.0, 4).is_err());
    }

    #[test]
    fn origin_is_a_grid_point() {
        let g = GridSpec::new(1, 3.0, 64).unwrap();
        assert_eq!(g.axis_coord(32), 0.0);
        assert_eq!(g.axis_coord(0), -3.0);
    }

    #[test]
    fn flat_and_multi_index_agree() {
        let g = GridSpec::new(3, 1.0, 8).unwrap();
        for flat in [0, 7, 8, 63, 64, 511] {
            let m = g.multi_index(flat);
            assert_eq!(g.flat_index(&m), flat);
        }
        assert_eq!(g.multi_index(8 * 8 + 3), [1, 0, 3]);
    }
}
