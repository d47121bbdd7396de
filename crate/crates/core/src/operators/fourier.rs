use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{GridSpec, SampledField};

/// Fourier normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// f̂(ξ) = ∫ f(x) e^{−2πi x·ξ} dx
    TwoPi,
    /// f̂(ω) = (2π)^{−n/2} ∫ f(x) e^{−i x·ω} dx
    Unitary,
}

impl Convention {
    /// Ratio between the output half-width and N/(4L).
    pub fn frequency_scale(&self) -> f64 {
        match self {
            Convention::TwoPi => 1.0,
            Convention::Unitary => 2.0 * PI,
        }
    }
}

/// Half-width c·N/(4L) of the reciprocal grid.
pub fn reciprocal_grid(grid: &GridSpec, convention: Convention) -> Result<GridSpec> {
    let extent = convention.frequency_scale() * grid.points() as f64 / (4.0 * grid.extent());
    grid.with_extent(extent)
}

/// In-place unnormalized DFT along every axis of a row-major N^n array.
pub(crate) fn fft_axes(values: &mut [Complex64], dim: usize, n: usize, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = values.len();
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(values, &mut scratch);
            continue;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = stride * n;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    values[base + j * stride] = *v;
                }
            }
        }
    }
}

fn checkerboard_sign(grid: &GridSpec, flat: usize) -> f64 {
    let m = grid.multi_index(flat);
    if m[..grid.dim()].iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }
}

/// Continuous Fourier transform (or its inverse) approximated on the centered grid.
///
/// With x_j = (j − N/2)h and ξ_m = (m − N/2)/(Nh), the kernel factors as
/// e^{−2πi x_j ξ_m} = (−1)^j (−1)^m e^{−2πi jm/N} (the remaining
/// (−1)^{N/2} is 1 for N divisible by 4), so a DFT between two sign
/// ramps gives the rectangle-rule integral at every output point.
pub fn transform(f: &SampledField, convention: Convention, inverse: bool) -> Result<SampledField> {
    let grid = *f.grid();
    let out_grid = reciprocal_grid(&grid, convention)?;
    let n = grid.dim();
    let mut values: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| v * checkerboard_sign(&grid, i))
        .collect();
    let direction = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
    fft_axes(&mut values, n, grid.points(), direction);
    let mut scale = grid.cell_volume();
    if convention == Convention::Unitary {
        scale *= (2.0 * PI).powf(-(n as f64) / 2.0);
    }
    for (i, v) in values.iter_mut().enumerate() {
        *v *= scale * checkerboard_sign(&grid, i);
    }
    let tag = if inverse { "F⁻¹" } else { "F" };
    f.regrid(out_grid, values, format!("{tag}[{}]", f.label))
}
