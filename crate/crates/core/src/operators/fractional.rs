use num_complex::Complex64;

use crate::error::Result;
use crate::families::hermite_table;
use crate::field::SampledField;

/// Number of Hermite functions in the fractional Fourier expansion.
pub const FRACTIONAL_BASIS: usize = 128;

/// Basis size actually used on an N-point axis.
pub fn basis_size(points: usize) -> usize {
    FRACTIONAL_BASIS.min(points)
}

/// Unitary fractional Fourier transform F_θ by Hermite expansion per axis:
/// F_θ h_k = e^{−ikθ} h_k, coefficients by rectangle quadrature, output on
/// the input grid.
///
/// Components of f beyond h_{K−1} are discarded; [`truncation_residual`]
/// measures how much that is. Because the same basis and weights are used
/// in every call, F_α F_β = F_{α+β} holds to rounding on the span.
pub fn apply_fractional(f: &SampledField, angle: f64) -> Result<SampledField> {
    let grid = *f.grid();
    let n = grid.points();
    let k_max = basis_size(n);
    let table = hermite_table(k_max, &grid.axis_coords());
    let h = grid.spacing();
    let eig: Vec<Complex64> = (0..k_max).map(|k| Complex64::from_polar(1.0, -(k as f64) * angle)).collect();

    let mut values = f.values().to_vec();
    let total = values.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut coef = vec![Complex64::new(0.0, 0.0); k_max];
    for axis in 0..grid.dim() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = stride * n;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = values[base + j * stride];
                }
                for (k, c) in coef.iter_mut().enumerate() {
                    let s: Complex64 = table[k].iter().zip(&line).map(|(b, v)| v * *b).sum();
                    *c = s * h * eig[k];
                }
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = coef.iter().enumerate().map(|(k, c)| c * table[k][j]).sum();
                }
                for (j, v) in line.iter().enumerate() {
                    values[base + j * stride] = *v;
                }
            }
        }
    }
    f.regrid(grid, values, format!("F_{angle}[{}]", f.label))
}

/// ‖f − P_K f‖₂ / ‖f‖₂ for the truncated Hermite projection P_K.
pub fn truncation_residual(f: &SampledField) -> Result<f64> {
    let p = apply_fractional(f, 0.0)?;
    let num: f64 = p.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
    Ok((num / den).sqrt())
}
