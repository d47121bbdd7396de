use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{GridSpec, SampledField};

/// Largest Hermite index accepted by [`make_hermite`].
pub const MAX_HERMITE_INDEX: usize = 64;

const RESCALE_AT: f64 = 1e100;

/// Writes h_0(x), …, h_{out.len()−1}(x) into `out`.
///
/// Three-term recurrence
///   h_{k+1} = √(2/(k+1))·x·h_k − √(k/(k+1))·h_{k−1},  h_0 = π^{−1/4}e^{−x²/2},
/// run on the polynomial part with the Gaussian factor kept as a separate
/// log-scale that absorbs renormalizations, so neither the polynomial
/// growth nor e^{−x²/2} over/underflows.
pub fn hermite_values(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -0.5 * x * x;
    let mut scale = log_scale.exp();
    let emit = |m: f64, scale: f64, log_scale: f64| {
        if scale > 1e-280 {
            m * scale
        } else if m == 0.0 {
            0.0
        } else {
            m.signum() * (m.abs().ln() + log_scale).exp()
        }
    };
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    out[0] = emit(cur, scale, log_scale);
    for k in 0..out.len() - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            prev /= RESCALE_AT;
            log_scale += RESCALE_AT.ln();
            scale = log_scale.exp();
        }
        out[k + 1] = emit(cur, scale, log_scale);
    }
}

pub fn hermite_value(k: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; k + 1];
    hermite_values(x, &mut buf);
    buf[k]
}

/// Table t[k][j] = h_k(x_j) for k < count.
pub fn hermite_table(count: usize, coords: &[f64]) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; coords.len()]; count];
    let mut buf = vec![0.0; count];
    for (j, &x) in coords.iter().enumerate() {
        hermite_values(x, &mut buf);
        for k in 0..count {
            table[k][j] = buf[k];
        }
    }
    table
}

/// One-axis samples of h_k.
pub fn hermite_axis(k: usize, grid: &GridSpec) -> Vec<f64> {
    let mut buf = vec![0.0; k + 1];
    grid.axis_coords()
        .into_iter()
        .map(|x| {
            hermite_values(x, &mut buf);
            buf[k]
        })
        .collect()
}

/// Normalized Hermite tensor h_α(x) = Π h_{α_a}(x_a).
pub fn make_hermite(alpha: &[usize], grid: GridSpec) -> Result<SampledField> {
    if alpha.len() != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "multi-index has {} components for a {}-D grid",
            alpha.len(),
            grid.dim()
        )));
    }
    if let Some(&index) = alpha.iter().find(|&&k| k > MAX_HERMITE_INDEX) {
        return Err(Error::IndexTooLarge { index, max: MAX_HERMITE_INDEX });
    }
    let axes: Vec<Vec<f64>> = alpha.iter().map(|&k| hermite_axis(k, &grid)).collect();
    let values = (0..grid.len())
        .map(|i| {
            let m = grid.multi_index(i);
            Complex64::new(axes.iter().enumerate().map(|(a, ax)| ax[m[a]]).product(), 0.0)
        })
        .collect();
    let label = format!(
        "hermite({})",
        alpha.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
    );
    SampledField::new(grid, values, label)
}

/// Growth exponent of ‖h_k‖_q in k, and whether a log k factor is present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteAsymptotics {
    pub exponent: f64,
    pub log_factor: bool,
}

/// ‖h_k‖_q ~ k^{1/(2q)−1/4} for q < 4; k^{−1/8}(log k)^{1/4} at q = 4;
/// k^{−1/(6q)−1/12} for q > 4 (q = ∞ gives −1/12).
pub fn hermite_norm_asymptotics(q: crate::field::Exponent) -> HermiteAsymptotics {
    let inv = q.recip();
    let qv = q.value();
    if qv < 4.0 {
        HermiteAsymptotics { exponent: inv / 2.0 - 0.25, log_factor: false }
    } else if qv == 4.0 {
        HermiteAsymptotics { exponent: -0.125, log_factor: true }
    } else {
        HermiteAsymptotics { exponent: -inv / 6.0 - 1.0 / 12.0, log_factor: false }
    }
}
