use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, SampledField};

/// Diffeomorphisms with a constant Jacobian determinant and a closed-form inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DiffeoSpec {
    /// ψ(ξ₁, ξ₂) = (ξ₁e^{γξ₁ξ₂}, ξ₂e^{−γξ₁ξ₂}); ξ₁ξ₂ is invariant, so ψ⁻¹ is the twist by −γ.
    Twist { gamma: f64 },
    /// ψ(x) = Mx, rows of M.
    Linear { matrix: Vec<Vec<f64>> },
    /// ψ(x) = x + b.
    Translate { offset: Vec<f64> },
}

impl DiffeoSpec {
    /// Dimension the map is defined on, if fixed.
    pub fn dim(&self) -> usize {
        match self {
            DiffeoSpec::Twist { .. } => 2,
            DiffeoSpec::Linear { matrix } => matrix.len(),
            DiffeoSpec::Translate { offset } => offset.len(),
        }
    }

    fn linear_matrix(matrix: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("linear diffeo needs a square matrix".into()));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| matrix[i][j]))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DiffeoSpec::Twist { gamma } if !gamma.is_finite() => {
                Err(Error::InvalidParameter(format!("twist γ = {gamma}")))
            }
            DiffeoSpec::Linear { matrix } => {
                let m = Self::linear_matrix(matrix)?;
                if m.determinant().abs() < 1e-14 {
                    return Err(Error::NotInvertible("linear diffeo has a singular matrix".into()));
                }
                Ok(())
            }
            DiffeoSpec::Translate { offset } if offset.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidParameter("non-finite translation".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        match self {
            DiffeoSpec::Twist { gamma } => {
                let t = gamma * x[0] * x[1];
                vec![x[0] * t.exp(), x[1] * (-t).exp()]
            }
            DiffeoSpec::Linear { matrix } => {
                matrix.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
            }
            DiffeoSpec::Translate { offset } => x.iter().zip(offset).map(|(a, b)| a + b).collect(),
        }
    }

    /// Analytic Jacobian matrix Dψ(x).
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        match self {
            DiffeoSpec::Twist { gamma } => {
                let (a, b) = (x[0], x[1]);
                let e = (gamma * a * b).exp();
                let ei = 1.0 / e;
                vec![
                    vec![e * (1.0 + gamma * a * b), gamma * a * a * e],
                    vec![-gamma * b * b * ei, ei * (1.0 - gamma * a * b)],
                ]
            }
            DiffeoSpec::Linear { matrix } => matrix.clone(),
            DiffeoSpec::Translate { offset } => {
                let n = offset.len();
                (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
            }
        }
    }

    pub fn jacobian_det(&self, x: &[f64]) -> f64 {
        let j = self.jacobian(x);
        let n = j.len();
        DMatrix::from_fn(n, n, |r, c| j[r][c]).determinant()
    }

    /// |det Dψ|, constant by construction.
    pub fn jacobian_constant(&self) -> Result<f64> {
        match self {
            DiffeoSpec::Twist { .. } | DiffeoSpec::Translate { .. } => Ok(1.0),
            DiffeoSpec::Linear { matrix } => {
                let d = Self::linear_matrix(matrix)?.determinant().abs();
                if d < 1e-14 {
                    Err(Error::NotInvertible("linear diffeo has a singular matrix".into()))
                } else {
                    Ok(d)
                }
            }
        }
    }

    pub fn inverse(&self) -> Result<DiffeoSpec> {
        match self {
            DiffeoSpec::Twist { gamma } => Ok(DiffeoSpec::Twist { gamma: -gamma }),
            DiffeoSpec::Translate { offset } => {
                Ok(DiffeoSpec::Translate { offset: offset.iter().map(|v| -v).collect() })
            }
            DiffeoSpec::Linear { matrix } => {
                let m = Self::linear_matrix(matrix)?;
                let inv = m
                    .try_inverse()
                    .ok_or_else(|| Error::NotInvertible("linear diffeo has a singular matrix".into()))?;
                let n = inv.nrows();
                Ok(DiffeoSpec::Linear {
                    matrix: (0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect(),
                })
            }
        }
    }
}

/// Cubic convolution kernel, a = −1/2.
fn keys(t: f64) -> f64 {
    let a = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
    } else {
        0.0
    }
}

/// Cubic interpolation of the samples at a physical point, zero outside the grid.
/// Returns (value, inside) where `inside` is false if any stencil node fell off the grid.
pub fn interpolate(grid: &GridSpec, values: &[Complex64], y: &[f64]) -> (Complex64, bool) {
    let n = grid.points() as isize;
    let h = grid.spacing();
    let dim = grid.dim();
    let mut base = [0isize; 3];
    let mut w = [[0.0f64; 4]; 3];
    let mut inside = true;
    for a in 0..dim {
        let u = (y[a] + grid.extent()) / h;
        if !u.is_finite() {
            return (Complex64::new(0.0, 0.0), false);
        }
        let i0 = u.floor();
        let t = u - i0;
        base[a] = i0 as isize - 1;
        for (s, ws) in w[a].iter_mut().enumerate() {
            *ws = keys(t + 1.0 - s as f64);
        }
        if base[a] < 0 || base[a] + 3 >= n {
            inside = false;
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let stencil = 4usize.pow(dim as u32);
    'outer: for s in 0..stencil {
        let mut weight = 1.0;
        let mut flat = 0usize;
        let mut rem = s;
        for a in 0..dim {
            let off = rem % 4;
            rem /= 4;
            let idx = base[a] + off as isize;
            if idx < 0 || idx >= n {
                continue 'outer;
            }
            weight *= w[a][off];
            flat = flat * grid.points() + idx as usize;
        }
        // flat was built with axis 0 first, matching row-major order
        acc += values[flat] * weight;
    }
    (acc, inside)
}

/// (w·D_ψ f)(x) = w·f(ψ(x)).
pub fn apply_diffeo(f: &SampledField, map: &DiffeoSpec, weight: f64) -> Result<SampledField> {
    let grid = *f.grid();
    if map.dim() != grid.dim() {
        return Err(Error::OperatorPrecondition(format!(
            "diffeo is {}-dimensional, field is {}-dimensional",
            map.dim(),
            grid.dim()
        )));
    }
    let dim = grid.dim();
    let mut clipped = false;
    let values: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let x = grid.coords(i);
            let y = map.map(&x[..dim]);
            let (v, inside) = interpolate(&grid, f.values(), &y);
            clipped |= !inside;
            v * weight
        })
        .collect();
    let mut label = format!("D[{}]", f.label);
    if clipped {
        label.push_str(" (zero-extended)");
    }
    f.regrid(grid, values, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_inverse_composes_to_identity() {
        let m = DiffeoSpec::Twist { gamma: 0.3 };
        let inv = m.inverse().unwrap();
        for x in [[0.4, -1.2], [2.0, 0.5], [-0.7, -0.9]] {
            let y = inv.map(&m.map(&x));
            assert!((y[0] - x[0]).abs() < 1e-13 && (y[1] - x[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn twist_jacobian_matches_finite_differences() {
        let m = DiffeoSpec::Twist { gamma: 0.25 };
        let x = [0.8, -1.1];
        let j = m.jacobian(&x);
        let d = 1e-6;
        for c in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[c] += d;
            xm[c] -= d;
            let (fp, fm) = (m.map(&xp), m.map(&xm));
            for r in 0..2 {
                let fd = (fp[r] - fm[r]) / (2.0 * d);
                assert!((fd - j[r][c]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn singular_linear_map_is_rejected() {
        let m = DiffeoSpec::Linear { matrix: vec![vec![1.0, 2.0], vec![2.0, 4.0]] };
        assert!(matches!(m.validate(), Err(Error::NotInvertible(_))));
        assert!(m.inverse().is_err());
    }

    #[test]
    fn interpolation_reproduces_quadratics_inside() {
        let g = GridSpec::new(1, 4.0, 64).unwrap();
        let f = SampledField::from_real_fn(g, "p", |x| 1.0 + x[0] - 0.5 * x[0] * x[0]).unwrap();
        for y in [-1.37, 0.0, 0.51, 2.2] {
            let (v, inside) = interpolate(&g, f.values(), &[y]);
            assert!(inside);
            assert!((v.re - (1.0 + y - 0.5 * y * y)).abs() < 1e-12);
        }
        let (v, inside) = interpolate(&g, f.values(), &[10.0]);
        assert!(!inside);
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grid_preserving_linear_map_is_exact() {
        let g = GridSpec::new(1, 8.0, 128).unwrap();
        let f = SampledField::from_real_fn(g, "g", |x| (-x[0] * x[0]).exp()).unwrap();
        let out = apply_diffeo(&f, &DiffeoSpec::Linear { matrix: vec![vec![2.0]] }, 1.0).unwrap();
        for i in 0..g.points() {
            let x = g.axis_coord(i);
            if (2.0 * x).abs() < 7.0 {
                assert!((out.values()[i].re - (-(4.0 * x * x)).exp()).abs() < 1e-15);
            }
        }
    }
}
