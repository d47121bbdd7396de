use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Complex samples on a [`GridSpec`], row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    grid: GridSpec,
    values: Vec<Complex64>,
    pub label: String,
    divergent: bool,
}

impl SampledField {
    /// Rejects non-finite samples; see [`SampledField::divergence_demo`].
    pub fn new(grid: GridSpec, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Divergent { index });
        }
        Ok(Self { grid, values, label: label.into(), divergent: false })
    }

    /// A field allowed to carry non-finite samples. Norm evaluation on it
    /// reports divergence instead of a number.
    pub fn divergence_demo(
        grid: GridSpec,
        values: Vec<Complex64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values, label: label.into(), divergent: true })
    }

    pub fn from_fn(
        grid: GridSpec,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let n = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.coords(i);
                f(&x[..n])
            })
            .collect();
        Self::new(grid, values, label)
    }

    pub fn from_real_fn(
        grid: GridSpec,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        Self::from_fn(grid, label, |x| Complex64::new(f(x), 0.0))
    }

    /// Tensor product f₁(x₁)·…·fₙ(xₙ) of one-axis samples sharing N and L.
    pub fn tensor(factors: &[&SampledField], label: impl Into<String>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidParameter("tensor of zero factors".into()))?;
        for f in factors {
            if f.grid.dim() != 1 || !f.grid.matches(&first.grid) {
                return Err(Error::IncompatibleGrids("tensor factors must share a 1-D grid".into()));
            }
        }
        let grid = first.grid.with_dim(factors.len())?;
        let values = (0..grid.len())
            .map(|i| {
                let m = grid.multi_index(i);
                factors.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (a, f)| {
                    acc * f.values[m[a]]
                })
            })
            .collect();
        Self::new(grid, values, label)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_divergence_demo(&self) -> bool {
        self.divergent
    }

    /// First non-finite sample index, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Same samples on a new grid of equal size (used by transforms).
    pub fn regrid(&self, grid: GridSpec, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if self.divergent {
            Self::divergence_demo(grid, values, label)
        } else {
            Self::new(grid, values, label)
        }
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(usize, Complex64) -> Complex64) -> Result<Self> {
        let values = self.values.iter().enumerate().map(|(i, &v)| f(i, v)).collect();
        self.regrid(self.grid, values, label)
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        self.map(self.label.clone(), |_, v| v * c)
    }

    /// Sample-wise a − b on identical grids.
    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    fn zip(&self, other: &SampledField, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if !self.grid.matches(&other.grid) {
            return Err(Error::IncompatibleGrids(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        self.regrid(self.grid, values, self.label.clone())
    }

    /// Fraction of squared mass on the outermost shell of grid cells.
    /// Large values mean the truncation to [−L, L]^n is cutting off the field.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.grid.points();
        let mut edge = 0.0;
        let mut total = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let m = self.grid.multi_index(i);
            let w = v.norm_sqr();
            total += w;
            if m[..self.grid.dim()].iter().any(|&j| j == 0 || j == n - 1) {
                edge += w;
            }
        }
        if total == 0.0 { 0.0 } else { edge / total }
    }

    /// Binary container: dim (u64), N (u64), L (f64), then interleaved re/im
    /// f64 pairs, all little-endian.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&(self.grid.dim() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.points() as u64).to_le_bytes())?;
        w.write_all(&self.grid.extent().to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary(mut r: impl Read, label: impl Into<String>) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
            r.read_exact(&mut word).map_err(|e| Error::Format(format!("truncated header: {e}")))?;
            Ok(word)
        };
        let dim = u64::from_le_bytes(next(&mut r)?) as usize;
        let points = u64::from_le_bytes(next(&mut r)?) as usize;
        let extent = f64::from_le_bytes(next(&mut r)?);
        let grid = GridSpec::new(dim, extent, points)?;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != grid.len() * 16 {
            return Err(Error::Format(format!(
                "expected {} payload bytes, found {}",
                grid.len() * 16,
                body.len()
            )));
        }
        let values = body
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Self::new(grid, values, label)
    }

    /// CSV with per-axis index and coordinate columns followed by re, im.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let n = self.grid.dim();
        let mut header: Vec<String> = (0..n).map(|a| format!("i{a}")).collect();
        header.extend((0..n).map(|a| format!("x{a}")));
        header.push("re".into());
        header.push("im".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let m = self.grid.multi_index(i);
            let x = self.grid.coords(i);
            let mut row: Vec<String> = m[..n].iter().map(|j| j.to_string()).collect();
            row.extend(x[..n].iter().map(|c| format!("{c:e}")));
            row.push(format!("{:e}", v.re));
            row.push(format!("{:e}", v.im));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
