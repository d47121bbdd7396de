use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;

/// Square complex matrix acting on the flattened samples of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

/// Row-major real and imaginary parts.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    size: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = String;
    fn try_from(r: MatrixRepr) -> std::result::Result<Self, String> {
        if r.re.len() != r.size * r.size || r.im.len() != r.size * r.size {
            return Err(format!("matrix of size {} needs {} entries", r.size, r.size * r.size));
        }
        Ok(Self::from_fn(r.size, |i, j| {
            let k = i * r.size + j;
            Complex64::new(r.re[k], r.im[k])
        }))
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.size();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m.inner[(i, j)].re);
                im.push(m.inner[(i, j)].im);
            }
        }
        MatrixRepr { size: n, re, im }
    }
}

impl ComplexMatrix {
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self { inner: DMatrix::from_fn(size, size, f) }
    }

    /// Rejects non-square input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix kind must be square".into()));
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn identity(size: usize) -> Self {
        Self { inner: DMatrix::identity(size, size) }
    }

    /// Unitary DFT matrix e^{−2πijk/N}/√N.
    pub fn unitary_dft(size: usize) -> Self {
        let s = 1.0 / (size as f64).sqrt();
        Self::from_fn(size, |i, j| Complex64::from_polar(s, -2.0 * PI * (i * j) as f64 / size as f64))
    }

    pub fn size(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { inner: self.inner.map(|v| v * c) }
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inner
            .clone()
            .try_inverse()
            .map(|inner| Self { inner })
            .ok_or_else(|| Error::NotInvertible("singular matrix".into()))
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Self {
        Self { inner: &self.inner * &other.inner }
    }

    /// A*A.
    pub fn gram(&self) -> Self {
        Self { inner: self.inner.adjoint() * &self.inner }
    }

    /// max |M − kI| over entries.
    pub fn distance_to_scaled_identity(&self, k: f64) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { k } else { 0.0 };
                worst = worst.max((self.inner[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        if f.values().len() != self.size() {
            return Err(Error::SizeMismatch { expected: self.size(), found: f.values().len() });
        }
        let v = nalgebra::DVector::from_column_slice(f.values());
        let out = &self.inner * v;
        f.regrid(*f.grid(), out.iter().cloned().collect(), format!("M[{}]", f.label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_is_unitary() {
        let m = ComplexMatrix::unitary_dft(16);
        assert!(m.gram().distance_to_scaled_identity(1.0) < 1e-13);
    }

    #[test]
    fn rejects_non_square() {
        let rows = vec![vec![Complex64::new(1.0, 0.0); 2]; 3];
        assert!(ComplexMatrix::from_rows(&rows).is_err());
    }

    #[test]
    fn singular_inverse_errors() {
        let m = ComplexMatrix::from_fn(3, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(m.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::unitary_dft(4);
        let s = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"size":2,"re":[1,2,3],"im":[0,0,0]}"#).is_err());
    }
}
