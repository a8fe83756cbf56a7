//! Dense parameter vectors.
//!
//! Every public constructor and arithmetic operation rejects non-finite
//! entries, so a `ParamVector` in hand is always finite.

use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    /// Wraps `values`, rejecting empty or non-finite input.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("parameter vector must have dimension >= 1".into()));
        }
        check_finite(&values, "parameter vector")?;
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    /// Zero vector of dimension `dim`. Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "parameter vector must have dimension >= 1");
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        dot(self, other)
    }

    /// `self + alpha * x`.
    pub fn axpy(&self, alpha: f64, x: &Self) -> Result<Self> {
        axpy(alpha, x, self)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        axpy(-1.0, other, self)
    }

    pub fn scale(&self, alpha: f64) -> Result<Self> {
        self.map(|x| alpha * x)
    }

    /// Applies `f` elementwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let out: Vec<f64> = self.0.iter().map(|&x| f(x)).collect();
        check_finite(&out, "elementwise map")?;
        Ok(Self(out))
    }

    /// Combines two vectors elementwise.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_dim(self, other)?;
        let out: Vec<f64> = self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect();
        check_finite(&out, "elementwise map")?;
        Ok(Self(out))
    }

    pub fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim() });
        }
        Ok(())
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for ParamVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for ParamVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Returns `y + alpha * x`.
pub fn axpy(alpha: f64, x: &ParamVector, y: &ParamVector) -> Result<ParamVector> {
    same_dim(x, y)?;
    if !alpha.is_finite() {
        return Err(Error::NonFinite("axpy coefficient"));
    }
    let out: Vec<f64> = y.0.iter().zip(&x.0).map(|(&yi, &xi)| yi + alpha * xi).collect();
    check_finite(&out, "axpy result")?;
    Ok(ParamVector(out))
}

pub fn dot(x: &ParamVector, y: &ParamVector) -> Result<f64> {
    same_dim(x, y)?;
    let s: f64 = x.0.iter().zip(&y.0).map(|(a, b)| a * b).sum();
    if !s.is_finite() {
        return Err(Error::NonFinite("dot product"));
    }
    Ok(s)
}

fn same_dim(x: &ParamVector, y: &ParamVector) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: y.dim(), found: x.dim() });
    }
    Ok(())
}

pub(crate) fn check_finite(values: &[f64], context: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::from_slice(v).unwrap()
    }

    #[test]
    fn axpy_examples() {
        assert_eq!(axpy(0.0, &pv(&[1.0, 2.0]), &pv(&[3.0, 4.0])).unwrap(), pv(&[3.0, 4.0]));
        assert_eq!(axpy(1.0, &pv(&[1.0, 1.0]), &pv(&[0.0, 0.0])).unwrap(), pv(&[1.0, 1.0]));
        assert_eq!(axpy(-0.5, &pv(&[2.0, 4.0]), &pv(&[1.0, 1.0])).unwrap(), pv(&[0.0, -1.0]));
    }

    #[test]
    fn axpy_leaves_inputs_alone() {
        let x = pv(&[1.0, 2.0]);
        let y = pv(&[3.0, 4.0]);
        let _ = axpy(2.0, &x, &y).unwrap();
        assert_eq!(x, pv(&[1.0, 2.0]));
        assert_eq!(y, pv(&[3.0, 4.0]));
    }

    #[test]
    fn axpy_errors() {
        let err = axpy(1.0, &pv(&[1.0]), &pv(&[1.0, 2.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 1 });
        assert!(matches!(axpy(f64::NAN, &pv(&[1.0]), &pv(&[1.0])), Err(Error::NonFinite(_))));
        assert!(matches!(axpy(1e308, &pv(&[1e308]), &pv(&[1e308])), Err(Error::NonFinite(_))));
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&pv(&[0.0, 0.0]), &pv(&[5.0, 7.0])).unwrap(), 0.0);
        assert_eq!(dot(&pv(&[1.0, 2.0]), &pv(&[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(dot(&pv(&[1.0, 0.0]), &pv(&[0.0, 1.0])).unwrap(), 0.0);
        assert!(dot(&pv(&[1.0]), &pv(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn construction_rejects_bad_values() {
        assert!(ParamVector::new(vec![]).is_err());
        assert!(ParamVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(ParamVector::new(vec![f64::NAN]).is_err());
    }
}
