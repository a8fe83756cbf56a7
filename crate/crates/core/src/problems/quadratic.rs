use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Evaluation;
use crate::error::{Error, Result};
use crate::objective::{finite_loss, BatchSelector, Hessian, Objective};
use crate::vector::ParamVector;

/// `½ (w - offset)ᵀ A (w - offset)` with `A` symmetric positive definite.
///
/// The second-order Taylor model is exact on this family, which makes it the
/// reference problem for every curvature estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    matrix_a: DMatrix<f64>,
    offset: ParamVector,
}

impl QuadraticProblem {
    pub fn new(matrix_a: DMatrix<f64>, offset: ParamVector) -> Result<Self> {
        let d = offset.dim();
        if matrix_a.nrows() != d || matrix_a.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix_a.nrows() });
        }
        if matrix_a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadratic matrix"));
        }
        let scale = matrix_a.amax().max(1.0);
        for i in 0..d {
            for j in 0..i {
                if (matrix_a[(i, j)] - matrix_a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument("quadratic matrix is not symmetric".into()));
                }
            }
        }
        if matrix_a.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { matrix_a, offset })
    }

    pub fn from_rows(rows: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("quadratic matrix must be square".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(d, d, &flat), ParamVector::from_slice(offset)?)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), ParamVector::zeros(d.max(1)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix_a
    }

    pub fn offset(&self) -> &ParamVector {
        &self.offset
    }

    /// `A v`.
    pub fn apply(&self, v: &ParamVector) -> Result<ParamVector> {
        v.expect_dim(self.offset.dim())?;
        let out = &self.matrix_a * DVector::from_column_slice(v.as_slice());
        ParamVector::new(out.as_slice().to_vec())
    }

    /// `A⁻¹ v` via Cholesky.
    pub fn solve(&self, v: &ParamVector) -> Result<ParamVector> {
        v.expect_dim(self.offset.dim())?;
        let chol = self.matrix_a.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let out = chol.solve(&DVector::from_column_slice(v.as_slice()));
        ParamVector::new(out.as_slice().to_vec())
    }
}

pub fn quadratic_eval(p: &QuadraticProblem, w: &ParamVector) -> Result<Evaluation> {
    let e = w.sub(&p.offset)?;
    let grad = p.apply(&e)?;
    let loss = finite_loss(0.5 * e.dot(&grad)?)?;
    Ok(Evaluation { loss, grad, hessian: p.matrix_a.clone() })
}

/// Random SPD quadratic of dimension `d`: `A = MᵀM/d + shift·I` with Gaussian `M`
/// and a Gaussian offset.
pub fn random_spd(seed: u64, d: usize, shift: f64) -> Result<QuadraticProblem> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let mut a = m.transpose() * &m / d as f64;
    for i in 0..d {
        a[(i, i)] += shift;
    }
    // exact symmetry
    let a = (&a + a.transpose()) * 0.5;
    let offset: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    QuadraticProblem::new(a, ParamVector::new(offset)?)
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.offset.dim()
    }

    fn loss(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<f64> {
        Ok(quadratic_eval(self, w)?.loss)
    }

    fn grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<ParamVector> {
        self.apply(&w.sub(&self.offset)?)
    }

    fn loss_and_grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<(f64, ParamVector)> {
        let e = quadratic_eval(self, w)?;
        Ok((e.loss, e.grad))
    }

    fn has_exact_hessian(&self) -> bool {
        true
    }

    fn hessian(&self, _w: &ParamVector, _batch: &BatchSelector) -> Result<Hessian> {
        Ok(self.matrix_a.clone())
    }

    fn hvp(&self, w: &ParamVector, v: &ParamVector, _batch: &BatchSelector) -> Result<ParamVector> {
        w.expect_dim(self.dim())?;
        self.apply(v)
    }

    fn minimizer(&self) -> Option<ParamVector> {
        Some(self.offset.clone())
    }
}
