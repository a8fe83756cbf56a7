use nalgebra::DMatrix;

use crate::error::Result;
use crate::objective::{finite_loss, BatchSelector, Hessian, Objective};
use crate::vector::ParamVector;

/// `cᵀw + ½‖w‖² + κ Σ wᵢ³`.
///
/// Around the origin the losses stay small while the third derivative is
/// nonzero, so the truncation error of curvature stencils is visible well
/// above rounding noise.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicProblem {
    pub linear: ParamVector,
    pub cubic: f64,
}

impl CubicProblem {
    pub fn new(linear: ParamVector, cubic: f64) -> Self {
        Self { linear, cubic }
    }
}

impl Objective for CubicProblem {
    fn dim(&self) -> usize {
        self.linear.dim()
    }

    fn loss(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<f64> {
        w.expect_dim(self.dim())?;
        let loss = w
            .iter()
            .zip(self.linear.iter())
            .map(|(&x, &c)| c * x + 0.5 * x * x + self.cubic * x * x * x)
            .sum();
        finite_loss(loss)
    }

    fn grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<ParamVector> {
        w.expect_dim(self.dim())?;
        w.zip_map(&self.linear, |x, c| c + x + 3.0 * self.cubic * x * x)
    }

    fn has_exact_hessian(&self) -> bool {
        true
    }

    fn hessian(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<Hessian> {
        w.expect_dim(self.dim())?;
        let diag: Vec<f64> = w.iter().map(|&x| 1.0 + 6.0 * self.cubic * x).collect();
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }
}
