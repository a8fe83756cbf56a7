use nalgebra::DMatrix;

use super::Evaluation;
use crate::error::Result;
use crate::objective::{finite_loss, BatchSelector, Hessian, Objective};
use crate::vector::ParamVector;

/// Two-dimensional Rosenbrock valley, `100 (y - x^2)^2 + (1 - x)^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RosenbrockProblem;

pub fn rosenbrock_eval(w: &ParamVector) -> Result<Evaluation> {
    w.expect_dim(2)?;
    let (x, y) = (w[0], w[1]);
    let r = y - x * x;
    let loss = finite_loss(100.0 * r * r + (1.0 - x) * (1.0 - x))?;
    let grad = ParamVector::new(vec![-400.0 * x * r - 2.0 * (1.0 - x), 200.0 * r])?;
    let hxy = -400.0 * x;
    let hessian = DMatrix::from_row_slice(2, 2, &[1200.0 * x * x - 400.0 * y + 2.0, hxy, hxy, 200.0]);
    Ok(Evaluation { loss, grad, hessian })
}

impl Objective for RosenbrockProblem {
    fn dim(&self) -> usize {
        2
    }

    fn loss(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<f64> {
        w.expect_dim(2)?;
        let (x, y) = (w[0], w[1]);
        finite_loss(100.0 * (y - x * x).powi(2) + (1.0 - x).powi(2))
    }

    fn grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<ParamVector> {
        Ok(rosenbrock_eval(w)?.grad)
    }

    fn loss_and_grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<(f64, ParamVector)> {
        let e = rosenbrock_eval(w)?;
        Ok((e.loss, e.grad))
    }

    fn has_exact_hessian(&self) -> bool {
        true
    }

    fn hessian(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<Hessian> {
        Ok(rosenbrock_eval(w)?.hessian)
    }

    fn minimizer(&self) -> Option<ParamVector> {
        Some(ParamVector::from_slice(&[1.0, 1.0]).unwrap())
    }
}
