use nalgebra::DMatrix;

use super::Evaluation;
use crate::error::Result;
use crate::objective::{finite_loss, BatchSelector, Hessian, Objective};
use crate::vector::ParamVector;

const TARGETS: [f64; 3] = [1.5, 2.25, 2.625];

/// Beale's function, minimized at `(3, 0.5)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BealeProblem;

pub fn beale_eval(w: &ParamVector) -> Result<Evaluation> {
    w.expect_dim(2)?;
    let (x, y) = (w[0], w[1]);
    let (mut loss, mut gx, mut gy) = (0.0, 0.0, 0.0);
    let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
    for (k, c) in TARGETS.iter().enumerate() {
        let p = (k + 1) as i32;
        let yp = y.powi(p);
        let t = c - x + x * yp;
        // partial derivatives of the residual t
        let tx = yp - 1.0;
        let ty = p as f64 * x * y.powi(p - 1);
        let txy = p as f64 * y.powi(p - 1);
        let tyy = if p >= 2 { (p * (p - 1)) as f64 * x * y.powi(p - 2) } else { 0.0 };
        loss += t * t;
        gx += 2.0 * t * tx;
        gy += 2.0 * t * ty;
        hxx += 2.0 * tx * tx;
        hxy += 2.0 * (tx * ty + t * txy);
        hyy += 2.0 * (ty * ty + t * tyy);
    }
    Ok(Evaluation {
        loss: finite_loss(loss)?,
        grad: ParamVector::new(vec![gx, gy])?,
        hessian: DMatrix::from_row_slice(2, 2, &[hxx, hxy, hxy, hyy]),
    })
}

impl Objective for BealeProblem {
    fn dim(&self) -> usize {
        2
    }

    fn loss(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<f64> {
        w.expect_dim(2)?;
        let (x, y) = (w[0], w[1]);
        let loss = TARGETS
            .iter()
            .enumerate()
            .map(|(k, c)| (c - x + x * y.powi(k as i32 + 1)).powi(2))
            .sum();
        finite_loss(loss)
    }

    fn grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<ParamVector> {
        Ok(beale_eval(w)?.grad)
    }

    fn loss_and_grad(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<(f64, ParamVector)> {
        let e = beale_eval(w)?;
        Ok((e.loss, e.grad))
    }

    fn has_exact_hessian(&self) -> bool {
        true
    }

    fn hessian(&self, w: &ParamVector, _batch: &BatchSelector) -> Result<Hessian> {
        Ok(beale_eval(w)?.hessian)
    }

    fn minimizer(&self) -> Option<ParamVector> {
        Some(ParamVector::from_slice(&[3.0, 0.5]).unwrap())
    }
}
