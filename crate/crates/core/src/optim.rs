//! Base optimizers expressed as stateful gradient post-processors.
//!
//! Each optimizer maps the raw mini-batch gradient to a descent direction;
//! the learning rate is applied separately by [`apply_step`], which is what
//! lets a learning-rate controller sit on top of any of them.

use crate::error::{Error, Result};
use crate::vector::{axpy, ParamVector};

/// Heavy-ball SGD with coupled weight decay.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdState {
    pub momentum: f64,
    pub weight_decay: f64,
    pub velocity: ParamVector,
}

impl SgdState {
    pub fn new(dim: usize, momentum: f64, weight_decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::InvalidArgument(format!("momentum must be in [0, 1), got {momentum}")));
        }
        if !(weight_decay >= 0.0 && weight_decay.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight_decay must be >= 0, got {weight_decay}")));
        }
        Ok(Self { momentum, weight_decay, velocity: ParamVector::zeros(dim) })
    }
}

/// Returns the new velocity `momentum·v + (g + weight_decay·w)`.
pub fn sgd_direction(state: &mut SgdState, raw_grad: &ParamVector, w: &ParamVector) -> Result<ParamVector> {
    let effective = axpy(state.weight_decay, w, raw_grad)?;
    let velocity = effective.axpy(state.momentum, &state.velocity)?;
    state.velocity = velocity.clone();
    Ok(velocity)
}

/// AdamW moments. Weight decay is decoupled: it is added to the direction
/// after the adaptive rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamWState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
    pub m: ParamVector,
    pub v: ParamVector,
    pub step_count: u64,
}

impl AdamWState {
    pub fn new(dim: usize, beta1: f64, beta2: f64, epsilon: f64, weight_decay: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) {
            return Err(Error::InvalidArgument(format!("betas must be in [0, 1), got ({beta1}, {beta2})")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(weight_decay >= 0.0 && weight_decay.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight_decay must be >= 0, got {weight_decay}")));
        }
        Ok(Self {
            beta1,
            beta2,
            epsilon,
            weight_decay,
            m: ParamVector::zeros(dim),
            v: ParamVector::zeros(dim),
            step_count: 0,
        })
    }

    /// PyTorch defaults: β₁ = 0.9, β₂ = 0.999, ε = 1e-8, no weight decay.
    pub fn with_defaults(dim: usize) -> Self {
        Self::new(dim, 0.9, 0.999, 1e-8, 0.0).expect("default AdamW hyperparameters are valid")
    }
}

pub fn adamw_direction(state: &mut AdamWState, raw_grad: &ParamVector, w: &ParamVector) -> Result<ParamVector> {
    raw_grad.expect_dim(state.m.dim())?;
    w.expect_dim(state.m.dim())?;
    let (b1, b2) = (state.beta1, state.beta2);
    let m = state.m.zip_map(raw_grad, |m, g| b1 * m + (1.0 - b1) * g)?;
    let v = state.v.zip_map(raw_grad, |v, g| b2 * v + (1.0 - b2) * g * g)?;
    let t = state.step_count + 1;
    let c1 = 1.0 - b1.powf(t as f64);
    let c2 = 1.0 - b2.powf(t as f64);
    let eps = state.epsilon;
    let adaptive = m.zip_map(&v, |m, v| (m / c1) / ((v / c2).sqrt() + eps))?;
    let direction = adaptive.axpy(state.weight_decay, w)?;
    state.m = m;
    state.v = v;
    state.step_count = t;
    Ok(direction)
}

/// Stateless transforms of the raw gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum PostProcessor {
    Identity,
    SignSgd,
    ClipToNorm(f64),
    Mask(Vec<bool>),
}

/// `sign(0)` is 0.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn post_process(pp: &PostProcessor, g: &ParamVector) -> Result<ParamVector> {
    match pp {
        PostProcessor::Identity => Ok(g.clone()),
        PostProcessor::SignSgd => g.map(sign),
        PostProcessor::ClipToNorm(c) => {
            if !(*c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!("clip norm must be > 0, got {c}")));
            }
            let norm = g.norm();
            if norm == 0.0 {
                return Ok(g.clone());
            }
            let factor = (c / norm).min(1.0);
            g.scale(factor)
        }
        PostProcessor::Mask(mask) => {
            if mask.len() != g.dim() {
                return Err(Error::DimensionMismatch { expected: g.dim(), found: mask.len() });
            }
            let values: Vec<f64> = g.iter().zip(mask).map(|(&x, &keep)| if keep { x } else { 0.0 }).collect();
            ParamVector::new(values)
        }
    }
}

/// `w - eta * direction`.
pub fn apply_step(w: &ParamVector, eta: f64, direction: &ParamVector) -> Result<ParamVector> {
    if !eta.is_finite() {
        return Err(Error::NonFinite("learning rate"));
    }
    axpy(-eta, direction, w)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseRule {
    Sgd(SgdState),
    AdamW(AdamWState),
}

/// A base optimizer: post-processing of the raw gradient followed by the
/// SGD or AdamW state update.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseOptimizer {
    pub post: PostProcessor,
    pub rule: BaseRule,
}

impl BaseOptimizer {
    pub fn sgd(dim: usize, momentum: f64, weight_decay: f64) -> Result<Self> {
        Ok(Self { post: PostProcessor::Identity, rule: BaseRule::Sgd(SgdState::new(dim, momentum, weight_decay)?) })
    }

    pub fn adamw(state: AdamWState) -> Self {
        Self { post: PostProcessor::Identity, rule: BaseRule::AdamW(state) }
    }

    pub fn with_post(mut self, post: PostProcessor) -> Self {
        self.post = post;
        self
    }

    /// Mutates the optimizer state and returns `g^optim`.
    pub fn direction(&mut self, raw_grad: &ParamVector, w: &ParamVector) -> Result<ParamVector> {
        let g = post_process(&self.post, raw_grad)?;
        match &mut self.rule {
            BaseRule::Sgd(s) => sgd_direction(s, &g, w),
            BaseRule::AdamW(s) => adamw_direction(s, &g, w),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> ParamVector {
        ParamVector::from_slice(v).unwrap()
    }

    #[test]
    fn sgd_examples() {
        let g = pv(&[0.5, -2.0]);
        let w = pv(&[3.0, 1.0]);
        let mut s = SgdState::new(2, 0.0, 0.0).unwrap();
        assert_eq!(sgd_direction(&mut s, &g, &w).unwrap(), g);

        let mut s = SgdState::new(2, 0.9, 0.0).unwrap();
        sgd_direction(&mut s, &g, &w).unwrap();
        let second = sgd_direction(&mut s, &g, &w).unwrap();
        assert!(second.sub(&g.scale(1.9).unwrap()).unwrap().max_abs() < 1e-15);

        let mut s = SgdState::new(2, 0.0, 0.1).unwrap();
        let d = sgd_direction(&mut s, &ParamVector::zeros(2), &pv(&[10.0, 0.0])).unwrap();
        assert_eq!(d, pv(&[1.0, 0.0]));
    }

    #[test]
    fn sgd_rejects_bad_hyperparameters() {
        assert!(SgdState::new(2, 1.0, 0.0).is_err());
        assert!(SgdState::new(2, 0.5, -1.0).is_err());
    }

    #[test]
    fn adamw_examples() {
        let w = pv(&[0.0, 0.0]);
        let g = pv(&[3.0, -0.25]);
        let mut s = AdamWState::new(2, 0.0, 0.0, 1e-8, 0.0).unwrap();
        let d = adamw_direction(&mut s, &g, &w).unwrap();
        assert!((d[0] - 3.0 / (3.0 + 1e-8)).abs() < 1e-15);
        assert!((d[1] + 0.25 / (0.25 + 1e-8)).abs() < 1e-15);

        let mut s = AdamWState::with_defaults(2);
        for _ in 0..3 {
            assert!(adamw_direction(&mut s, &ParamVector::zeros(2), &w).unwrap().is_zero());
        }

        let mut s = AdamWState::with_defaults(2);
        let d = adamw_direction(&mut s, &pv(&[1.0, -1.0]), &w).unwrap();
        let expected = 1.0 / (1.0 + 1e-8);
        assert!((d[0] - expected).abs() < 1e-12);
        assert!((d[1] + expected).abs() < 1e-12);
        assert_eq!(s.step_count, 1);
    }

    #[test]
    fn adamw_decay_is_decoupled() {
        let mut s = AdamWState::new(1, 0.9, 0.999, 1e-8, 0.5).unwrap();
        let d = adamw_direction(&mut s, &ParamVector::zeros(1), &pv(&[4.0])).unwrap();
        assert_eq!(d, pv(&[2.0]));
    }

    #[test]
    fn post_process_examples() {
        assert_eq!(post_process(&PostProcessor::SignSgd, &pv(&[3.2, -0.1, 0.0])).unwrap(), pv(&[1.0, -1.0, 0.0]));
        let clipped = post_process(&PostProcessor::ClipToNorm(1.0), &pv(&[3.0, 4.0])).unwrap();
        assert!((clipped[0] - 0.6).abs() < 1e-15 && (clipped[1] - 0.8).abs() < 1e-15);
        assert_eq!(post_process(&PostProcessor::Mask(vec![true, false]), &pv(&[7.0, 9.0])).unwrap(), pv(&[7.0, 0.0]));
        assert!(post_process(&PostProcessor::ClipToNorm(1.0), &ParamVector::zeros(3)).unwrap().is_zero());
        assert!(post_process(&PostProcessor::Mask(vec![true]), &pv(&[1.0, 2.0])).is_err());
        assert_eq!(post_process(&PostProcessor::Identity, &pv(&[1.0, 2.0])).unwrap(), pv(&[1.0, 2.0]));
    }

    #[test]
    fn apply_step_examples() {
        let w = pv(&[1.0, 1.0]);
        assert_eq!(apply_step(&w, 0.0, &pv(&[5.0, 5.0])).unwrap(), w);
        assert_eq!(apply_step(&w, 1.0, &pv(&[1.0, 1.0])).unwrap(), pv(&[0.0, 0.0]));
        assert_eq!(apply_step(&pv(&[0.0, 0.0]), 0.5, &pv(&[2.0, -2.0])).unwrap(), pv(&[-1.0, 1.0]));
        assert!(apply_step(&w, f64::INFINITY, &w).is_err());
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3..1e3f64, 1..8)
    }

    proptest! {
        #[test]
        fn plain_sgd_is_identity(g in vec_strategy(), seed in -10.0..10.0f64) {
            let g = ParamVector::new(g).unwrap();
            let w = g.map(|x| x * seed).unwrap();
            let mut s = SgdState::new(g.dim(), 0.0, 0.0).unwrap();
            prop_assert_eq!(sgd_direction(&mut s, &g, &w).unwrap(), g);
        }

        #[test]
        fn sign_is_positive_scale_invariant(g in vec_strategy(), c in 1e-6..1e6f64) {
            let g = ParamVector::new(g).unwrap();
            let scaled = g.scale(c).unwrap();
            prop_assert_eq!(
                post_process(&PostProcessor::SignSgd, &scaled).unwrap(),
                post_process(&PostProcessor::SignSgd, &g).unwrap()
            );
        }

        #[test]
        fn clip_bounds_norm(g in vec_strategy(), c in 1e-3..1e3f64) {
            let g = ParamVector::new(g).unwrap();
            let out = post_process(&PostProcessor::ClipToNorm(c), &g).unwrap();
            prop_assert!(out.norm() <= c + 1e-12);
        }

        #[test]
        fn apply_step_is_linear_in_eta(
            w in prop::collection::vec(-10.0..10.0f64, 3),
            d in prop::collection::vec(-10.0..10.0f64, 3),
            a in -2.0..2.0f64,
            b in -2.0..2.0f64,
        ) {
            let w = ParamVector::new(w).unwrap();
            let d = ParamVector::new(d).unwrap();
            let once = apply_step(&w, a + b, &d).unwrap();
            let twice = apply_step(&apply_step(&w, a, &d).unwrap(), b, &d).unwrap();
            prop_assert!(once.sub(&twice).unwrap().max_abs() <= 1e-12);
        }
    }
}
