//! Declarative, serializable experiment descriptions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::newton::{GenController, ProbePoints};
use crate::objective::{BatchSelector, Objective};
use crate::optim::{AdamWState, BaseOptimizer, PostProcessor};
use crate::problems::{generate_dataset, BealeProblem, CubicProblem, QuadraticProblem, RosenbrockProblem};
use crate::vector::ParamVector;

/// Documented Rosenbrock start.
pub const ROSENBROCK_START: [f64; 2] = [-1.5, 2.0];
/// Documented Beale start.
pub const BEALE_START: [f64; 2] = [-2.0, -2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Rosenbrock,
    Beale,
    Quadratic { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    Logistic {
        seed: u64,
        n: usize,
        d: usize,
        #[serde(default)]
        l2_penalty: f64,
    },
    Cubic { linear: Vec<f64>, cubic: f64 },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ProblemSpec::Rosenbrock => Box::new(RosenbrockProblem),
            ProblemSpec::Beale => Box::new(BealeProblem),
            ProblemSpec::Quadratic { matrix, offset } => Box::new(QuadraticProblem::from_rows(matrix, offset)?),
            ProblemSpec::Logistic { seed, n, d, l2_penalty } => {
                if !(*l2_penalty >= 0.0 && l2_penalty.is_finite()) {
                    return Err(Error::InvalidArgument("l2_penalty must be finite and >= 0".into()));
                }
                Box::new(generate_dataset(*seed, *n, *d)?.with_l2(*l2_penalty))
            }
            ProblemSpec::Cubic { linear, cubic } => {
                Box::new(CubicProblem::new(ParamVector::from_slice(linear)?, *cubic))
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemSpec::Rosenbrock | ProblemSpec::Beale => 2,
            ProblemSpec::Quadratic { offset, .. } => offset.len(),
            ProblemSpec::Logistic { d, .. } => *d,
            ProblemSpec::Cubic { linear, .. } => linear.len(),
        }
    }

    pub fn default_start(&self) -> Vec<f64> {
        match self {
            ProblemSpec::Rosenbrock => ROSENBROCK_START.to_vec(),
            ProblemSpec::Beale => BEALE_START.to_vec(),
            _ => vec![0.0; self.dim()],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Rosenbrock => "rosenbrock",
            ProblemSpec::Beale => "beale",
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::Logistic { .. } => "logistic",
            ProblemSpec::Cubic { .. } => "cubic",
        }
    }

    fn is_data_backed(&self) -> bool {
        matches!(self, ProblemSpec::Logistic { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PostSpec {
    #[default]
    Identity,
    Sign,
    Clip { max_norm: f64 },
    Mask { mask: Vec<bool> },
}

impl PostSpec {
    fn build(&self) -> PostProcessor {
        match self {
            PostSpec::Identity => PostProcessor::Identity,
            PostSpec::Sign => PostProcessor::SignSgd,
            PostSpec::Clip { max_norm } => PostProcessor::ClipToNorm(*max_norm),
            PostSpec::Mask { mask } => PostProcessor::Mask(mask.clone()),
        }
    }
}

fn beta1() -> f64 {
    0.9
}
fn beta2() -> f64 {
    0.999
}
fn epsilon() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerSpec {
    Sgd {
        lr: f64,
        #[serde(default)]
        momentum: f64,
        #[serde(default)]
        weight_decay: f64,
        #[serde(default, skip_serializing_if = "is_identity")]
        post: PostSpec,
    },
    Adamw {
        lr: f64,
        #[serde(default = "beta1")]
        beta1: f64,
        #[serde(default = "beta2")]
        beta2: f64,
        #[serde(default = "epsilon")]
        epsilon: f64,
        #[serde(default)]
        weight_decay: f64,
        #[serde(default, skip_serializing_if = "is_identity")]
        post: PostSpec,
    },
}

fn is_identity(p: &PostSpec) -> bool {
    *p == PostSpec::Identity
}

impl OptimizerSpec {
    pub fn sgd(lr: f64) -> Self {
        OptimizerSpec::Sgd { lr, momentum: 0.0, weight_decay: 0.0, post: PostSpec::Identity }
    }

    pub fn adamw(lr: f64) -> Self {
        OptimizerSpec::Adamw {
            lr,
            beta1: beta1(),
            beta2: beta2(),
            epsilon: epsilon(),
            weight_decay: 0.0,
            post: PostSpec::Identity,
        }
    }

    pub fn lr(&self) -> f64 {
        match self {
            OptimizerSpec::Sgd { lr, .. } | OptimizerSpec::Adamw { lr, .. } => *lr,
        }
    }

    /// Same optimizer with a different learning rate.
    pub fn with_lr(&self, new_lr: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            OptimizerSpec::Sgd { lr, .. } | OptimizerSpec::Adamw { lr, .. } => *lr = new_lr,
        }
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerSpec::Sgd { .. } => "sgd",
            OptimizerSpec::Adamw { .. } => "adamw",
        }
    }

    pub fn build(&self, dim: usize) -> Result<BaseOptimizer> {
        if !(self.lr() > 0.0 && self.lr().is_finite()) {
            return Err(Error::InvalidArgument(format!("lr must be positive, got {}", self.lr())));
        }
        Ok(match self {
            OptimizerSpec::Sgd { momentum, weight_decay, post, .. } => {
                BaseOptimizer::sgd(dim, *momentum, *weight_decay)?.with_post(post.build())
            }
            OptimizerSpec::Adamw { beta1, beta2, epsilon, weight_decay, post, .. } => {
                BaseOptimizer::adamw(AdamWState::new(dim, *beta1, *beta2, *epsilon, *weight_decay)?)
                    .with_post(post.build())
            }
        })
    }
}

/// How the scheduler obtains its candidate learning rate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaSource {
    /// Probe losses and a quadratic fit.
    #[default]
    Probes,
    /// `Gᵀg / gᵀHg` from a Hessian-vector product.
    ExactHvp,
}

fn gamma() -> f64 {
    0.9
}
fn phi() -> u64 {
    8
}
fn r2_threshold() -> f64 {
    0.99
}
fn clamp_factor() -> f64 {
    10.0
}

/// Scheduler settings. The initial learning rate is the optimizer's `lr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    #[serde(default = "gamma")]
    pub gamma: f64,
    #[serde(default = "phi")]
    pub phi: u64,
    #[serde(default = "r2_threshold")]
    pub r2_threshold: f64,
    #[serde(default)]
    pub probe_points: ProbePoints,
    /// Multiply candidates by `1 - t/T` with `T` the iteration budget.
    #[serde(default)]
    pub decay: bool,
    #[serde(default = "clamp_factor")]
    pub clamp_factor: f64,
    #[serde(default)]
    pub eta_source: EtaSource,
    /// Replace the initial learning rate by an exponential grid search at the first step.
    #[serde(default)]
    pub auto_eta0: bool,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            gamma: gamma(),
            phi: phi(),
            r2_threshold: r2_threshold(),
            probe_points: ProbePoints::Three,
            decay: false,
            clamp_factor: clamp_factor(),
            eta_source: EtaSource::Probes,
            auto_eta0: false,
        }
    }
}

impl GenSpec {
    pub fn controller(&self, eta0: f64, iterations: usize) -> Result<GenController> {
        let mut ctrl = GenController::new(eta0)?;
        ctrl.gamma = self.gamma;
        ctrl.phi = self.phi;
        ctrl.r2_threshold = self.r2_threshold;
        ctrl.probe_points = self.probe_points;
        ctrl.decay_enabled = self.decay;
        ctrl.horizon = Some(iterations as u64);
        ctrl.clamp_factor = self.clamp_factor;
        ctrl.validate()?;
        Ok(ctrl)
    }
}

fn one() -> usize {
    1
}

/// Everything needed to reproduce one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub problem: ProblemSpec,
    pub optimizer: OptimizerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen: Option<GenSpec>,
    /// Defaults to the problem's documented start.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_point: Option<Vec<f64>>,
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub log_every: usize,
    /// Mini-batch size for data-backed problems; full data when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, problem: ProblemSpec, optimizer: OptimizerSpec, iterations: usize) -> Self {
        Self {
            name: name.into(),
            problem,
            optimizer,
            gen: None,
            start_point: None,
            iterations,
            seed: 0,
            log_every: 1,
            batch_size: None,
        }
    }

    pub fn with_gen(mut self, gen: GenSpec) -> Self {
        self.gen = Some(gen);
        self
    }

    pub fn with_start(mut self, start: &[f64]) -> Self {
        self.start_point = Some(start.to_vec());
        self
    }

    pub fn start(&self) -> Result<ParamVector> {
        let start = self.start_point.clone().unwrap_or_else(|| self.problem.default_start());
        let w = ParamVector::new(start)?;
        w.expect_dim(self.problem.dim())?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("experiment `{}`: {msg}", self.name)));
        if self.name.is_empty() {
            return Err(Error::InvalidArgument("experiment name must not be empty".into()));
        }
        if self.iterations == 0 {
            return bad("iterations must be >= 1".into());
        }
        if self.log_every == 0 {
            return bad("log_every must be >= 1".into());
        }
        if let Err(e) = self.start() {
            return bad(format!("start_point: {e}"));
        }
        if let Err(e) = self.optimizer.build(self.problem.dim()) {
            return bad(e.to_string());
        }
        if let Some(gen) = &self.gen {
            if let Err(e) = gen.controller(self.optimizer.lr(), self.iterations) {
                return bad(e.to_string());
            }
        }
        match (self.batch_size, self.problem.is_data_backed()) {
            (Some(_), false) => return bad("batch_size only applies to data-backed problems".into()),
            (Some(0), true) => return bad("batch_size must be >= 1".into()),
            (Some(b), true) => {
                if let ProblemSpec::Logistic { n, .. } = self.problem {
                    if b > n {
                        return bad(format!("batch_size {b} exceeds dataset size {n}"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Batch used at iteration `step` (1-based).
    pub fn batch_at(&self, step: usize) -> BatchSelector {
        match self.batch_size {
            None => BatchSelector::FullData,
            Some(batch_size) => BatchSelector::SyntheticNoise { seed: mix_seed(self.seed, step as u64), batch_size },
        }
    }
}

/// SplitMix64 finalizer over `(seed, stream)`.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_starts() {
        let spec = ExperimentSpec::new("r", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1e-3), 10);
        assert_eq!(spec.start().unwrap().as_slice(), &ROSENBROCK_START);
        let spec = ExperimentSpec::new("b", ProblemSpec::Beale, OptimizerSpec::sgd(1e-3), 10);
        assert_eq!(spec.start().unwrap().as_slice(), &BEALE_START);
    }

    #[test]
    fn validation_catches_mistakes() {
        let base = ExperimentSpec::new("x", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1e-3), 10);
        assert!(base.validate().is_ok());
        let mut s = base.clone();
        s.iterations = 0;
        assert!(s.validate().is_err());
        let s = base.clone().with_start(&[1.0]);
        assert!(s.validate().is_err());
        let mut s = base.clone();
        s.batch_size = Some(4);
        assert!(s.validate().is_err());
        let s = base.clone().with_gen(GenSpec { gamma: 1.5, ..GenSpec::default() });
        assert!(s.validate().is_err());
        let s = ExperimentSpec::new("x", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(-1.0), 10);
        assert!(s.validate().is_err());
    }

    #[test]
    fn batches_vary_with_step_but_not_run() {
        let mut s = ExperimentSpec::new(
            "l",
            ProblemSpec::Logistic { seed: 1, n: 100, d: 3, l2_penalty: 0.0 },
            OptimizerSpec::sgd(0.1),
            10,
        );
        s.batch_size = Some(8);
        assert_eq!(s.batch_at(3), s.batch_at(3));
        assert_ne!(s.batch_at(3), s.batch_at(4));
    }
}
