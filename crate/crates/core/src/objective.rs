//! The objective-function contract, mini-batch selection and per-step records.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vector::ParamVector;

/// Dense symmetric Hessian.
pub type Hessian = DMatrix<f64>;

/// Which samples a loss or gradient is averaged over.
///
/// Within one learning-rate update the same selector is used for the loss,
/// the gradient, and every probe loss.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BatchSelector {
    FullData,
    IndexSet(Vec<usize>),
    /// `batch_size` distinct indices drawn uniformly from a generator seeded with `seed`.
    SyntheticNoise { seed: u64, batch_size: usize },
}

impl BatchSelector {
    /// Resolves the selector against a dataset of `n` samples. `None` means all samples.
    pub fn indices(&self, n: usize) -> Result<Option<Vec<usize>>> {
        match self {
            BatchSelector::FullData => Ok(None),
            BatchSelector::IndexSet(idx) => {
                if idx.is_empty() {
                    return Err(Error::EmptyBatch);
                }
                let mut seen = vec![false; n];
                for &i in idx {
                    if i >= n {
                        return Err(Error::BatchOutOfBounds { index: i, len: n });
                    }
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(Error::DuplicateIndex(i));
                    }
                }
                Ok(Some(idx.clone()))
            }
            BatchSelector::SyntheticNoise { seed, batch_size } => {
                if *batch_size == 0 {
                    return Err(Error::EmptyBatch);
                }
                if *batch_size > n {
                    return Err(Error::InvalidArgument(format!(
                        "batch size {batch_size} exceeds dataset size {n}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut idx = rand::seq::index::sample(&mut rng, n, *batch_size).into_vec();
                idx.sort_unstable();
                Ok(Some(idx))
            }
        }
    }
}

/// A differentiable loss.
///
/// Implementations must be deterministic in `(w, batch)` and safe to evaluate
/// concurrently.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn loss(&self, w: &ParamVector, batch: &BatchSelector) -> Result<f64>;

    fn grad(&self, w: &ParamVector, batch: &BatchSelector) -> Result<ParamVector>;

    fn loss_and_grad(&self, w: &ParamVector, batch: &BatchSelector) -> Result<(f64, ParamVector)> {
        Ok((self.loss(w, batch)?, self.grad(w, batch)?))
    }

    fn has_exact_hessian(&self) -> bool {
        false
    }

    fn has_hvp(&self) -> bool {
        self.has_exact_hessian()
    }

    fn hessian(&self, _w: &ParamVector, _batch: &BatchSelector) -> Result<Hessian> {
        Err(Error::Unsupported("an exact Hessian"))
    }

    /// Hessian-vector product. The default multiplies the exact Hessian.
    fn hvp(&self, w: &ParamVector, v: &ParamVector, batch: &BatchSelector) -> Result<ParamVector> {
        if !self.has_exact_hessian() {
            return Err(Error::Unsupported("a Hessian-vector product"));
        }
        v.expect_dim(self.dim())?;
        let h = self.hessian(w, batch)?;
        let hv = &h * nalgebra::DVector::from_column_slice(v.as_slice());
        ParamVector::new(hv.as_slice().to_vec())
    }

    /// Known global minimizer, if any.
    fn minimizer(&self) -> Option<ParamVector> {
        None
    }

    /// Number of samples for data-backed objectives.
    fn num_samples(&self) -> Option<usize> {
        None
    }
}

pub(crate) fn finite_loss(value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("loss"))
    }
}

/// Outcome of an optimization run at a logged step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    Diverged,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Diverged => "diverged",
        }
    }
}

/// One logged iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Full-data loss after the step was applied.
    pub loss: f64,
    pub eta: f64,
    pub eta_candidate: Option<f64>,
    pub fit_accepted: bool,
    pub fit_r2: Option<f64>,
    pub grad_norm: f64,
    pub status: RunStatus,
}
