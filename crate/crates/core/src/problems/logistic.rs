use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::objective::{finite_loss, BatchSelector, Hessian, Objective};
use crate::vector::ParamVector;

/// Probability that a planted label is flipped.
pub const LABEL_NOISE: f64 = 0.05;

/// Binary logistic regression with an optional L2 penalty.
///
/// Loss is the mean cross-entropy over the selected samples plus `λ‖w‖²/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegressionProblem {
    /// Row-major `n × d`.
    features: Vec<f64>,
    labels: Vec<f64>,
    n: usize,
    d: usize,
    pub l2_penalty: f64,
    pub generator_seed: u64,
}

/// Deterministic synthetic dataset: standard-normal features, a Gaussian
/// planted separator, and labels flipped with probability [`LABEL_NOISE`].
pub fn generate_dataset(seed: u64, n: usize, d: usize) -> Result<LogisticRegressionProblem> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidArgument(format!("dataset needs n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let margin: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
        let mut label = margin > 0.0;
        if rng.random::<f64>() < LABEL_NOISE {
            label = !label;
        }
        features.extend_from_slice(&row);
        labels.push(if label { 1.0 } else { 0.0 });
    }
    Ok(LogisticRegressionProblem { features, labels, n, d, l2_penalty: 0.0, generator_seed: seed })
}

impl LogisticRegressionProblem {
    /// Builds a problem from explicit data. Labels must be 0 or 1.
    pub fn from_data(features: Vec<Vec<f64>>, labels: Vec<f64>, l2_penalty: f64) -> Result<Self> {
        let n = features.len();
        if n == 0 || labels.len() != n {
            return Err(Error::InvalidArgument("features and labels must be non-empty and equal length".into()));
        }
        let d = features[0].len();
        if d == 0 || features.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("feature rows must share a positive width".into()));
        }
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
        }
        if !(l2_penalty >= 0.0 && l2_penalty.is_finite()) {
            return Err(Error::InvalidArgument("l2_penalty must be finite and >= 0".into()));
        }
        let flat: Vec<f64> = features.into_iter().flatten().collect();
        Ok(Self { features: flat, labels, n, d, l2_penalty, generator_seed: 0 })
    }

    pub fn with_l2(mut self, l2_penalty: f64) -> Self {
        self.l2_penalty = l2_penalty;
        self
    }

    pub fn num_rows(&self) -> usize {
        self.n
    }

    pub fn features(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.d, &self.features)
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    fn margin(&self, i: usize, w: &[f64]) -> f64 {
        self.row(i).iter().zip(w).map(|(a, b)| a * b).sum()
    }

    fn for_each_sample(&self, batch: &BatchSelector, mut f: impl FnMut(usize)) -> Result<usize> {
        match batch.indices(self.n)? {
            None => {
                (0..self.n).for_each(&mut f);
                Ok(self.n)
            }
            Some(idx) => {
                idx.iter().for_each(|&i| f(i));
                Ok(idx.len())
            }
        }
    }

    fn penalty(&self, w: &ParamVector) -> f64 {
        0.5 * self.l2_penalty * w.iter().map(|x| x * x).sum::<f64>()
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean cross-entropy and its gradient over `batch`.
pub fn logreg_minibatch(
    p: &LogisticRegressionProblem,
    w: &ParamVector,
    batch: &BatchSelector,
) -> Result<(f64, ParamVector)> {
    w.expect_dim(p.d)?;
    let ws = w.as_slice();
    let mut loss = 0.0;
    let mut grad = vec![0.0; p.d];
    let count = p.for_each_sample(batch, |i| {
        let z = p.margin(i, ws);
        let y = p.labels[i];
        loss += softplus(z) - y * z;
        let r = sigmoid(z) - y;
        for (g, x) in grad.iter_mut().zip(p.row(i)) {
            *g += r * x;
        }
    })?;
    let inv = 1.0 / count as f64;
    let loss = finite_loss(loss * inv + p.penalty(w))?;
    let grad: Vec<f64> = grad.iter().zip(ws).map(|(g, wi)| g * inv + p.l2_penalty * wi).collect();
    Ok((loss, ParamVector::new(grad)?))
}

impl Objective for LogisticRegressionProblem {
    fn dim(&self) -> usize {
        self.d
    }

    fn loss(&self, w: &ParamVector, batch: &BatchSelector) -> Result<f64> {
        w.expect_dim(self.d)?;
        let ws = w.as_slice();
        let mut loss = 0.0;
        let count = self.for_each_sample(batch, |i| {
            let z = self.margin(i, ws);
            loss += softplus(z) - self.labels[i] * z;
        })?;
        finite_loss(loss / count as f64 + self.penalty(w))
    }

    fn grad(&self, w: &ParamVector, batch: &BatchSelector) -> Result<ParamVector> {
        Ok(logreg_minibatch(self, w, batch)?.1)
    }

    fn loss_and_grad(&self, w: &ParamVector, batch: &BatchSelector) -> Result<(f64, ParamVector)> {
        logreg_minibatch(self, w, batch)
    }

    fn has_exact_hessian(&self) -> bool {
        true
    }

    fn hessian(&self, w: &ParamVector, batch: &BatchSelector) -> Result<Hessian> {
        w.expect_dim(self.d)?;
        let ws = w.as_slice();
        let mut h = DMatrix::<f64>::zeros(self.d, self.d);
        let count = self.for_each_sample(batch, |i| {
            let s = sigmoid(self.margin(i, ws));
            let c = s * (1.0 - s);
            let x = self.row(i);
            for a in 0..self.d {
                for b in a..self.d {
                    h[(a, b)] += c * x[a] * x[b];
                }
            }
        })?;
        h.fill_lower_triangle_with_upper_triangle();
        h /= count as f64;
        for a in 0..self.d {
            h[(a, a)] += self.l2_penalty;
        }
        Ok(h)
    }

    fn hvp(&self, w: &ParamVector, v: &ParamVector, batch: &BatchSelector) -> Result<ParamVector> {
        w.expect_dim(self.d)?;
        v.expect_dim(self.d)?;
        let ws = w.as_slice();
        let mut out = vec![0.0; self.d];
        let count = self.for_each_sample(batch, |i| {
            let s = sigmoid(self.margin(i, ws));
            let xv = self.margin(i, v.as_slice());
            let c = s * (1.0 - s) * xv;
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += c * x;
            }
        })?;
        let inv = 1.0 / count as f64;
        let out: Vec<f64> = out.iter().zip(v.iter()).map(|(o, vi)| o * inv + self.l2_penalty * vi).collect();
        ParamVector::new(out)
    }

    fn num_samples(&self) -> Option<usize> {
        Some(self.n)
    }
}
