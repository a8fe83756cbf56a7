//! Monte-Carlo and sweep studies of the learning-rate estimator's error.

use crate::error::{Error, Result};
use crate::newton::{exact_eta_hvp, fit_quadratic, probe_losses, HvpSource, ProbePoints};
use crate::objective::{BatchSelector, Objective};
use crate::problems::LogisticRegressionProblem;
use crate::vector::ParamVector;

use super::spec::mix_seed;

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub batch_size: usize,
    pub trials: usize,
    pub mean_eta: f64,
    pub std_eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorScaling {
    pub rows: Vec<ScalingRow>,
    /// Log-log slope of `std_eta` against batch size.
    pub slope: f64,
}

/// Spread of the three-point candidate `η*` across independent mini-batches.
///
/// The probe direction is the full-data gradient at `w`, held fixed; for each
/// batch size, `trials` batches are drawn and `L_0` and both probes share one batch.
pub fn error_scaling_study(
    problem: &LogisticRegressionProblem,
    w: &ParamVector,
    eta_prev: f64,
    batch_sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ErrorScaling> {
    if trials < 50 {
        return Err(Error::InvalidArgument(format!("need at least 50 trials, got {trials}")));
    }
    let direction = problem.grad(w, &BatchSelector::FullData)?;
    let mut rows = Vec::with_capacity(batch_sizes.len());
    for &batch_size in batch_sizes {
        let mut etas = Vec::with_capacity(trials);
        for trial in 0..trials {
            let batch = BatchSelector::SyntheticNoise {
                seed: mix_seed(mix_seed(seed, batch_size as u64), trial as u64),
                batch_size,
            };
            let l0 = problem.loss(w, &batch)?;
            let probes = probe_losses(problem, w, &direction, eta_prev, &batch, ProbePoints::Three, l0)?;
            if let Some(eta) = fit_quadratic(&probes)?.eta_candidate {
                etas.push(eta);
            }
        }
        if etas.len() < 2 {
            return Err(Error::InvalidArgument(format!("no usable fits at batch size {batch_size}")));
        }
        let (mean_eta, std_eta) = mean_std(&etas);
        rows.push(ScalingRow { batch_size, trials: etas.len(), mean_eta, std_eta });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.batch_size as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.std_eta).collect();
    Ok(ErrorScaling { slope: log_log_slope(&xs, &ys), rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionRow {
    pub eta_prev: f64,
    pub estimate: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionScaling {
    pub exact: f64,
    pub rows: Vec<PrecisionRow>,
    pub slope: f64,
}

/// Error of the three-point fitted `η*` against the Hessian-vector-product
/// value as the probe step shrinks, on a deterministic objective.
pub fn precision_scaling_study(
    obj: &dyn Objective,
    w: &ParamVector,
    direction: &ParamVector,
    eta_prevs: &[f64],
) -> Result<PrecisionScaling> {
    let batch = BatchSelector::FullData;
    let (l0, raw_grad) = obj.loss_and_grad(w, &batch)?;
    let exact = exact_eta_hvp(obj, w, &raw_grad, direction, &batch, HvpSource::Auto)?;
    let rows = eta_prevs
        .iter()
        .map(|&eta_prev| {
            let probes = probe_losses(obj, w, direction, eta_prev, &batch, ProbePoints::Three, l0)?;
            let estimate = fit_quadratic(&probes)?.eta_candidate.ok_or(Error::FlatCurvature)?;
            Ok(PrecisionRow { eta_prev, estimate, abs_error: (estimate - exact).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.eta_prev).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
    Ok(PrecisionScaling { exact, slope: log_log_slope(&xs, &ys), rows })
}
