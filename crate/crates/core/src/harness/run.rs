use std::time::{Duration, Instant};

use crate::error::Result;
use crate::newton::{auto_search_eta0, gen_update, gen_update_exact, HvpSource, UpdateOutcome};
use crate::objective::{BatchSelector, RunStatus, StepRecord};
use crate::optim::apply_step;
use crate::vector::ParamVector;

use super::spec::{EtaSource, ExperimentSpec};

/// Losses above this count as divergence.
pub const DIVERGENCE_LOSS: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct RunResult {
    /// Logged steps in order; the final step is always logged.
    pub records: Vec<StepRecord>,
    /// `w_0, w_1, …` up to the last completed step.
    pub iterates: Vec<ParamVector>,
    pub final_w: ParamVector,
    pub final_loss: f64,
    pub status: RunStatus,
    pub fit_attempts: u64,
    pub fit_accepted: u64,
    /// Measured, never compared.
    pub wall_time: Duration,
}

impl RunResult {
    pub fn final_eta(&self) -> Option<f64> {
        self.records.last().map(|r| r.eta)
    }
}

fn diverged(value: f64) -> bool {
    !value.is_finite() || value > DIVERGENCE_LOSS
}

/// Runs the optimization loop: loss and gradient, base direction, optional
/// learning-rate update, step. Divergence stops the run and is recorded;
/// only an invalid spec is an error.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunResult> {
    spec.validate()?;
    let started = Instant::now();
    let obj = spec.problem.build()?;
    let mut w = spec.start()?;
    let mut optimizer = spec.optimizer.build(w.dim())?;
    let mut ctrl = spec.gen.as_ref().map(|g| g.controller(spec.optimizer.lr(), spec.iterations)).transpose()?;
    let eta_source = spec.gen.as_ref().map(|g| g.eta_source).unwrap_or_default();
    let auto_eta0 = spec.gen.as_ref().is_some_and(|g| g.auto_eta0);

    let mut records = Vec::new();
    let mut iterates = vec![w.clone()];
    let mut status = RunStatus::Ok;

    for step in 1..=spec.iterations {
        let batch = spec.batch_at(step);
        let mut record = StepRecord {
            step,
            loss: f64::INFINITY,
            eta: ctrl.as_ref().map_or(spec.optimizer.lr(), |c| c.eta),
            eta_candidate: None,
            fit_accepted: false,
            fit_r2: None,
            grad_norm: f64::NAN,
            status: RunStatus::Diverged,
        };

        let (l_zero, raw_grad) = match obj.loss_and_grad(&w, &batch) {
            Ok((l, g)) if !diverged(l) => (l, g),
            Ok((l, _)) => {
                record.loss = l;
                records.push(record);
                status = RunStatus::Diverged;
                break;
            }
            Err(_) => {
                records.push(record);
                status = RunStatus::Diverged;
                break;
            }
        };
        record.grad_norm = raw_grad.norm();

        let Ok(direction) = optimizer.direction(&raw_grad, &w) else {
            records.push(record);
            status = RunStatus::Diverged;
            break;
        };

        let eta = match ctrl.as_mut() {
            None => spec.optimizer.lr(),
            Some(ctrl) => {
                if step == 1 && auto_eta0 {
                    if let Ok(eta0) = auto_search_eta0(obj.as_ref(), &w, &direction, &batch) {
                        ctrl.eta = eta0;
                    }
                }
                let outcome: UpdateOutcome = match eta_source {
                    EtaSource::Probes => gen_update(ctrl, obj.as_ref(), &w, &direction, &batch, l_zero),
                    EtaSource::ExactHvp => {
                        gen_update_exact(ctrl, obj.as_ref(), &w, &raw_grad, &direction, &batch, HvpSource::Auto)
                    }
                };
                record.eta_candidate = outcome.eta_candidate;
                record.fit_accepted = outcome.accepted;
                record.fit_r2 = outcome.fit_r2();
                outcome.eta
            }
        };
        record.eta = eta;

        let Ok(next) = apply_step(&w, eta, &direction) else {
            records.push(record);
            status = RunStatus::Diverged;
            break;
        };
        w = next;
        iterates.push(w.clone());

        if step % spec.log_every == 0 || step == spec.iterations {
            match obj.loss(&w, &BatchSelector::FullData) {
                Ok(l) if !diverged(l) => {
                    record.loss = l;
                    record.status = RunStatus::Ok;
                    records.push(record);
                }
                other => {
                    record.loss = other.unwrap_or(f64::INFINITY);
                    records.push(record);
                    status = RunStatus::Diverged;
                    break;
                }
            }
        }
    }

    let final_loss = records.last().map_or(f64::INFINITY, |r| r.loss);
    Ok(RunResult {
        records,
        final_w: w,
        iterates,
        final_loss,
        status,
        fit_attempts: ctrl.as_ref().map_or(0, |c| c.attempts),
        fit_accepted: ctrl.as_ref().map_or(0, |c| c.accepted),
        wall_time: started.elapsed(),
    })
}

/// Runs `f` on a pool of `jobs` worker threads, or inline if none can be built.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Runs independent experiments on up to `jobs` threads; results keep the
/// order of `specs`.
pub fn run_all(specs: &[ExperimentSpec], jobs: usize) -> Vec<Result<RunResult>> {
    use rayon::prelude::*;
    with_jobs(jobs, || specs.par_iter().map(run_experiment).collect())
}
