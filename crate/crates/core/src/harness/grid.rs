use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::objective::RunStatus;

use super::run::run_experiment;
use super::spec::{ExperimentSpec, OptimizerSpec, ProblemSpec};

/// `{1, 2, 5} × 10⁻ᵏ` for `k = 5, …, 0`, ascending.
pub const LR_GRID: [f64; 18] = [
    1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1, 2e-1, 5e-1, 1.0, 2.0, 5.0,
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub eta: f64,
    /// `inf` when the run diverged.
    pub final_loss: f64,
    pub status: RunStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub rows: Vec<GridRow>,
    pub best_eta: f64,
    pub best_final_loss: f64,
}

impl GridSearch {
    pub fn best_index(&self) -> usize {
        self.rows.iter().position(|r| r.eta == self.best_eta).expect("winner is a grid row")
    }
}

/// Runs every constant learning rate in [`LR_GRID`] from the problem's
/// default start and keeps the one with the smallest final loss.
pub fn grid_search_baseline(problem: &ProblemSpec, optimizer: &OptimizerSpec, iterations: usize) -> Result<GridSearch> {
    grid_search_spec(&ExperimentSpec::new("grid", problem.clone(), optimizer.clone(), iterations))
}

/// Grid search using `template` for everything but the learning rate.
/// Ties go to the smaller learning rate.
pub fn grid_search_spec(template: &ExperimentSpec) -> Result<GridSearch> {
    if template.gen.is_some() {
        return Err(Error::InvalidArgument(format!(
            "grid search needs a fixed learning-rate baseline, `{}` has a scheduler",
            template.name
        )));
    }
    template.validate()?;
    let rows = LR_GRID
        .par_iter()
        .map(|&eta| {
            let mut spec = template.clone();
            spec.optimizer = spec.optimizer.with_lr(eta);
            spec.log_every = spec.iterations;
            let result = run_experiment(&spec)?;
            let final_loss = match result.status {
                RunStatus::Ok => result.final_loss,
                RunStatus::Diverged => f64::INFINITY,
            };
            Ok(GridRow { eta, final_loss, status: result.status })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<&GridRow> = None;
    for row in rows.iter().filter(|r| r.status == RunStatus::Ok) {
        if best.is_none_or(|b| row.final_loss < b.final_loss) {
            best = Some(row);
        }
    }
    let Some(best) = best else {
        return Err(Error::AllDiverged(format!("{} learning rates tried on `{}`", rows.len(), template.name)));
    };
    let (best_eta, best_final_loss) = (best.eta, best.final_loss);
    Ok(GridSearch { rows, best_eta, best_final_loss })
}
