use crate::objective::RunStatus;
use crate::vector::ParamVector;

use super::run::RunResult;

/// Parameter-space distance counted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceMetrics {
    /// First iteration `t` with `‖w_t - w*‖ <= CONVERGENCE_TOL`; `Some(0)` if the start already is.
    pub iters_to_tol: Option<usize>,
    /// `‖e_{t+1}‖ / ‖e_t‖²` for consecutive iterates, stopping once `e_t = 0`.
    pub error_ratios: Vec<f64>,
    pub errors: Vec<f64>,
}

pub fn convergence_metrics(result: &RunResult, optimum: &ParamVector) -> ConvergenceMetrics {
    let errors: Vec<f64> = result
        .iterates
        .iter()
        .map(|w| w.sub(optimum).map_or(f64::INFINITY, |e| e.norm()))
        .collect();
    let iters_to_tol = match result.status {
        RunStatus::Diverged => None,
        RunStatus::Ok => errors.iter().position(|&e| e <= CONVERGENCE_TOL),
    };
    let error_ratios = errors
        .windows(2)
        .take_while(|w| w[0] > 0.0)
        .map(|w| w[1] / (w[0] * w[0]))
        .collect();
    ConvergenceMetrics { iters_to_tol, error_ratios, errors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::run_experiment;
    use crate::harness::spec::{ExperimentSpec, OptimizerSpec, ProblemSpec};

    #[test]
    fn start_at_optimum() {
        let spec = ExperimentSpec::new("r", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1e-3), 5).with_start(&[1.0, 1.0]);
        let r = run_experiment(&spec).unwrap();
        let m = convergence_metrics(&r, &ParamVector::from_slice(&[1.0, 1.0]).unwrap());
        assert_eq!(m.iters_to_tol, Some(0));
        assert!(m.error_ratios.is_empty());
    }

    #[test]
    fn diverged_run_never_converges() {
        let spec = ExperimentSpec::new("r", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1.0), 50);
        let r = run_experiment(&spec).unwrap();
        let m = convergence_metrics(&r, &ParamVector::from_slice(&[1.0, 1.0]).unwrap());
        assert_eq!(m.iters_to_tol, None);
    }
}
