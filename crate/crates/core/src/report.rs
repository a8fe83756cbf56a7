//! Deterministic CSV rendering. Floats use 17 significant digits in
//! scientific notation, absent values are empty cells, lines end in LF.

use std::fmt::Write;

use crate::harness::{convergence_metrics, ExperimentSpec, GridSearch, RunResult};
use crate::objective::RunStatus;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub const TRAJECTORY_HEADER: &str = "step,loss,eta,eta_candidate,fit_accepted,fit_r2,grad_norm,status";

pub fn trajectory_csv(result: &RunResult) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &result.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.step,
            fmt_f64(r.loss),
            fmt_f64(r.eta),
            fmt_opt(r.eta_candidate),
            r.fit_accepted,
            fmt_opt(r.fit_r2),
            fmt_f64(r.grad_norm),
            r.status.as_str()
        )
        .unwrap();
    }
    out
}

pub const SUMMARY_HEADER: &str =
    "name,problem,optimizer,gen,iterations,steps,status,final_loss,final_eta,fit_attempts,fit_accepted";

pub fn summary_csv(rows: &[(&ExperimentSpec, &RunResult)]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for (spec, r) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            spec.name,
            spec.problem.name(),
            spec.optimizer.name(),
            spec.gen.is_some(),
            spec.iterations,
            r.iterates.len() - 1,
            r.status.as_str(),
            fmt_f64(r.final_loss),
            fmt_opt(r.final_eta()),
            r.fit_attempts,
            r.fit_accepted
        )
        .unwrap();
    }
    out
}

pub fn grid_csv(grid: &GridSearch) -> String {
    let mut out = String::from("eta,final_loss,status,winner\n");
    for row in &grid.rows {
        let loss = match row.status {
            RunStatus::Ok => fmt_f64(row.final_loss),
            RunStatus::Diverged => String::new(),
        };
        writeln!(out, "{},{},{},{}", fmt_f64(row.eta), loss, row.status.as_str(), row.eta == grid.best_eta).unwrap();
    }
    out
}

/// One row per iteration `1..=T`, one loss column per run. A diverged run's
/// column keeps its divergent loss at the step it stopped and is empty after.
pub fn compare_csv(rows: &[(&ExperimentSpec, &RunResult)]) -> String {
    let iterations = rows.iter().map(|(s, _)| s.iterations).max().unwrap_or(0);
    let mut out = String::from("iter");
    for (spec, _) in rows {
        write!(out, ",{}", spec.name).unwrap();
    }
    out.push('\n');
    for t in 1..=iterations {
        write!(out, "{t}").unwrap();
        for (_, r) in rows {
            let loss = r.records.iter().find(|rec| rec.step == t).map(|rec| rec.loss);
            write!(out, ",{}", fmt_opt(loss)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Iterations to reach the known minimizer; empty when unknown or never reached.
pub fn compare_summary_csv(rows: &[(&ExperimentSpec, &RunResult)]) -> String {
    let mut out = String::from("name,status,final_loss,iters_to_tol\n");
    for (spec, r) in rows {
        let optimum = spec
            .problem
            .build()
            .ok()
            .and_then(|obj| obj.minimizer());
        let iters = optimum.and_then(|m| convergence_metrics(r, &m).iters_to_tol);
        writeln!(
            out,
            "{},{},{},{}",
            spec.name,
            r.status.as_str(),
            fmt_f64(r.final_loss),
            iters.map(|i| i.to_string()).unwrap_or_default()
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, OptimizerSpec, ProblemSpec};

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.1), "-1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn trajectory_shape() {
        let spec = ExperimentSpec::new("r", ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1e-3), 5);
        let r = run_experiment(&spec).unwrap();
        let csv = trajectory_csv(&r);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 8));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn compare_shape() {
        let specs: Vec<_> = (0..4)
            .map(|i| ExperimentSpec::new(format!("e{i}"), ProblemSpec::Rosenbrock, OptimizerSpec::sgd(1e-4), 30))
            .collect();
        let results: Vec<_> = specs.iter().map(|s| run_experiment(s).unwrap()).collect();
        let rows: Vec<_> = specs.iter().zip(&results).collect();
        let csv = compare_csv(&rows);
        assert_eq!(csv.lines().count(), 31);
        assert!(csv.lines().all(|l| l.split(',').count() == 5));
    }
}
