//! Benchmark objectives with analytic derivatives.

mod beale;
mod cubic;
mod logistic;
mod quadratic;
mod rosenbrock;

pub use beale::{beale_eval, BealeProblem};
pub use cubic::CubicProblem;
pub use logistic::{generate_dataset, logreg_minibatch, LogisticRegressionProblem};
pub use quadratic::{quadratic_eval, random_spd, QuadraticProblem};
pub use rosenbrock::{rosenbrock_eval, RosenbrockProblem};

use crate::objective::Hessian;

/// Loss, gradient and Hessian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub grad: crate::vector::ParamVector,
    pub hessian: Hessian,
}
