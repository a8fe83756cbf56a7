//! Generalized Newton learning rates.
//!
//! The step size for any base optimizer direction `g` is estimated from the
//! local quadratic model of the loss along `-g`, either by fitting a parabola
//! to a few forward-pass probes or from a Hessian-vector product.

pub mod config;
pub mod error;
pub mod harness;
pub mod newton;
mod numeric;
pub mod objective;
pub mod optim;
pub mod problems;
pub mod report;
pub mod vector;

pub use error::{Error, Result};
pub use objective::{BatchSelector, Hessian, Objective, RunStatus, StepRecord};
pub use vector::ParamVector;
