use crate::error::{Error, Result};
use crate::objective::{BatchSelector, Objective};
use crate::vector::ParamVector;

/// Where `H v` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HvpSource {
    /// Exact product when the objective offers one, finite differences otherwise.
    #[default]
    Auto,
    Exact,
    FiniteDifference,
}

/// Central difference of gradients, `(∇L(w + εv) - ∇L(w - εv)) / 2ε`, with
/// `ε = 1e-5 (1 + ‖w‖) / ‖v‖`.
pub fn finite_difference_hvp(
    obj: &dyn Objective,
    w: &ParamVector,
    v: &ParamVector,
    batch: &BatchSelector,
) -> Result<ParamVector> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("HVP direction must be nonzero".into()));
    }
    let eps = 1e-5 * (1.0 + w.norm()) / norm;
    let plus = obj.grad(&w.axpy(eps, v)?, batch)?;
    let minus = obj.grad(&w.axpy(-eps, v)?, batch)?;
    plus.zip_map(&minus, |a, b| (a - b) / (2.0 * eps))
}

/// `η* = Gᵀg / gᵀHg` with an explicit Hessian-vector product.
///
/// Fails with [`Error::NonConvexDirection`] when `gᵀHg <= 0`.
pub fn exact_eta_hvp(
    obj: &dyn Objective,
    w: &ParamVector,
    raw_grad: &ParamVector,
    direction: &ParamVector,
    batch: &BatchSelector,
    source: HvpSource,
) -> Result<f64> {
    if direction.is_zero() {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    let hv = match source {
        HvpSource::Exact => obj.hvp(w, direction, batch)?,
        HvpSource::FiniteDifference => finite_difference_hvp(obj, w, direction, batch)?,
        HvpSource::Auto if obj.has_hvp() => obj.hvp(w, direction, batch)?,
        HvpSource::Auto => finite_difference_hvp(obj, w, direction, batch)?,
    };
    let curvature = direction.dot(&hv)?;
    if !(curvature > 0.0) {
        return Err(Error::NonConvexDirection(curvature));
    }
    let slope = raw_grad.dot(direction)?;
    let eta = slope / curvature;
    if !eta.is_finite() {
        return Err(Error::NonFinite("exact learning rate"));
    }
    Ok(eta)
}
