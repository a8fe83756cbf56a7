use crate::error::{Error, Result};
use crate::numeric::{dot2, sum2};

fn check_inputs(losses: &[f64], eta_prev: f64) -> Result<()> {
    if !(eta_prev > 0.0 && eta_prev.is_finite()) {
        return Err(Error::InvalidArgument(format!("probe step must be positive, got {eta_prev}")));
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(Error::NonFinite("probe loss"));
    }
    Ok(())
}

/// Three-point central-difference estimate of `η*`:
/// `(η/2)(L₊ - L₋)/(L₊ - 2L₀ + L₋)` with `L± = L(w ± η g)`.
///
/// Returns [`Error::FlatCurvature`] when the denominator vanishes. The sign of
/// the denominator is not checked.
pub fn lqa3_eta(l_minus: f64, l_zero: f64, l_plus: f64, eta_prev: f64) -> Result<f64> {
    check_inputs(&[l_minus, l_zero, l_plus], eta_prev)?;
    let slope = sum2(&[l_plus, -l_minus]);
    let curvature = sum2(&[l_plus, -2.0 * l_zero, l_minus]);
    if curvature == 0.0 {
        return Err(Error::FlatCurvature);
    }
    Ok(0.5 * eta_prev * slope / curvature)
}

/// Five-point central-difference estimate of `η*`, with `L±k = L(w ± kη g)`.
pub fn fd5_eta(l_m2: f64, l_m1: f64, l_0: f64, l_p1: f64, l_p2: f64, eta_prev: f64) -> Result<f64> {
    let losses = [l_m2, l_m1, l_0, l_p1, l_p2];
    check_inputs(&losses, eta_prev)?;
    // stencils scaled by 12 so every coefficient is an exact integer
    let slope = dot2(&[1.0, -8.0, 0.0, 8.0, -1.0], &losses);
    let curvature = dot2(&[-1.0, 16.0, -30.0, 16.0, -1.0], &losses);
    if curvature == 0.0 {
        return Err(Error::FlatCurvature);
    }
    Ok(eta_prev * slope / curvature)
}
