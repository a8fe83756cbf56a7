use crate::error::{Error, Result};
use crate::numeric::{dot2, two_sum};

use super::probe::Probe;

/// Least-squares fit of `L(w - η g) - L(w) ≈ A η²/2 - b η`.
///
/// `a_star` estimates `gᵀHg` and `b_star` estimates `Gᵀg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub a_star: f64,
    pub b_star: f64,
    /// Coefficient of determination over the nonzero-η probes; 0 when they
    /// carry no variation.
    pub r2: f64,
    /// `b_star / a_star`, absent when `a_star == 0`.
    pub eta_candidate: Option<f64>,
}

impl QuadraticFit {
    /// Convexity, descent and goodness-of-fit guards.
    pub fn accepted(&self, r2_threshold: f64) -> bool {
        self.a_star > 0.0 && self.b_star > 0.0 && self.r2 > r2_threshold && self.eta_candidate.is_some()
    }
}

/// Fits the parabola through the probes with the intercept pinned at the
/// `η = 0` probe.
///
/// The normal equations are solved in closed form; the loss differences and
/// the weighted sums are evaluated with compensated arithmetic because they
/// cancel heavily when the probe step is small.
pub fn fit_quadratic(probes: &[Probe]) -> Result<QuadraticFit> {
    if probes.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 probes, got {}", probes.len())));
    }
    if probes.iter().any(|p| !p.eta.is_finite() || !p.loss.is_finite()) {
        return Err(Error::NonFinite("probe loss"));
    }
    for (i, p) in probes.iter().enumerate() {
        if probes[..i].iter().any(|q| q.eta == p.eta) {
            return Err(Error::InvalidArgument(format!("duplicate probe step {}", p.eta)));
        }
    }
    let l_zero = probes
        .iter()
        .find(|p| p.eta == 0.0)
        .ok_or_else(|| Error::InvalidArgument("probes must include eta = 0".into()))?
        .loss;

    let active: Vec<&Probe> = probes.iter().filter(|p| p.eta != 0.0).collect();
    // regressors: y = A·x + b·z with x = η²/2, z = -η
    let xs: Vec<f64> = active.iter().map(|p| 0.5 * p.eta * p.eta).collect();
    let zs: Vec<f64> = active.iter().map(|p| -p.eta).collect();
    let sxx = dot2(&xs, &xs);
    let szz = dot2(&zs, &zs);
    let sxz = dot2(&xs, &zs);
    let det = sxx * szz - sxz * sxz;
    if !(det > 1e-14 * sxx * szz) {
        return Err(Error::SingularFit);
    }

    let (hi, lo): (Vec<f64>, Vec<f64>) = active.iter().map(|p| two_sum(p.loss, -l_zero)).unzip();
    let ys: Vec<f64> = hi.iter().chain(&lo).copied().collect();
    let weights = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        let w: Vec<f64> = xs.iter().zip(&zs).map(|(&x, &z)| f(x, z) / det).collect();
        w.iter().chain(&w).copied().collect()
    };
    let a_star = dot2(&weights(&|x, z| szz * x - sxz * z), &ys);
    let b_star = dot2(&weights(&|x, z| sxx * z - sxz * x), &ys);

    let y: Vec<f64> = hi.iter().zip(&lo).map(|(h, l)| h + l).collect();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y
        .iter()
        .zip(xs.iter().zip(&zs))
        .map(|(v, (x, z))| (v - (a_star * x + b_star * z)).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };

    let eta_candidate = if a_star != 0.0 { Some(b_star / a_star).filter(|e| e.is_finite()) } else { None };
    Ok(QuadraticFit { a_star, b_star, r2, eta_candidate })
}
