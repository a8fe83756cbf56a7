use crate::error::{Error, Result};
use crate::objective::{BatchSelector, Objective};
use crate::vector::ParamVector;

use super::fit::{fit_quadratic, QuadraticFit};
use super::hvp::{exact_eta_hvp, HvpSource};
use super::probe::{probe_losses, ProbePoints};

/// `γ η_prev + (1 - γ) η_candidate`.
pub fn smooth(eta_prev: f64, eta_candidate: f64, gamma: f64) -> f64 {
    gamma * eta_prev + (1.0 - gamma) * eta_candidate
}

/// Learning-rate scheduler state.
#[derive(Debug, Clone, PartialEq)]
pub struct GenController {
    /// Current learning rate; always positive.
    pub eta: f64,
    /// Smoothing weight on the previous learning rate, in `[0, 1)`.
    pub gamma: f64,
    /// Lazy period: a fit is attempted when `step % phi == 0`.
    pub phi: u64,
    /// Iterations completed so far.
    pub step: u64,
    /// Total iteration budget `T`, needed when `decay_enabled`.
    pub horizon: Option<u64>,
    /// Multiply candidates by `1 - t/T`.
    pub decay_enabled: bool,
    pub r2_threshold: f64,
    pub probe_points: ProbePoints,
    /// Accepted candidates are clamped to `[η/k, k·η]`; `inf` disables.
    pub clamp_factor: f64,
    pub attempts: u64,
    pub accepted: u64,
}

impl GenController {
    /// Defaults: `γ = 0.9`, `Φ = 8`, R² threshold 0.99, three probes, clamp 10.
    pub fn new(eta0: f64) -> Result<Self> {
        let ctrl = Self {
            eta: eta0,
            gamma: 0.9,
            phi: 8,
            step: 0,
            horizon: None,
            decay_enabled: false,
            r2_threshold: 0.99,
            probe_points: ProbePoints::Three,
            clamp_factor: 10.0,
            attempts: 0,
            accepted: 0,
        };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("initial learning rate must be positive, got {}", self.eta));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if self.phi == 0 {
            return bad("phi must be >= 1".into());
        }
        if self.decay_enabled && self.horizon.is_none_or(|t| t == 0) {
            return bad("decay requires a positive horizon".into());
        }
        if !(self.clamp_factor >= 1.0) {
            return bad(format!("clamp_factor must be >= 1, got {}", self.clamp_factor));
        }
        Ok(())
    }

    fn next_step_is_scheduled(&self) -> bool {
        (self.step + 1) % self.phi == 0
    }

    /// Decay, clamp and smooth an accepted candidate. Returns the new learning
    /// rate, or `None` if it would not be positive.
    fn blend(&self, candidate: f64, t: u64) -> Option<f64> {
        let mut c = candidate;
        if self.decay_enabled {
            let horizon = self.horizon.unwrap_or(t) as f64;
            c *= (1.0 - t as f64 / horizon).max(0.0);
        }
        if self.clamp_factor.is_finite() {
            c = c.clamp(self.eta / self.clamp_factor, self.eta * self.clamp_factor);
        }
        let eta = smooth(self.eta, c, self.gamma);
        (eta > 0.0 && eta.is_finite()).then_some(eta)
    }
}

/// Why a scheduled update left the learning rate alone.
#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    ProbeFailed(Error),
    FitFailed(Error),
    /// The fit failed the `A* > 0`, `b* > 0` or R² guard.
    Guard,
    /// The blended learning rate would not be positive.
    NonPositive,
}

/// Result of one controller step.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    /// Learning rate to apply at this step.
    pub eta: f64,
    pub attempted: bool,
    pub accepted: bool,
    pub fit: Option<QuadraticFit>,
    pub eta_candidate: Option<f64>,
    pub rejection: Option<Rejection>,
}

impl UpdateOutcome {
    fn skipped(eta: f64) -> Self {
        Self { eta, attempted: false, accepted: false, fit: None, eta_candidate: None, rejection: None }
    }

    pub fn fit_r2(&self) -> Option<f64> {
        self.fit.map(|f| f.r2)
    }
}

/// One iteration of the probe-based scheduler.
///
/// On scheduled steps the probe losses along `direction` are fitted and, if
/// the guards pass, blended into the learning rate. Rejections never change
/// `ctrl.eta`. The step counter always advances.
pub fn gen_update(
    ctrl: &mut GenController,
    obj: &dyn Objective,
    w: &ParamVector,
    direction: &ParamVector,
    batch: &BatchSelector,
    l_zero: f64,
) -> UpdateOutcome {
    if !ctrl.next_step_is_scheduled() {
        ctrl.step += 1;
        return UpdateOutcome::skipped(ctrl.eta);
    }
    let t = ctrl.step + 1;
    ctrl.step = t;
    ctrl.attempts += 1;
    let mut outcome = UpdateOutcome::skipped(ctrl.eta);
    outcome.attempted = true;

    let probes = match probe_losses(obj, w, direction, ctrl.eta, batch, ctrl.probe_points, l_zero) {
        Ok(p) => p,
        Err(e) => {
            outcome.rejection = Some(Rejection::ProbeFailed(e));
            return outcome;
        }
    };
    let fit = match fit_quadratic(&probes) {
        Ok(f) => f,
        Err(e) => {
            outcome.rejection = Some(Rejection::FitFailed(e));
            return outcome;
        }
    };
    outcome.fit = Some(fit);
    outcome.eta_candidate = fit.eta_candidate;
    if !fit.accepted(ctrl.r2_threshold) {
        outcome.rejection = Some(Rejection::Guard);
        return outcome;
    }
    let candidate = fit.eta_candidate.expect("accepted fits carry a candidate");
    absorb(ctrl, candidate, t, &mut outcome);
    outcome
}

/// One iteration of the Hessian-vector-product scheduler: the candidate is the
/// exact `Gᵀg / gᵀHg`, then decayed, clamped and smoothed like
/// [`gen_update`]. With `γ = 0` and no clamp this is the learning rate itself.
pub fn gen_update_exact(
    ctrl: &mut GenController,
    obj: &dyn Objective,
    w: &ParamVector,
    raw_grad: &ParamVector,
    direction: &ParamVector,
    batch: &BatchSelector,
    source: HvpSource,
) -> UpdateOutcome {
    if !ctrl.next_step_is_scheduled() {
        ctrl.step += 1;
        return UpdateOutcome::skipped(ctrl.eta);
    }
    let t = ctrl.step + 1;
    ctrl.step = t;
    ctrl.attempts += 1;
    let mut outcome = UpdateOutcome::skipped(ctrl.eta);
    outcome.attempted = true;
    match exact_eta_hvp(obj, w, raw_grad, direction, batch, source) {
        Ok(candidate) if candidate > 0.0 => {
            outcome.eta_candidate = Some(candidate);
            absorb(ctrl, candidate, t, &mut outcome);
        }
        Ok(candidate) => {
            outcome.eta_candidate = Some(candidate);
            outcome.rejection = Some(Rejection::Guard);
        }
        Err(e) => outcome.rejection = Some(Rejection::FitFailed(e)),
    }
    outcome
}

fn absorb(ctrl: &mut GenController, candidate: f64, t: u64, outcome: &mut UpdateOutcome) {
    match ctrl.blend(candidate, t) {
        Some(eta) => {
            ctrl.eta = eta;
            ctrl.accepted += 1;
            outcome.eta = eta;
            outcome.accepted = true;
        }
        None => outcome.rejection = Some(Rejection::NonPositive),
    }
}
