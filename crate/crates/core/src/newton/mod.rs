//! Generalized Newton learning rates.
//!
//! For a descent direction `g` (from any base optimizer) and the true gradient
//! `G`, the loss along the ray `w - η g` is locally the parabola
//! `L(w) - η Gᵀg + ½ η² gᵀHg`, minimized at `η* = Gᵀg / gᵀHg`. This module
//! estimates `η*` either from a handful of extra loss evaluations (probe
//! fitting and the equivalent finite-difference closed forms) or exactly from
//! a Hessian-vector product, and schedules it with guards, smoothing and a
//! lazy update period.
//!
//! Sign convention: probes are reported as `(η, L(w - η g))` for `η` in a
//! symmetric set, so positive `η` is the descent side. The closed forms take
//! `l_plus = L(w + η g)` (the ascent side), i.e. the probe at `-η`.

mod closed_form;
mod controller;
mod fit;
mod hvp;
mod probe;
mod search;

pub use closed_form::{fd5_eta, lqa3_eta};
pub use controller::{gen_update, gen_update_exact, smooth, GenController, Rejection, UpdateOutcome};
pub use fit::{fit_quadratic, QuadraticFit};
pub use hvp::{exact_eta_hvp, finite_difference_hvp, HvpSource};
pub use probe::{probe_losses, Probe, ProbePoints};
pub use search::{auto_search_eta0, AUTO_SEARCH_GRID};
