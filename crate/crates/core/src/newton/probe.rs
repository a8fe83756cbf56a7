use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{BatchSelector, Objective};
use crate::vector::ParamVector;

/// A probe loss `L(w - eta * direction)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub eta: f64,
    pub loss: f64,
}

impl From<(f64, f64)> for Probe {
    fn from((eta, loss): (f64, f64)) -> Self {
        Probe { eta, loss }
    }
}

/// Size of the symmetric probe set around `η = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum ProbePoints {
    /// `{-η, 0, η}`
    #[default]
    Three,
    /// `{-2η, -η, 0, η, 2η}`
    Five,
}

impl ProbePoints {
    pub fn multipliers(self) -> &'static [f64] {
        match self {
            ProbePoints::Three => &[-1.0, 0.0, 1.0],
            ProbePoints::Five => &[-2.0, -1.0, 0.0, 1.0, 2.0],
        }
    }
}

impl TryFrom<u8> for ProbePoints {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            3 => Ok(ProbePoints::Three),
            5 => Ok(ProbePoints::Five),
            _ => Err(format!("probe_points must be 3 or 5, got {n}")),
        }
    }
}

impl From<ProbePoints> for u8 {
    fn from(p: ProbePoints) -> u8 {
        match p {
            ProbePoints::Three => 3,
            ProbePoints::Five => 5,
        }
    }
}

/// Evaluates the probe losses in ascending `η` order.
///
/// `l_zero` must be the loss already computed at `w` on `batch`; it is reused
/// for the `η = 0` entry. Every other probe is evaluated on the same batch.
pub fn probe_losses(
    obj: &dyn Objective,
    w: &ParamVector,
    direction: &ParamVector,
    eta_prev: f64,
    batch: &BatchSelector,
    points: ProbePoints,
    l_zero: f64,
) -> Result<Vec<Probe>> {
    if !(eta_prev > 0.0 && eta_prev.is_finite()) {
        return Err(Error::InvalidArgument(format!("probe step must be positive, got {eta_prev}")));
    }
    if !l_zero.is_finite() {
        return Err(Error::NonFinite("base loss"));
    }
    w.expect_dim(direction.dim())?;
    points
        .multipliers()
        .iter()
        .map(|&k| {
            let eta = k * eta_prev;
            let loss = if k == 0.0 { l_zero } else { obj.loss(&w.axpy(-eta, direction)?, batch)? };
            Ok(Probe { eta, loss })
        })
        .collect()
}
