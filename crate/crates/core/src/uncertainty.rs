//! Order-of-magnitude uncertainties of a point-to-point wave packet.
//!
//! A packet whose paths run a distance D from start to end has positional
//! spread comparable to D; the other spreads follow from the minimum
//! uncertainty products with ħ = 1. These are estimates, not variances.

use serde::{Deserialize, Serialize};

use crate::apparatus::Particle;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub distance_d: f64,
    pub delta_p: f64,
    pub delta_x: f64,
    pub delta_e: f64,
    pub delta_t: f64,
}

/// Δx = D, Δp = 1/D, ΔE = p·Δp/m (= v/D), Δt = D/v.
pub fn packet_uncertainties(d: f64, particle: &Particle) -> Result<UncertaintyReport> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("packet distance must be positive, got {d}")));
    }
    let delta_p = 1.0 / d;
    Ok(UncertaintyReport {
        distance_d: d,
        delta_p,
        delta_x: d,
        delta_e: particle.momentum * delta_p / particle.mass,
        delta_t: d / particle.velocity,
    })
}
