//! Point-to-point wave-packet simulation of the two-slit experiment with an
//! attempted photon detection behind one slit.
//!
//! Everything is in atomic units (ħ = electron mass = bohr = 1). The motion
//! is reduced to one transverse coordinate `x`; the longitudinal coordinate
//! `z` is covered classically at the particle velocity, so a plane-to-plane
//! distance `L` corresponds to a flight time `L / v`.
//!
//! Module map:
//!
//! * [`apparatus`] particle kinematics, geometry and configuration checks
//! * [`propagator`] free-particle kernel and plane-to-plane propagation
//! * [`paths`] Feynman path bundles, truncation and crossing statistics
//! * [`scenario`] channel amplitudes (no detector, null, detected, kick model)
//! * [`uncertainty`] wave-packet uncertainty calculator
//! * [`analysis`] intensity, visibility, fringe spacing, onset metrics, sweeps
//!
//! The inner loops run on rayon when the `parallel` feature is enabled (the
//! default). Every reduction is accumulated in a fixed order, so results are
//! bit-identical for any number of worker threads and with the sequential
//! fallback.

// `!(a < b)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod apparatus;
mod error;
pub mod exec;
pub mod paths;
pub mod presets;
pub mod propagator;
pub mod scenario;
pub mod summation;
pub mod uncertainty;

pub use error::{Error, Result};
pub use num_complex::Complex64;
