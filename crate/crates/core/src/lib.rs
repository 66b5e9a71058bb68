//! Semiclassical simulator and analysis toolchain for cavity-mediated
//! self-organization of an optical-tweezer atom array.
//!
//! The crate is organized along the experiment's own pipeline:
//!
//! * [`model`] — static physics: order parameter, dispersive shift,
//!   adiabatic cavity field, cavity potential strength, critical pump
//!   strength and the thermal reduction factor.
//! * [`dynamics`] — stochastic equations of motion for the array under the
//!   tweezer and cavity potentials, with recoil-heating noise and the pump
//!   ramp schedule.
//! * [`signal`] — synthetic heterodyne detection: RF voltage synthesis,
//!   windowed demodulation, PCA phase extraction and multi-frame
//!   calibration back to a signed projected field.
//! * [`criticality`] — Boltzmann fits of projected-field distributions,
//!   bootstrap errors, critical-point interpolation and the Gaussian-noise
//!   systematic correction.
//! * [`observables`] — first-order coherence, dwell/switching statistics,
//!   optomechanical susceptibility and scaling fits.
//! * [`ensemble`] — deterministic shot-ensemble execution, parallel by
//!   default (`parallel` feature) with a sequential fallback.

pub mod constants;
pub mod criticality;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod model;
pub mod observables;
pub mod signal;
pub mod units;

pub use error::{Error, Result};
