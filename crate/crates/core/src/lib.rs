//! Quantum noise model of a three-mode optomechanical force sensor with
//! variational readout and internal squeezing.
//!
//! * [`model`] holds the physical parameters and derived scalars.
//! * [`transfer`] gives the frequency-domain output quadratures as linear
//!   combinations of the input noise channels.
//! * [`spectra`] turns those into force-equivalent noise spectra, detection
//!   thresholds and figure data.
//! * [`oracle`] simulates the underlying Langevin equations in the time domain
//!   and checks the spectra against periodogram estimates.

pub mod constants;
pub mod exec;
pub mod model;
pub mod oracle;
pub mod spectra;
pub mod transfer;

pub use exec::Execution;
pub use model::{
    DriveConfig, MechanicalOscillator, ModelError, OpticalCavity, PumpModel, SignalPulse,
    SqueezeConfig, SystemConfig,
};
