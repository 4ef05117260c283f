//! Time-domain Langevin simulator used to cross-check the spectra.

pub mod integrate;
pub mod sde;
pub mod validate;
pub mod welch;

pub use integrate::{simulate, InitialState, Integrator, PulseDrive, SimulationSettings, Trajectory};
pub use sde::{NoiseMask, SdeSystem};
pub use validate::{validate, ValidationPoint, ValidationReport, ValidationSettings};
pub use welch::{estimate_psd, OracleEstimate, Window};

use crate::model::ModelError;
use crate::spectra::SpectraError;
use crate::transfer::TransferError;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("optical decay rate {rate} is not positive; the system has no steady state")]
    Unstable { rate: f64 },
    #[error("no stationary covariance exists")]
    NotStationary,
    #[error("singular response at omega = {omega}")]
    Singular { omega: f64 },
    #[error("{segments} segments is too few, at least {required} are required")]
    TooFewSegments { segments: usize, required: usize },
    #[error("invalid oracle settings: {0}")]
    Settings(String),
}
