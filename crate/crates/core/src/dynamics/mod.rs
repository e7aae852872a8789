//! Photon-atom dynamics and the photon channels they induce.

mod master;
mod model;
mod tomography;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelError;
use crate::linalg::LinalgError;

pub use master::{
    evolve, evolve_exact, evolve_sampled, evolve_stepwise, lindblad_rhs, matrix_power, rk4_step,
    step_schedule, EvolutionResult, Integrator, MasterEquation, TRACE_DRIFT_LIMIT,
};
pub use model::{
    jc_hamiltonian, sigma_z, three_level_hamiltonian, Dissipator, JcConfig, Model,
    ThreeLevelConfig,
};
pub use tomography::{
    coherence_image, extract_field_channel, photon_population, tomography_inputs, FieldChannel,
    Propagation, RECONSTRUCTION_TOL, VACUUM_CHECK_TOL,
};

/// Default integration step.
pub const DEFAULT_DT: f64 = 0.01;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trace drifted by {drift:e} at t = {time} with dt = {dt}; reduce dt")]
    TraceDrift { drift: f64, time: f64, dt: f64 },
    #[error("reconstructed channel does not preserve the vacuum (deviation {deviation:e})")]
    VacuumNotPreserved { deviation: f64 },
    #[error("reconstructed channel is inconsistent: {source}")]
    Reconstruction { source: ChannelError },
}

/// Integration settings for a single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t: f64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

/// A model with its integration settings, as read from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub model: Model,
    pub integration: Integration,
}

impl ModelSpec {
    pub fn field_channel(&self) -> Result<FieldChannel, DynamicsError> {
        extract_field_channel(
            &self.model,
            self.integration.t,
            Propagation::Rk4 {
                dt: self.integration.dt,
            },
        )
    }
}
