//! Photon-atom model Hamiltonians.
//!
//! Both models live on `photon ⊗ atom`, photon factor first, with photon
//! basis `{|0⟩, |1⟩}` and atom ground state at index 0. `σ_z` is `+1` on the
//! occupied/excited state of a two-level factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::linalg::ComplexMatrix;

/// Dissipation acting on the atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dissipator {
    #[default]
    None,
    /// Decay `|e⟩ → |g⟩` with jump operator `|g⟩⟨e|`.
    Relaxation,
    /// `−¼[σ_z, [σ_z, ρ]]` on the atom.
    Dephasing,
}

impl std::str::FromStr for Dissipator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Dissipator::None),
            "relaxation" => Ok(Dissipator::Relaxation),
            "dephasing" => Ok(Dissipator::Dephasing),
            other => Err(format!("unknown dissipator '{other}'")),
        }
    }
}

/// Photon mode coupled to a two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcConfig {
    pub omega: f64,
    pub omega_a: f64,
    pub g: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub dissipator: Dissipator,
}

impl JcConfig {
    /// `g = 0.1`, `ω_a = 1`, `q = 0.01`, photon detuned by `delta`.
    pub fn reference(delta: f64, dissipator: Dissipator) -> Self {
        JcConfig {
            omega: 1.0 + delta,
            omega_a: 1.0,
            g: 0.1,
            q: 0.01,
            dissipator,
        }
    }

    pub fn detuning(&self) -> f64 {
        self.omega - self.omega_a
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let finite = [self.omega, self.omega_a, self.g, self.q].iter().all(|x| x.is_finite());
        if !finite || self.g < 0.0 || self.q < 0.0 {
            return Err(DynamicsError::InvalidConfig(format!(
                "need finite parameters with g >= 0 and q >= 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Rate actually applied: `q` when a dissipator is selected, else 0.
    pub fn effective_rate(&self) -> f64 {
        match self.dissipator {
            Dissipator::None => 0.0,
            _ => self.q,
        }
    }
}

/// Photon mode coupled to a three-level atom with all three transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelConfig {
    pub omega: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub g01: f64,
    pub g02: f64,
    pub g12: f64,
}

impl ThreeLevelConfig {
    /// Levels `(5, 7, 8)`, couplings `(0.05, 0.07, 0.08)`.
    pub fn reference(omega: f64) -> Self {
        ThreeLevelConfig {
            omega,
            omega0: 5.0,
            omega1: 7.0,
            omega2: 8.0,
            g01: 0.05,
            g02: 0.07,
            g12: 0.08,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let all = [
            self.omega,
            self.omega0,
            self.omega1,
            self.omega2,
            self.g01,
            self.g02,
            self.g12,
        ];
        if !all.iter().all(|x| x.is_finite()) || self.g01 < 0.0 || self.g02 < 0.0 || self.g12 < 0.0 {
            return Err(DynamicsError::InvalidConfig(format!(
                "need finite parameters and non-negative couplings, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Either model; serialized by its field names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Model {
    Jc(JcConfig),
    ThreeLevel(ThreeLevelConfig),
}

impl Model {
    pub fn atom_dim(&self) -> usize {
        match self {
            Model::Jc(_) => 2,
            Model::ThreeLevel(_) => 3,
        }
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        match self {
            Model::Jc(cfg) => jc_hamiltonian(cfg),
            Model::ThreeLevel(cfg) => three_level_hamiltonian(cfg),
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        match self {
            Model::Jc(cfg) => cfg.validate(),
            Model::ThreeLevel(cfg) => cfg.validate(),
        }
    }

    /// `(q, dissipator)`; the three-level model is closed.
    pub fn dissipation(&self) -> (f64, Dissipator) {
        match self {
            Model::Jc(cfg) => (cfg.effective_rate(), cfg.dissipator),
            Model::ThreeLevel(_) => (0.0, Dissipator::None),
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            Model::Jc(cfg) => cfg.omega,
            Model::ThreeLevel(cfg) => cfg.omega,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        match &mut self {
            Model::Jc(cfg) => cfg.omega = omega,
            Model::ThreeLevel(cfg) => cfg.omega = omega,
        }
        self
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Two-level `σ_z` with `+1` on index 1.
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[-1.0, 1.0])
}

/// `ω/2 σ_z⊗1 + ω_a/2 1⊗σ_z + g(|01⟩⟨10| + |10⟩⟨01|)` on
/// `{|0g⟩, |0e⟩, |1g⟩, |1e⟩}`.
pub fn jc_hamiltonian(cfg: &JcConfig) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut h = sigma_z().kron(&id).scale_real(cfg.omega / 2.0);
    h.add_scaled(real(cfg.omega_a / 2.0), &id.kron(&sigma_z()));
    // |0e⟩ = 1, |1g⟩ = 2
    h[(1, 2)] += real(cfg.g);
    h[(2, 1)] += real(cfg.g);
    h
}

/// `ω/2 σ_z⊗1 + 1⊗Σ ω_k|k⟩⟨k| + Σ_{k>k'} g_{kk'}(σ_−⊗|k⟩⟨k'| + σ_+⊗|k'⟩⟨k|)`
/// with `σ_− = |0⟩⟨1|` on the photon.
pub fn three_level_hamiltonian(cfg: &ThreeLevelConfig) -> ComplexMatrix {
    let mut h = sigma_z()
        .kron(&ComplexMatrix::identity(3))
        .scale_real(cfg.omega / 2.0);
    h.add_scaled(
        real(1.0),
        &ComplexMatrix::identity(2).kron(&ComplexMatrix::from_real_diagonal(&[
            cfg.omega0, cfg.omega1, cfg.omega2,
        ])),
    );
    let sigma_minus = ComplexMatrix::unit(2, 0, 1);
    let sigma_plus = ComplexMatrix::unit(2, 1, 0);
    for (k, kp, g) in [(1, 0, cfg.g01), (2, 0, cfg.g02), (2, 1, cfg.g12)] {
        h.add_scaled(real(g), &sigma_minus.kron(&ComplexMatrix::unit(3, k, kp)));
        h.add_scaled(real(g), &sigma_plus.kron(&ComplexMatrix::unit(3, kp, k)));
    }
    h
}
