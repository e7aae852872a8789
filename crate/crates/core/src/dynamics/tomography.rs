//! Effective photon channel of a photon-atom model, reconstructed by process
//! tomography with the atom starting in its ground state.

use num_complex::Complex64;
use serde::Serialize;

use super::master::{evolve_exact, Integrator, MasterEquation};
use super::model::Model;
use super::DynamicsError;
use crate::channel::LossChannelParams;
use crate::linalg::{partial_trace, ComplexMatrix, HilbertLabel};

/// Tolerance on `Φ(|0⟩⟨0|) = |0⟩⟨0|`.
pub const VACUUM_CHECK_TOL: f64 = 1e-8;
/// Density and constraint tolerance for the reconstructed parameters.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;

/// Photon channel at one instant.
#[derive(Debug, Clone, Serialize)]
pub struct FieldChannel {
    pub params: LossChannelParams,
    /// `Tr[(|1⟩⟨1| ⊗ 1) ρ(t)]` for a photon input, taken from the joint state.
    pub photon_probability: f64,
    /// `max |Φ(|0⟩⟨0|) − |0⟩⟨0||`.
    pub vacuum_deviation: f64,
    /// Images of `|0⟩⟨0|`, `|1⟩⟨1|` and `|0⟩⟨1|`.
    pub images: [ComplexMatrix; 3],
}

impl FieldChannel {
    /// `Φ(ρ)` assembled from the basis images.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let [e00, e11, e01] = &self.images;
        let mut out = e00.scale(rho[(0, 0)]);
        out.add_scaled(rho[(1, 1)], e11);
        out.add_scaled(rho[(0, 1)], e01);
        out.add_scaled(rho[(1, 0)], &e01.adjoint());
        out
    }

    pub fn excess_coherence_loss(&self) -> f64 {
        self.params.excess_coherence_loss()
    }
}

/// The four tomography inputs `|0⟩, |1⟩, |+⟩, |+i⟩` as density matrices.
pub fn tomography_inputs() -> [ComplexMatrix; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ComplexMatrix::column(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
    let plus_i = ComplexMatrix::column(&[Complex64::new(s, 0.0), Complex64::new(0.0, s)]);
    [
        ComplexMatrix::unit(2, 0, 0),
        ComplexMatrix::unit(2, 1, 1),
        ComplexMatrix::projector(&plus),
        ComplexMatrix::projector(&plus_i),
    ]
}

/// `Φ(|0⟩⟨1|)` from the images of the four tomography inputs.
pub fn coherence_image(outputs: &[ComplexMatrix; 4]) -> ComplexMatrix {
    let [zero, one, plus, plus_i] = outputs;
    let mut e01 = plus.clone();
    e01.add_scaled(Complex64::new(0.0, 1.0), plus_i);
    let shift = Complex64::new(-0.5, -0.5);
    e01.add_scaled(shift, zero);
    e01.add_scaled(shift, one);
    e01
}

/// How to advance the joint state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagation {
    /// Fixed-step RK4 with the given `dt`.
    Rk4 { dt: f64 },
    /// `e^{−iHt}`; only for models without dissipation.
    Exact,
}

/// Evolves `ρ_field ⊗ |g⟩⟨g|` for each tomography input and traces out the
/// atom.
pub fn extract_field_channel(
    model: &Model,
    t: f64,
    propagation: Propagation,
) -> Result<FieldChannel, DynamicsError> {
    let solver = JointSolver::new(model, t, propagation)?;
    solver.field_channel()
}

/// Joint-state propagation for one model and one time.
struct JointSolver {
    atom_dim: usize,
    step: Stepper,
}

enum Stepper {
    Map(Integrator, ComplexMatrix),
    Exact(ComplexMatrix, f64),
}

impl JointSolver {
    fn new(model: &Model, t: f64, propagation: Propagation) -> Result<Self, DynamicsError> {
        model.validate()?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(DynamicsError::InvalidConfig(format!("time {t} must be >= 0")));
        }
        let (rate, dissipator) = model.dissipation();
        let eq = MasterEquation::new(model.hamiltonian(), rate, dissipator)?;
        let step = match propagation {
            Propagation::Rk4 { dt } => {
                let integrator = Integrator::new(&eq, dt)?;
                let map = integrator.interval_map(t)?;
                Stepper::Map(integrator, map)
            }
            Propagation::Exact => {
                if rate != 0.0 {
                    return Err(DynamicsError::InvalidConfig(
                        "exact propagation needs a model without dissipation".into(),
                    ));
                }
                Stepper::Exact(eq.hamiltonian().clone(), t)
            }
        };
        Ok(JointSolver {
            atom_dim: model.atom_dim(),
            step,
        })
    }

    fn joint_final(&self, field: &ComplexMatrix) -> Result<ComplexMatrix, DynamicsError> {
        let rho0 = field.kron(&ComplexMatrix::unit(self.atom_dim, 0, 0));
        match &self.step {
            Stepper::Map(integrator, map) => Ok(integrator.apply(map, &rho0).hermitian_part()),
            Stepper::Exact(h, t) => evolve_exact(h, &rho0, *t),
        }
    }

    fn field_channel(&self) -> Result<FieldChannel, DynamicsError> {
        let label = HilbertLabel::new(&[2, self.atom_dim]);
        let inputs = tomography_inputs();
        let mut outputs: Vec<ComplexMatrix> = Vec::with_capacity(4);
        let mut photon_probability = 0.0;
        for (k, input) in inputs.iter().enumerate() {
            let joint = self.joint_final(input)?;
            if k == 1 {
                photon_probability = photon_population(&joint, self.atom_dim);
            }
            outputs.push(partial_trace(&joint, &label, &[0])?);
        }
        let outputs: [ComplexMatrix; 4] = outputs.try_into().expect("four inputs");
        let e01 = coherence_image(&outputs);
        let [e00, e11, _, _] = outputs;

        let vacuum_deviation = e00.max_abs_diff(&ComplexMatrix::unit(2, 0, 0));
        if vacuum_deviation > VACUUM_CHECK_TOL {
            return Err(DynamicsError::VacuumNotPreserved {
                deviation: vacuum_deviation,
            });
        }
        let params = LossChannelParams::with_tolerance(
            e11.clone(),
            e01[(0, 1)],
            RECONSTRUCTION_TOL,
            RECONSTRUCTION_TOL,
        )
        .map_err(|source| DynamicsError::Reconstruction { source })?;
        Ok(FieldChannel {
            params,
            photon_probability,
            vacuum_deviation,
            images: [e00, e11, e01],
        })
    }
}

/// `Tr[(|1⟩⟨1| ⊗ 1) ρ]` on `photon ⊗ atom`.
pub fn photon_population(joint: &ComplexMatrix, atom_dim: usize) -> f64 {
    (0..atom_dim).map(|a| joint[(atom_dim + a, atom_dim + a)].re).sum()
}
