//! Lindblad master equation and its fixed-step RK4 integration.
//!
//! The equation is linear in `ρ`, so one classical RK4 step of size `h` is
//! the matrix `M(h) = Σ_{k≤4} (hL)^k / k!` acting on `vec(ρ)`, with `L` the
//! Liouvillian. [`Integrator`] builds `M(dt)` once and applies whole
//! intervals as matrix powers. [`rk4_step`] is the literal matrix-valued
//! step and is kept as a reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{sigma_z, Dissipator};
use super::DynamicsError;
use crate::linalg::{hermitian_eigenvalues, unitary_propagator, ComplexMatrix};

/// Largest tolerated `|Tr ρ − 1|` before integration is aborted.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Remainders below this fraction of `dt` are treated as rounding.
const STEP_SLACK: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `H`, rate and dissipator of `dρ/dt = −i[H, ρ] + q D(ρ)`.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    hamiltonian: ComplexMatrix,
    rate: f64,
    dissipator: Dissipator,
    jump: Option<ComplexMatrix>,
}

impl MasterEquation {
    /// Dissipators act on a two-level atom as the second tensor factor.
    pub fn new(
        hamiltonian: ComplexMatrix,
        rate: f64,
        dissipator: Dissipator,
    ) -> Result<Self, DynamicsError> {
        if !hamiltonian.is_square() {
            return Err(DynamicsError::InvalidConfig(format!(
                "Hamiltonian is {}x{}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        let deviation = hamiltonian.hermiticity_deviation();
        if deviation > 1e-12 {
            return Err(DynamicsError::InvalidConfig(format!(
                "Hamiltonian is not Hermitian (deviation {deviation:e})"
            )));
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(DynamicsError::InvalidConfig(format!("rate {rate} must be >= 0")));
        }
        let n = hamiltonian.rows();
        let jump = match dissipator {
            Dissipator::None => None,
            Dissipator::Relaxation | Dissipator::Dephasing => {
                if n % 2 != 0 || n / 2 != 2 {
                    return Err(DynamicsError::InvalidConfig(format!(
                        "atomic dissipators need a photon ⊗ two-level space, got dimension {n}"
                    )));
                }
                let atom_op = match dissipator {
                    Dissipator::Relaxation => ComplexMatrix::unit(2, 0, 1),
                    _ => sigma_z(),
                };
                Some(ComplexMatrix::identity(2).kron(&atom_op))
            }
        };
        Ok(MasterEquation {
            hamiltonian,
            rate,
            dissipator,
            jump,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn dissipator(&self) -> Dissipator {
        self.dissipator
    }

    /// Right-hand side `−i[H, ρ] + q D(ρ)`.
    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.hamiltonian;
        let mut out = (&(h * rho) - &(rho * h)).scale(-I);
        if self.rate == 0.0 {
            return out;
        }
        if let Some(op) = &self.jump {
            let dissipated = match self.dissipator {
                Dissipator::Relaxation => {
                    let op_dag = op.adjoint();
                    let n = &op_dag * op;
                    let mut d = &(op * rho) * &op_dag;
                    d.add_scaled(Complex64::new(-0.5, 0.0), &(&n * rho));
                    d.add_scaled(Complex64::new(-0.5, 0.0), &(rho * &n));
                    d
                }
                Dissipator::Dephasing => {
                    let inner = &(op * rho) - &(rho * op);
                    let outer = &(op * &inner) - &(&inner * op);
                    outer.scale_real(-0.25)
                }
                Dissipator::None => unreachable!("no jump operator without a dissipator"),
            };
            out.add_scaled(Complex64::new(self.rate, 0.0), &dissipated);
        }
        out
    }

    /// Matrix of `ρ ↦ rhs(ρ)` on row-major `vec(ρ)`.
    pub fn liouvillian(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut l = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let image = self.rhs(&ComplexMatrix::unit(n, i, j));
                let col = i * n + j;
                for (row, value) in image.as_slice().iter().enumerate() {
                    l[(row, col)] = *value;
                }
            }
        }
        l
    }
}

/// `dρ/dt` for the given Hamiltonian and dissipator.
pub fn lindblad_rhs(
    h: &ComplexMatrix,
    q: f64,
    dissipator: Dissipator,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix, DynamicsError> {
    let eq = MasterEquation::new(h.clone(), q, dissipator)?;
    if rho.rows() != eq.dim() || rho.cols() != eq.dim() {
        return Err(DynamicsError::InvalidConfig(format!(
            "state is {}x{}, Hamiltonian is {}x{}",
            rho.rows(),
            rho.cols(),
            eq.dim(),
            eq.dim()
        )));
    }
    Ok(eq.rhs(rho))
}

/// One classical RK4 step of size `h` applied to the matrix ODE.
pub fn rk4_step(eq: &MasterEquation, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = eq.rhs(rho);
    let mut probe = rho.clone();
    probe.add_scaled(Complex64::new(h / 2.0, 0.0), &k1);
    let k2 = eq.rhs(&probe);
    let mut probe = rho.clone();
    probe.add_scaled(Complex64::new(h / 2.0, 0.0), &k2);
    let k3 = eq.rhs(&probe);
    let mut probe = rho.clone();
    probe.add_scaled(Complex64::new(h, 0.0), &k3);
    let k4 = eq.rhs(&probe);

    let mut next = rho.clone();
    next.add_scaled(Complex64::new(h / 6.0, 0.0), &k1);
    next.add_scaled(Complex64::new(h / 3.0, 0.0), &k2);
    next.add_scaled(Complex64::new(h / 3.0, 0.0), &k3);
    next.add_scaled(Complex64::new(h / 6.0, 0.0), &k4);
    next
}

/// Number of full steps and the length of the trailing partial step.
pub fn step_schedule(duration: f64, dt: f64) -> (u64, f64) {
    let full = (duration / dt + STEP_SLACK).floor().max(0.0);
    let rest = duration - full * dt;
    let rest = if rest > STEP_SLACK * dt { rest } else { 0.0 };
    (full as u64, rest)
}

fn is_positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Applies RK4 over whole intervals through powers of the one-step map.
#[derive(Debug, Clone)]
pub struct Integrator {
    dim: usize,
    dt: f64,
    liouvillian: ComplexMatrix,
    step: ComplexMatrix,
}

impl Integrator {
    pub fn new(eq: &MasterEquation, dt: f64) -> Result<Self, DynamicsError> {
        if !is_positive_finite(dt) {
            return Err(DynamicsError::InvalidConfig(format!("dt = {dt} must be > 0")));
        }
        let liouvillian = eq.liouvillian();
        let step = Self::taylor4(&liouvillian, dt);
        Ok(Integrator {
            dim: eq.dim(),
            dt,
            liouvillian,
            step,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `I + hL(I + hL/2(I + hL/3(I + hL/4)))`.
    fn taylor4(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
        let id = ComplexMatrix::identity(l.rows());
        let hl = l.scale_real(h);
        let mut acc = id.clone();
        for k in [4.0, 3.0, 2.0, 1.0] {
            let mut next = id.clone();
            next.add_scaled(Complex64::new(1.0 / k, 0.0), &(&hl * &acc));
            acc = next;
        }
        acc
    }

    /// One-step map for step size `h`.
    pub fn step_map(&self, h: f64) -> ComplexMatrix {
        if h == self.dt {
            self.step.clone()
        } else {
            Self::taylor4(&self.liouvillian, h)
        }
    }

    /// Map advancing `vec(ρ)` by `duration`: full steps of `dt`, then one
    /// shorter step for the remainder.
    pub fn interval_map(&self, duration: f64) -> Result<ComplexMatrix, DynamicsError> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(DynamicsError::InvalidConfig(format!(
                "duration {duration} must be >= 0"
            )));
        }
        let (full, rest) = step_schedule(duration, self.dt);
        let mut map = matrix_power(&self.step, full);
        if rest > 0.0 {
            map = &Self::taylor4(&self.liouvillian, rest) * &map;
        }
        Ok(map)
    }

    /// Applies a map from [`Integrator::interval_map`] to `ρ`.
    pub fn apply(&self, map: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let v = ComplexMatrix::from_vec(n * n, 1, rho.as_slice().to_vec())
            .expect("state shape checked by caller");
        let out = map * &v;
        ComplexMatrix::from_vec(n, n, out.into_vec()).expect("square output")
    }
}

/// `m^k` by repeated squaring.
pub fn matrix_power(m: &ComplexMatrix, mut k: u64) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(m.rows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// States recorded along a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    /// Largest `|Tr ρ − 1|` over the recorded states.
    pub trace_drift: f64,
    /// Smallest eigenvalue over the recorded states.
    pub min_eigenvalue: f64,
}

impl EvolutionResult {
    pub fn final_state(&self) -> &ComplexMatrix {
        self.states.last().expect("at least the initial state is recorded")
    }
}

fn check_state(rho: &ComplexMatrix, dim: usize) -> Result<(), DynamicsError> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(DynamicsError::InvalidConfig(format!(
            "state is {}x{}, expected {dim}x{dim}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

struct Recorder {
    result: EvolutionResult,
    dt: f64,
}

impl Recorder {
    fn new(dt: f64) -> Self {
        Recorder {
            result: EvolutionResult {
                times: Vec::new(),
                states: Vec::new(),
                trace_drift: 0.0,
                min_eigenvalue: f64::INFINITY,
            },
            dt,
        }
    }

    /// Symmetrizes, checks the trace and stores the state.
    fn push(&mut self, t: f64, rho: ComplexMatrix) -> Result<ComplexMatrix, DynamicsError> {
        let rho = rho.hermitian_part();
        let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
        if !drift.is_finite() || drift > TRACE_DRIFT_LIMIT {
            return Err(DynamicsError::TraceDrift {
                drift,
                time: t,
                dt: self.dt,
            });
        }
        let min_eig = hermitian_eigenvalues(&rho)?[0];
        let r = &mut self.result;
        r.trace_drift = r.trace_drift.max(drift);
        r.min_eigenvalue = r.min_eigenvalue.min(min_eig);
        r.times.push(t);
        r.states.push(rho.clone());
        Ok(rho)
    }
}

/// Integrates from `t = 0` to `t_final`, recording every `sample_every`
/// (and always the endpoints).
pub fn evolve_sampled(
    eq: &MasterEquation,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
    sample_every: Option<f64>,
) -> Result<EvolutionResult, DynamicsError> {
    check_state(rho0, eq.dim())?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(DynamicsError::InvalidConfig(format!(
            "t_final = {t_final} must be >= 0"
        )));
    }
    let interval = match sample_every {
        Some(s) if !is_positive_finite(s) => {
            return Err(DynamicsError::InvalidConfig(format!("sampling interval {s} must be > 0")))
        }
        Some(s) => s,
        None => t_final,
    };
    let integrator = Integrator::new(eq, dt)?;
    let mut recorder = Recorder::new(dt);
    let mut rho = recorder.push(0.0, rho0.clone())?;
    if t_final == 0.0 {
        return Ok(recorder.result);
    }

    let (full_intervals, tail) = step_schedule(t_final, interval);
    let interval_map = integrator.interval_map(interval)?;
    for k in 1..=full_intervals {
        rho = recorder.push(k as f64 * interval, integrator.apply(&interval_map, &rho))?;
    }
    if tail > 0.0 {
        let tail_map = integrator.interval_map(tail)?;
        recorder.push(t_final, integrator.apply(&tail_map, &rho))?;
    }
    Ok(recorder.result)
}

/// Integrates from `t = 0` to `t_final`; records the initial and final states.
pub fn evolve(
    eq: &MasterEquation,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
) -> Result<EvolutionResult, DynamicsError> {
    evolve_sampled(eq, rho0, t_final, dt, None)
}

/// Step-by-step RK4 on the matrix ODE, without the propagator shortcut.
pub fn evolve_stepwise(
    eq: &MasterEquation,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
) -> Result<ComplexMatrix, DynamicsError> {
    check_state(rho0, eq.dim())?;
    if !is_positive_finite(dt) {
        return Err(DynamicsError::InvalidConfig(format!("dt = {dt} must be > 0")));
    }
    let (full, rest) = step_schedule(t_final, dt);
    let mut rho = rho0.clone();
    for _ in 0..full {
        rho = rk4_step(eq, &rho, dt).hermitian_part();
    }
    if rest > 0.0 {
        rho = rk4_step(eq, &rho, rest).hermitian_part();
    }
    Ok(rho)
}

/// `e^{−iHt} ρ e^{iHt}`.
pub fn evolve_exact(
    h: &ComplexMatrix,
    rho0: &ComplexMatrix,
    t: f64,
) -> Result<ComplexMatrix, DynamicsError> {
    check_state(rho0, h.rows())?;
    let u = unitary_propagator(h, t)?;
    Ok(&(&u * rho0) * &u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::model::{jc_hamiltonian, JcConfig};
    use crate::linalg::{partial_trace, HilbertLabel};

    fn jc(delta: f64, q: f64, dissipator: Dissipator) -> MasterEquation {
        let mut cfg = JcConfig::reference(delta, dissipator);
        cfg.q = q;
        MasterEquation::new(jc_hamiltonian(&cfg), cfg.effective_rate(), dissipator).unwrap()
    }

    fn photon_in_ground() -> ComplexMatrix {
        ComplexMatrix::unit(4, 2, 2)
    }

    #[test]
    fn schedule_shortens_last_step() {
        assert_eq!(step_schedule(1.0, 0.01), (100, 0.0));
        let (full, rest) = step_schedule(1.005, 0.01);
        assert_eq!(full, 100);
        assert!((rest - 0.005).abs() < 1e-12);
        assert_eq!(step_schedule(0.0, 0.01), (0, 0.0));
        // 0.3 / 0.1 is 2.9999999999999996 in floating point
        assert_eq!(step_schedule(0.3, 0.1), (3, 0.0));
    }

    #[test]
    fn liouvillian_matches_rhs() {
        let eq = jc(0.3, 0.05, Dissipator::Relaxation);
        let rho = ComplexMatrix::from_rows(&[
            [0.4, 0.1, 0.0, 0.05].map(|x| Complex64::new(x, 0.0)),
            [0.1, 0.3, 0.02, 0.0].map(|x| Complex64::new(x, 0.0)),
            [0.0, 0.02, 0.2, 0.0].map(|x| Complex64::new(x, 0.0)),
            [0.05, 0.0, 0.0, 0.1].map(|x| Complex64::new(x, 0.0)),
        ]);
        let integ = Integrator::new(&eq, 0.1).unwrap();
        let via_l = integ.apply(&eq.liouvillian(), &rho);
        assert!(via_l.max_abs_diff(&eq.rhs(&rho)) < 1e-15);
    }

    #[test]
    fn propagator_matches_stepwise_rk4() {
        for dissipator in [Dissipator::None, Dissipator::Relaxation, Dissipator::Dephasing] {
            let eq = jc(0.2, 0.01, dissipator);
            let rho0 = photon_in_ground();
            let stepwise = evolve_stepwise(&eq, &rho0, 3.37, 0.01).unwrap();
            let fast = evolve(&eq, &rho0, 3.37, 0.01).unwrap();
            assert!(fast.final_state().max_abs_diff(&stepwise) < 1e-12, "{dissipator:?}");
            assert_eq!(fast.times, vec![0.0, 3.37]);
        }
    }

    #[test]
    fn closed_rabi_oscillation() {
        // δ = 0.3, g = 0.1: p(t) = 1 − 4g²/Ω² sin²(Ωt/2), Ω² = δ² + 4g²
        let (delta, g) = (0.3, 0.1);
        let eq = jc(delta, 0.0, Dissipator::None);
        let omega = (delta * delta + 4.0 * g * g).sqrt();
        let run = evolve_sampled(&eq, &photon_in_ground(), 40.0, 0.01, Some(0.5)).unwrap();
        for (t, rho) in run.times.iter().zip(&run.states) {
            let p = rho[(2, 2)].re + rho[(3, 3)].re;
            let expected = 1.0 - 4.0 * g * g / (omega * omega) * (omega * t / 2.0).sin().powi(2);
            assert!((p - expected).abs() < 1e-8, "t = {t}: {p} vs {expected}");
        }
        assert!(run.trace_drift < 1e-12);
    }

    #[test]
    fn matches_exact_unitary_evolution() {
        let eq = jc(-0.4, 0.0, Dissipator::None);
        let mut rho0 = ComplexMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 0, 0.5), (2, 2, 0.5), (0, 2, 0.5), (2, 0, 0.5)] {
            rho0[(i, j)] = Complex64::new(v, 0.0);
        }
        let exact = evolve_exact(eq.hamiltonian(), &rho0, 17.0).unwrap();
        let rk4 = evolve(&eq, &rho0, 17.0, 0.01).unwrap();
        assert!(rk4.final_state().max_abs_diff(&exact) < 1e-8);
    }

    fn atom_state(rho: &ComplexMatrix) -> ComplexMatrix {
        partial_trace(rho, &HilbertLabel::new(&[2, 2]), &[1]).unwrap()
    }

    #[test]
    fn uncoupled_relaxation_rate() {
        let cfg = JcConfig {
            omega: 1.0,
            omega_a: 1.0,
            g: 0.0,
            q: 0.2,
            dissipator: Dissipator::Relaxation,
        };
        let eq = MasterEquation::new(jc_hamiltonian(&cfg), cfg.q, cfg.dissipator).unwrap();
        // photon vacuum, atom excited
        let rho0 = ComplexMatrix::unit(4, 1, 1);
        let run = evolve_sampled(&eq, &rho0, 10.0, 0.01, Some(1.0)).unwrap();
        for (t, rho) in run.times.iter().zip(&run.states) {
            let excited = atom_state(rho)[(1, 1)].re;
            assert!((excited - (-cfg.q * t).exp()).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn uncoupled_dephasing_rate() {
        let cfg = JcConfig {
            omega: 1.0,
            omega_a: 0.0,
            g: 0.0,
            q: 0.3,
            dissipator: Dissipator::Dephasing,
        };
        let eq = MasterEquation::new(jc_hamiltonian(&cfg), cfg.q, cfg.dissipator).unwrap();
        // photon vacuum, atom in |+⟩; ω_a = 0 removes the phase rotation
        let mut rho0 = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                rho0[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        let run = evolve_sampled(&eq, &rho0, 10.0, 0.01, Some(1.0)).unwrap();
        for (t, rho) in run.times.iter().zip(&run.states) {
            let coherence = atom_state(rho)[(0, 1)].norm();
            assert!((coherence - 0.5 * (-cfg.q * t).exp()).abs() < 1e-9, "t = {t}");
            assert!((atom_state(rho)[(1, 1)].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_excitation_sector_is_invariant() {
        for dissipator in [Dissipator::None, Dissipator::Dephasing] {
            let eq = jc(0.1, 0.02, dissipator);
            let run = evolve_sampled(&eq, &photon_in_ground(), 50.0, 0.01, Some(5.0)).unwrap();
            for rho in &run.states {
                let leak = rho[(0, 0)].norm() + rho[(3, 3)].norm();
                assert!(leak < 1e-10);
            }
        }
    }

    #[test]
    fn three_level_invariant_subspace() {
        use crate::dynamics::model::{three_level_hamiltonian, ThreeLevelConfig};
        let h = three_level_hamiltonian(&ThreeLevelConfig::reference(2.0));
        let eq = MasterEquation::new(h, 0.0, Dissipator::None).unwrap();
        // |1,0⟩ couples only within {|1,0⟩, |0,1⟩, |0,2⟩, |1,1⟩}
        let rho0 = ComplexMatrix::unit(6, 3, 3);
        let run = evolve_sampled(&eq, &rho0, 500.0, 0.01, Some(25.0)).unwrap();
        for rho in &run.states {
            assert!(rho[(0, 0)].re.abs() + rho[(5, 5)].re.abs() < 1e-10);
        }
        assert!(run.trace_drift <= 1e-8);
        assert!(run.min_eigenvalue >= -1e-8);
    }

    #[test]
    fn dissipative_states_remain_physical() {
        let eq = jc(0.0, 0.01, Dissipator::Relaxation);
        let run = evolve_sampled(&eq, &photon_in_ground(), 100.0, 0.01, Some(10.0)).unwrap();
        assert!(run.min_eigenvalue > -1e-8);
        assert!(run.trace_drift < 1e-10);
        for rho in &run.states {
            assert!(rho.hermiticity_deviation() < 1e-12);
        }
    }

    #[test]
    fn excessive_step_aborts_on_trace_drift() {
        // dt far beyond the RK4 stability region for ω ≈ 20
        let cfg = JcConfig {
            omega: 20.0,
            omega_a: 20.0,
            g: 5.0,
            q: 1.0,
            dissipator: Dissipator::Relaxation,
        };
        let eq = MasterEquation::new(jc_hamiltonian(&cfg), cfg.q, cfg.dissipator).unwrap();
        let rho0 = ComplexMatrix::unit(4, 1, 1);
        let err = evolve_sampled(&eq, &rho0, 50.0, 0.5, Some(0.5)).unwrap_err();
        assert!(matches!(err, DynamicsError::TraceDrift { .. }), "{err:?}");
    }

    #[test]
    fn dissipator_needs_two_level_atom() {
        let h = ComplexMatrix::identity(6);
        assert!(MasterEquation::new(h.clone(), 0.1, Dissipator::Dephasing).is_err());
        assert!(MasterEquation::new(h, 0.0, Dissipator::None).is_ok());
    }

    #[test]
    fn matrix_power_small_cases() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        let p = matrix_power(&m, 13);
        assert_eq!(p, ComplexMatrix::from_real_rows(&[[1.0, 13.0], [0.0, 1.0]]));
        assert_eq!(matrix_power(&m, 0), ComplexMatrix::identity(2));
    }
}
