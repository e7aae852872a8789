mod common;

use coherence_core::channel::{
    lpc, mach_zehnder_closed_form, random_psi_perp, random_vacuum_preserving_channel_with,
    simulate_mach_zehnder,
};
use coherence_core::dynamics::{
    evolve_exact, evolve_sampled, evolve_stepwise, extract_field_channel, Dissipator, JcConfig,
    MasterEquation, Model, Propagation, ThreeLevelConfig,
};
use coherence_core::linalg::random::{haar_unitary, seeded_rng};
use coherence_core::linalg::ComplexMatrix;
use coherence_core::linear_optics::{induced_channel, AncillaState, ModeUnitary};
use rand::Rng;

#[test]
fn induced_channel_matches_fock_space_dilation() {
    let mut rng = seeded_rng(7);
    for _ in 0..60 {
        let k = rng.random_range(1..=3);
        let j = rng.random_range(0..=3);
        let mu = ModeUnitary::random(&mut rng, k, j);
        let ch = induced_channel(&mu, &AncillaState::vacuum(j)).unwrap();
        for _ in 0..5 {
            let rho = common::random_density(&mut rng, k + 1);
            let oracle = common::vacuum_ancilla_channel_oracle(mu.matrix(), k, &rho);
            assert!(ch.apply(&rho).unwrap().max_abs_diff(&oracle) < 1e-12);
        }
        assert!(common::jacobi_hermitian(&ch.choi())[0] >= -1e-10);
    }
}

#[test]
fn interferometer_simulation_matches_closed_form() {
    let mut rng = seeded_rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.random_range(1..=3);
        let anc = rng.random_range(2..=4);
        let ch = random_vacuum_preserving_channel_with(&mut rng, d, anc);
        let psi = random_psi_perp(&mut rng, d);
        let u = haar_unitary(&mut rng, d);
        let chi = rng.random_range(0.0..std::f64::consts::TAU);
        let full = simulate_mach_zehnder(&ch, &psi, &u, chi).unwrap();
        let closed = mach_zehnder_closed_form(&ch, &psi, &u, chi).unwrap();
        worst = worst.max((full - closed).abs());
        // fringe stays within the bounds set by loss
        let l = lpc(&ch, &psi).unwrap().loss;
        assert!(full <= 1.0 - l / 2.0 + 1e-12 && full >= -1e-12);
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

#[test]
fn rk4_routes_agree_on_three_level_model() {
    let model = ThreeLevelConfig::reference(1.0);
    let eq = MasterEquation::new(Model::ThreeLevel(model).hamiltonian(), 0.0, Dissipator::None).unwrap();
    let rho0 = ComplexMatrix::unit(6, 3, 3);
    let stepwise = evolve_stepwise(&eq, &rho0, 7.3, 0.01).unwrap();
    let fast = evolve_sampled(&eq, &rho0, 7.3, 0.01, Some(0.5)).unwrap();
    assert!(fast.final_state().max_abs_diff(&stepwise) < 1e-12);
    let exact = evolve_exact(eq.hamiltonian(), &rho0, 7.3).unwrap();
    assert!(stepwise.max_abs_diff(&exact) < 1e-6);
}

#[test]
fn jc_tomography_against_exact_unitary() {
    // pure JC photon channel in closed form: |γ|² = p, σ01 = 0
    for delta in [-0.7, -0.1, 0.0, 0.25, 0.9] {
        for t in [3.0, 15.0, 40.0] {
            let cfg = JcConfig {
                q: 0.0,
                ..JcConfig::reference(delta, Dissipator::None)
            };
            let ch = extract_field_channel(&Model::Jc(cfg), t, Propagation::Exact).unwrap();
            let omega = (delta * delta + 4.0 * cfg.g * cfg.g).sqrt();
            let p = 1.0 - 4.0 * cfg.g * cfg.g / (omega * omega) * (omega * t / 2.0).sin().powi(2);
            assert!((ch.photon_probability - p).abs() < 1e-12);
            assert!((ch.params.gamma().norm_sqr() - p).abs() < 1e-12);
            assert!(ch.params.sigma01().norm() < 1e-14);
        }
    }
}
