//! Channels generated by passive linear optics.
//!
//! `K` system modes and `J` ancilla modes are mixed by a unitary mode matrix
//! `𝑺 = [[S11, S12], [S21, S22]]` (Heisenberg picture: `a ↦ S11 a + S12 b`).
//! With the ancilla in a pure state `|ψ⟩` the induced channel on the
//! system's vacuum ⊕ single-particle sector is vacuum preserving iff
//! `d_k b̄_k |ψ⟩ = 0` for the singular values `d_k` of `S12 = V D W†` and
//! rotated ancilla modes `b̄ = W† b`. In that case it depends only on the
//! contraction `S = S11`:
//!
//! ```text
//! Φ(ρ) = |0⟩⟨0| Tr[(1 − S†S) ρ] + S ρ S† + S ρ |0⟩⟨0| + |0⟩⟨0| ρ S†
//! ```

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, KrausChannel};
use crate::linalg::random::haar_unitary;
use crate::linalg::{hermitian_eigensystem, operator_norm, svd, ComplexMatrix, STRUCTURAL_TOL};

/// Largest singular value accepted by [`from_contraction`] is `1 + CONTRACTION_TOL`.
pub const CONTRACTION_TOL: f64 = 1e-12;
/// Singular values of `S12` at or below this are treated as zero.
pub const COUPLING_TOL: f64 = 1e-10;
/// Largest `‖b̄_k|ψ⟩‖` tolerated for a coupled mode.
pub const ANNIHILATION_TOL: f64 = 1e-10;
/// Operator inequality slack: `min eig(1 − SS†) ≥ −OPERATOR_INEQ_TOL`.
pub const OPERATOR_INEQ_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("mode matrix is {rows}x{cols}, expected {expected}x{expected}")]
    Shape { rows: usize, cols: usize, expected: usize },
    #[error("mode matrix is not unitary (max |S†S - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("ancilla state has {found} amplitudes, expected {expected}")]
    AncillaLength { expected: usize, found: usize },
    #[error("ancilla state is not normalized (norm {norm})")]
    AncillaNorm { norm: f64 },
    #[error("ancilla has {ancilla} modes but the mode matrix has {modes}")]
    AncillaModes { ancilla: usize, modes: usize },
    #[error("induced channel is not vacuum preserving; offending ancilla modes {modes:?}")]
    VacuumTestFailed { modes: Vec<usize> },
    #[error("operator is not a contraction (largest singular value {norm})")]
    NotContraction { norm: f64 },
}

/// Unitary mode transformation of `k` system and `j` ancilla modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModeUnitaryRepr", into = "ModeUnitaryRepr")]
pub struct ModeUnitary {
    k: usize,
    j: usize,
    s: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeUnitaryRepr {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "J")]
    j: usize,
    #[serde(rename = "S")]
    s: ComplexMatrix,
}

impl TryFrom<ModeUnitaryRepr> for ModeUnitary {
    type Error = OpticsError;

    fn try_from(r: ModeUnitaryRepr) -> Result<Self, OpticsError> {
        ModeUnitary::new(r.k, r.j, r.s)
    }
}

impl From<ModeUnitary> for ModeUnitaryRepr {
    fn from(m: ModeUnitary) -> Self {
        ModeUnitaryRepr { k: m.k, j: m.j, s: m.s }
    }
}

impl ModeUnitary {
    pub fn new(k: usize, j: usize, s: ComplexMatrix) -> Result<Self, OpticsError> {
        let n = k + j;
        if k == 0 || s.rows() != n || s.cols() != n {
            return Err(OpticsError::Shape {
                rows: s.rows(),
                cols: s.cols(),
                expected: n,
            });
        }
        let deviation = s.unitarity_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(OpticsError::NotUnitary { deviation });
        }
        Ok(ModeUnitary { k, j, s })
    }

    /// Haar-random `(k + j)`-mode unitary.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize, j: usize) -> Self {
        Self::new(k, j, haar_unitary(rng, k + j)).expect("Haar unitary")
    }

    pub fn system_modes(&self) -> usize {
        self.k
    }

    pub fn ancilla_modes(&self) -> usize {
        self.j
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn s11(&self) -> ComplexMatrix {
        self.s.block(0, 0, self.k, self.k)
    }

    /// `K x J`; empty ancilla gives `None`.
    pub fn s12(&self) -> Option<ComplexMatrix> {
        (self.j > 0).then(|| self.s.block(0, self.k, self.k, self.j))
    }

    pub fn s21(&self) -> Option<ComplexMatrix> {
        (self.j > 0).then(|| self.s.block(self.k, 0, self.j, self.k))
    }

    pub fn s22(&self) -> Option<ComplexMatrix> {
        (self.j > 0).then(|| self.s.block(self.k, self.k, self.j, self.j))
    }
}

/// Beam splitter with transmissivity `cos²θ` between one system and one
/// ancilla mode.
pub fn beam_splitter(theta: f64) -> ModeUnitary {
    let (s, c) = theta.sin_cos();
    ModeUnitary::new(1, 1, ComplexMatrix::from_real_rows(&[[c, s], [-s, c]])).expect("rotation")
}

/// Pure ancilla state over the `{0,1}^J` occupation basis, mode 1 most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AncillaRepr", into = "AncillaRepr")]
pub struct AncillaState {
    j: usize,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AncillaRepr {
    #[serde(rename = "J")]
    j: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<AncillaRepr> for AncillaState {
    type Error = OpticsError;

    fn try_from(r: AncillaRepr) -> Result<Self, OpticsError> {
        AncillaState::new(r.j, r.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<AncillaState> for AncillaRepr {
    fn from(a: AncillaState) -> Self {
        AncillaRepr {
            j: a.j,
            amplitudes: a.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl AncillaState {
    pub fn new(j: usize, amplitudes: Vec<Complex64>) -> Result<Self, OpticsError> {
        let expected = 1usize << j;
        if amplitudes.len() != expected {
            return Err(OpticsError::AncillaLength {
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(OpticsError::AncillaNorm { norm });
        }
        Ok(AncillaState { j, amplitudes })
    }

    /// Multimode vacuum.
    pub fn vacuum(j: usize) -> Self {
        Self::fock(&vec![false; j])
    }

    /// Occupation-number state; `occupied[m]` is mode `m + 1`.
    pub fn fock(occupied: &[bool]) -> Self {
        let j = occupied.len();
        let index = occupied.iter().fold(0usize, |acc, &o| (acc << 1) | usize::from(o));
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << j];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        AncillaState { j, amplitudes }
    }

    pub fn modes(&self) -> usize {
        self.j
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    fn ket(&self) -> ComplexMatrix {
        ComplexMatrix::column(&self.amplitudes)
    }
}

/// Bosonic annihilation operator of mode `mode` (0-based) on the truncated
/// `{0,1}^J` space.
pub fn annihilation_operator(j: usize, mode: usize) -> ComplexMatrix {
    assert!(mode < j, "mode {mode} out of range for {j} modes");
    let lower = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]);
    let id = ComplexMatrix::identity(2);
    let mut op = if mode == 0 { lower.clone() } else { id.clone() };
    for m in 1..j {
        op = op.kron(if m == mode { &lower } else { &id });
    }
    op
}

/// Outcome of the vacuum-preservation test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumTest {
    pub passed: bool,
    /// 1-based indices `k` of rotated ancilla modes with `d_k > 0` and
    /// `b̄_k|ψ⟩ ≠ 0`.
    pub offending_modes: Vec<usize>,
    pub singular_values: Vec<f64>,
}

/// Checks `d_k b̄_k|ψ⟩ = 0` for every rotated ancilla mode.
pub fn vacuum_preservation_test(mu: &ModeUnitary, eta: &AncillaState) -> Result<VacuumTest, OpticsError> {
    if eta.modes() != mu.ancilla_modes() {
        return Err(OpticsError::AncillaModes {
            ancilla: eta.modes(),
            modes: mu.ancilla_modes(),
        });
    }
    let Some(s12) = mu.s12() else {
        return Ok(VacuumTest {
            passed: true,
            offending_modes: Vec::new(),
            singular_values: Vec::new(),
        });
    };
    let j = mu.ancilla_modes();
    let dec = svd(&s12);
    let w_adj = dec.w.adjoint();
    let b: Vec<ComplexMatrix> = (0..j).map(|m| annihilation_operator(j, m)).collect();
    let psi = eta.ket();

    let mut offending = Vec::new();
    for (k, &d) in dec.singular_values.iter().enumerate() {
        if d <= COUPLING_TOL {
            continue;
        }
        // b̄_k = Σ_m (W†)_{km} b_m
        let dim = 1usize << j;
        let mut bar = ComplexMatrix::zeros(dim, dim);
        for (m, b_m) in b.iter().enumerate() {
            bar.add_scaled(w_adj[(k, m)], b_m);
        }
        if (&bar * &psi).vector_norm() > ANNIHILATION_TOL {
            offending.push(k + 1);
        }
    }
    Ok(VacuumTest {
        passed: offending.is_empty(),
        offending_modes: offending,
        singular_values: dec.singular_values,
    })
}

/// Embeds a `K x K` single-particle operator into the `(1 + K)` space with
/// zero vacuum row and column.
fn embed(s: &ComplexMatrix) -> ComplexMatrix {
    let k = s.rows();
    let mut out = ComplexMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            out[(i + 1, j + 1)] = s[(i, j)];
        }
    }
    out
}

/// Direct evaluation of the linear-optics channel of contraction `s` on any
/// `(1 + K)`-dimensional input.
pub fn linear_optics_action(s: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let big = embed(s);
    let dim = big.rows();
    let vac = ComplexMatrix::unit(dim, 0, 0);
    let loss_op = &ComplexMatrix::identity(dim) - &(&big.adjoint() * &big);
    let mut out = vac.scale((&loss_op * rho).trace());
    out.add_scaled(Complex64::new(1.0, 0.0), &(&(&big * rho) * &big.adjoint()));
    out.add_scaled(Complex64::new(1.0, 0.0), &(&(&big * rho) * &vac));
    out.add_scaled(Complex64::new(1.0, 0.0), &(&(&vac * rho) * &big.adjoint()));
    out
}

/// Smallest eigenvalues of `1 − SS†` and `1 − S†S`.
pub fn contraction_margins(s: &ComplexMatrix) -> (f64, f64) {
    let id = ComplexMatrix::identity(s.rows());
    let min_eig = |m: ComplexMatrix| {
        hermitian_eigensystem(&m.hermitian_part())
            .expect("Hermitian by construction")
            .values[0]
    };
    (
        min_eig(&id - &(s * &s.adjoint())),
        min_eig(&id - &(&s.adjoint() * s)),
    )
}

/// Linear-optics channel of a contraction `s` on the single-particle space.
pub fn from_contraction(s: &ComplexMatrix) -> Result<KrausChannel, OpticsError> {
    if !s.is_square() {
        return Err(OpticsError::Shape {
            rows: s.rows(),
            cols: s.cols(),
            expected: s.rows(),
        });
    }
    let norm = operator_norm(s);
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(OpticsError::NotContraction { norm });
    }
    let (left, right) = contraction_margins(s);
    if left < -OPERATOR_INEQ_TOL || right < -OPERATOR_INEQ_TOL {
        return Err(OpticsError::NotContraction { norm });
    }

    let k = s.rows();
    let mut kraus = vec![&ComplexMatrix::unit(k + 1, 0, 0) + &embed(s)];
    let defect = &ComplexMatrix::identity(k) - &(&s.adjoint() * s);
    let eig = hermitian_eigensystem(&defect.hermitian_part()).map_err(ChannelError::from)?;
    for (col, &lambda) in eig.values.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        // √λ |0⟩⟨e|
        let mut op = ComplexMatrix::zeros(k + 1, k + 1);
        for i in 0..k {
            op[(0, i + 1)] = eig.vectors[(i, col)].conj() * lambda.sqrt();
        }
        kraus.push(op);
    }
    Ok(KrausChannel::new(kraus)?)
}

/// Channel on the system's vacuum ⊕ single-particle sector induced by
/// `mu` with ancilla `eta`.
pub fn induced_channel(mu: &ModeUnitary, eta: &AncillaState) -> Result<KrausChannel, OpticsError> {
    let test = vacuum_preservation_test(mu, eta)?;
    if !test.passed {
        return Err(OpticsError::VacuumTestFailed {
            modes: test.offending_modes,
        });
    }
    from_contraction(&mu.s11())
}

/// `Σ w_i Φ_i`.
pub fn convex_mixture(channels: &[KrausChannel], weights: &[f64]) -> Result<KrausChannel, OpticsError> {
    Ok(KrausChannel::convex_mixture(channels, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{beam_splitter_params, from_loss_params, lpc};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn beam_splitter_shapes() {
        assert_eq!(beam_splitter(0.0).matrix(), &ComplexMatrix::identity(2));
        let swap = beam_splitter(FRAC_PI_2);
        assert!(swap.matrix()[(0, 0)].norm() < 1e-15 && (swap.matrix()[(0, 1)].re - 1.0).abs() < 1e-15);
        let d = svd(&beam_splitter(FRAC_PI_4).s12().unwrap()).singular_values;
        assert!((d[0] - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn annihilation_operator_ordering() {
        // |10⟩ (mode 1 occupied) has flat index 2; b_1 maps it to |00⟩.
        let b1 = annihilation_operator(2, 0);
        let b2 = annihilation_operator(2, 1);
        assert_eq!(b1[(0, 2)], Complex64::new(1.0, 0.0));
        assert_eq!(b2[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(AncillaState::fock(&[true, false]).amplitudes()[2], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn vacuum_ancilla_always_passes() {
        let mut rng = crate::linalg::random::seeded_rng(5);
        for _ in 0..10 {
            let mu = ModeUnitary::random(&mut rng, 2, 3);
            assert!(vacuum_preservation_test(&mu, &AncillaState::vacuum(3)).unwrap().passed);
        }
    }

    #[test]
    fn photon_in_coupled_ancilla_mode_fails() {
        let t = vacuum_preservation_test(&beam_splitter(FRAC_PI_4), &AncillaState::fock(&[true])).unwrap();
        assert!(!t.passed);
        assert_eq!(t.offending_modes, vec![1]);
        let err = induced_channel(&beam_splitter(FRAC_PI_4), &AncillaState::fock(&[true])).unwrap_err();
        assert_eq!(err, OpticsError::VacuumTestFailed { modes: vec![1] });
    }

    #[test]
    fn block_diagonal_mode_matrix_passes_for_any_ancilla() {
        let s = ComplexMatrix::from_real_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let mu = ModeUnitary::new(2, 1, s).unwrap();
        let t = vacuum_preservation_test(&mu, &AncillaState::fock(&[true])).unwrap();
        assert!(t.passed);
        let ch = induced_channel(&mu, &AncillaState::fock(&[true])).unwrap();
        let psi = ComplexMatrix::basis(3, 1);
        let r = lpc(&ch, &psi).unwrap();
        assert!(r.loss.abs() < 1e-12 && (r.preservation - 1.0).abs() < 1e-12 && r.creation < 1e-12);
    }

    #[test]
    fn induced_beam_splitter_matches_loss_parametrization() {
        for k in 0..32 {
            let theta = k as f64 * std::f64::consts::PI / 31.0;
            let induced = induced_channel(&beam_splitter(theta), &AncillaState::vacuum(1)).unwrap();
            let reference = from_loss_params(&beam_splitter_params(theta)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let e = ComplexMatrix::unit(2, i, j);
                    let diff = induced.apply(&e).unwrap().max_abs_diff(&reference.apply(&e).unwrap());
                    assert!(diff < 1e-10, "theta {theta}: {diff}");
                }
            }
        }
    }

    #[test]
    fn contraction_cases() {
        let half = from_contraction(&ComplexMatrix::identity(1).scale_real(0.5)).unwrap();
        let r = lpc(&half, &ComplexMatrix::basis(2, 1)).unwrap();
        assert!((r.loss - 0.75).abs() < 1e-12 && (r.preservation - 0.5).abs() < 1e-12 && r.creation < 1e-12);

        let id = from_contraction(&ComplexMatrix::identity(2)).unwrap();
        let x = ComplexMatrix::unit(3, 2, 0);
        assert!(id.apply(&x).unwrap().max_abs_diff(&x) < 1e-15);

        assert!(matches!(
            from_contraction(&ComplexMatrix::identity(1).scale_real(1.1)),
            Err(OpticsError::NotContraction { .. })
        ));
    }

    #[test]
    fn kraus_form_matches_direct_formula() {
        let mut rng = crate::linalg::random::seeded_rng(17);
        for _ in 0..10 {
            let mu = ModeUnitary::random(&mut rng, 3, 2);
            let s = mu.s11();
            let ch = from_contraction(&s).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let e = ComplexMatrix::unit(4, i, j);
                    assert!(ch.apply(&e).unwrap().max_abs_diff(&linear_optics_action(&s, &e)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn json_schemas() {
        let mu = beam_splitter(0.3);
        let json = serde_json::to_string(&mu).unwrap();
        assert!(json.starts_with(r#"{"K":1,"J":1,"S":{"#));
        assert_eq!(serde_json::from_str::<ModeUnitary>(&json).unwrap(), mu);

        let not_unitary = r#"{"K":1,"J":1,"S":{"rows":2,"cols":2,"entries":[[1,0],[1,0],[0,0],[1,0]]}}"#;
        assert!(serde_json::from_str::<ModeUnitary>(not_unitary).is_err());

        let eta = AncillaState::fock(&[false, true]);
        let json = serde_json::to_string(&eta).unwrap();
        assert_eq!(json, r#"{"J":2,"amplitudes":[[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<AncillaState>(&json).unwrap(), eta);
        assert!(serde_json::from_str::<AncillaState>(r#"{"J":1,"amplitudes":[[1,0]]}"#).is_err());
    }
}
