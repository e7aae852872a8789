//! Loss channels of a single mode without internal structure.
//!
//! On the vacuum ⊕ single-particle space the channel is fixed by a density
//! operator `σ` (the image of `|1⟩⟨1|`) and a complex number `γ`:
//!
//! ```text
//! Φ(ρ) = |0⟩⟨0| ρ₀₀ + σ ρ₁₁ + γ |0⟩⟨1| ρ₀₁ + γ* |1⟩⟨0| ρ₁₀
//! ```
//!
//! and is a valid channel iff `|γ| ≤ 1` and `σ₀₀|γ|² + |σ₀₁|² ≤ σ₀₀(1 − σ₀₀)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ChannelError, KrausChannel};
use crate::linalg::{validate_density_operator, ComplexMatrix, STRUCTURAL_TOL};

/// Slack allowed on the positivity constraint `σ₀₀|γ|² + |σ₀₁|² ≤ σ₀₀(1 − σ₀₀)`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// `(σ, γ)` parametrization of a vacuum-preserving single-mode channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct LossChannelParams {
    sigma: ComplexMatrix,
    gamma: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsRepr {
    sigma: ComplexMatrix,
    gamma: [f64; 2],
}

impl TryFrom<ParamsRepr> for LossChannelParams {
    type Error = ChannelError;

    fn try_from(repr: ParamsRepr) -> Result<Self, ChannelError> {
        LossChannelParams::new(repr.sigma, Complex64::new(repr.gamma[0], repr.gamma[1]))
    }
}

impl From<LossChannelParams> for ParamsRepr {
    fn from(p: LossChannelParams) -> Self {
        ParamsRepr {
            sigma: p.sigma,
            gamma: [p.gamma.re, p.gamma.im],
        }
    }
}

/// The parametrization of a 50/50-style splitter coupling to a vacuum ancilla:
/// `σ = sin²θ |0⟩⟨0| + cos²θ |1⟩⟨1|`, `γ = cos θ`.
pub fn beam_splitter_params(theta: f64) -> LossChannelParams {
    let (s, c) = theta.sin_cos();
    LossChannelParams::new(
        ComplexMatrix::from_real_diagonal(&[s * s, c * c]),
        Complex64::new(c, 0.0),
    )
    .expect("beam-splitter parameters are always valid")
}

/// Splitter that is fully transmitting with probability `p` and fully
/// reflecting otherwise: `σ = p|1⟩⟨1| + (1−p)|0⟩⟨0|`, `γ = p`.
pub fn random_beam_splitter_params(p: f64) -> Result<LossChannelParams, ChannelError> {
    LossChannelParams::new(
        ComplexMatrix::from_real_diagonal(&[1.0 - p, p]),
        Complex64::new(p, 0.0),
    )
}

/// Measure the particle number; on one particle prepare `(|0⟩+|1⟩)/√2`.
pub fn measure_and_prepare_params() -> LossChannelParams {
    let half = Complex64::new(0.5, 0.0);
    LossChannelParams::new(ComplexMatrix::from_rows(&[[half, half], [half, half]]), Complex64::new(0.0, 0.0))
        .expect("measure-and-prepare parameters are valid")
}

impl LossChannelParams {
    /// Validates with the default tolerances (1e-10 on `σ`, 1e-12 on the
    /// positivity constraint).
    pub fn new(sigma: ComplexMatrix, gamma: Complex64) -> Result<Self, ChannelError> {
        Self::with_tolerance(sigma, gamma, STRUCTURAL_TOL, CONSTRAINT_TOL)
    }

    /// Validates with explicit tolerances; used when the parameters come from
    /// a numerical reconstruction.
    pub fn with_tolerance(
        sigma: ComplexMatrix,
        gamma: Complex64,
        density_tol: f64,
        constraint_tol: f64,
    ) -> Result<Self, ChannelError> {
        if sigma.rows() != 2 || sigma.cols() != 2 {
            return Err(ChannelError::DimensionMismatch {
                expected: 2,
                found: sigma.rows().max(sigma.cols()),
            });
        }
        if !gamma.is_finite() {
            return Err(ChannelError::GammaOutOfRange { modulus: f64::NAN });
        }
        let check = validate_density_operator(&sigma, density_tol);
        if !check.is_valid() {
            return Err(ChannelError::InvalidSigma {
                violations: check.violations,
            });
        }
        if gamma.norm() > 1.0 + constraint_tol {
            return Err(ChannelError::GammaOutOfRange {
                modulus: gamma.norm(),
            });
        }
        let params = LossChannelParams { sigma, gamma };
        let (lhs, rhs) = params.constraint_sides();
        if lhs > rhs + constraint_tol {
            return Err(ChannelError::PositivityConstraint { lhs, rhs });
        }
        Ok(params)
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// `σ₀₀`, the loss probability.
    pub fn sigma00(&self) -> f64 {
        self.sigma[(0, 0)].re
    }

    pub fn sigma01(&self) -> Complex64 {
        self.sigma[(0, 1)]
    }

    /// `(σ₀₀|γ|² + |σ₀₁|², σ₀₀(1 − σ₀₀))`.
    pub fn constraint_sides(&self) -> (f64, f64) {
        let s00 = self.sigma00();
        (
            s00 * self.gamma.norm_sqr() + self.sigma01().norm_sqr(),
            s00 * (1.0 - s00),
        )
    }

    /// `1 − σ₀₀ − |γ|²`.
    pub fn excess_coherence_loss(&self) -> f64 {
        1.0 - self.sigma00() - self.gamma.norm_sqr()
    }

    /// Direct evaluation of the channel on any 2x2 input.
    pub fn act(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        assert!(rho.rows() == 2 && rho.cols() == 2, "loss channel acts on 2x2 matrices");
        let mut out = self.sigma.scale(rho[(1, 1)]);
        out[(0, 0)] += rho[(0, 0)];
        out[(0, 1)] += self.gamma * rho[(0, 1)];
        out[(1, 0)] += self.gamma.conj() * rho[(1, 0)];
        out
    }

    /// Kraus form, extracted from the Choi matrix of [`Self::act`].
    pub fn to_channel(&self) -> Result<KrausChannel, ChannelError> {
        KrausChannel::from_action(2, |x| self.act(x))
    }
}

/// Builds the Kraus channel for validated `(σ, γ)`.
pub fn from_loss_params(params: &LossChannelParams) -> Result<KrausChannel, ChannelError> {
    params.to_channel()
}

/// Reads `(σ, γ)` back off a 2-dimensional channel: `σ = Φ(|1⟩⟨1|)`,
/// `γ = ⟨0|Φ(|0⟩⟨1|)|1⟩`.
pub fn loss_params_of(ch: &KrausChannel) -> Result<(ComplexMatrix, Complex64), ChannelError> {
    if ch.dim() != 2 {
        return Err(ChannelError::DimensionMismatch {
            expected: 2,
            found: ch.dim(),
        });
    }
    let sigma = ch.apply(&ComplexMatrix::unit(2, 1, 1))?;
    let gamma = ch.apply(&ComplexMatrix::unit(2, 0, 1))?[(0, 1)];
    Ok((sigma, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CHOI_RANK_TOL;
    use std::f64::consts::FRAC_PI_4;

    fn chi_projector() -> ComplexMatrix {
        measure_and_prepare_params().sigma().clone()
    }

    #[test]
    fn identity_params_give_identity_channel() {
        let p = LossChannelParams::new(ComplexMatrix::unit(2, 1, 1), Complex64::new(1.0, 0.0)).unwrap();
        let ch = from_loss_params(&p).unwrap();
        assert_eq!(ch.kraus_ops().len(), 1);
        let k = &ch.kraus_ops()[0];
        // Single Kraus operator equal to I up to a global phase.
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(k.max_abs_diff(&ComplexMatrix::identity(2).scale(phase)) < 1e-12);
    }

    #[test]
    fn kraus_form_reproduces_action_on_matrix_units() {
        let params = [
            beam_splitter_params(FRAC_PI_4),
            beam_splitter_params(1.1),
            measure_and_prepare_params(),
            random_beam_splitter_params(0.3).unwrap(),
            LossChannelParams::new(
                ComplexMatrix::from_rows(&[
                    [Complex64::new(0.4, 0.0), Complex64::new(0.1, 0.2)],
                    [Complex64::new(0.1, -0.2), Complex64::new(0.6, 0.0)],
                ]),
                Complex64::new(0.3, -0.4),
            )
            .unwrap(),
        ];
        for p in &params {
            let ch = from_loss_params(p).unwrap();
            assert!(ch.is_vacuum_preserving(1e-12));
            for i in 0..2 {
                for j in 0..2 {
                    let e = ComplexMatrix::unit(2, i, j);
                    assert!(ch.apply(&e).unwrap().max_abs_diff(&p.act(&e)) < 1e-10);
                }
            }
            let (sigma, gamma) = loss_params_of(&ch).unwrap();
            assert!(sigma.max_abs_diff(p.sigma()) < 1e-10);
            assert!((gamma - p.gamma()).norm() < 1e-10);
        }
    }

    #[test]
    fn choi_ranks_of_named_channels() {
        let bs = from_loss_params(&beam_splitter_params(FRAC_PI_4)).unwrap();
        assert_eq!(bs.kraus_ops().len(), 2);
        assert_eq!(bs.choi_rank(CHOI_RANK_TOL), 2);
        // Choi = |00⟩⟨00| + |1χ⟩⟨1χ|: two orthogonal rank-one terms.
        let mp = from_loss_params(&measure_and_prepare_params()).unwrap();
        assert_eq!(mp.choi_rank(CHOI_RANK_TOL), 2);
        assert_eq!(mp.kraus_ops().len(), 2);
    }

    #[test]
    fn measure_and_prepare_sits_on_the_constraint_boundary() {
        let p = measure_and_prepare_params();
        let (lhs, rhs) = p.constraint_sides();
        assert!((lhs - 0.25).abs() < 1e-15 && (rhs - 0.25).abs() < 1e-15);
    }

    #[test]
    fn too_much_coherence_is_rejected() {
        let err = LossChannelParams::new(chi_projector(), Complex64::new(0.9, 0.0)).unwrap_err();
        match err {
            ChannelError::PositivityConstraint { lhs, rhs } => {
                assert!((lhs - (0.5 * 0.81 + 0.25)).abs() < 1e-12);
                assert!((rhs - 0.25).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn other_invariant_violations() {
        assert!(matches!(
            LossChannelParams::new(ComplexMatrix::unit(2, 1, 1), Complex64::new(1.5, 0.0)),
            Err(ChannelError::GammaOutOfRange { .. })
        ));
        assert!(matches!(
            LossChannelParams::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5]), Complex64::new(0.0, 0.0)),
            Err(ChannelError::InvalidSigma { .. })
        ));
        assert!(matches!(
            LossChannelParams::new(ComplexMatrix::identity(3), Complex64::new(0.0, 0.0)),
            Err(ChannelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_schema() {
        let p = beam_splitter_params(0.0);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""gamma":[1.0,0.0]"#));
        let back: LossChannelParams = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"sigma":{"rows":2,"cols":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]},"gamma":[0.9,0]}"#;
        assert!(serde_json::from_str::<LossChannelParams>(bad).is_err());
    }
}
