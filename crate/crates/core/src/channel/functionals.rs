//! Loss, preservation and creation of vacuum/particle coherence.
//!
//! For a vacuum-preserving channel `Φ` and a unit vector `|ψ⊥⟩ ⊥ |0⟩`:
//!
//! * loss `L = ⟨0|Φ(|ψ⊥⟩⟨ψ⊥|)|0⟩`
//! * preservation `P = ‖P⊥ Φ(|ψ⊥⟩⟨0|) |0⟩‖`
//! * creation `C = ‖P⊥ Φ(|ψ⊥⟩⟨ψ⊥|) |0⟩‖`
//!
//! and they obey `L·P² + C² ≤ L(1 − L)`. Because the vacuum projector has
//! rank one, the operator norms reduce to Euclidean norms of the vacuum
//! column.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ChannelError, KrausChannel};
use crate::linalg::{ComplexMatrix, STRUCTURAL_TOL};

/// Absolute tolerance on the exclusion inequality.
pub const INEQUALITY_TOL: f64 = 1e-9;
/// Loss below which the zero-loss corollary is enforced.
pub const ZERO_LOSS_TOL: f64 = 1e-9;
/// Largest creation accepted when the loss vanishes.
pub const ZERO_LOSS_CREATION_TOL: f64 = 1e-4;

const LOSS_IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpcReport {
    pub loss: f64,
    pub preservation: f64,
    pub creation: f64,
    /// `1 − σ₀₀ − |γ|²`; only defined for 2-dimensional channels.
    pub excess_coherence_loss: Option<f64>,
    /// `L(1 − L) − L·P² − C²`.
    pub inequality_slack: f64,
}

impl LpcReport {
    /// Builds a report from raw values, computing the slack.
    pub fn from_values(loss: f64, preservation: f64, creation: f64) -> Self {
        LpcReport {
            loss,
            preservation,
            creation,
            excess_coherence_loss: None,
            inequality_slack: loss * (1.0 - loss)
                - loss * preservation * preservation
                - creation * creation,
        }
    }
}

/// Checks that `psi` is a unit column vector orthogonal to the vacuum.
pub fn validate_psi_perp(psi: &ComplexMatrix, dim: usize) -> Result<(), ChannelError> {
    if psi.cols() != 1 || psi.rows() != dim {
        return Err(ChannelError::DimensionMismatch {
            expected: dim,
            found: psi.rows(),
        });
    }
    let overlap = psi[(0, 0)].norm();
    if overlap > STRUCTURAL_TOL {
        return Err(ChannelError::PsiNotOrthogonal { overlap });
    }
    let norm = psi.vector_norm();
    if (norm - 1.0).abs() > STRUCTURAL_TOL {
        return Err(ChannelError::PsiNotNormalized { norm });
    }
    Ok(())
}

/// Euclidean norm of `P⊥ x |0⟩`: the vacuum column without its vacuum entry.
fn off_vacuum_column_norm(x: &ComplexMatrix) -> f64 {
    (1..x.rows()).map(|i| x[(i, 0)].norm_sqr()).sum::<f64>().sqrt()
}

/// Loss/preservation/creation report for `ch` and `psi` (vacuum tolerance 1e-10).
pub fn lpc(ch: &KrausChannel, psi: &ComplexMatrix) -> Result<LpcReport, ChannelError> {
    lpc_with_tol(ch, psi, STRUCTURAL_TOL)
}

pub fn lpc_with_tol(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    vacuum_tol: f64,
) -> Result<LpcReport, ChannelError> {
    let deviation = ch.vacuum_deviation();
    if deviation > vacuum_tol {
        return Err(ChannelError::NotVacuumPreserving { deviation });
    }
    validate_psi_perp(psi, ch.dim())?;

    let vac = ComplexMatrix::basis(ch.dim(), 0);
    let particle_out = ch.apply(&ComplexMatrix::projector(psi))?;
    let coherence_out = ch.apply(&ComplexMatrix::outer(psi, &vac))?;

    let loss_c: Complex64 = particle_out[(0, 0)];
    if loss_c.im.abs() > LOSS_IMAG_TOL {
        return Err(ChannelError::ComplexLoss { imag: loss_c.im });
    }
    let mut report = LpcReport::from_values(
        loss_c.re,
        off_vacuum_column_norm(&coherence_out),
        off_vacuum_column_norm(&particle_out),
    );
    if ch.dim() == 2 {
        let sigma00 = ch.apply(&ComplexMatrix::unit(2, 1, 1))?[(0, 0)].re;
        let gamma = ch.apply(&ComplexMatrix::unit(2, 0, 1))?[(0, 1)];
        report.excess_coherence_loss = Some(1.0 - sigma00 - gamma.norm_sqr());
    }
    Ok(report)
}

/// `L·P² + C² ≤ L(1 − L)` to [`INEQUALITY_TOL`], plus `C ≤ 1e-4` whenever `L ≤ 1e-9`.
pub fn check_exclusion_inequality(report: &LpcReport) -> bool {
    let lhs = report.loss * report.preservation.powi(2) + report.creation.powi(2);
    let rhs = report.loss * (1.0 - report.loss);
    let inequality = lhs <= rhs + INEQUALITY_TOL;
    let corollary = report.loss > ZERO_LOSS_TOL || report.creation <= ZERO_LOSS_CREATION_TOL;
    inequality && corollary
}
