//! Vacuum-preserving channels on the vacuum ⊕ single-particle space.

mod dilation;
mod functionals;
mod interferometer;
mod kraus;
mod loss;

use thiserror::Error;

use crate::linalg::{DensityViolation, LinalgError};

pub use dilation::{
    channel_from_dilation, constrained_dilation, random_psi_perp, random_vacuum_preserving_channel,
    random_vacuum_preserving_channel_with,
};
pub use functionals::{
    check_exclusion_inequality, lpc, lpc_with_tol, validate_psi_perp, LpcReport, INEQUALITY_TOL,
    ZERO_LOSS_CREATION_TOL, ZERO_LOSS_TOL,
};
pub use interferometer::{
    analytic_maximizer, fit_fringe, fringe, interference_amplitude, mach_zehnder_closed_form,
    max_visibility_scan, simulate_mach_zehnder, FringeFit, ScanResult, VisibilityScan, GAIN_TOL,
};
pub use kraus::{choi_from_action, KrausChannel, CHOI_RANK_TOL};
pub use loss::{
    beam_splitter_params, from_loss_params, loss_params_of, measure_and_prepare_params,
    random_beam_splitter_params, LossChannelParams, CONSTRAINT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("channel needs at least one Kraus operator")]
    NoKrausOperators,
    #[error("Kraus operator is {rows}x{cols}, expected {dim}x{dim}")]
    KrausShape { dim: usize, rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not trace preserving (max |ΣK†K - I| = {deviation:e})")]
    NotTracePreserving { deviation: f64 },
    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("channel is not vacuum preserving (max |Φ(|0⟩⟨0|) - |0⟩⟨0|| = {deviation:e})")]
    NotVacuumPreserving { deviation: f64 },
    #[error("sigma is not a density operator: {violations:?}")]
    InvalidSigma { violations: Vec<DensityViolation> },
    #[error("|gamma| = {modulus} exceeds 1")]
    GammaOutOfRange { modulus: f64 },
    #[error("constraint violated: sigma00|gamma|^2 + |sigma01|^2 = {lhs} > sigma00(1 - sigma00) = {rhs}")]
    PositivityConstraint { lhs: f64, rhs: f64 },
    #[error("psi is not normalized (norm {norm})")]
    PsiNotNormalized { norm: f64 },
    #[error("psi is not orthogonal to the vacuum (|⟨0|psi⟩| = {overlap:e})")]
    PsiNotOrthogonal { overlap: f64 },
    #[error("loss has imaginary part {imag:e}")]
    ComplexLoss { imag: f64 },
    #[error("operator is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("channel output leaves the single-particle sector (population {population:e})")]
    GainDetected { population: f64 },
    #[error("invalid mixture weights: {reason}")]
    BadWeights { reason: String },
    #[error("invalid visibility scan: {reason}")]
    BadScan { reason: String },
}
