//! Dense complex linear algebra on small Hilbert spaces.
//!
//! Flat-index convention: `|i⟩⊗|k⟩` maps to `i * dim_b + k` (left factor most
//! significant). Every module in the crate relies on it.

mod decomp;
mod density;
mod matrix;
pub mod random;
mod tensor;

use num_complex::Complex64;
use thiserror::Error;

pub use decomp::{
    hermitian_eigensystem, hermitian_eigenvalues, operator_norm, svd, unitary_propagator,
    Eigensystem, Svd, HERMITIAN_TOL,
};
pub use density::{validate_density_operator, DensityCheck, DensityViolation};
pub use matrix::{tensor_product, ComplexMatrix, DEFAULT_DIMENSION_CAP};
pub use tensor::{partial_trace, HilbertLabel};

/// Structural tolerance (Hermiticity, unitarity, trace preservation).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Spectral reconstruction tolerance.
pub const SPECTRAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix shape must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("{op}: shapes {left:?} and {right:?} are incompatible")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("result {rows}x{cols} exceeds dimension cap {cap}")]
    DimensionCap { rows: usize, cols: usize, cap: usize },
    #[error("label dims {dims:?} do not describe a {matrix_dim}-dimensional matrix")]
    InconsistentLabel { dims: Vec<usize>, matrix_dim: usize },
    #[error("partial trace needs at least one kept factor")]
    EmptyKeepSet,
    #[error("factor {factor} out of range for {factors} factors")]
    FactorOutOfRange { factor: usize, factors: usize },
    #[error("matrix is not Hermitian (max |m - m†| = {deviation:e})")]
    NotHermitian { deviation: f64 },
}

/// Orthonormalizes `columns` in order (two passes of modified Gram-Schmidt),
/// drops numerically dependent ones and pads with standard basis vectors
/// until an `n x n` unitary is obtained.
pub(crate) fn gram_schmidt_complete(n: usize, columns: Vec<Vec<Complex64>>) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let candidates = columns
        .into_iter()
        .chain((0..n).map(|k| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[k] = Complex64::new(1.0, 0.0);
            e
        }));
    for mut v in candidates {
        if basis.len() == n {
            break;
        }
        debug_assert_eq!(v.len(), n);
        let original = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _ in 0..2 {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if original == 0.0 || norm <= 1e-10 * original.max(1.0) {
            continue;
        }
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (j, col) in basis.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            out[(i, j)] = z;
        }
    }
    out
}
