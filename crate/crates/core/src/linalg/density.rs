use serde::Serialize;

use super::decomp::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;

/// A density-operator condition that failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityViolation {
    NotSquare,
    NotHermitian { deviation: f64 },
    TraceNotOne { trace_re: f64, trace_im: f64 },
    Negative { min_eigenvalue: f64 },
}

/// Outcome of [`validate_density_operator`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCheck {
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: Option<f64>,
    pub violations: Vec<DensityViolation>,
}

impl DensityCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks Hermiticity, unit trace and positivity, each to `tol`.
///
/// Positivity is only evaluated for (near-)Hermitian input.
pub fn validate_density_operator(m: &ComplexMatrix, tol: f64) -> DensityCheck {
    if !m.is_square() {
        return DensityCheck {
            hermiticity_deviation: f64::INFINITY,
            min_eigenvalue: None,
            violations: vec![DensityViolation::NotSquare],
        };
    }
    let mut violations = Vec::new();
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        violations.push(DensityViolation::NotHermitian { deviation });
    }
    let trace = m.trace();
    if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
        violations.push(DensityViolation::TraceNotOne {
            trace_re: trace.re,
            trace_im: trace.im,
        });
    }
    let min_eigenvalue = if deviation <= super::decomp::HERMITIAN_TOL {
        hermitian_eigenvalues(m).ok().and_then(|v| v.first().copied())
    } else {
        hermitian_eigenvalues(&m.hermitian_part())
            .ok()
            .and_then(|v| v.first().copied())
    };
    if let Some(min) = min_eigenvalue {
        if min < -tol {
            violations.push(DensityViolation::Negative { min_eigenvalue: min });
        }
    }
    DensityCheck {
        hermiticity_deviation: deviation,
        min_eigenvalue,
        violations,
    }
}
