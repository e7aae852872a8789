//! Tensor-factor bookkeeping and partial traces.

use serde::{Deserialize, Serialize};

use super::matrix::ComplexMatrix;
use super::LinalgError;

/// Dimensions (and optional names) of the tensor factors of a Hilbert space.
///
/// Factor 0 is the most significant under the flat-index convention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLabel {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl HilbertLabel {
    pub fn new(dims: &[usize]) -> Self {
        HilbertLabel {
            dims: dims.to_vec(),
            names: None,
        }
    }

    pub fn named(dims: &[usize], names: &[&str]) -> Self {
        HilbertLabel {
            dims: dims.to_vec(),
            names: Some(names.iter().map(|s| s.to_string()).collect()),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Index of the factor called `name`, if names were given.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.names.as_ref()?.iter().position(|n| n == name)
    }

    fn check(&self, m: &ComplexMatrix) -> Result<(), LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let valid_names = self.names.as_ref().is_none_or(|n| n.len() == self.dims.len());
        if self.dims.is_empty()
            || self.dims.contains(&0)
            || !valid_names
            || self.total_dim() != m.rows()
        {
            return Err(LinalgError::InconsistentLabel {
                dims: self.dims.clone(),
                matrix_dim: m.rows(),
            });
        }
        Ok(())
    }

    /// Splits a flat index into per-factor digits.
    fn digits(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
    }
}

/// Traces out every factor not listed in `keep`; the result is ordered by
/// ascending factor index.
pub fn partial_trace(
    m: &ComplexMatrix,
    label: &HilbertLabel,
    keep: &[usize],
) -> Result<ComplexMatrix, LinalgError> {
    label.check(m)?;
    if keep.is_empty() {
        return Err(LinalgError::EmptyKeepSet);
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= label.dims.len()) {
        return Err(LinalgError::FactorOutOfRange {
            factor: bad,
            factors: label.dims.len(),
        });
    }
    let traced: Vec<usize> = (0..label.dims.len()).filter(|k| !kept.contains(k)).collect();
    let kept_dim: usize = kept.iter().map(|&k| label.dims[k]).product();

    let n = m.rows();
    let factors = label.dims.len();
    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    let mut di = vec![0usize; factors];
    let mut dj = vec![0usize; factors];
    let reduced_index = |digits: &[usize]| {
        kept.iter()
            .fold(0usize, |acc, &k| acc * label.dims[k] + digits[k])
    };
    for i in 0..n {
        label.digits(i, &mut di);
        let ri = reduced_index(&di);
        for j in 0..n {
            label.digits(j, &mut dj);
            if traced.iter().all(|&t| di[t] == dj[t]) {
                out[(ri, reduced_index(&dj))] += m[(i, j)];
            }
        }
    }
    Ok(out)
}
