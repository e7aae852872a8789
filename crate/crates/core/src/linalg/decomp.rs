//! Spectral decompositions of small dense matrices.
//!
//! Backed by `nalgebra`'s Hermitian eigensolver and SVD. Results are
//! re-sorted and the SVD factors completed to full unitaries, which
//! `nalgebra` does not do for rectangular input.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::{gram_schmidt_complete, LinalgError};

/// Hermiticity tolerance accepted by [`hermitian_eigensystem`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// `V diag(f(λ)) V†`.
    pub fn map_values(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let factor = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= factor;
            }
        }
        &scaled * &self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| Complex64::new(x, 0.0))
    }
}

/// `m = U diag(d) W†` with `U`, `W` square unitaries and `d` nonincreasing.
///
/// `d` has `min(rows, cols)` entries; `U` is `rows x rows`, `W` is `cols x cols`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub w: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (rows, cols) = (self.u.rows(), self.w.rows());
        let mut d = ComplexMatrix::zeros(rows, cols);
        for (l, &s) in self.singular_values.iter().enumerate() {
            d[(l, l)] = Complex64::new(s, 0.0);
        }
        &(&self.u * &d) * &self.w.adjoint()
    }
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Eigen-decomposition of a Hermitian matrix.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }
    // Feed the exactly Hermitian part so the solver sees a consistent input.
    let eig = to_nalgebra(&m.hermitian_part()).symmetric_eigen();
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let n = m.rows();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = eig.eigenvectors[(i, src)];
        }
    }
    Ok(Eigensystem {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    hermitian_eigensystem(m).map(|e| e.values)
}

/// Full singular value decomposition.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = (m.rows(), m.cols());
    let k = rows.min(cols);
    let decomposition = to_nalgebra(m).svd(true, true);
    let thin_u = decomposition.u.as_ref().expect("U requested");
    let thin_vt = decomposition.v_t.as_ref().expect("V^T requested");

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        decomposition.singular_values[b].total_cmp(&decomposition.singular_values[a])
    });

    let mut u_cols = Vec::with_capacity(rows);
    let mut w_cols = Vec::with_capacity(cols);
    for &l in &order {
        u_cols.push((0..rows).map(|i| thin_u[(i, l)]).collect::<Vec<_>>());
        // v_t rows are the conjugated right singular vectors.
        w_cols.push((0..cols).map(|j| thin_vt[(l, j)].conj()).collect::<Vec<_>>());
    }
    let u = gram_schmidt_complete(rows, u_cols);
    let w = gram_schmidt_complete(cols, w_cols);

    Svd {
        u,
        singular_values: order
            .iter()
            .map(|&l| decomposition.singular_values[l].max(0.0))
            .collect(),
        w,
    }
}

/// Largest singular value.
///
/// A single nonzero column reduces to that column's Euclidean norm, which is
/// taken directly.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let nonzero_cols: Vec<usize> = (0..m.cols())
        .filter(|&j| (0..m.rows()).any(|i| m[(i, j)] != ZERO))
        .collect();
    match nonzero_cols.as_slice() {
        [] => 0.0,
        [j] => m.column_at(*j).vector_norm(),
        _ => svd(m).singular_values.first().copied().unwrap_or(0.0),
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = hermitian_eigensystem(h)?;
    Ok(eig.map_values(|e| Complex64::from_polar(1.0, -e * t)))
}
