use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, STRUCTURAL_TOL};

/// Eigenvalues of a Choi matrix at or below this value are treated as zero
/// when extracting Kraus operators or counting rank.
pub const CHOI_RANK_TOL: f64 = 1e-10;

/// A completely positive trace-preserving map in operator-sum form on a
/// `dim`-dimensional space; index 0 is the vacuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRepr {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl TryFrom<ChannelRepr> for KrausChannel {
    type Error = ChannelError;

    fn try_from(repr: ChannelRepr) -> Result<Self, ChannelError> {
        let ch = KrausChannel::new(repr.kraus)?;
        if ch.dim != repr.dim {
            return Err(ChannelError::DimensionMismatch {
                expected: repr.dim,
                found: ch.dim,
            });
        }
        Ok(ch)
    }
}

impl From<KrausChannel> for ChannelRepr {
    fn from(ch: KrausChannel) -> Self {
        ChannelRepr {
            dim: ch.dim,
            kraus: ch.kraus,
        }
    }
}

impl KrausChannel {
    /// Validates shapes and trace preservation (`Σ K†K = I` to 1e-10).
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::NoKrausOperators)?;
        let dim = first.rows();
        for k in &kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(ChannelError::KrausShape {
                    dim,
                    rows: k.rows(),
                    cols: k.cols(),
                });
            }
        }
        let ch = KrausChannel { dim, kraus };
        let deviation = ch.trace_preservation_deviation();
        if deviation > STRUCTURAL_TOL {
            return Err(ChannelError::NotTracePreserving { deviation });
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<Self, ChannelError> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Largest entry of `Σ K†K - I`.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            sum.add_scaled(Complex64::new(1.0, 0.0), &(&k.adjoint() * k));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ K x K†`, for any (not necessarily Hermitian) `x`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(ChannelError::DimensionMismatch {
                expected: self.dim,
                found: x.rows().max(x.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out.add_scaled(Complex64::new(1.0, 0.0), &(&(k * x) * &k.adjoint()));
        }
        Ok(out)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input factor first, unnormalized).
    pub fn choi(&self) -> ComplexMatrix {
        let dim = self.dim;
        choi_from_action(dim, |x| self.apply(x).expect("matrix unit has channel dimension"))
    }

    /// Number of Choi eigenvalues above `tol`.
    pub fn choi_rank(&self, tol: f64) -> usize {
        hermitian_eigensystem(&self.choi())
            .expect("Choi matrix of a Kraus map is Hermitian")
            .values
            .iter()
            .filter(|&&v| v > tol)
            .count()
    }

    pub fn choi_min_eigenvalue(&self) -> f64 {
        hermitian_eigensystem(&self.choi())
            .expect("Choi matrix of a Kraus map is Hermitian")
            .values[0]
    }

    /// Kraus form of a linear map given by its Choi matrix.
    ///
    /// Eigenvectors with eigenvalue above [`CHOI_RANK_TOL`] become Kraus
    /// operators, so the operator count equals the numerical Choi rank.
    pub fn from_choi(dim: usize, choi: &ComplexMatrix) -> Result<Self, ChannelError> {
        if choi.rows() != dim * dim || choi.cols() != dim * dim {
            return Err(ChannelError::DimensionMismatch {
                expected: dim * dim,
                found: choi.rows(),
            });
        }
        let eig = hermitian_eigensystem(choi)?;
        if eig.values[0] < -CHOI_RANK_TOL {
            return Err(ChannelError::NotCompletelyPositive {
                min_eigenvalue: eig.values[0],
            });
        }
        let mut kraus = Vec::new();
        for (col, &lambda) in eig.values.iter().enumerate().rev() {
            if lambda <= CHOI_RANK_TOL {
                continue;
            }
            let weight = lambda.sqrt();
            let mut k = ComplexMatrix::zeros(dim, dim);
            for input in 0..dim {
                for output in 0..dim {
                    k[(output, input)] = eig.vectors[(input * dim + output, col)] * weight;
                }
            }
            kraus.push(k);
        }
        Self::new(kraus)
    }

    /// Channel for the linear map `action`, via its Choi matrix.
    pub fn from_action(
        dim: usize,
        action: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self, ChannelError> {
        Self::from_choi(dim, &choi_from_action(dim, action))
    }

    /// `Φ(|0⟩⟨0|) = |0⟩⟨0|` up to `tol` (largest entry).
    pub fn vacuum_deviation(&self) -> f64 {
        let vac = ComplexMatrix::unit(self.dim, 0, 0);
        self.apply(&vac).expect("dimension").max_abs_diff(&vac)
    }

    pub fn is_vacuum_preserving(&self, tol: f64) -> bool {
        self.vacuum_deviation() <= tol
    }

    /// `Σ w_i Φ_i` with Kraus lists scaled by `√w_i`.
    pub fn convex_mixture(channels: &[KrausChannel], weights: &[f64]) -> Result<Self, ChannelError> {
        if channels.is_empty() || channels.len() != weights.len() {
            return Err(ChannelError::BadWeights {
                reason: format!("{} channels, {} weights", channels.len(), weights.len()),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(ChannelError::BadWeights {
                reason: format!("negative or non-finite weight {w}"),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ChannelError::BadWeights {
                reason: format!("weights sum to {total}"),
            });
        }
        let dim = channels[0].dim;
        let mut kraus = Vec::new();
        for (ch, &w) in channels.iter().zip(weights) {
            if ch.dim != dim {
                return Err(ChannelError::DimensionMismatch {
                    expected: dim,
                    found: ch.dim,
                });
            }
            if w == 0.0 {
                continue;
            }
            kraus.extend(ch.kraus.iter().map(|k| k.scale_real(w.sqrt())));
        }
        Self::new(kraus)
    }
}

/// Choi matrix of an arbitrary linear map on `dim x dim` matrices.
pub fn choi_from_action(dim: usize, action: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut choi = ComplexMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let image = action(&ComplexMatrix::unit(dim, i, j));
            for k in 0..dim {
                for l in 0..dim {
                    choi[(i * dim + k, j * dim + l)] = image[(k, l)];
                }
            }
        }
    }
    choi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, HilbertLabel};

    #[test]
    fn identity_choi_is_omega_projector() {
        let choi = KrausChannel::identity(2).choi();
        let mut omega = ComplexMatrix::zeros(4, 1);
        omega[(0, 0)] = Complex64::new(1.0, 0.0);
        omega[(3, 0)] = Complex64::new(1.0, 0.0);
        assert!(choi.max_abs_diff(&ComplexMatrix::projector(&omega)) < 1e-15);
        assert!((choi.trace().re - 2.0).abs() < 1e-15);
        assert_eq!(KrausChannel::identity(2).choi_rank(CHOI_RANK_TOL), 1);
    }

    #[test]
    fn reset_to_vacuum_choi_is_product() {
        let d = 3;
        let kraus = (0..d).map(|i| ComplexMatrix::unit(d, 0, i)).collect();
        let reset = KrausChannel::new(kraus).unwrap();
        let expected = ComplexMatrix::identity(d).kron(&ComplexMatrix::unit(d, 0, 0));
        assert!(reset.choi().max_abs_diff(&expected) < 1e-15);
        let input_marginal =
            partial_trace(&reset.choi(), &HilbertLabel::new(&[d, d]), &[0]).unwrap();
        assert!(input_marginal.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(KrausChannel::new(vec![]), Err(ChannelError::NoKrausOperators)));
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(ChannelError::NotTracePreserving { .. })
        ));
        let bad_shape = vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(3, 3)];
        assert!(matches!(KrausChannel::new(bad_shape), Err(ChannelError::KrausShape { .. })));
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let ch = KrausChannel::identity(2);
        assert!(ch.apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn bit_flip_is_not_vacuum_preserving() {
        let flip = KrausChannel::unitary(ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]))
            .unwrap();
        assert!(!flip.is_vacuum_preserving(1e-10));
        assert!(KrausChannel::identity(2).is_vacuum_preserving(1e-10));
    }

    #[test]
    fn non_cp_map_is_rejected() {
        // Transpose map is positive but not completely positive.
        let err = KrausChannel::from_action(2, |x| x.transpose()).unwrap_err();
        assert!(matches!(err, ChannelError::NotCompletelyPositive { .. }));
    }

    #[test]
    fn mixture_weight_errors() {
        let id = KrausChannel::identity(2);
        assert!(KrausChannel::convex_mixture(&[id.clone()], &[0.5]).is_err());
        assert!(KrausChannel::convex_mixture(&[id.clone(), id.clone()], &[1.5, -0.5]).is_err());
        assert!(KrausChannel::convex_mixture(&[id.clone(), KrausChannel::identity(3)], &[0.5, 0.5]).is_err());
        let same = KrausChannel::convex_mixture(&[id.clone(), id], &[0.3, 0.7]).unwrap();
        let x = ComplexMatrix::unit(2, 1, 0);
        assert!(same.apply(&x).unwrap().max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn json_round_trip_and_dim_check() {
        let ch = KrausChannel::identity(2);
        let json = serde_json::to_string(&ch).unwrap();
        assert!(json.starts_with(r#"{"dim":2,"kraus":[{"rows":2"#));
        let back: KrausChannel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ch);
        let wrong = json.replacen(r#""dim":2"#, r#""dim":3"#, 1);
        assert!(serde_json::from_str::<KrausChannel>(&wrong).is_err());
    }
}
