//! Mach-Zehnder interferometer with the probed channel in path A and a
//! unitary plus phase shift in path B.
//!
//! Each path carries a `(1 + d)`-dimensional mode space (vacuum plus `d`
//! internal single-particle states); the joint space is `(1+d) ⊗ (1+d)`
//! with path A as the left factor. The splitter acts on the at-most-one
//! particle sector as
//!
//! ```text
//! |k,0⟩ → (|k,0⟩ + |0,k⟩)/√2,   |0,k⟩ → (|k,0⟩ − |0,k⟩)/√2,   |0,0⟩ → |0,0⟩
//! ```
//!
//! and as the identity on the (unpopulated) two-particle sector.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::{validate_psi_perp, ChannelError, KrausChannel};
use crate::channel::lpc;
use crate::linalg::random::{haar_unitary, seeded_rng};
use crate::linalg::{gram_schmidt_complete, ComplexMatrix, STRUCTURAL_TOL};

/// Two-particle population above this signals a channel with gain.
pub const GAIN_TOL: f64 = 1e-10;

fn splitter(dim: usize) -> ComplexMatrix {
    let n = dim * dim;
    let mut b = ComplexMatrix::identity(n);
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    for k in 1..dim {
        let a_k = k * dim; // |k⟩_A |0⟩_B
        let b_k = k; // |0⟩_A |k⟩_B
        b[(a_k, a_k)] = s;
        b[(b_k, a_k)] = s;
        b[(a_k, b_k)] = s;
        b[(b_k, b_k)] = -s;
    }
    b
}

/// `|0⟩⟨0| ⊕ e^{iχ} U` on the path-B mode space.
fn path_b_operator(u: &ComplexMatrix, chi: f64) -> ComplexMatrix {
    let dim = u.rows() + 1;
    let phase = Complex64::from_polar(1.0, chi);
    let mut out = ComplexMatrix::zeros(dim, dim);
    out[(0, 0)] = Complex64::new(1.0, 0.0);
    for i in 0..u.rows() {
        for j in 0..u.cols() {
            out[(i + 1, j + 1)] = phase * u[(i, j)];
        }
    }
    out
}

fn check_inputs(ch: &KrausChannel, psi: &ComplexMatrix, u: &ComplexMatrix) -> Result<(), ChannelError> {
    let deviation = ch.vacuum_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(ChannelError::NotVacuumPreserving { deviation });
    }
    validate_psi_perp(psi, ch.dim())?;
    if u.rows() + 1 != ch.dim() || !u.is_square() {
        return Err(ChannelError::DimensionMismatch {
            expected: ch.dim() - 1,
            found: u.rows(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > STRUCTURAL_TOL {
        return Err(ChannelError::NotUnitary { deviation });
    }
    Ok(())
}

/// Probability to detect the particle in path A, from a full simulation of
/// both paths.
pub fn simulate_mach_zehnder(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    u: &ComplexMatrix,
    chi: f64,
) -> Result<f64, ChannelError> {
    check_inputs(ch, psi, u)?;
    let dim = ch.dim();
    let b = splitter(dim);

    let input = psi.kron(&ComplexMatrix::basis(dim, 0));
    let after_split = &b * &input;
    let rho = ComplexMatrix::projector(&after_split);

    let path_b = path_b_operator(u, chi);
    let mut rho_out = ComplexMatrix::zeros(dim * dim, dim * dim);
    for k in ch.kraus_ops() {
        let joint = k.kron(&path_b);
        rho_out.add_scaled(Complex64::new(1.0, 0.0), &(&(&joint * &rho) * &joint.adjoint()));
    }

    let leak: f64 = (1..dim)
        .flat_map(|a| (1..dim).map(move |bb| a * dim + bb))
        .map(|i| rho_out[(i, i)].re)
        .sum();
    if leak > GAIN_TOL {
        return Err(ChannelError::GainDetected { population: leak });
    }

    let rho_final = &(&b * &rho_out) * &b.adjoint();
    Ok((1..dim).map(|k| rho_final[(k * dim, k * dim)].re).sum())
}

/// `F = ⟨ψ⊥|U† Φ(|ψ⊥⟩⟨0|)|0⟩`, with `U` acting on the internal states.
pub fn interference_amplitude(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    u: &ComplexMatrix,
) -> Result<Complex64, ChannelError> {
    let dim = ch.dim();
    let out = ch.apply(&ComplexMatrix::outer(psi, &ComplexMatrix::basis(dim, 0)))?;
    let internal_psi = psi.block(1, 0, dim - 1, 1);
    let rotated = u * &internal_psi;
    let coherence = out.block(1, 0, dim - 1, 1);
    Ok(rotated.inner(&coherence))
}

/// `p_A(χ) = 1/2 − L/4 + |F| cos(arg F − χ)/2`.
pub fn mach_zehnder_closed_form(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    u: &ComplexMatrix,
    chi: f64,
) -> Result<f64, ChannelError> {
    check_inputs(ch, psi, u)?;
    let loss = lpc(ch, psi)?.loss;
    let f = interference_amplitude(ch, psi, u)?;
    Ok(0.5 - 0.25 * loss + 0.5 * f.norm() * (f.arg() - chi).cos())
}

/// First-harmonic fit of a fringe sampled on a uniform `χ` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeFit {
    /// Half the peak-to-peak amplitude.
    pub visibility: f64,
    /// Mean detection probability.
    pub offset: f64,
    /// Phase `χ` of the fringe maximum, in `[-π, π]`.
    pub best_phase: f64,
}

/// Samples `p_A` at `χ_j = 2πj/n` for `j < n`.
pub fn fringe(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    u: &ComplexMatrix,
    n_chi: usize,
) -> Result<Vec<(f64, f64)>, ChannelError> {
    (0..n_chi)
        .map(|j| {
            let chi = TAU * j as f64 / n_chi as f64;
            simulate_mach_zehnder(ch, psi, u, chi).map(|p| (chi, p))
        })
        .collect()
}

/// Exact for `p(χ) = c + A cos(χ − φ)` sampled on a uniform grid of at least
/// three points.
pub fn fit_fringe(samples: &[(f64, f64)]) -> FringeFit {
    let n = samples.len() as f64;
    let offset = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let a = 2.0 / n * samples.iter().map(|(chi, p)| p * chi.cos()).sum::<f64>();
    let b = 2.0 / n * samples.iter().map(|(chi, p)| p * chi.sin()).sum::<f64>();
    FringeFit {
        visibility: a.hypot(b),
        offset,
        best_phase: b.atan2(a),
    }
}

/// Unitary on the internal states taking `ψ⊥` to the direction of
/// `P⊥ Φ(|ψ⊥⟩⟨0|)|0⟩`; the identity if that vector vanishes.
pub fn analytic_maximizer(ch: &KrausChannel, psi: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
    let dim = ch.dim();
    let d = dim - 1;
    let out = ch.apply(&ComplexMatrix::outer(psi, &ComplexMatrix::basis(dim, 0)))?;
    let target: Vec<Complex64> = (1..dim).map(|i| out[(i, 0)]).collect();
    let target_norm = target.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if target_norm <= 1e-14 {
        return Ok(ComplexMatrix::identity(d));
    }
    let source: Vec<Complex64> = (1..dim).map(|i| psi[(i, 0)]).collect();
    let target: Vec<Complex64> = target.into_iter().map(|z| z / target_norm).collect();
    let from = gram_schmidt_complete(d, vec![source]);
    let to = gram_schmidt_complete(d, vec![target]);
    Ok(&to * &from.adjoint())
}

/// Options for [`max_visibility_scan`].
#[derive(Debug, Clone, Copy)]
pub struct VisibilityScan {
    pub n_unitaries: usize,
    pub n_chi: usize,
    pub seed: u64,
    pub include_analytic: bool,
}

impl Default for VisibilityScan {
    fn default() -> Self {
        VisibilityScan {
            n_unitaries: 500,
            n_chi: 16,
            seed: 0,
            include_analytic: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub fit: FringeFit,
    pub best_unitary: ComplexMatrix,
}

/// Largest fringe visibility over candidate path-B unitaries (the analytic
/// maximizer, if requested, plus seeded Haar-random ones).
pub fn max_visibility_scan(
    ch: &KrausChannel,
    psi: &ComplexMatrix,
    opts: &VisibilityScan,
) -> Result<ScanResult, ChannelError> {
    if opts.n_chi < 3 {
        return Err(ChannelError::BadScan {
            reason: format!("need at least 3 phase samples, got {}", opts.n_chi),
        });
    }
    let d = ch.dim() - 1;
    let mut candidates = Vec::with_capacity(opts.n_unitaries + 1);
    if opts.include_analytic {
        candidates.push(analytic_maximizer(ch, psi)?);
    }
    let mut rng = seeded_rng(opts.seed);
    candidates.extend((0..opts.n_unitaries).map(|_| haar_unitary(&mut rng, d)));
    if candidates.is_empty() {
        candidates.push(ComplexMatrix::identity(d));
    }

    let mut best: Option<ScanResult> = None;
    for u in candidates {
        let fit = fit_fringe(&fringe(ch, psi, &u, opts.n_chi)?);
        if best.as_ref().is_none_or(|b| fit.visibility > b.fit.visibility) {
            best = Some(ScanResult { fit, best_unitary: u });
        }
    }
    Ok(best.expect("at least one candidate"))
}
