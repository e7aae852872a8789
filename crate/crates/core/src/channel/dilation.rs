//! Random vacuum-preserving channels from constrained Stinespring dilations.
//!
//! The system (dimension `1 + d`) is coupled to an ancilla of dimension
//! `anc` prepared in `|a⟩ = |0⟩_a`. The joint unitary `𝕌` has its column
//! for `|0, a⟩` pinned to `|0⟩ ⊗ |a₀⟩` with a random unit `|a₀⟩`; the rest is
//! a Gram-Schmidt completion of seeded complex Gaussian columns. Tracing out
//! the ancilla gives Kraus operators `K_b = (1 ⊗ ⟨b|) 𝕌 (1 ⊗ |a⟩)`.

use num_complex::Complex64;
use rand::Rng;

use super::KrausChannel;
use crate::linalg::random::{complete_unitary, random_unit_vector, seeded_rng};
use crate::linalg::ComplexMatrix;

/// Joint unitary on `(1 + d) ⊗ anc` with `𝕌|0, 0⟩ = |0⟩ ⊗ |a₀⟩`.
pub fn constrained_dilation<R: Rng + ?Sized>(rng: &mut R, d: usize, anc: usize) -> ComplexMatrix {
    let n = (1 + d) * anc;
    let a0 = random_unit_vector(rng, anc);
    let mut pinned = vec![Complex64::new(0.0, 0.0); n];
    // |0⟩_sys ⊗ |a₀⟩ occupies flat indices 0..anc.
    pinned[..anc].copy_from_slice(&a0);
    complete_unitary(rng, n, vec![pinned])
}

/// Kraus operators of `ρ ↦ Tr_a(𝕌 ρ⊗|0⟩⟨0| 𝕌†)`.
pub fn channel_from_dilation(u: &ComplexMatrix, sys_dim: usize, anc: usize) -> KrausChannel {
    assert_eq!(u.rows(), sys_dim * anc, "dilation dimension mismatch");
    let kraus = (0..anc)
        .map(|b| {
            let mut k = ComplexMatrix::zeros(sys_dim, sys_dim);
            for out in 0..sys_dim {
                for inp in 0..sys_dim {
                    k[(out, inp)] = u[(out * anc + b, inp * anc)];
                }
            }
            k
        })
        .collect();
    KrausChannel::new(kraus).expect("isometry columns give a trace-preserving map")
}

/// Seeded random vacuum-preserving channel on `1 + d` dimensions.
pub fn random_vacuum_preserving_channel(d: usize, anc: usize, seed: u64) -> KrausChannel {
    random_vacuum_preserving_channel_with(&mut seeded_rng(seed), d, anc)
}

pub fn random_vacuum_preserving_channel_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    anc: usize,
) -> KrausChannel {
    assert!(d >= 1 && anc >= 1, "need d >= 1 and anc >= 1");
    let u = constrained_dilation(rng, d, anc);
    channel_from_dilation(&u, 1 + d, anc)
}

/// Random unit vector supported on the single-particle states `1..=d`.
pub fn random_psi_perp<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0)];
    amplitudes.extend(random_unit_vector(rng, d));
    ComplexMatrix::column(&amplitudes)
}
