//! Seeded random vectors and unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::gram_schmidt_complete;
use super::matrix::ComplexMatrix;

/// Deterministic generator used throughout the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (real and imaginary parts i.i.d. N(0, 1/2)).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

/// Uniformly distributed unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random unitary whose leading columns are `fixed` (assumed orthonormal);
/// the remaining columns come from orthonormalized complex Gaussian columns.
pub fn complete_unitary<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    fixed: Vec<Vec<Complex64>>,
) -> ComplexMatrix {
    let mut columns = fixed;
    while columns.len() < n {
        columns.push(gaussian_vector(rng, n));
    }
    gram_schmidt_complete(n, columns)
}

/// Haar-distributed unitary.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    complete_unitary(rng, n, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let a = haar_unitary(&mut seeded_rng(7), 5);
        let b = haar_unitary(&mut seeded_rng(7), 5);
        assert!(a.is_unitary(1e-12));
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_column_survives_completion() {
        let mut rng = seeded_rng(3);
        let v = random_unit_vector(&mut rng, 4);
        let u = complete_unitary(&mut rng, 4, vec![v.clone()]);
        assert!(u.is_unitary(1e-12));
        for (i, z) in v.iter().enumerate() {
            assert!((u[(i, 0)] - z).norm() < 1e-14);
        }
    }
}
