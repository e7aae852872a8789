//! Reference implementations used as test oracles. They share no code with
//! the library's decompositions or channel constructions.
#![allow(dead_code)]

use coherence_core::linalg::ComplexMatrix;
use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix (row-major, `n x n`) by cyclic
/// Jacobi rotations; ascending.
pub fn jacobi_symmetric(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    let at = |i: usize, j: usize| i * n + j;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[at(i, j)].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[at(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[at(q, q)] - a[at(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[at(k, p)];
                    let akq = a[at(k, q)];
                    a[at(k, p)] = c * akp - s * akq;
                    a[at(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[at(p, k)];
                    let aqk = a[at(q, k)];
                    a[at(p, k)] = c * apk - s * aqk;
                    a[at(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[at(i, i)]).collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of a Hermitian matrix via the real embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is the original one doubled.
pub fn jacobi_hermitian(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[i * m + j] = z.re;
            a[(i + n) * m + (j + n)] = z.re;
            a[i * m + (j + n)] = -z.im;
            a[(i + n) * m + j] = z.im;
        }
    }
    jacobi_symmetric(a, m).into_iter().step_by(2).collect()
}

/// Largest singular value as `sqrt(λ_max(M†M))`.
pub fn operator_norm_oracle(m: &ComplexMatrix) -> f64 {
    let gram = &m.adjoint() * m;
    jacobi_hermitian(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Channel induced by a mode unitary `s` on `k` system modes with the
/// ancilla modes in vacuum, computed on the single-excitation Fock space:
/// the isometry `|0⟩ ↦ |0⟩|0⟩`, `|i⟩ ↦ Σ_m s[m,i] |m⟩|0⟩ + Σ_n s[k+n,i] |0⟩|n⟩`
/// followed by a trace over the ancilla register.
pub fn vacuum_ancilla_channel_oracle(s: &ComplexMatrix, k: usize, rho: &ComplexMatrix) -> ComplexMatrix {
    let j = s.rows() - k;
    let (ds, da) = (1 + k, 1 + j);
    // isometry columns, joint index sys * da + anc
    let mut w = ComplexMatrix::zeros(ds * da, ds);
    w[(0, 0)] = Complex64::new(1.0, 0.0);
    for i in 0..k {
        for m in 0..k {
            w[((1 + m) * da, 1 + i)] = s[(m, i)];
        }
        for n in 0..j {
            w[(1 + n, 1 + i)] = s[(k + n, i)];
        }
    }
    let joint = &(&w * rho) * &w.adjoint();
    let mut out = ComplexMatrix::zeros(ds, ds);
    for a in 0..ds {
        for b in 0..ds {
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..da {
                acc += joint[(a * da + e, b * da + e)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Random full-rank density matrix `GG†/Tr(GG†)`.
pub fn random_density<R: rand::Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_complex_matrix(rng, n, n);
    let p = &g * &g.adjoint();
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

pub fn random_complex_matrix<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}
