//! Seeded generators for test matrices.
//!
//! All randomness in the toolkit flows from a single `u64` seed. Independent
//! streams for concurrent trials are derived with [`derive_seed`].

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::symmetric::{PdMatrix, PsdMatrix, SymmetricMatrix};

pub type TestRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `master ⊕ index`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

fn with_spectrum(q: &DMatrix<f64>, spectrum: &[f64]) -> SymmetricMatrix {
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    SymmetricMatrix::symmetrized(q * d * q.transpose())
}

/// Log-uniform sample in `[lo, hi]`.
fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Symmetric matrix with eigenvalues of random sign and magnitude in `[lo, hi]`.
pub fn random_symmetric_invertible(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> SymmetricMatrix {
    let q = random_orthogonal(rng, n);
    let spectrum: Vec<f64> = (0..n)
        .map(|_| {
            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            s * log_uniform(rng, lo, hi)
        })
        .collect();
    with_spectrum(&q, &spectrum)
}

/// Positive definite matrix with spectrum log-uniform in `[lo, hi]`.
pub fn random_pd(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> PdMatrix {
    let q = random_orthogonal(rng, n);
    let spectrum: Vec<f64> = (0..n).map(|_| log_uniform(rng, lo, hi)).collect();
    PdMatrix::new_unchecked(with_spectrum(&q, &spectrum))
}

/// PSD matrix of the given rank; the remaining eigenvalues are zero.
pub fn random_psd_rank(rng: &mut impl Rng, n: usize, rank: usize, lo: f64, hi: f64) -> PsdMatrix {
    let q = random_orthogonal(rng, n);
    let spectrum: Vec<f64> = (0..n)
        .map(|i| if i < rank { log_uniform(rng, lo, hi) } else { 0.0 })
        .collect();
    PsdMatrix::new(with_spectrum(&q, &spectrum), 1e-12).expect("constructed PSD")
}

/// PSD increment with random rank in `0..=n` and spectrum in `[0, hi]`.
pub fn random_increment(rng: &mut impl Rng, n: usize, hi: f64) -> PsdMatrix {
    let q = random_orthogonal(rng, n);
    let rank = rng.random_range(0..=n);
    let spectrum: Vec<f64> = (0..n)
        .map(|i| if i < rank { rng.random_range(0.0..=hi) } else { 0.0 })
        .collect();
    PsdMatrix::new(with_spectrum(&q, &spectrum), 1e-12).expect("constructed PSD")
}

/// Orthogonal projection of the given rank.
pub fn random_projection(rng: &mut impl Rng, n: usize, rank: usize) -> PsdMatrix {
    let q = random_orthogonal(rng, n);
    let spectrum: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    PsdMatrix::new(with_spectrum(&q, &spectrum), 1e-12).expect("constructed PSD")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::is_projection;

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = rng_from_seed(1);
        let q = random_orthogonal(&mut rng, 6);
        let err = (q.transpose() * &q - DMatrix::<f64>::identity(6, 6)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = rng_from_seed(2);
        let a = random_pd(&mut rng, 5, 0.5, 2.0);
        let eig = a.eigh().unwrap();
        assert!(eig.min_eigenvalue() > 0.49 && eig.max_eigenvalue() < 2.01);
        let s = random_psd_rank(&mut rng, 5, 3, 0.5, 2.0);
        let eig = s.eigh().unwrap();
        assert!(eig.eigenvalues[1].abs() < 1e-12 && eig.eigenvalues[2] > 0.49);
        let p = random_projection(&mut rng, 4, 2);
        assert!(is_projection(&p, 1e-12));
        let c = random_symmetric_invertible(&mut rng, 4, 0.5, 2.0);
        let eig = c.eigh().unwrap();
        assert!(eig.eigenvalues.iter().all(|v| v.abs() > 0.49));
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let a = random_pd(&mut rng_from_seed(7), 3, 0.5, 2.0);
        let b = random_pd(&mut rng_from_seed(7), 3, 0.5, 2.0);
        assert_eq!(a, b);
        assert_ne!(derive_seed(7, 0), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 0), derive_seed(8, 0));
    }
}
