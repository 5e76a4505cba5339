//! Seeded random matrices used by tests, scenarios and multi-start runs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{svd_full_right, ComplexMatrix, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-like unitary from the polar factor of a Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let f = svd_full_right(&g);
    f.u.matmul(&f.v.columns(0, f.rank).adjoint())
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(n, n, rng);
    HermitianOperator::new(g.hermitian_part()).expect("hermitian part")
}

/// Q·diag(λ)·Q* with λ drawn uniformly from [lo, hi] and Q a random unitary.
pub fn random_with_spectrum_in<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> (HermitianOperator, Vec<f64>) {
    let mut d: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = random_unitary(n, rng);
    (HermitianOperator::from_spectrum(&q, &d).expect("hermitian"), d)
}

/// Negative definite operator with spectrum in [−10, −1].
pub fn random_negative_definite<R: Rng>(n: usize, rng: &mut R) -> HermitianOperator {
    random_with_spectrum_in(n, -10.0, -1.0, rng).0
}
