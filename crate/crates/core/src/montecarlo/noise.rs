//! Seeded random matrices.
//!
//! The generator is fixed so that a seed names the same matrix on every
//! platform: a ChaCha8 stream keyed by `ChaCha8Rng::seed_from_u64(seed)`,
//! standard normals from `rand_distr::StandardNormal` (ziggurat), entries
//! filled in column-major order.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::qr_positive;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal_matrix<R: rand::Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `n x n` matrix with i.i.d. `N(0, 1/n)` entries.
pub fn sample_noise(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeded_rng(seed);
    standard_normal_matrix(n, n, &mut rng) / (n as f64).sqrt()
}

/// Haar-distributed orthogonal matrix drawn from `rng`.
pub fn random_orthogonal_from<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = standard_normal_matrix(n, n, rng);
    qr_positive(&g).0
}

pub fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
    random_orthogonal_from(n, &mut seeded_rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_norm;

    #[test]
    fn same_seed_same_matrix() {
        assert_eq!(sample_noise(5, 42), sample_noise(5, 42));
        assert_ne!(sample_noise(5, 42), sample_noise(5, 43));
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = random_orthogonal(7, 9);
        assert!(max_norm(&(q.transpose() * &q - DMatrix::<f64>::identity(7, 7))) < 1e-13);
    }

    #[test]
    fn entry_mean_is_centered() {
        // 10^6 entries of N(0, 1/n): mean within 4 standard errors of zero.
        let n = 100;
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..100u64 {
            let w = sample_noise(n, seed);
            sum += w.sum();
            count += w.len();
        }
        let se = (1.0 / n as f64 / count as f64).sqrt();
        assert!((sum / count as f64).abs() < 4.0 * se);
    }

    #[test]
    fn entry_variance_is_one_over_n() {
        let n = 100;
        let draws = 10_000u64;
        let mut acc = 0.0;
        for seed in 0..draws {
            acc += sample_noise(n, seed).norm_squared();
        }
        let var = acc / (draws as f64 * (n * n) as f64);
        assert!((var * n as f64 - 1.0).abs() < 0.01, "variance ratio {}", var * n as f64);
    }
}
