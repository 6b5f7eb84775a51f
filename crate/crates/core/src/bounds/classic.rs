//! Standard perturbation and concentration results used by the main bound.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{singular_values, spectral_norm};
use crate::spectral::{PartitionedSvd, SpectralSplit};

/// Where the gap in the Frobenius alignment bound comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GapSource {
    /// Computed from the observed singular values of both decompositions.
    Observed,
    /// A supplied lower bound, e.g. `delta1 = s_min - (2 + gamma) eps`.
    LowerBound(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopicoBound {
    /// `sqrt(||R||_F^2 + ||S||_F^2) / delta`
    pub bound: f64,
    pub delta: f64,
}

/// Bound on `min_M sqrt(||U1 M - U1~||_F^2 + ||V1 M - V1~||_F^2)` with
/// `R = (Y - Y~) V1~`, `S = (Y - Y~)^T U1~`, and the observed gap
/// `delta = min{ min |mu~ - mu|, s_min(Sigma1) + s_min(Sigma1~) }` where
/// `mu~` ranges over `Sigma1~` and `mu` over the trailing singular values of
/// `Y` (all zero for a rank-`k` split).
pub fn dopico_bound(
    y: &DMatrix<f64>,
    y_noisy: &DMatrix<f64>,
    split: &SpectralSplit,
    noisy: &PartitionedSvd,
) -> Result<DopicoBound> {
    dopico_bound_with_gap(y, y_noisy, split, noisy, GapSource::Observed)
}

pub fn dopico_bound_with_gap(
    y: &DMatrix<f64>,
    y_noisy: &DMatrix<f64>,
    split: &SpectralSplit,
    noisy: &PartitionedSvd,
    gap: GapSource,
) -> Result<DopicoBound> {
    if y.shape() != y_noisy.shape() || y.nrows() != split.n() || noisy.k() != split.k() {
        return Err(Error::dim("inconsistent shapes for the alignment bound".to_string()));
    }
    let delta = match gap {
        GapSource::Observed => {
            // Sigma2 of a rank-k split is identically zero.
            let trailing = 0.0_f64;
            let cross = noisy
                .sigma1
                .iter()
                .map(|mu| (mu - trailing).abs())
                .fold(f64::INFINITY, f64::min);
            cross.min(split.sigma_min() + noisy.sigma_min())
        }
        GapSource::LowerBound(d) => d,
    };
    if !(delta > 0.0) {
        return Err(Error::GapCollapse(delta));
    }
    let diff = y - y_noisy;
    let r = &diff * &noisy.v1;
    let s = diff.transpose() * &noisy.u1;
    Ok(DopicoBound {
        bound: (r.norm_squared() + s.norm_squared()).sqrt() / delta,
        delta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylCheck {
    /// `|s_i(A) - s_i(A + E)|` for each index.
    pub gaps: Vec<f64>,
    /// `||E||_2`
    pub perturbation_norm: f64,
}

impl WeylCheck {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    /// Every gap is at most `||E||_2`, allowing `slack` for rounding.
    pub fn holds(&self, slack: f64) -> bool {
        self.max_gap() <= self.perturbation_norm + slack
    }
}

pub fn weyl_gaps(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<WeylCheck> {
    if a.shape() != e.shape() {
        return Err(Error::dim(format!("A is {:?} but E is {:?}", a.shape(), e.shape())));
    }
    let before = singular_values(a);
    let after = singular_values(&(a + e));
    Ok(WeylCheck {
        gaps: before.iter().zip(after.iter()).map(|(x, y)| (x - y).abs()).collect(),
        perturbation_norm: spectral_norm(e),
    })
}

/// A threshold and the bound on the probability of exceeding it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub threshold: f64,
    pub bound: f64,
}

/// Largest singular value of an `n x k` matrix with `N(0, 1/n)` entries:
/// `P(s_max > 1 + sqrt(k/n) + gamma) <= exp(-n gamma^2 / 2)`.
pub fn szarek_tail(k: usize, n: usize, gamma: f64) -> TailBound {
    let (kf, nf) = (k as f64, n as f64);
    TailBound {
        threshold: 1.0 + (kf / nf).sqrt() + gamma,
        bound: (-nf * gamma * gamma / 2.0).exp(),
    }
}

/// Mean of `n` products of independent standard normal pairs:
/// `P(mean > n^(beta - 1/2)) <= 2 exp(-n^beta)`, for any real `beta`.
pub fn product_tail(n: usize, beta: f64) -> TailBound {
    let nf = n as f64;
    TailBound {
        threshold: nf.powf(-0.5 + beta),
        bound: 2.0 * (-nf.powf(beta)).exp(),
    }
}

/// Spectral-norm budgets for the quadrants of an `n x n` matrix with
/// `N(0, 1/n)` entries, split after row/column `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockBudget {
    /// `||T11||_2 <= gamma + 2 sqrt(k/n)`
    pub t11: f64,
    /// `||T12||_2, ||T21||_2 <= 1 + gamma + sqrt(k/n)`
    pub t12_t21: f64,
    /// `||T||_2, ||T22||_2 <= 2 + gamma`
    pub t_t22: f64,
    /// `1 - 4 exp(-(n-k) gamma^2 / 2)`; may be negative.
    pub probability: f64,
}

impl BlockBudget {
    pub fn is_vacuous(&self) -> bool {
        self.probability <= 0.0
    }

    /// Check a matrix against all four budgets.
    pub fn contains(&self, t: &DMatrix<f64>, k: usize) -> bool {
        let (a11, a12, a21, a22) = crate::linalg::split_blocks(t, k);
        spectral_norm(&a11) <= self.t11
            && spectral_norm(&a12) <= self.t12_t21
            && spectral_norm(&a21) <= self.t12_t21
            && spectral_norm(&a22) <= self.t_t22
            && spectral_norm(t) <= self.t_t22
    }
}

pub fn block_spectral_budget(k: usize, n: usize, gamma: f64) -> Result<BlockBudget> {
    if k >= n {
        return Err(Error::dim(format!("k={k} must be below n={n}")));
    }
    let r = (k as f64 / n as f64).sqrt();
    Ok(BlockBudget {
        t11: gamma + 2.0 * r,
        t12_t21: 1.0 + gamma + r,
        t_t22: 2.0 + gamma,
        probability: 1.0 - 4.0 * (-((n - k) as f64) * gamma * gamma / 2.0).exp(),
    })
}

/// `sqrt(2) max{ sqrt(a11^2 + a21^2), sqrt(a12^2 + a22^2) }` from the spectral
/// norms of the four quadrants.
pub fn block_norm_bound(a11: f64, a12: f64, a21: f64, a22: f64) -> f64 {
    std::f64::consts::SQRT_2 * a11.hypot(a21).max(a12.hypot(a22))
}

/// Distance from a nearly orthonormal `n x k` basis to its QR factor, given
/// `||A^T A - I||_F <= sqrt(k) e2`: `(sqrt(2) + 1) sqrt(k) e2 / (1 - sqrt(k) e2)`.
pub fn barrlund_bound(k: usize, e2: f64) -> f64 {
    let ske2 = (k as f64).sqrt() * e2;
    (std::f64::consts::SQRT_2 + 1.0) * ske2 / (1.0 - ske2)
}
