//! The SVD data model and the constructive objects built on it.
//!
//! A noiseless square matrix `Y` of exact rank `k` is held as a
//! [`SpectralSplit`]. Noise `W` is rotated into that basis as [`CBlocks`],
//! from which the second-order correctors, the first-order perturbed bases and
//! the Gaussian predictor are built. Alignment of a noisy decomposition with
//! the noiseless one is done with Procrustes rotations.
//!
//! Nothing in this module draws random numbers: every noise matrix is an
//! explicit argument.

mod align;
mod correctors;
mod split;

pub use align::{
    aligned_residual, gaussian_predictor, joint_alignment_objective, left_procrustes,
    procrustes_rotation, AlignedResidual, AlignmentRotation,
};
pub use correctors::{
    build_correctors, diagonalize, first_order_bases, orthonormalize_basis, rotate_noise, CBlocks,
    CorrectorPair, Diagonalization, FirstOrderBases, OrthonormalizedBasis,
};
pub use split::{partition_svd, split_svd, PartitionedSvd, SpectralSplit};

/// Numerical tolerances used across the module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-norm tolerance for orthonormality checks.
    pub orthogonality: f64,
    /// Max-norm tolerance for algebraic identities.
    pub identity: f64,
    /// `sigma[k] / sigma[k-1]` must stay below this for a rank-`k` split.
    pub rank_ratio: f64,
    /// Smallest admissible diagonal entry of `Sigma1` before inversion.
    pub singular_sigma: f64,
    /// Below this smallest singular value the Procrustes minimizer is flagged
    /// as non-unique.
    pub degenerate_alignment: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthogonality: 1e-10,
            identity: 1e-12,
            rank_ratio: 1e-8,
            singular_sigma: 1e-14,
            degenerate_alignment: 1e-12,
        }
    }
}
