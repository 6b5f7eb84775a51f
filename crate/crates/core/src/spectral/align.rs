use nalgebra::DMatrix;

use super::{SpectralSplit, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{diag, max_norm, polar_factor};

/// `N = U2 U2^T W V1 Sigma1^{-1}`, the first-order Gaussian predictor of
/// `U1~ - U1`. Its columns lie in `span(U2)`.
pub fn gaussian_predictor(split: &SpectralSplit, w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = split.n();
    if w.shape() != (n, n) {
        return Err(Error::dim(format!("noise must be {n}x{n}, got {:?}", w.shape())));
    }
    let tol = Tolerances::default().singular_sigma;
    if let Some(&bad) = split.sigma1().iter().find(|&&s| !(s >= tol)) {
        return Err(Error::SingularSigma {
            value: bad,
            tolerance: tol,
        });
    }
    let inv = diag(&split.sigma1().map(|s| 1.0 / s));
    let u2 = split.u2();
    Ok(u2 * (u2.transpose() * (w * split.v1())) * inv)
}

/// A unitary `k x k` rotation together with the alignment distance it
/// achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentRotation {
    pub rotation: DMatrix<f64>,
    pub objective: f64,
    /// The cross-product matrix had a singular value below the degeneracy
    /// tolerance, so the minimizer is not unique. `rotation` is still a
    /// minimizer.
    pub degenerate: bool,
}

/// `sqrt(||U1 M - U1~||_F^2 + ||V1 M - V1~||_F^2)`.
pub fn joint_alignment_objective(
    u1: &DMatrix<f64>,
    u1_noisy: &DMatrix<f64>,
    v1: &DMatrix<f64>,
    v1_noisy: &DMatrix<f64>,
    m: &DMatrix<f64>,
) -> f64 {
    ((u1 * m - u1_noisy).norm_squared() + (v1 * m - v1_noisy).norm_squared()).sqrt()
}

fn check_frames(pairs: &[(&DMatrix<f64>, &DMatrix<f64>)]) -> Result<()> {
    let shape = pairs[0].0.shape();
    for (a, b) in pairs {
        if a.shape() != shape || b.shape() != shape {
            return Err(Error::dim(format!(
                "all frames must be {}x{}, got {:?} and {:?}",
                shape.0,
                shape.1,
                a.shape(),
                b.shape()
            )));
        }
    }
    Ok(())
}

/// Rotation minimizing the joint left/right alignment distance:
/// `M = Z1 Z2^T` where `Z1 S Z2^T` is an SVD of `U1^T U1~ + V1^T V1~`.
pub fn procrustes_rotation(
    u1: &DMatrix<f64>,
    u1_noisy: &DMatrix<f64>,
    v1: &DMatrix<f64>,
    v1_noisy: &DMatrix<f64>,
) -> Result<AlignmentRotation> {
    check_frames(&[(u1, u1_noisy), (v1, v1_noisy), (u1, v1)])?;
    let cross = u1.transpose() * u1_noisy + v1.transpose() * v1_noisy;
    let (rotation, smin) = polar_factor(&cross);
    let objective = joint_alignment_objective(u1, u1_noisy, v1, v1_noisy, &rotation);
    Ok(AlignmentRotation {
        rotation,
        objective,
        degenerate: smin < Tolerances::default().degenerate_alignment,
    })
}

/// Rotation minimizing `||U1 M - U1~||_F` alone: the polar factor of
/// `U1^T U1~`.
///
/// This is the rotation used for the max-norm residual. The joint rotation
/// averages the left and right frames and leaves an `O(eps)` component inside
/// `span(U1)`; this one removes it.
pub fn left_procrustes(u1: &DMatrix<f64>, u1_noisy: &DMatrix<f64>) -> Result<AlignmentRotation> {
    check_frames(&[(u1, u1_noisy)])?;
    let (rotation, smin) = polar_factor(&(u1.transpose() * u1_noisy));
    let objective = (u1 * &rotation - u1_noisy).norm();
    Ok(AlignmentRotation {
        rotation,
        objective,
        degenerate: smin < Tolerances::default().degenerate_alignment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedResidual {
    /// `||(U1~ - U1 M) - eps N||_max`
    pub resid_max: f64,
    /// `||eps N||_max`
    pub gauss_term_max: f64,
}

pub fn aligned_residual(
    u1: &DMatrix<f64>,
    u1_noisy: &DMatrix<f64>,
    m: &DMatrix<f64>,
    eps: f64,
    predictor: &DMatrix<f64>,
) -> Result<AlignedResidual> {
    check_frames(&[(u1, u1_noisy), (u1, predictor)])?;
    let k = u1.ncols();
    if m.shape() != (k, k) {
        return Err(Error::dim(format!("rotation must be {k}x{k}, got {:?}", m.shape())));
    }
    let gauss = predictor * eps;
    let resid = u1_noisy - u1 * m - &gauss;
    Ok(AlignedResidual {
        resid_max: max_norm(&resid),
        gauss_term_max: max_norm(&gauss),
    })
}
