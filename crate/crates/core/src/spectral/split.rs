use nalgebra::{DMatrix, DVector};

use super::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, apply_sign_rule, diag, hstack, max_norm, sorted_svd};

/// Partitioned SVD `Y = (U1, U2) diag(Sigma1, 0) (V1, V2)^T` of a square
/// matrix of exact rank `k`.
///
/// Columns follow the sign rule: the first nonzero entry of every column of
/// `U` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSplit {
    u1: DMatrix<f64>,
    u2: DMatrix<f64>,
    sigma1: DVector<f64>,
    v1: DMatrix<f64>,
    v2: DMatrix<f64>,
}

impl SpectralSplit {
    /// Build a split from full orthogonal factors and the `k` leading
    /// singular values. Checks every structural invariant.
    pub fn from_factors(
        u: &DMatrix<f64>,
        sigma1: &DVector<f64>,
        v: &DMatrix<f64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = u.nrows();
        let k = sigma1.len();
        if u.shape() != (n, n) || v.shape() != (n, n) {
            return Err(Error::dim(format!(
                "factors must be square and equal in size, got U {:?} and V {:?}",
                u.shape(),
                v.shape()
            )));
        }
        check_dims(n, k)?;
        let mut u = u.clone();
        let mut v = v.clone();
        apply_sign_rule(&mut u, &mut v);
        let split = Self {
            u1: u.columns(0, k).into_owned(),
            u2: u.columns(k, n - k).into_owned(),
            sigma1: sigma1.clone(),
            v1: v.columns(0, k).into_owned(),
            v2: v.columns(k, n - k).into_owned(),
        };
        split.validate(tol)?;
        Ok(split)
    }

    pub fn n(&self) -> usize {
        self.u1.nrows()
    }

    pub fn k(&self) -> usize {
        self.sigma1.len()
    }

    pub fn u1(&self) -> &DMatrix<f64> {
        &self.u1
    }

    pub fn u2(&self) -> &DMatrix<f64> {
        &self.u2
    }

    pub fn v1(&self) -> &DMatrix<f64> {
        &self.v1
    }

    pub fn v2(&self) -> &DMatrix<f64> {
        &self.v2
    }

    /// Diagonal of `Sigma1`, non-increasing.
    pub fn sigma1(&self) -> &DVector<f64> {
        &self.sigma1
    }

    pub fn u(&self) -> DMatrix<f64> {
        hstack(&self.u1, &self.u2)
    }

    pub fn v(&self) -> DMatrix<f64> {
        hstack(&self.v1, &self.v2)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma1[self.k() - 1]
    }

    /// `||Sigma1^{-1}||_2`.
    pub fn sigma1_inv_norm(&self) -> f64 {
        1.0 / self.sigma_min()
    }

    /// `||U1||_max`.
    pub fn u1_max(&self) -> f64 {
        max_norm(&self.u1)
    }

    /// `U1 Sigma1 V1^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u1 * diag(&self.sigma1) * self.v1.transpose()
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        let k = self.k();
        let eye = DMatrix::<f64>::identity(k, k);
        let checks = [
            ("U1^T U1 = I", max_norm(&(self.u1.transpose() * &self.u1 - &eye))),
            ("V1^T V1 = I", max_norm(&(self.v1.transpose() * &self.v1 - &eye))),
            ("U1^T U2 = 0", max_norm(&(self.u1.transpose() * &self.u2))),
            ("V1^T V2 = 0", max_norm(&(self.v1.transpose() * &self.v2))),
        ];
        for (what, err) in checks {
            if !(err <= tol.orthogonality) {
                return Err(Error::InvariantViolation(format!(
                    "{what} violated by {err:e}"
                )));
            }
        }
        if self.sigma1.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::InvariantViolation(
                "Sigma1 must be strictly positive".into(),
            ));
        }
        if self.sigma1.as_slice().windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvariantViolation(
                "Sigma1 must be sorted non-increasing".into(),
            ));
        }
        Ok(())
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::dim(format!("matrix dimension must be >= 2, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(Error::dim(format!("rank must satisfy 1 <= k < n, got k={k}, n={n}")));
    }
    Ok(())
}

/// Partitioned SVD of an arbitrary square matrix (typically the noisy one),
/// split after the `k`-th singular value. No rank condition is imposed.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedSvd {
    pub u1: DMatrix<f64>,
    pub u2: DMatrix<f64>,
    pub sigma1: DVector<f64>,
    pub sigma2: DVector<f64>,
    pub v1: DMatrix<f64>,
    pub v2: DMatrix<f64>,
}

impl PartitionedSvd {
    pub fn k(&self) -> usize {
        self.sigma1.len()
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma1[self.k() - 1]
    }

    /// All singular values, non-increasing.
    pub fn singular_values(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.sigma1.len() + self.sigma2.len(),
            self.sigma1.iter().chain(self.sigma2.iter()).copied(),
        )
    }
}

pub fn partition_svd(y: &DMatrix<f64>, k: usize) -> Result<PartitionedSvd> {
    let (n, c) = y.shape();
    if n != c {
        return Err(Error::dim(format!("expected a square matrix, got {n}x{c}")));
    }
    check_dims(n, k)?;
    let linalg::SortedSvd {
        mut u,
        singular_values,
        mut v,
    } = sorted_svd(y);
    apply_sign_rule(&mut u, &mut v);
    Ok(PartitionedSvd {
        u1: u.columns(0, k).into_owned(),
        u2: u.columns(k, n - k).into_owned(),
        sigma1: singular_values.rows(0, k).into_owned(),
        sigma2: singular_values.rows(k, n - k).into_owned(),
        v1: v.columns(0, k).into_owned(),
        v2: v.columns(k, n - k).into_owned(),
    })
}

/// Partitioned SVD of a noiseless matrix of numerical rank exactly `k`.
pub fn split_svd(y: &DMatrix<f64>, k: usize) -> Result<SpectralSplit> {
    split_svd_with(y, k, &Tolerances::default())
}

pub fn split_svd_with(y: &DMatrix<f64>, k: usize, tol: &Tolerances) -> Result<SpectralSplit> {
    let part = partition_svd(y, k)?;
    let sk = part.sigma1[k - 1];
    let next = part.sigma2[0];
    let ratio = if sk > 0.0 { next / sk } else { f64::INFINITY };
    if !(ratio < tol.rank_ratio) {
        return Err(Error::RankMismatch { expected: k, ratio });
    }
    let split = SpectralSplit {
        u1: part.u1,
        u2: part.u2,
        sigma1: part.sigma1,
        v1: part.v1,
        v2: part.v2,
    };
    split.validate(tol)?;
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::random_orthogonal;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_input_gives_identity_bases() {
        let y = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 0.0, 0.0]));
        let s = split_svd(&y, 2).unwrap();
        assert_abs_diff_eq!(s.sigma1().clone(), DVector::from_vec(vec![3.0, 2.0]), epsilon = 1e-14);
        let eye = DMatrix::<f64>::identity(4, 4);
        assert_abs_diff_eq!(s.u1().clone(), eye.columns(0, 2).into_owned(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.v1().clone(), eye.columns(0, 2).into_owned(), epsilon = 1e-14);
    }

    #[test]
    fn zero_matrix_is_rank_mismatch() {
        let y = DMatrix::<f64>::zeros(3, 3);
        assert!(matches!(split_svd(&y, 1), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn full_rank_is_rank_mismatch() {
        let y = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(split_svd(&y, 2), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn rank_out_of_range() {
        let y = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(split_svd(&y, 3), Err(Error::Dimension(_))));
        assert!(matches!(split_svd(&y, 0), Err(Error::Dimension(_))));
        let one = DMatrix::<f64>::identity(1, 1);
        assert!(matches!(split_svd(&one, 1), Err(Error::Dimension(_))));
    }

    #[test]
    fn construct_then_recover() {
        let q = random_orthogonal(3, 7);
        let r = random_orthogonal(3, 7 ^ 0x5eed);
        let y = &q * DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 1.0, 0.0])) * r.transpose();
        let s = split_svd(&y, 2).unwrap();
        assert_abs_diff_eq!(s.sigma1()[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma1()[1], 1.0, epsilon = 1e-12);
        assert!(max_norm(&(s.reconstruct() - &y)) < 1e-10);
    }

    #[test]
    fn sign_rule_holds_on_u1() {
        let q = random_orthogonal(6, 1);
        let r = random_orthogonal(6, 2);
        let y = q.columns(0, 2) * DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]))
            * r.columns(0, 2).transpose();
        let s = split_svd(&y, 2).unwrap();
        for j in 0..2 {
            let first = s.u1().column(j).iter().copied().find(|x| x.abs() > 1e-12).unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn from_factors_rejects_unsorted_sigma() {
        let eye = DMatrix::<f64>::identity(3, 3);
        let err = SpectralSplit::from_factors(
            &eye,
            &DVector::from_vec(vec![1.0, 2.0]),
            &eye,
            &Tolerances::default(),
        );
        assert!(matches!(err, Err(Error::InvariantViolation(_))));
    }
}
