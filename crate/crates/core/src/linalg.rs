//! Dense linear-algebra helpers shared by every module.
//!
//! All decompositions go through nalgebra. The helpers here only add the
//! conventions this crate depends on: descending singular values, a fixed
//! sign rule for singular vectors, block slicing, and the polar factor.

use nalgebra::{DMatrix, DVector, SVD};

/// Entries whose magnitude is at or below this fraction of the column's
/// largest entry are treated as zero by the sign rule.
pub const SIGN_RULE_TOLERANCE: f64 = 1e-12;

/// Thin SVD with singular values sorted non-increasing.
///
/// For an `r x c` input, `u` is `r x p`, `v` is `c x p` with `p = min(r, c)`.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").transpose();
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    SortedSvd {
        u: u.select_columns(&order),
        singular_values: DVector::from_iterator(order.len(), order.iter().map(|&i| sv[i])),
        v: v.select_columns(&order),
    }
}

/// Singular values only, sorted non-increasing.
pub fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    DVector::from_vec(sv)
}

/// Flip column pairs so the first nonzero entry of each column of `u` is
/// positive. The matching column of `v` is flipped with it, so `u * s * v^T`
/// is unchanged.
pub fn apply_sign_rule(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    for j in 0..u.ncols() {
        if first_significant_entry(u.column(j).iter().copied()).is_some_and(|x| x < 0.0) {
            u.column_mut(j).neg_mut();
            if j < v.ncols() {
                v.column_mut(j).neg_mut();
            }
        }
    }
}

fn first_significant_entry(col: impl Iterator<Item = f64> + Clone) -> Option<f64> {
    let scale = col.clone().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    col.into_iter().find(|x| x.abs() > SIGN_RULE_TOLERANCE * scale)
}

/// Largest absolute entry.
pub fn max_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Orthogonal polar factor `Z1 Z2^T` of `a = Z1 S Z2^T`, together with the
/// smallest singular value of `a`.
pub fn polar_factor(a: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let svd = sorted_svd(a);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    (&svd.u * svd.v.transpose(), smin)
}

/// QR factorization with a non-negative diagonal in `r`.
pub fn qr_positive(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = a.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..r.nrows() {
        if r[(j, j)] < 0.0 {
            r.row_mut(j).neg_mut();
            q.column_mut(j).neg_mut();
        }
    }
    (q, r)
}

/// `[[a11, a12], [a21, a22]]` assembled into one matrix.
pub fn assemble_blocks(
    a11: &DMatrix<f64>,
    a12: &DMatrix<f64>,
    a21: &DMatrix<f64>,
    a22: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (r1, c1) = a11.shape();
    let (r2, c2) = a22.shape();
    debug_assert_eq!(a12.shape(), (r1, c2));
    debug_assert_eq!(a21.shape(), (r2, c1));
    let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
    out.view_mut((0, 0), (r1, c1)).copy_from(a11);
    out.view_mut((0, c1), (r1, c2)).copy_from(a12);
    out.view_mut((r1, 0), (r2, c1)).copy_from(a21);
    out.view_mut((r1, c1), (r2, c2)).copy_from(a22);
    out
}

/// Quadrants of `m` split after row/column `k`.
pub fn split_blocks(
    m: &DMatrix<f64>,
    k: usize,
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    (
        m.view((0, 0), (k, k)).into_owned(),
        m.view((0, k), (k, c - k)).into_owned(),
        m.view((k, 0), (r - k, k)).into_owned(),
        m.view((k, k), (r - k, c - k)).into_owned(),
    )
}

pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn diag(values: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sorted_svd_is_descending_and_reconstructs() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 5.0, 1.0, 3.0, 0.0, 0.5]);
        let svd = sorted_svd(&m);
        let s = &svd.singular_values;
        assert!(s[0] >= s[1] && s[1] >= s[2]);
        let back = &svd.u * diag(s) * svd.v.transpose();
        assert_abs_diff_eq!(back, m, epsilon = 1e-12);
    }

    #[test]
    fn sign_rule_skips_leading_zeros() {
        let mut u = DMatrix::from_column_slice(3, 2, &[0.0, -0.6, 0.8, 1.0, 0.0, 0.0]);
        let mut v = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        apply_sign_rule(&mut u, &mut v);
        assert_eq!(u[(1, 0)], 0.6);
        assert_eq!(v[(0, 0)], -1.0);
        assert_eq!(u[(0, 1)], 1.0);
        assert_eq!(v[(1, 1)], 1.0);
    }

    #[test]
    fn polar_factor_of_scaled_rotation() {
        let (s, c) = (0.3_f64.sin(), 0.3_f64.cos());
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let (p, smin) = polar_factor(&(&r * 2.0));
        assert_abs_diff_eq!(p, r, epsilon = 1e-12);
        assert_abs_diff_eq!(smin, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn blocks_round_trip() {
        let m = DMatrix::from_fn(5, 5, |i, j| (i * 5 + j) as f64);
        let (a, b, c, d) = split_blocks(&m, 2);
        assert_eq!(assemble_blocks(&a, &b, &c, &d), m);
    }

    #[test]
    fn qr_positive_diagonal() {
        let a = DMatrix::from_row_slice(3, 2, &[-1.0, 2.0, 0.0, 1.0, 1.0, -3.0]);
        let (q, r) = qr_positive(&a);
        assert!(r[(0, 0)] > 0.0 && r[(1, 1)] > 0.0);
        assert_abs_diff_eq!(&q * &r, a, epsilon = 1e-12);
    }
}
