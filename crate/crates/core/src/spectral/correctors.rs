use nalgebra::{DMatrix, DVector};

use super::{SpectralSplit, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{assemble_blocks, diag, max_norm, qr_positive, spectral_norm};

/// Noise expressed in the singular bases of `Y`: `C = U^T W V`, split into
/// quadrants after row/column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CBlocks {
    pub c11: DMatrix<f64>,
    pub c12: DMatrix<f64>,
    pub c21: DMatrix<f64>,
    pub c22: DMatrix<f64>,
}

impl CBlocks {
    pub fn k(&self) -> usize {
        self.c11.nrows()
    }

    pub fn n(&self) -> usize {
        self.c11.nrows() + self.c22.nrows()
    }

    pub fn assemble(&self) -> DMatrix<f64> {
        assemble_blocks(&self.c11, &self.c12, &self.c21, &self.c22)
    }
}

pub fn rotate_noise(split: &SpectralSplit, w: &DMatrix<f64>) -> Result<CBlocks> {
    let n = split.n();
    if w.shape() != (n, n) {
        return Err(Error::dim(format!(
            "noise must be {n}x{n}, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    let wv1 = w * split.v1();
    let wv2 = w * split.v2();
    Ok(CBlocks {
        c11: split.u1().transpose() * &wv1,
        c12: split.u1().transpose() * &wv2,
        c21: split.u2().transpose() * &wv1,
        c22: split.u2().transpose() * &wv2,
    })
}

/// The second-order correctors `P`, `O` and their `eps^2` blocks `B`, `D`.
///
/// `P^T (Sigma + eps C) O` is block diagonal up to `O(eps^3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorPair {
    pub p: DMatrix<f64>,
    pub o: DMatrix<f64>,
    /// `(n-k) x k`
    pub b: DMatrix<f64>,
    /// `k x (n-k)`
    pub d: DMatrix<f64>,
}

fn sigma_inverse(sigma1: &DVector<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    if let Some(&bad) = sigma1.iter().find(|&&s| !(s.abs() >= tol.singular_sigma)) {
        return Err(Error::SingularSigma {
            value: bad,
            tolerance: tol.singular_sigma,
        });
    }
    Ok(diag(&sigma1.map(|s| 1.0 / s)))
}

pub fn build_correctors(c: &CBlocks, sigma1: &DVector<f64>, eps: f64) -> Result<CorrectorPair> {
    let k = c.k();
    if sigma1.len() != k {
        return Err(Error::dim(format!("Sigma1 has {} entries, C11 is {k}x{k}", sigma1.len())));
    }
    let si = sigma_inverse(sigma1, &Tolerances::default())?;
    let si2 = &si * &si;

    let b = -(&c.c22 * c.c12.transpose() * &si2) + &c.c21 * &si * &c.c11 * &si;
    let d = -(&si2 * c.c21.transpose() * &c.c22) + &si * &c.c11 * &si * &c.c12;

    let m = c.n() - k;
    let zk = DMatrix::zeros(k, k);
    let zm = DMatrix::zeros(m, m);
    let eye = DMatrix::<f64>::identity(k + m, k + m);

    let p1 = assemble_blocks(&zk, &-(&si * c.c21.transpose()), &(&c.c21 * &si), &zm);
    let p2 = assemble_blocks(&zk, &b.transpose(), &-&b, &zm);
    let o1 = assemble_blocks(&zk, &-(&si * &c.c12), &(c.c12.transpose() * &si), &zm);
    let o2 = assemble_blocks(&zk, &d, &-d.transpose(), &zm);

    Ok(CorrectorPair {
        p: &eye + p1 * eps + p2 * (eps * eps),
        o: &eye + o1 * eps + o2 * (eps * eps),
        b,
        d,
    })
}

/// The leading `k` columns of `U P` and `V O`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderBases {
    pub up1: DMatrix<f64>,
    pub vo1: DMatrix<f64>,
}

pub fn first_order_bases(
    split: &SpectralSplit,
    c: &CBlocks,
    pair: &CorrectorPair,
    eps: f64,
) -> Result<FirstOrderBases> {
    if c.n() != split.n() || c.k() != split.k() {
        return Err(Error::dim("C blocks do not match the split".to_string()));
    }
    let si = sigma_inverse(split.sigma1(), &Tolerances::default())?;
    let up1 = split.u1() + split.u2() * (&c.c21 * &si * eps - &pair.b * (eps * eps));
    let vo1 = split.v1()
        + split.v2() * (c.c12.transpose() * &si * eps - pair.d.transpose() * (eps * eps));
    Ok(FirstOrderBases { up1, vo1 })
}

/// `P^T (Sigma + eps C) O` and the size of what is left off the diagonal
/// blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonalization {
    pub transformed: DMatrix<f64>,
    /// Largest entry of the two off-diagonal blocks.
    pub off_diagonal_max: f64,
}

pub fn diagonalize(
    c: &CBlocks,
    sigma1: &DVector<f64>,
    pair: &CorrectorPair,
    eps: f64,
) -> Diagonalization {
    let k = c.k();
    let n = c.n();
    let mut sigma = DMatrix::zeros(n, n);
    for (i, s) in sigma1.iter().enumerate() {
        sigma[(i, i)] = *s;
    }
    let rotated = sigma + c.assemble() * eps;
    let transformed = pair.p.transpose() * rotated * &pair.o;
    let off = max_norm(&transformed.view((0, k), (k, n - k)).into_owned())
        .max(max_norm(&transformed.view((k, 0), (n - k, k)).into_owned()));
    Diagonalization {
        transformed,
        off_diagonal_max: off,
    }
}

/// QR orthonormalization of a nearly orthonormal basis, with the two
/// distances that control how far the basis was from orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalizedBasis {
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    /// `||A^T A - I||_F`
    pub gram_deviation: f64,
    /// `||Q - A||_2`
    pub distance: f64,
}

pub fn orthonormalize_basis(a: &DMatrix<f64>) -> OrthonormalizedBasis {
    let (q, r) = qr_positive(a);
    let k = a.ncols();
    let gram_deviation = (a.transpose() * a - DMatrix::<f64>::identity(k, k)).norm();
    let distance = spectral_norm(&(&q - a));
    OrthonormalizedBasis {
        q,
        r,
        gram_deviation,
        distance,
    }
}
