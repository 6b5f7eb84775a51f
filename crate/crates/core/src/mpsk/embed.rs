use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{apply_sign_rule, sorted_svd};

/// Default threshold on `s2 / s1` below which the input is treated as
/// rank one.
pub const DEFAULT_GUARD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstellationEmbedding {
    /// Column `n` of the input projected on the two leading left singular
    /// vectors.
    pub points: Vec<[f64; 2]>,
    pub singular_values: [f64; 2],
    /// `s2 / s1` is below the guard.
    pub rank1_flag: bool,
    /// The two leading left singular vectors, `L x 2`.
    #[serde(skip)]
    pub basis: DMatrix<f64>,
}

impl ConstellationEmbedding {
    pub fn ratio(&self) -> f64 {
        self.singular_values[1] / self.singular_values[0]
    }
}

pub fn embed(y: &DMatrix<f64>, guard: f64) -> Result<ConstellationEmbedding> {
    let (l, n) = y.shape();
    if l < 2 || n < 2 {
        return Err(Error::dim(format!("need at least 2 rows and 2 columns, got {l}x{n}")));
    }
    let mut svd = sorted_svd(y);
    apply_sign_rule(&mut svd.u, &mut svd.v);
    let s = &svd.singular_values;
    if !(s[0] > 0.0) {
        return Err(Error::DegenerateInput("leading singular value is zero".to_string()));
    }
    let s2 = if s.len() > 1 { s[1] } else { 0.0 };
    let basis = svd.u.columns(0, 2).into_owned();
    let proj = basis.transpose() * y;
    Ok(ConstellationEmbedding {
        points: proj.column_iter().map(|c| [c[0], c[1]]).collect(),
        singular_values: [s[0], s2],
        rank1_flag: s2 / s[0] < guard,
        basis,
    })
}
