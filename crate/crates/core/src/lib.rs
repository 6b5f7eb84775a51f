//! Gaussian approximation of the singular vectors of a noisy low-rank matrix.
//!
//! For `Ỹ = Y + εW` with `Y` of rank `k` and `W` having `N(0, 1/n)` entries,
//! the aligned left singular vectors satisfy
//! `Ũ1 - U1 M = ε U2 U2ᵀ W V1 Σ1⁻¹ + R` with an explicit max-norm bound on `R`.
//!
//! - [`spectral`]: the SVD split, noise rotation, correctors and alignment.
//! - [`bounds`]: the bound itself and the inequalities it is built from.
//! - [`montecarlo`]: seeded trials, coverage and Gaussianity diagnostics.
//! - [`mpsk`]: MPSK order classification from the two leading singular
//!   directions.
//!
//! ```
//! use svnoise::bounds::{theorem_bound, BoundInputs};
//!
//! let report = theorem_bound(&BoundInputs {
//!     eps: 0.0,
//!     n: 10,
//!     k: 2,
//!     gamma: 1.0,
//!     beta: 0.45,
//!     sigma1: vec![2.0, 1.0],
//!     u1_max: 0.5,
//! })?;
//! assert_eq!(report.rhs, Some(0.0));
//! # Ok::<(), svnoise::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod mpsk;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/bounds.md")]
mod book_bounds {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/mpsk.md")]
mod book_mpsk {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
