//! Closed-form bounds.
//!
//! [`theorem_bound`] evaluates the max-norm bound on
//! `(U1~ - U1 M) - eps N` together with the probability it holds with.
//! [`classic`] holds the standard perturbation and concentration results it is
//! assembled from, and [`feasibility`] turns the order conditions into a
//! planning verdict.
//!
//! Noise is normalized throughout: `W` has i.i.d. `N(0, 1/n)` entries.

pub mod classic;
pub mod feasibility;

pub use classic::{
    barrlund_bound, block_norm_bound, block_spectral_budget, dopico_bound, dopico_bound_with_gap,
    product_tail, szarek_tail, weyl_gaps, BlockBudget, DopicoBound, GapSource, TailBound,
    WeylCheck,
};
pub use feasibility::{
    feasibility, gaussian_dominance, min_samples_per_symbol, mpsk_feasibility, FeasibilityReport, MpskFeasibility,
    Verdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one evaluation of the deviation bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Noise scale.
    pub eps: f64,
    pub n: usize,
    pub k: usize,
    /// Tail parameter of the spectral-norm concentration.
    pub gamma: f64,
    /// Exponent of the entrywise product tail, in `(0, 1/2)`.
    pub beta: f64,
    /// Diagonal of `Sigma1`.
    pub sigma1: Vec<f64>,
    /// `||U1||_max`.
    pub u1_max: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps", format!("{} must be finite and >= 0", self.eps)));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(Error::invalid(
                "k",
                format!("k={} must satisfy 1 <= k < n={}", self.k, self.n),
            ));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("{} must be finite and >= 0", self.gamma)));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::invalid("beta", format!("{} is outside (0, 1/2)", self.beta)));
        }
        if self.sigma1.len() != self.k {
            return Err(Error::invalid(
                "sigma1",
                format!("expected {} entries, got {}", self.k, self.sigma1.len()),
            ));
        }
        if self.sigma1.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("sigma1", "entries must be positive and finite"));
        }
        if !(self.u1_max > 0.0 && self.u1_max <= 1.0) {
            return Err(Error::invalid("u1_max", format!("{} is outside (0, 1]", self.u1_max)));
        }
        Ok(())
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma1.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `||Sigma1^{-1}||_2`.
    pub fn sigma1_inv_norm(&self) -> f64 {
        1.0 / self.sigma_min()
    }
}

/// `(alpha1, alpha2, alpha3) = (1 + gamma + sqrt(k/n), 2 alpha1, 2 + gamma)`.
pub fn alphas(k: usize, n: usize, gamma: f64) -> Result<(f64, f64, f64)> {
    if k >= n {
        return Err(Error::dim(format!("k={k} must be below n={n}")));
    }
    let a1 = 1.0 + gamma + (k as f64 / n as f64).sqrt();
    Ok((a1, 2.0 * a1, 2.0 + gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTerms {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub delta1: f64,
}

pub fn error_terms(inputs: &BoundInputs) -> Result<ErrorTerms> {
    inputs.validate()?;
    let BoundInputs {
        eps, n, k, gamma, beta, ..
    } = *inputs;
    let (a1, a2, a3) = alphas(k, n, gamma)?;
    let s = inputs.sigma1_inv_norm();
    let (nf, kf) = (n as f64, k as f64);

    let e1 = eps.powi(3) * s.powi(2) * (a1 * a1 * a3 + 2.0 * a1 * a1 * a2 + 2.0 * a1 * a2 * a3)
        + eps.powi(4) * s.powi(3) * (a1 * a1 * a2 * a2 + 2.0 * a1 * a1 * a2 * a3)
        + eps.powi(5) * s.powi(4) * (a1 * a1 * a2 * a2 * a3);
    let e2 = eps.powi(2) * s.powi(2) * a1 * a1
        + 2.0 * eps.powi(3) * s.powi(3) * a1 * a1 * a2
        + eps.powi(4) * s.powi(4) * a1 * a1 * a2 * a2;
    let e3 = eps.powi(2)
        * (1.0 + kf)
        * (1.0 + 2.0 / nf.sqrt())
        * (nf - kf).powf(-0.5 + beta)
        * s.powi(2);
    let e4 = eps * a1 * s + eps.powi(2) * s.powi(2) * a1 * a3;
    let delta1 = inputs.sigma_min() - (2.0 + gamma) * eps;

    Ok(ErrorTerms {
        e1,
        e2,
        e3,
        e4,
        delta1,
    })
}

/// Gap used when the singular values of `Sigma1` are distinct:
/// `min{ min_{i != j} |s_i - s_j|, s_min } - 2 (2 + gamma) eps`.
pub fn delta2(sigma1: &[f64], eps: f64, gamma: f64) -> f64 {
    let smin = sigma1.iter().copied().fold(f64::INFINITY, f64::min);
    let mut gap = smin;
    for (i, a) in sigma1.iter().enumerate() {
        for b in &sigma1[i + 1..] {
            gap = gap.min((a - b).abs());
        }
    }
    gap - 2.0 * (2.0 + gamma) * eps
}

/// `1 - 3 exp(-(n-k)^beta + ln(k(n+k))) - 4 exp(-n gamma^2 / 2)`.
///
/// May be negative, in which case the bound carries no probabilistic content.
pub fn probability_floor(n: usize, k: usize, beta: f64, gamma: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let entrywise = -(nf - kf).powf(beta) + (kf * (nf + kf)).ln();
    let spectral = -nf * gamma * gamma / 2.0;
    1.0 - 3.0 * entrywise.exp() - 4.0 * spectral.exp()
}

/// Everything the bound evaluation produces. Serializes to the flat report
/// object written by the `bound` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub delta1: f64,
    pub delta2: Option<f64>,
    /// Right-hand side of the max-norm bound; `None` unless `valid`.
    pub rhs: Option<f64>,
    pub prob_floor: f64,
    pub valid: bool,
    pub violated_conditions: Vec<String>,
}

impl BoundReport {
    /// The probability floor is not positive, so the bound guarantees nothing.
    pub fn is_vacuous(&self) -> bool {
        self.prob_floor <= 0.0
    }
}

pub const COND_DELTA1: &str = "delta1 > 0";
pub const COND_E2: &str = "e2 <= 1/(2*sqrt(k))";
pub const COND_SQRT_K_E2: &str = "sqrt(k)*e2 < 1";
pub const COND_E1: &str = "e1 < 1";

pub fn theorem_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    let terms = error_terms(inputs)?;
    let (alpha1, alpha2, alpha3) = alphas(inputs.k, inputs.n, inputs.gamma)?;
    let ErrorTerms {
        e1,
        e2,
        e3,
        e4,
        delta1,
    } = terms;
    let kf = inputs.k as f64;
    let sk = kf.sqrt();

    let mut violated = Vec::new();
    if !(delta1 > 0.0) {
        violated.push(COND_DELTA1.to_string());
    }
    if !(e2 <= 1.0 / (2.0 * sk)) {
        violated.push(COND_E2.to_string());
    }
    if !(sk * e2 < 1.0) {
        violated.push(COND_SQRT_K_E2.to_string());
    }
    if !(e1 < 1.0) {
        violated.push(COND_E1.to_string());
    }
    let valid = violated.is_empty();

    let rhs = valid.then(|| {
        let root2k = (2.0 * kf).sqrt();
        root2k * e1 / (delta1 * (1.0 - e1))
            + root2k * (inputs.u1_max + e4) * barrlund_bound(inputs.k, e2)
            + e3
    });

    Ok(BoundReport {
        alpha1,
        alpha2,
        alpha3,
        e1,
        e2,
        e3,
        e4,
        delta1,
        delta2: Some(delta2(&inputs.sigma1, inputs.eps, inputs.gamma)),
        rhs,
        prob_floor: probability_floor(inputs.n, inputs.k, inputs.beta, inputs.gamma),
        valid,
        violated_conditions: violated,
    })
}
