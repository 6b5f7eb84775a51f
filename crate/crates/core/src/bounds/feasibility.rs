//! Planning: is the Gaussian term the leading part of the deviation?
//!
//! The Gaussian term has average size `eps / sqrt(n)`; the bound's leading
//! terms are `eps^2 ||U1||_max` and `eps^2 n^(beta - 1/2)`. The Gaussian term
//! dominates while `eps` is small against
//! `min{ n^(-beta), 1 / (||U1||_max sqrt(n)) }`.

use serde::{Deserialize, Serialize};

use super::BoundInputs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// `min{ n^(-beta), 1 / (||U1||_max sqrt(n)) }`
    pub threshold: f64,
    /// `eps / threshold`; below one the Gaussian term leads.
    pub margin: f64,
    pub verdict: Verdict,
}

pub fn feasibility(inputs: &BoundInputs) -> Result<FeasibilityReport> {
    inputs.validate()?;
    gaussian_dominance(inputs.eps, inputs.n, inputs.beta, inputs.u1_max)
}

/// [`feasibility`] from the four quantities it depends on.
pub fn gaussian_dominance(eps: f64, n: usize, beta: f64, u1_max: f64) -> Result<FeasibilityReport> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", format!("{eps} must be finite and >= 0")));
    }
    if n < 2 {
        return Err(Error::invalid("n", format!("{n} must be >= 2")));
    }
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::invalid("beta", format!("{beta} is outside (0, 1/2)")));
    }
    if !(u1_max > 0.0 && u1_max <= 1.0) {
        return Err(Error::invalid("u1_max", format!("{u1_max} is outside (0, 1]")));
    }
    let nf = n as f64;
    let threshold = nf.powf(-beta).min(1.0 / (u1_max * nf.sqrt()));
    let margin = eps / threshold;
    Ok(FeasibilityReport {
        threshold,
        margin,
        verdict: if margin < 1.0 {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
    })
}

/// Smallest samples-per-symbol count `L` with `2 / sqrt(L) <= alpha`,
/// i.e. `ceil(4 / alpha^2)`.
pub fn min_samples_per_symbol(alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be positive and finite")));
    }
    let raw = 4.0 / (alpha * alpha);
    // 4 / 0.2^2 evaluates to 99.99999999999997; snap values that are an
    // integer up to rounding.
    let snapped = if (raw - raw.round()).abs() <= 1e-9 * raw.max(1.0) {
        raw.round()
    } else {
        raw.ceil()
    };
    Ok(snapped as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpskFeasibility {
    pub alpha: f64,
    pub samples_per_symbol: usize,
    /// `2 / sqrt(L)`
    pub eps_effective: f64,
    pub min_samples_per_symbol: u64,
    pub verdict: Verdict,
}

pub fn mpsk_feasibility(alpha: f64, samples_per_symbol: usize) -> Result<MpskFeasibility> {
    let min_l = min_samples_per_symbol(alpha)?;
    Ok(MpskFeasibility {
        alpha,
        samples_per_symbol,
        eps_effective: 2.0 / (samples_per_symbol as f64).sqrt(),
        min_samples_per_symbol: min_l,
        verdict: if samples_per_symbol as u64 >= min_l {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn inputs(eps: f64) -> BoundInputs {
        BoundInputs {
            eps,
            n: 100,
            k: 2,
            gamma: 0.5,
            beta: 0.4,
            sigma1: vec![2.0, 1.0],
            u1_max: 0.1,
        }
    }

    #[test]
    fn zero_noise_is_feasible() {
        let r = feasibility(&inputs(0.0)).unwrap();
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.verdict, Verdict::Feasible);
    }

    #[test]
    fn threshold_and_margin() {
        let r = feasibility(&inputs(0.05)).unwrap();
        assert_abs_diff_eq!(r.threshold, 100f64.powf(-0.4), epsilon = 1e-15);
        assert_abs_diff_eq!(r.threshold, 0.1585, epsilon = 1e-4);
        assert_abs_diff_eq!(r.margin, 0.315, epsilon = 1e-3);
        assert_eq!(r.verdict, Verdict::Feasible);
        assert_eq!(feasibility(&inputs(0.5)).unwrap().verdict, Verdict::Infeasible);
    }

    #[test]
    fn mpsk_mode() {
        assert_eq!(min_samples_per_symbol(0.2).unwrap(), 100);
        assert_eq!(min_samples_per_symbol(0.5).unwrap(), 16);
        assert_eq!(min_samples_per_symbol(0.3).unwrap(), 45);
        assert!(min_samples_per_symbol(0.0).is_err());
        let f = mpsk_feasibility(0.2, 21).unwrap();
        assert_eq!(f.verdict, Verdict::Infeasible);
        assert_eq!(mpsk_feasibility(0.2, 100).unwrap().verdict, Verdict::Feasible);
    }
}
