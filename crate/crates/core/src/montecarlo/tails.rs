//! Empirical counterparts of the concentration results in
//! [`crate::bounds::classic`].

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::noise::{seeded_rng, standard_normal_matrix};
use crate::bounds::{block_spectral_budget, product_tail, szarek_tail, TailBound};
use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::stats::binomial_slack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalTail {
    pub draws: usize,
    pub exceedances: usize,
    pub fraction: f64,
    pub threshold: f64,
    pub bound: f64,
    /// Two-sigma binomial slack at the bound.
    pub slack: f64,
}

impl EmpiricalTail {
    fn new(draws: usize, exceedances: usize, tail: TailBound) -> Self {
        Self {
            draws,
            exceedances,
            fraction: exceedances as f64 / draws as f64,
            threshold: tail.threshold,
            bound: tail.bound,
            slack: binomial_slack(tail.bound, draws),
        }
    }

    /// Exceedance rate at or below the bound plus slack.
    pub fn holds(&self) -> bool {
        self.fraction <= self.bound + self.slack
    }
}

fn check_draws(draws: usize) -> Result<()> {
    if draws == 0 {
        return Err(Error::invalid("draws", "must be >= 1"));
    }
    Ok(())
}

/// Largest singular value of `n x k` matrices with `N(0, 1/n)` entries
/// against `1 + sqrt(k/n) + gamma`.
pub fn empirical_szarek(
    n: usize,
    k: usize,
    gamma: f64,
    draws: usize,
    seed: u64,
) -> Result<EmpiricalTail> {
    check_draws(draws)?;
    if k == 0 || k > n {
        return Err(Error::dim(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let tail = szarek_tail(k, n, gamma);
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = seeded_rng(seed);
    let exceed = (0..draws)
        .filter(|_| {
            let g = standard_normal_matrix(n, k, &mut rng) * scale;
            singular_values(&g)[0] > tail.threshold
        })
        .count();
    Ok(EmpiricalTail::new(draws, exceed, tail))
}

/// Mean of `n` products of independent standard normal pairs against
/// `n^(beta - 1/2)`.
pub fn empirical_product_tail(n: usize, beta: f64, draws: usize, seed: u64) -> Result<EmpiricalTail> {
    check_draws(draws)?;
    if n == 0 {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    let tail = product_tail(n, beta);
    let mut rng = seeded_rng(seed);
    let exceed = (0..draws)
        .filter(|_| {
            let s: f64 = (0..n)
                .map(|_| {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    a * b
                })
                .sum();
            s / n as f64 > tail.threshold
        })
        .count();
    Ok(EmpiricalTail::new(draws, exceed, tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MgfCheck {
    pub theta: f64,
    pub samples: usize,
    pub empirical: f64,
    /// `sqrt(1 / (1 - theta^2))`
    pub analytic: f64,
}

impl MgfCheck {
    pub fn relative_error(&self) -> f64 {
        (self.empirical - self.analytic).abs() / self.analytic
    }
}

/// Sample mean of `exp(theta X Y)` for independent standard normals.
///
/// For `theta >= 1/2` the estimator has infinite variance, so its error
/// shrinks slower than `1/sqrt(samples)`.
pub fn mgf_oracle(theta: f64, samples: usize, seed: u64) -> Result<MgfCheck> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::invalid("theta", format!("{theta} is outside [0, 1)")));
    }
    check_draws(samples)?;
    let mut rng = seeded_rng(seed);
    let sum: f64 = (0..samples)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            (theta * a * b).exp()
        })
        .sum();
    Ok(MgfCheck {
        theta,
        samples,
        empirical: sum / samples as f64,
        analytic: (1.0 / (1.0 - theta * theta)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub draws: usize,
    /// Draws where all four quadrant norms were inside their budgets.
    pub within: usize,
    pub fraction: f64,
    pub probability: f64,
    pub slack: f64,
}

impl BudgetCheck {
    pub fn holds(&self) -> bool {
        self.fraction >= self.probability - self.slack
    }
}

/// Quadrant spectral norms of `n x n` normalized Gaussian matrices against
/// their budgets.
pub fn empirical_block_budget(
    k: usize,
    n: usize,
    gamma: f64,
    draws: usize,
    seed: u64,
) -> Result<BudgetCheck> {
    check_draws(draws)?;
    let budget = block_spectral_budget(k, n, gamma)?;
    let scale = 1.0 / (n as f64).sqrt();
    let mut rng = seeded_rng(seed);
    let within = (0..draws)
        .filter(|_| budget.contains(&(standard_normal_matrix(n, n, &mut rng) * scale), k))
        .count();
    let p = budget.probability;
    Ok(BudgetCheck {
        draws,
        within,
        fraction: within as f64 / draws as f64,
        probability: p,
        slack: binomial_slack(p, draws),
    })
}
