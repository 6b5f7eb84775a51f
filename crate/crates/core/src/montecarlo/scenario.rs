use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `eps` scales the noise matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    /// `Y~ = Y + eps W` with `W` entries `N(0, 1/n)`. The bound is stated in
    /// this scale.
    #[default]
    Normalized,
    /// `Y~ = Y + eps G` with `G` entries `N(0, 1)`, i.e. `eps sqrt(n)` in the
    /// normalized scale.
    Unit,
}

impl NoiseConvention {
    /// Noise scale expressed in the normalized convention.
    pub fn effective_eps(self, eps: f64, n: usize) -> f64 {
        match self {
            NoiseConvention::Normalized => eps,
            NoiseConvention::Unit => eps * (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseScenario {
    pub n: usize,
    pub k: usize,
    /// The `k` nonzero singular values, non-increasing.
    pub spectrum: Vec<f64>,
    pub eps: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Seeds the orthogonal factors of the noiseless matrix.
    pub basis_seed: u64,
    pub trials: usize,
    /// Trial `i` draws its noise from seed `noise_seed + i`.
    pub noise_seed: u64,
    #[serde(default)]
    pub convention: NoiseConvention,
}

impl NoiseScenario {
    /// A scenario with the given shape and spectrum and defaults elsewhere:
    /// `gamma = 1`, `beta = 0.45`, seeds 1 and 0, 100 trials.
    pub fn new(n: usize, spectrum: &[f64], eps: f64) -> Self {
        Self {
            n,
            k: spectrum.len(),
            spectrum: spectrum.to_vec(),
            eps,
            gamma: 1.0,
            beta: 0.45,
            basis_seed: 1,
            trials: 100,
            noise_seed: 0,
            convention: NoiseConvention::Normalized,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("n", format!("{} must be >= 2", self.n)));
        }
        if self.k == 0 || self.k >= self.n {
            return Err(Error::invalid("k", format!("k={} must satisfy 1 <= k < n={}", self.k, self.n)));
        }
        if self.spectrum.len() != self.k {
            return Err(Error::invalid(
                "spectrum",
                format!("expected k={} values, got {}", self.k, self.spectrum.len()),
            ));
        }
        if self.spectrum.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("spectrum", "values must be positive and finite"));
        }
        if self.spectrum.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("spectrum", "values must be sorted non-increasing"));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid("eps", format!("{} must be finite and >= 0", self.eps)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("{} must be finite and >= 0", self.gamma)));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::invalid("beta", format!("{} is outside (0, 1/2)", self.beta)));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        Ok(())
    }

    pub fn effective_eps(&self) -> f64 {
        self.convention.effective_eps(self.eps, self.n)
    }
}
