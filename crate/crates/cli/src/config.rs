//! Flat TOML configs, one shape per subcommand. Unknown keys are rejected.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use svnoise::bounds::BoundInputs;
use svnoise::montecarlo::{NoiseConvention, NoiseScenario};
use svnoise::mpsk::{n0_from_snr_db, ClassifyOptions, MpskScenario};

/// Parse `path`, or an empty document when no config was given.
pub fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config {}", p.display()))
        }
        None => toml::from_str("").context("no --config given and the command has required keys"),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub eps: f64,
    pub n: usize,
    pub k: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub sigma1: Vec<f64>,
    pub u1_max: f64,
}

impl BoundConfig {
    pub fn inputs(&self) -> BoundInputs {
        BoundInputs {
            eps: self.eps,
            n: self.n,
            k: self.k,
            gamma: self.gamma,
            beta: self.beta,
            sigma1: self.sigma1.clone(),
            u1_max: self.u1_max,
        }
    }
}

fn default_gamma() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    0.45
}

fn default_basis_seed() -> u64 {
    1
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub n: usize,
    pub spectrum: Vec<f64>,
    pub eps: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_basis_seed")]
    pub basis_seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub noise_seed: u64,
    #[serde(default)]
    pub convention: NoiseConvention,
    /// Also run the moment diagnostics (needs at least 100 trials).
    #[serde(default)]
    pub gaussianity: bool,
}

impl VerifyConfig {
    pub fn apply(&mut self, seed: Option<u64>, trials: Option<usize>) {
        if let Some(s) = seed {
            self.noise_seed = s;
        }
        if let Some(t) = trials {
            self.trials = t;
        }
    }

    pub fn scenario(&self) -> NoiseScenario {
        NoiseScenario {
            n: self.n,
            k: self.spectrum.len(),
            spectrum: self.spectrum.clone(),
            eps: self.eps,
            gamma: self.gamma,
            beta: self.beta,
            basis_seed: self.basis_seed,
            trials: self.trials,
            noise_seed: self.noise_seed,
            convention: self.convention,
        }
    }
}

/// Either `alpha` (sample-count planning) or `eps`, `n`, `beta`, `u1_max`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub alpha: Option<f64>,
    pub samples_per_symbol: Option<usize>,
    pub eps: Option<f64>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub u1_max: Option<f64>,
}

/// MPSK scenario keys shared by `classify` and `sweep`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MpskConfig {
    pub m_order: usize,
    pub f_c: f64,
    pub symbol_period: f64,
    pub theta_c: f64,
    pub samples_per_symbol: usize,
    pub symbols: usize,
    /// Noise level; ignored when `snr_db` is set.
    pub n0: f64,
    /// Single SNR for `classify`.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub guard: f64,
    pub min_radius: f64,
    pub alpha: f64,
    pub snap: bool,
    pub max_iterations: usize,
    /// Sweep grid.
    pub orders: Vec<usize>,
    pub snr_grid: Vec<f64>,
    pub runs: usize,
}

impl Default for MpskConfig {
    fn default() -> Self {
        let sc = MpskScenario::new(4);
        let opts = ClassifyOptions::default();
        Self {
            m_order: sc.m_order,
            f_c: sc.f_c,
            symbol_period: sc.symbol_period,
            theta_c: sc.theta_c,
            samples_per_symbol: sc.samples_per_symbol,
            symbols: sc.symbols,
            n0: sc.n0,
            snr_db: None,
            seed: sc.seed,
            guard: opts.guard,
            min_radius: opts.min_radius,
            alpha: opts.alpha,
            snap: opts.snap,
            max_iterations: opts.max_iterations,
            orders: vec![2, 4, 8],
            snr_grid: vec![14.0, 10.0, 6.0, 2.0, -2.0],
            runs: 20,
        }
    }
}

impl MpskConfig {
    pub fn apply(&mut self, seed: Option<u64>, trials: Option<usize>) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(t) = trials {
            self.runs = t;
        }
        if let Some(snr) = self.snr_db {
            self.n0 = n0_from_snr_db(snr);
        }
    }

    pub fn scenario(&self) -> MpskScenario {
        MpskScenario {
            m_order: self.m_order,
            f_c: self.f_c,
            symbol_period: self.symbol_period,
            theta_c: self.theta_c,
            samples_per_symbol: self.samples_per_symbol,
            symbols: self.symbols,
            n0: self.n0,
            seed: self.seed,
        }
    }

    pub fn options(&self) -> ClassifyOptions {
        ClassifyOptions {
            guard: self.guard,
            min_radius: self.min_radius,
            alpha: self.alpha,
            snap: self.snap,
            max_iterations: self.max_iterations,
            ..ClassifyOptions::default()
        }
    }
}
