//! MPSK modulation classification by PCA embedding and mean-shift clustering.
//!
//! A burst of `N` symbols, each sampled `L` times, is stored as an `L x N`
//! matrix. Without noise its rank is two (one for BPSK) and its left singular
//! pair spans the carrier, so projecting the columns on the two leading left
//! singular vectors recovers a scaled, rotated copy of the constellation.
//! Counting the clusters gives the modulation order.
//!
//! Noise model: per-sample noise is `N(0, N0/2)` for a unit-amplitude cosine
//! of power 1/2, so `SNR = 10 log10(1/N0)` dB.

mod classify;
mod cluster;
mod embed;
pub mod io;

pub use classify::{
    classify, displacement_radius, snr_sweep, Classification, ClassifyOptions, RadiusCheck,
    SweepRow,
};
pub use cluster::{mean_shift, ClusterResult, MeanShiftOptions};
pub use embed::{embed, ConstellationEmbedding, DEFAULT_GUARD};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::montecarlo::{seeded_rng, standard_normal_matrix};

pub const SUPPORTED_ORDERS: [usize; 5] = [2, 4, 8, 16, 32];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpskScenario {
    pub m_order: usize,
    /// Carrier frequency in Hz.
    pub f_c: f64,
    /// Symbol period in seconds. `f_c * symbol_period` must be an integer.
    pub symbol_period: f64,
    pub theta_c: f64,
    /// Samples per symbol, `L`.
    pub samples_per_symbol: usize,
    /// Number of symbols, `N`.
    pub symbols: usize,
    /// Noise level; per-sample noise variance is `n0 / 2`.
    pub n0: f64,
    pub seed: u64,
}

impl MpskScenario {
    /// 1 GHz carrier at 10 Msym/s, 21 samples per symbol, 200 symbols,
    /// no noise.
    pub fn new(m_order: usize) -> Self {
        Self {
            m_order,
            f_c: 1e9,
            symbol_period: 1e-7,
            theta_c: 0.0,
            samples_per_symbol: 21,
            symbols: 200,
            n0: 0.0,
            seed: 0,
        }
    }

    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.n0 = n0_from_snr_db(snr_db);
        self
    }

    /// Carrier cycles per symbol, `f_c T`.
    pub fn cycles_per_symbol(&self) -> Result<u64> {
        let c = self.f_c * self.symbol_period;
        let r = c.round();
        if !(c.is_finite() && r >= 1.0 && (c - r).abs() <= 1e-9 * r) {
            return Err(Error::invalid(
                "f_c",
                format!("f_c * symbol_period = {c} is not a positive integer"),
            ));
        }
        Ok(r as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUPPORTED_ORDERS.contains(&self.m_order) {
            return Err(Error::invalid(
                "m_order",
                format!("{} is not one of {SUPPORTED_ORDERS:?}", self.m_order),
            ));
        }
        let c = self.cycles_per_symbol()?;
        let l = self.samples_per_symbol;
        if l < 3 {
            return Err(Error::invalid("samples_per_symbol", format!("{l} must be >= 3")));
        }
        if (2 * c) % l as u64 == 0 {
            return Err(Error::InvariantViolation(format!(
                "samples_per_symbol={l} divides 2 f_c T = {}; the carrier samples are not orthogonal",
                2 * c
            )));
        }
        if self.symbols < self.m_order || self.symbols < 3 {
            return Err(Error::invalid(
                "symbols",
                format!("{} must be >= max(m_order, 3)", self.symbols),
            ));
        }
        if !(self.n0 >= 0.0 && self.n0.is_finite()) {
            return Err(Error::invalid("n0", format!("{} must be finite and >= 0", self.n0)));
        }
        if !self.theta_c.is_finite() {
            return Err(Error::invalid("theta_c", "must be finite"));
        }
        Ok(())
    }

    /// Carrier phase of sample `l` (1-based): `2 pi f_c T l / L + theta_c`.
    fn carrier_phases(&self, c: u64) -> Vec<f64> {
        let l = self.samples_per_symbol as f64;
        (1..=self.samples_per_symbol)
            .map(|i| 2.0 * PI * ((c * i as u64) as f64 / l).fract() + self.theta_c)
            .collect()
    }

    pub fn symbol_phase(&self, index: usize) -> f64 {
        2.0 * PI * index as f64 / self.m_order as f64
    }
}

/// `N0 = 10^(-snr_db / 10)`.
pub fn n0_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpskSample {
    /// Noisy `L x N` sample matrix.
    pub y: DMatrix<f64>,
    /// The same matrix without noise.
    pub clean: DMatrix<f64>,
    /// Constellation index of each symbol; its phase is `2 pi i / M`.
    pub symbol_indices: Vec<usize>,
}

/// Draws symbol indices uniformly, then the noise, from one stream seeded by
/// `scenario.seed`.
pub fn synth_matrix(scenario: &MpskScenario) -> Result<MpskSample> {
    scenario.validate()?;
    let c = scenario.cycles_per_symbol()?;
    let (l, n) = (scenario.samples_per_symbol, scenario.symbols);
    let mut rng = seeded_rng(scenario.seed);
    let symbol_indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..scenario.m_order)).collect();
    let phases = scenario.carrier_phases(c);
    let clean = DMatrix::from_fn(l, n, |i, j| {
        (phases[i] + scenario.symbol_phase(symbol_indices[j])).cos()
    });
    let y = if scenario.n0 > 0.0 {
        &clean + standard_normal_matrix(l, n, &mut rng) * (scenario.n0 / 2.0).sqrt()
    } else {
        clean.clone()
    };
    Ok(MpskSample {
        y,
        clean,
        symbol_indices,
    })
}

/// Closed-form factors of the noiseless matrix, `clean = U Sigma V^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFactors {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    /// `sqrt(L N) / 2`, the common value of both diagonal entries.
    pub sigma: f64,
}

pub fn reference_factors(scenario: &MpskScenario, symbol_indices: &[usize]) -> Result<ReferenceFactors> {
    scenario.validate()?;
    if symbol_indices.len() != scenario.symbols || symbol_indices.iter().any(|&i| i >= scenario.m_order) {
        return Err(Error::dim(format!(
            "expected {} symbol indices below {}",
            scenario.symbols, scenario.m_order
        )));
    }
    let c = scenario.cycles_per_symbol()?;
    let (l, n) = (scenario.samples_per_symbol, scenario.symbols);
    let phases = scenario.carrier_phases(c);
    let su = (2.0 / l as f64).sqrt();
    let sv = (2.0 / n as f64).sqrt();
    let u = DMatrix::from_fn(l, 2, |i, j| su * (phases[i] - j as f64 * FRAC_PI_2).cos());
    let v = DMatrix::from_fn(n, 2, |i, j| {
        sv * (scenario.symbol_phase(symbol_indices[i]) + j as f64 * FRAC_PI_2).cos()
    });
    Ok(ReferenceFactors {
        u,
        v,
        sigma: ((l * n) as f64).sqrt() / 2.0,
    })
}

/// `(2 Y / sqrt(L N), 2 / sqrt(L))`: the matrix scaled so its nonzero
/// singular values are near one, and the matching noise scale.
pub fn normalize(y: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let (l, n) = y.shape();
    let scale = 2.0 / ((l * n) as f64).sqrt();
    (y * scale, 2.0 / (l as f64).sqrt())
}

/// 95% radius of the embedded noise cloud around each constellation point:
/// `2.45 sqrt(2 N0 (1 - 2/N) / (L N))`.
pub fn predicted_radius(n0: f64, samples_per_symbol: usize, symbols: usize) -> Result<f64> {
    if !(n0 >= 0.0 && n0.is_finite()) {
        return Err(Error::invalid("n0", format!("{n0} must be finite and >= 0")));
    }
    if samples_per_symbol == 0 {
        return Err(Error::invalid("samples_per_symbol", "must be >= 1"));
    }
    if symbols <= 2 {
        return Err(Error::invalid("symbols", format!("{symbols} must be > 2")));
    }
    let (l, n) = (samples_per_symbol as f64, symbols as f64);
    Ok(2.45 * (2.0 * n0 * (1.0 - 2.0 / n) / (l * n)).sqrt())
}
