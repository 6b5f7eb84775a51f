use nalgebra::DMatrix;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stats::{moments, Moments};

const MIN_TRIALS: usize = 100;
/// Family-wise false-alarm rate for the per-entry thresholds.
const FAMILY_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntryDiagnostics {
    pub row: usize,
    pub col: usize,
    pub mean: f64,
    /// Sample mean over its standard error under the analytic variance.
    pub mean_z: f64,
    /// Sample variance over the analytic variance.
    pub variance_ratio: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Moment diagnostics of a stack of deviation matrices against a centered
/// Gaussian with known entry variances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianityReport {
    pub trials: usize,
    pub entries: Vec<EntryDiagnostics>,
    pub max_abs_skewness: f64,
    pub max_abs_excess_kurtosis: f64,
    pub max_abs_mean_z: f64,
    /// Per-entry thresholds from the sampling distribution of the sample
    /// skewness (`sqrt(6/T)`) and kurtosis (`sqrt(24/T)`), Bonferroni-scaled
    /// to a 1% family-wise rate.
    pub skewness_threshold: f64,
    pub kurtosis_threshold: f64,
    pub mean_z_threshold: f64,
    /// Entries exceeding any per-entry threshold.
    pub entries_flagged: usize,
    /// Moments of all entries pooled after dividing by the analytic standard
    /// deviation.
    pub pooled: Moments,
    /// Pooled second moment about zero of the standardized entries.
    pub pooled_variance_ratio: f64,
    pub pooled_skewness_threshold: f64,
    pub pooled_kurtosis_threshold: f64,
}

impl GaussianityReport {
    /// Pooled skewness and excess kurtosis are inside the given limits.
    pub fn pooled_within(&self, skewness: f64, kurtosis: f64) -> bool {
        self.pooled.skewness.abs() < skewness && self.pooled.excess_kurtosis.abs() < kurtosis
    }

    /// Pooled moments inside their sampling thresholds and no entry flagged.
    pub fn consistent_with_gaussian(&self) -> bool {
        self.entries_flagged == 0
            && self.pooled_within(self.pooled_skewness_threshold, self.pooled_kurtosis_threshold)
    }
}

fn two_sided_z(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

pub fn gaussianity_diagnostics(
    samples: &[DMatrix<f64>],
    variance: &DMatrix<f64>,
) -> Result<GaussianityReport> {
    let t = samples.len();
    if t < MIN_TRIALS {
        return Err(Error::InsufficientSamples {
            needed: MIN_TRIALS,
            got: t,
        });
    }
    let shape = variance.shape();
    if let Some(bad) = samples.iter().find(|m| m.shape() != shape) {
        return Err(Error::dim(format!(
            "samples must be {}x{}, got {:?}",
            shape.0,
            shape.1,
            bad.shape()
        )));
    }
    if variance.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateInput("analytic variances must be positive".to_string()));
    }

    let tf = t as f64;
    let m = shape.0 * shape.1;
    let z_entry = two_sided_z(FAMILY_ALPHA / m as f64);
    let skewness_threshold = z_entry * (6.0 / tf).sqrt();
    let kurtosis_threshold = z_entry * (24.0 / tf).sqrt();

    let mut entries = Vec::with_capacity(m);
    let mut pooled = Vec::with_capacity(m * t);
    let mut column = vec![0.0; t];
    for j in 0..shape.1 {
        for i in 0..shape.0 {
            for (slot, s) in column.iter_mut().zip(samples) {
                *slot = s[(i, j)];
            }
            let mo = moments(&column);
            let var = variance[(i, j)];
            let sd = var.sqrt();
            pooled.extend(column.iter().map(|x| x / sd));
            entries.push(EntryDiagnostics {
                row: i,
                col: j,
                mean: mo.mean,
                mean_z: mo.mean / (var / tf).sqrt(),
                variance_ratio: mo.variance / var,
                skewness: mo.skewness,
                excess_kurtosis: mo.excess_kurtosis,
            });
        }
    }

    let max_abs = |f: fn(&EntryDiagnostics) -> f64| entries.iter().map(|e| f(e).abs()).fold(0.0, f64::max);
    let max_abs_skewness = max_abs(|e| e.skewness);
    let max_abs_excess_kurtosis = max_abs(|e| e.excess_kurtosis);
    let max_abs_mean_z = max_abs(|e| e.mean_z);
    let entries_flagged = entries
        .iter()
        .filter(|e| {
            !(e.skewness.abs() <= skewness_threshold
                && e.excess_kurtosis.abs() <= kurtosis_threshold
                && e.mean_z.abs() <= z_entry)
        })
        .count();

    let total = pooled.len() as f64;
    let z_pooled = two_sided_z(FAMILY_ALPHA);
    let pooled_variance_ratio = pooled.iter().map(|x| x * x).sum::<f64>() / total;
    Ok(GaussianityReport {
        trials: t,
        max_abs_skewness,
        max_abs_excess_kurtosis,
        max_abs_mean_z,
        skewness_threshold,
        kurtosis_threshold,
        mean_z_threshold: z_entry,
        entries_flagged,
        pooled: moments(&pooled),
        pooled_variance_ratio,
        pooled_skewness_threshold: z_pooled * (6.0 / total).sqrt(),
        pooled_kurtosis_threshold: z_pooled * (24.0 / total).sqrt(),
        entries,
    })
}
