//! Report files.
//!
//! The trials CSV has exactly the columns
//! `trial_index,resid_max,rhs,covered,gauss_term_max,rotation_objective,flags`.
//! Reals are written in shortest round-trip form, `rhs` is `NaN` when the
//! bound is invalid, `covered` is `true`/`false` and `flags` is a
//! `;`-separated list (empty when no flag is raised).

use std::io::Write;

use serde::Serialize;

use super::{CoverageReport, GaussianityReport, NoiseScenario, TrialRecord};
use crate::bounds::BoundReport;
use crate::stats::median;

pub const TRIALS_HEADER: [&str; 7] = [
    "trial_index",
    "resid_max",
    "rhs",
    "covered",
    "gauss_term_max",
    "rotation_objective",
    "flags",
];

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIALS_HEADER)?;
    for r in records {
        w.write_record([
            r.trial_index.to_string(),
            r.resid_max.to_string(),
            r.rhs.to_string(),
            r.covered.to_string(),
            r.gauss_term_max.to_string(),
            r.rotation_objective.to_string(),
            r.flags.label(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The summary JSON of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub scenario: NoiseScenario,
    pub effective_eps: f64,
    pub u1_max: f64,
    pub bound: BoundReport,
    pub coverage: CoverageReport,
    pub median_resid_max: f64,
    pub median_gauss_term_max: f64,
    pub max_resid_max: f64,
    pub degenerate_alignments: usize,
    pub weyl_violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaussianity: Option<GaussianitySummary>,
}

/// The scalar part of a [`GaussianityReport`].
#[derive(Debug, Clone, Serialize)]
pub struct GaussianitySummary {
    pub trials: usize,
    pub pooled_skewness: f64,
    pub pooled_excess_kurtosis: f64,
    pub pooled_variance_ratio: f64,
    pub max_abs_skewness: f64,
    pub max_abs_excess_kurtosis: f64,
    pub max_abs_mean_z: f64,
    pub skewness_threshold: f64,
    pub kurtosis_threshold: f64,
    pub entries_flagged: usize,
}

impl From<&GaussianityReport> for GaussianitySummary {
    fn from(r: &GaussianityReport) -> Self {
        Self {
            trials: r.trials,
            pooled_skewness: r.pooled.skewness,
            pooled_excess_kurtosis: r.pooled.excess_kurtosis,
            pooled_variance_ratio: r.pooled_variance_ratio,
            max_abs_skewness: r.max_abs_skewness,
            max_abs_excess_kurtosis: r.max_abs_excess_kurtosis,
            max_abs_mean_z: r.max_abs_mean_z,
            skewness_threshold: r.skewness_threshold,
            kurtosis_threshold: r.kurtosis_threshold,
            entries_flagged: r.entries_flagged,
        }
    }
}

impl VerifySummary {
    pub fn new(
        scenario: &NoiseScenario,
        effective_eps: f64,
        u1_max: f64,
        bound: &BoundReport,
        records: &[TrialRecord],
        coverage: CoverageReport,
    ) -> Self {
        let col = |f: fn(&TrialRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
        Self {
            scenario: scenario.clone(),
            effective_eps,
            u1_max,
            bound: bound.clone(),
            coverage,
            median_resid_max: median(&col(|r| r.resid_max)),
            median_gauss_term_max: median(&col(|r| r.gauss_term_max)),
            max_resid_max: records.iter().map(|r| r.resid_max).fold(0.0, f64::max),
            degenerate_alignments: records.iter().filter(|r| r.flags.degenerate_alignment).count(),
            weyl_violations: records
                .iter()
                .filter(|r| r.max_sigma_gap > r.noise_norm * (1.0 + 1e-12) + 1e-12)
                .count(),
            gaussianity: None,
        }
    }
}
