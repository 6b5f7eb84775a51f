use serde::{Deserialize, Serialize};

use super::TrialRecord;
use crate::stats::binomial_slack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoverageVerdict {
    Pass,
    Fail,
    /// The probability floor is not positive; there is nothing to test.
    SkippedVacuous,
    /// The bound's preconditions failed, so no trial has a finite bound.
    SkippedInvalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: usize,
    pub covered: usize,
    pub coverage: f64,
    pub prob_floor: f64,
    /// Two-sigma binomial slack at the floor.
    pub slack: f64,
    pub verdict: CoverageVerdict,
}

pub fn coverage_report(records: &[TrialRecord], prob_floor: f64) -> CoverageReport {
    let trials = records.len();
    let covered = records.iter().filter(|r| r.covered).count();
    let coverage = if trials == 0 {
        f64::NAN
    } else {
        covered as f64 / trials as f64
    };
    let slack = if trials == 0 {
        f64::NAN
    } else {
        binomial_slack(prob_floor, trials)
    };
    let verdict = if prob_floor <= 0.0 {
        CoverageVerdict::SkippedVacuous
    } else if records.iter().any(|r| r.flags.invalid_bound) {
        CoverageVerdict::SkippedInvalid
    } else if coverage >= prob_floor - slack {
        CoverageVerdict::Pass
    } else {
        CoverageVerdict::Fail
    };
    CoverageReport {
        trials,
        covered,
        coverage,
        prob_floor,
        slack,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::TrialFlags;

    fn rec(i: usize, covered: bool) -> TrialRecord {
        TrialRecord {
            trial_index: i,
            resid_max: 0.0,
            rhs: 1.0,
            covered,
            gauss_term_max: 0.0,
            rotation_objective: 0.0,
            max_sigma_gap: 0.0,
            noise_norm: 0.0,
            flags: TrialFlags::default(),
        }
    }

    #[test]
    fn all_covered_passes() {
        let recs: Vec<_> = (0..10).map(|i| rec(i, true)).collect();
        let r = coverage_report(&recs, 0.9);
        assert_eq!(r.coverage, 1.0);
        assert_eq!(r.verdict, CoverageVerdict::Pass);
    }

    #[test]
    fn vacuous_floor_is_skipped() {
        let recs: Vec<_> = (0..10).map(|i| rec(i, false)).collect();
        assert_eq!(coverage_report(&recs, -3.0).verdict, CoverageVerdict::SkippedVacuous);
    }

    #[test]
    fn low_coverage_fails() {
        let recs: Vec<_> = (0..100).map(|i| rec(i, i % 2 == 0)).collect();
        let r = coverage_report(&recs, 0.975);
        assert_eq!(r.coverage, 0.5);
        assert_eq!(r.verdict, CoverageVerdict::Fail);
    }

    #[test]
    fn invalid_bound_is_skipped() {
        let mut recs: Vec<_> = (0..5).map(|i| rec(i, false)).collect();
        for r in &mut recs {
            r.flags.invalid_bound = true;
        }
        assert_eq!(coverage_report(&recs, 0.9).verdict, CoverageVerdict::SkippedInvalid);
    }
}
