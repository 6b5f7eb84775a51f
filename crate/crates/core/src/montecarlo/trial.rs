use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{random_orthogonal_from, sample_noise, seeded_rng};
use super::NoiseScenario;
use crate::bounds::{theorem_bound, BoundInputs, BoundReport};
use crate::error::Result;
use crate::linalg::spectral_norm;
use crate::spectral::{
    aligned_residual, gaussian_predictor, left_procrustes, partition_svd, procrustes_rotation,
    SpectralSplit, Tolerances,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialFlags {
    /// A Procrustes cross-product was numerically singular.
    pub degenerate_alignment: bool,
    /// The probability floor is not positive.
    pub vacuous_floor: bool,
    /// The bound's preconditions failed; `rhs` is `NaN`.
    pub invalid_bound: bool,
}

impl TrialFlags {
    /// `;`-separated names of the raised flags, empty when none are.
    pub fn label(&self) -> String {
        let mut out = Vec::new();
        if self.degenerate_alignment {
            out.push("degenerate_alignment");
        }
        if self.vacuous_floor {
            out.push("vacuous_floor");
        }
        if self.invalid_bound {
            out.push("invalid_bound");
        }
        out.join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    /// `||(U1~ - U1 M) - eps N||_max`
    pub resid_max: f64,
    /// Bound on `resid_max`; `NaN` when the bound is invalid.
    pub rhs: f64,
    /// `resid_max <= rhs`.
    pub covered: bool,
    /// `||eps N||_max`
    pub gauss_term_max: f64,
    /// Joint Procrustes distance `sqrt(||U1 M - U1~||_F^2 + ||V1 M - V1~||_F^2)`.
    pub rotation_objective: f64,
    /// `max_i |s_i(Y) - s_i(Y~)|`
    pub max_sigma_gap: f64,
    /// `||eps W||_2`; Weyl's inequality bounds `max_sigma_gap` by it.
    pub noise_norm: f64,
    pub flags: TrialFlags,
}

/// A record plus the matrices needed for distribution diagnostics.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    /// `(U1~ - U1 M) / eps`; zero when `eps = 0`.
    pub deviation: DMatrix<f64>,
    /// The Gaussian predictor `N` for this draw.
    pub predictor: DMatrix<f64>,
}

/// Noiseless matrix, its split and the bound, prepared once per scenario.
#[derive(Debug, Clone)]
pub struct Experiment {
    scenario: NoiseScenario,
    split: SpectralSplit,
    y: DMatrix<f64>,
    bound: BoundReport,
    eps: f64,
}

impl Experiment {
    pub fn new(scenario: &NoiseScenario) -> Result<Self> {
        scenario.validate()?;
        let n = scenario.n;
        let mut rng = seeded_rng(scenario.basis_seed);
        let u = random_orthogonal_from(n, &mut rng);
        let v = random_orthogonal_from(n, &mut rng);
        let split = SpectralSplit::from_factors(
            &u,
            &DVector::from_column_slice(&scenario.spectrum),
            &v,
            &Tolerances::default(),
        )?;
        let y = split.reconstruct();
        let eps = scenario.effective_eps();
        let bound = theorem_bound(&BoundInputs {
            eps,
            n,
            k: scenario.k,
            gamma: scenario.gamma,
            beta: scenario.beta,
            sigma1: scenario.spectrum.clone(),
            u1_max: split.u1_max(),
        })?;
        Ok(Self {
            scenario: scenario.clone(),
            split,
            y,
            bound,
            eps,
        })
    }

    pub fn scenario(&self) -> &NoiseScenario {
        &self.scenario
    }

    pub fn split(&self) -> &SpectralSplit {
        &self.split
    }

    pub fn noiseless(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn bound(&self) -> &BoundReport {
        &self.bound
    }

    /// Noise scale in the normalized convention.
    pub fn effective_eps(&self) -> f64 {
        self.eps
    }

    /// Normalized noise of trial `i`.
    pub fn noise(&self, i: usize) -> DMatrix<f64> {
        sample_noise(self.scenario.n, self.scenario.noise_seed.wrapping_add(i as u64))
    }

    /// Entry variances of the predictor `N`:
    /// `Var N_ij = (U2 U2^T)_ii / (n sigma_j^2)`.
    pub fn predictor_variance(&self) -> DMatrix<f64> {
        let n = self.scenario.n as f64;
        let u1 = self.split.u1();
        let sigma = self.split.sigma1();
        DMatrix::from_fn(u1.nrows(), u1.ncols(), |i, j| {
            let leverage = 1.0 - u1.row(i).norm_squared();
            leverage / (n * sigma[j] * sigma[j])
        })
    }

    pub fn run_trial(&self, i: usize) -> Result<TrialOutcome> {
        let w = self.noise(i);
        let predictor = gaussian_predictor(&self.split, &w)?;
        let u1 = self.split.u1();
        let k = self.split.k();
        let mut flags = TrialFlags {
            vacuous_floor: self.bound.is_vacuous(),
            invalid_bound: !self.bound.valid,
            ..TrialFlags::default()
        };
        let rhs = self.bound.rhs.unwrap_or(f64::NAN);

        if self.eps == 0.0 {
            let record = TrialRecord {
                trial_index: i,
                resid_max: 0.0,
                rhs,
                covered: 0.0 <= rhs,
                gauss_term_max: 0.0,
                rotation_objective: 0.0,
                max_sigma_gap: 0.0,
                noise_norm: 0.0,
                flags,
            };
            return Ok(TrialOutcome {
                record,
                deviation: DMatrix::zeros(u1.nrows(), k),
                predictor,
            });
        }

        let perturbation = &w * self.eps;
        let y_noisy = &self.y + &perturbation;
        let noisy = partition_svd(&y_noisy, k)?;
        let joint = procrustes_rotation(u1, &noisy.u1, self.split.v1(), &noisy.v1)?;
        let left = left_procrustes(u1, &noisy.u1)?;
        flags.degenerate_alignment = joint.degenerate || left.degenerate;
        let res = aligned_residual(u1, &noisy.u1, &left.rotation, self.eps, &predictor)?;

        let clean = self.split.sigma1();
        let max_sigma_gap = noisy
            .singular_values()
            .iter()
            .enumerate()
            .map(|(idx, s)| (s - if idx < k { clean[idx] } else { 0.0 }).abs())
            .fold(0.0, f64::max);

        let deviation = (&noisy.u1 - u1 * &left.rotation) / self.eps;
        let record = TrialRecord {
            trial_index: i,
            resid_max: res.resid_max,
            rhs,
            covered: res.resid_max <= rhs,
            gauss_term_max: res.gauss_term_max,
            rotation_objective: joint.objective,
            max_sigma_gap,
            noise_norm: spectral_norm(&perturbation),
            flags,
        };
        Ok(TrialOutcome {
            record,
            deviation,
            predictor,
        })
    }

    /// All trials, in index order. Runs on the current rayon pool.
    pub fn run_outcomes(&self) -> Result<Vec<TrialOutcome>> {
        (0..self.scenario.trials)
            .into_par_iter()
            .map(|i| self.run_trial(i))
            .collect()
    }

    pub fn run_records(&self) -> Result<Vec<TrialRecord>> {
        (0..self.scenario.trials)
            .into_par_iter()
            .map(|i| self.run_trial(i).map(|o| o.record))
            .collect()
    }
}

/// One-off trial without keeping the prepared experiment.
pub fn run_trial(scenario: &NoiseScenario, i: usize) -> Result<TrialRecord> {
    Ok(Experiment::new(scenario)?.run_trial(i)?.record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::median;

    fn scenario(eps: f64) -> NoiseScenario {
        NoiseScenario::new(40, &[2.0, 1.0], eps)
    }

    #[test]
    fn zero_noise_trial() {
        let r = run_trial(&scenario(0.0), 3).unwrap();
        assert_eq!(r.resid_max, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert!(r.covered);
    }

    #[test]
    fn deterministic_record() {
        let a = run_trial(&scenario(1e-3), 0).unwrap();
        let b = run_trial(&scenario(1e-3), 0).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut s = scenario(1e-2);
        s.trials = 16;
        let exp = Experiment::new(&s).unwrap();
        let par = exp.run_records().unwrap();
        let seq: Vec<_> = (0..16).map(|i| exp.run_trial(i).unwrap().record).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn weyl_holds_per_trial() {
        let exp = Experiment::new(&scenario(0.05)).unwrap();
        for i in 0..10 {
            let r = exp.run_trial(i).unwrap().record;
            assert!(r.max_sigma_gap <= r.noise_norm + 1e-12);
        }
    }

    #[test]
    fn residual_is_second_order() {
        let medians: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&eps| {
                let mut s = scenario(eps);
                s.trials = 40;
                let recs = Experiment::new(&s).unwrap().run_records().unwrap();
                median(&recs.iter().map(|r| r.resid_max).collect::<Vec<_>>())
            })
            .collect();
        let ratio = medians[0] / medians[1];
        assert!((50.0..200.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn flags_label() {
        assert_eq!(TrialFlags::default().label(), "");
        let f = TrialFlags {
            degenerate_alignment: true,
            invalid_bound: true,
            ..TrialFlags::default()
        };
        assert_eq!(f.label(), "degenerate_alignment;invalid_bound");
    }
}
