use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    embed, mean_shift, n0_from_snr_db, normalize, predicted_radius, synth_matrix, ClusterResult,
    ConstellationEmbedding, MeanShiftOptions, MpskScenario, DEFAULT_GUARD, SUPPORTED_ORDERS,
};
use crate::bounds::{mpsk_feasibility, MpskFeasibility};
use crate::error::{Error, Result};
use crate::stats::quantile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyOptions {
    /// Rank-one threshold on `s2 / s1`.
    pub guard: f64,
    /// Floor on the bandwidth, so noiseless input still clusters.
    pub min_radius: f64,
    /// Target noise scale for the feasibility verdict.
    pub alpha: f64,
    /// Also report the supported order nearest to `m_hat` in log scale.
    pub snap: bool,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub merge: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        let ms = MeanShiftOptions::default();
        Self {
            guard: DEFAULT_GUARD,
            min_radius: 1e-9,
            alpha: 0.5,
            snap: false,
            tolerance: ms.tolerance,
            max_iterations: ms.max_iterations,
            merge: ms.merge,
        }
    }
}

impl ClassifyOptions {
    fn mean_shift(&self) -> MeanShiftOptions {
        MeanShiftOptions {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            merge: self.merge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    /// Number of modes found, unsnapped.
    pub m_hat: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_hat_snapped: Option<usize>,
    /// Clustering ran on the first embedded coordinate only.
    pub rank1_path: bool,
    #[serde(skip)]
    pub embedding: ConstellationEmbedding,
    pub singular_values: [f64; 2],
    /// Modes are 2-D; on the rank-one path the second coordinate is zero.
    pub clusters: ClusterResult<2>,
    pub predicted_radius: f64,
    pub bandwidth: f64,
    pub eps_effective: f64,
    pub feasibility: MpskFeasibility,
    pub warnings: Vec<String>,
}

fn snap(m: usize) -> usize {
    let l = (m.max(1) as f64).log2();
    *SUPPORTED_ORDERS
        .iter()
        .min_by(|a, b| ((**a as f64).log2() - l).abs().total_cmp(&((**b as f64).log2() - l).abs()))
        .expect("non-empty")
}

/// Estimate the modulation order of a raw `L x N` sample matrix with known
/// noise level `n0`.
pub fn classify(y: &DMatrix<f64>, n0: f64, options: &ClassifyOptions) -> Result<Classification> {
    let (l, n) = y.shape();
    if !(options.guard >= 0.0 && options.min_radius > 0.0) {
        return Err(Error::invalid("guard", "guard must be >= 0 and min_radius > 0"));
    }
    let (yt, eps_effective) = normalize(y);
    let embedding = embed(&yt, options.guard)?;
    let radius = predicted_radius(n0, l, n)?;
    let bandwidth = radius.max(options.min_radius);
    let ms = options.mean_shift();

    let clusters = if embedding.rank1_flag {
        let line: Vec<[f64; 1]> = embedding.points.iter().map(|p| [p[0]]).collect();
        let r = mean_shift(&line, bandwidth, &ms)?;
        ClusterResult {
            modes: r.modes.iter().map(|m| [m[0], 0.0]).collect(),
            assignments: r.assignments,
            m_hat: r.m_hat,
            radius_used: r.radius_used,
            unconverged: r.unconverged,
        }
    } else {
        mean_shift(&embedding.points, bandwidth, &ms)?
    };

    let mut warnings = Vec::new();
    if clusters.unconverged > 0 {
        warnings.push(format!(
            "NoConvergence: {} mean-shift trajectories hit the {}-iteration cap",
            clusters.unconverged, options.max_iterations
        ));
    }
    Ok(Classification {
        m_hat: clusters.m_hat,
        m_hat_snapped: options.snap.then(|| snap(clusters.m_hat)),
        rank1_path: embedding.rank1_flag,
        singular_values: embedding.singular_values,
        embedding,
        clusters,
        predicted_radius: radius,
        bandwidth,
        eps_effective,
        feasibility: mpsk_feasibility(options.alpha, l)?,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "M_order")]
    pub m_order: usize,
    pub snr_db: f64,
    pub runs: usize,
    pub successes: usize,
    pub rate: f64,
}

/// Success rate of `m_hat == M` for each order and SNR. Run `r` of every
/// cell uses seed `base.seed + r`, so cells share symbol and noise draws up
/// to scale. Rows are ordered by order, then by the given SNR order.
pub fn snr_sweep(
    base: &MpskScenario,
    orders: &[usize],
    snr_db: &[f64],
    runs: usize,
    options: &ClassifyOptions,
) -> Result<Vec<SweepRow>> {
    if orders.is_empty() || snr_db.is_empty() {
        return Err(Error::invalid("snr_db", "the sweep grid is empty"));
    }
    if runs == 0 {
        return Err(Error::invalid("runs", "must be >= 1"));
    }
    let cells: Vec<(usize, f64)> = orders
        .iter()
        .flat_map(|&m| snr_db.iter().map(move |&s| (m, s)))
        .collect();
    for &(m, s) in &cells {
        let mut sc = base.clone();
        sc.m_order = m;
        sc.n0 = n0_from_snr_db(s);
        sc.validate()?;
    }
    let outcomes: Vec<bool> = (0..cells.len() * runs)
        .into_par_iter()
        .map(|idx| {
            let (m, s) = cells[idx / runs];
            let mut sc = base.clone();
            sc.m_order = m;
            sc.n0 = n0_from_snr_db(s);
            sc.seed = base.seed.wrapping_add((idx % runs) as u64);
            let sample = synth_matrix(&sc)?;
            Ok(classify(&sample.y, sc.n0, options)?.m_hat == m)
        })
        .collect::<Result<_>>()?;
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, &(m, s))| {
            let successes = outcomes[c * runs..(c + 1) * runs].iter().filter(|&&ok| ok).count();
            SweepRow {
                m_order: m,
                snr_db: s,
                runs,
                successes,
                rate: successes as f64 / runs as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusCheck {
    pub draws: usize,
    /// 95th percentile of `|| U1~^T (y~_n - y~_n clean) ||` over all points
    /// and draws.
    pub empirical_p95: f64,
    pub predicted: f64,
}

impl RadiusCheck {
    pub fn relative_error(&self) -> f64 {
        (self.empirical_p95 - self.predicted) / self.predicted
    }
}

/// Measure the embedded noise displacement over `draws` noisy realizations
/// (seeds `scenario.seed + d`).
pub fn displacement_radius(scenario: &MpskScenario, draws: usize) -> Result<RadiusCheck> {
    if draws == 0 {
        return Err(Error::invalid("draws", "must be >= 1"));
    }
    scenario.validate()?;
    let per_draw: Vec<Vec<f64>> = (0..draws)
        .into_par_iter()
        .map(|d| {
            let mut sc = scenario.clone();
            sc.seed = scenario.seed.wrapping_add(d as u64);
            let s = synth_matrix(&sc)?;
            let (yt, _) = normalize(&s.y);
            let (ct, _) = normalize(&s.clean);
            let e = embed(&yt, DEFAULT_GUARD)?;
            let disp = e.basis.transpose() * (yt - ct);
            Ok(disp.column_iter().map(|c| c.norm()).collect())
        })
        .collect::<Result<_>>()?;
    let all: Vec<f64> = per_draw.into_iter().flatten().collect();
    Ok(RadiusCheck {
        draws,
        empirical_p95: quantile(&all, 0.95),
        predicted: predicted_radius(scenario.n0, scenario.samples_per_symbol, scenario.symbols)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Verdict;

    #[test]
    fn noiseless_orders() {
        for m in [2, 4, 8, 16] {
            let s = synth_matrix(&MpskScenario::new(m)).unwrap();
            let c = classify(&s.y, 0.0, &ClassifyOptions::default()).unwrap();
            assert_eq!(c.m_hat, m);
            assert_eq!(c.rank1_path, m == 2);
            assert!(c.warnings.is_empty());
        }
    }

    #[test]
    fn feasibility_is_attached() {
        let s = synth_matrix(&MpskScenario::new(4)).unwrap();
        let c = classify(&s.y, 0.0, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.feasibility.verdict, Verdict::Feasible);
        let strict = ClassifyOptions {
            alpha: 0.2,
            ..ClassifyOptions::default()
        };
        let c = classify(&s.y, 0.0, &strict).unwrap();
        assert_eq!(c.feasibility.verdict, Verdict::Infeasible);
        assert_eq!(c.feasibility.min_samples_per_symbol, 100);
    }

    #[test]
    fn carrier_phase_does_not_matter() {
        for i in 0..8 {
            let mut sc = MpskScenario::new(8).with_snr_db(20.0);
            sc.theta_c = i as f64 * 0.7;
            let s = synth_matrix(&sc).unwrap();
            assert_eq!(classify(&s.y, sc.n0, &ClassifyOptions::default()).unwrap().m_hat, 8);
        }
    }

    #[test]
    fn snapping() {
        assert_eq!(snap(3), 4);
        assert_eq!(snap(5), 4);
        assert_eq!(snap(7), 8);
        assert_eq!(snap(1), 2);
        assert_eq!(snap(100), 32);
    }

    #[test]
    fn sweep_shape_and_noiseless_limit() {
        let rows = snr_sweep(
            &MpskScenario::new(4),
            &[2, 4, 8],
            &[120.0],
            3,
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.rate == 1.0));
        assert!(snr_sweep(&MpskScenario::new(4), &[4], &[], 3, &ClassifyOptions::default()).is_err());
    }
}
