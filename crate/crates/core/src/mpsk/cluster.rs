use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanShiftOptions {
    /// Stop when a step is shorter than `tolerance * bandwidth`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Converged positions closer than `merge * bandwidth` share a mode.
    pub merge: f64,
}

impl Default for MeanShiftOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_iterations: 500,
            merge: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult<const D: usize> {
    #[serde(serialize_with = "serialize_modes")]
    pub modes: Vec<[f64; D]>,
    /// Mode index of each input point.
    pub assignments: Vec<usize>,
    pub m_hat: usize,
    pub radius_used: f64,
    /// Trajectories that hit the iteration cap; those points were assigned
    /// to the nearest mode.
    pub unconverged: usize,
}

fn serialize_modes<S: serde::Serializer, const D: usize>(
    modes: &[[f64; D]],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(modes.iter().map(|m| m.as_slice()))
}

fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian-kernel mean shift with bandwidth `radius`, started from every
/// point.
pub fn mean_shift<const D: usize>(
    points: &[[f64; D]],
    radius: f64,
    options: &MeanShiftOptions,
) -> Result<ClusterResult<D>> {
    if points.is_empty() {
        return Err(Error::invalid("points", "need at least one point"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius", format!("{radius} must be positive and finite")));
    }
    let inv = 1.0 / (2.0 * radius * radius);
    let stop2 = (options.tolerance * radius).powi(2);

    let climb = |start: [f64; D]| -> ([f64; D], bool) {
        let mut x = start;
        for _ in 0..options.max_iterations {
            let mut num = [0.0; D];
            let mut den = 0.0;
            for p in points {
                let w = (-dist2(&x, p) * inv).exp();
                den += w;
                for (acc, v) in num.iter_mut().zip(p) {
                    *acc += w * v;
                }
            }
            if den == 0.0 {
                return (x, false);
            }
            let next = num.map(|v| v / den);
            let step = dist2(&next, &x);
            x = next;
            if step < stop2 {
                return (x, true);
            }
        }
        (x, false)
    };
    let ends: Vec<([f64; D], bool)> = points.iter().map(|&p| climb(p)).collect();

    let merge2 = (options.merge * radius).powi(2);
    let any_converged = ends.iter().any(|e| e.1);
    let mut sums: Vec<([f64; D], usize)> = Vec::new();
    let mut assignments = vec![usize::MAX; points.len()];
    for (i, (x, ok)) in ends.iter().enumerate() {
        if *ok || !any_converged {
            let found = sums
                .iter()
                .position(|(s, c)| dist2(&s.map(|v| v / *c as f64), x) < merge2);
            let idx = match found {
                Some(j) => {
                    let (s, c) = &mut sums[j];
                    for (a, v) in s.iter_mut().zip(x) {
                        *a += v;
                    }
                    *c += 1;
                    j
                }
                None => {
                    sums.push((*x, 1));
                    sums.len() - 1
                }
            };
            assignments[i] = idx;
        }
    }
    let modes: Vec<[f64; D]> = sums.iter().map(|(s, c)| s.map(|v| v / *c as f64)).collect();
    let mut unconverged = 0;
    for (i, (x, ok)) in ends.iter().enumerate() {
        if assignments[i] == usize::MAX {
            debug_assert!(!ok);
            unconverged += 1;
            assignments[i] = (0..modes.len())
                .min_by(|&a, &b| dist2(&modes[a], x).total_cmp(&dist2(&modes[b], x)))
                .unwrap_or(0);
        }
    }
    if !any_converged {
        unconverged = points.len();
    }
    Ok(ClusterResult {
        m_hat: modes.len(),
        modes,
        assignments,
        radius_used: radius,
        unconverged,
    })
}
