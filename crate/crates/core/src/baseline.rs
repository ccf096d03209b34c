//! Point-wise baseline: independent Gaussian noise on every coordinate of
//! every point of the registered mean cloud, with the budget split evenly.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gdp::{Coordinate, ReleaseRecord, ReleaseReport, SensitivityProvenance};
use crate::seed::NoiseSeed;
use crate::surface::{Point3, PointCloud};

fn check_registered(dataset: &[PointCloud]) -> Result<usize> {
    let first = dataset
        .first()
        .ok_or_else(|| Error::domain("dataset has no point clouds"))?;
    let p = first.len();
    for (i, c) in dataset.iter().enumerate() {
        if c.len() != p {
            return Err(Error::domain(format!(
                "cloud {i} has {} points, cloud 0 has {p}",
                c.len()
            )));
        }
    }
    Ok(p)
}

/// Entrywise mean of registered clouds.
pub fn pointwise_mean(dataset: &[PointCloud]) -> Result<PointCloud> {
    let p = check_registered(dataset)?;
    let n = dataset.len() as f64;
    let mut acc = vec![[0.0; 3]; p];
    for cloud in dataset {
        for (a, q) in acc.iter_mut().zip(cloud.points()) {
            for l in 0..3 {
                a[l] += q[l];
            }
        }
    }
    PointCloud::new(acc.into_iter().map(|a| a.map(|v| v / n)).collect(), true)
}

/// Per-entry sensitivity `Δ_{k,l} = max_{i,j} |X_i[k,l] − X_j[k,l]|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseSensitivity {
    deltas: Vec<Point3>,
}

impl PointwiseSensitivity {
    /// The max pairwise difference is the range of each entry over the dataset.
    pub fn from_dataset(dataset: &[PointCloud]) -> Result<Self> {
        let p = check_registered(dataset)?;
        let mut lo = vec![[f64::INFINITY; 3]; p];
        let mut hi = vec![[f64::NEG_INFINITY; 3]; p];
        for cloud in dataset {
            for (k, q) in cloud.points().iter().enumerate() {
                for l in 0..3 {
                    lo[k][l] = lo[k][l].min(q[l]);
                    hi[k][l] = hi[k][l].max(q[l]);
                }
            }
        }
        let deltas = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| [b[0] - a[0], b[1] - a[1], b[2] - a[2]])
            .collect();
        Ok(PointwiseSensitivity { deltas })
    }

    pub fn from_deltas(deltas: Vec<Point3>) -> Result<Self> {
        if deltas.iter().flatten().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(Error::domain("sensitivities must be finite and non-negative"));
        }
        Ok(PointwiseSensitivity { deltas })
    }

    pub fn deltas(&self) -> &[Point3] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

/// `μ_p = μ_T / √(3P)`, so that `3P` releases compose back to `μ_T`.
pub fn split_budget(mu_total: f64, points: usize) -> Result<f64> {
    if !(mu_total > 0.0 && mu_total.is_finite()) {
        return Err(Error::domain(format!("total budget must be positive, got {mu_total}")));
    }
    if points == 0 {
        return Err(Error::domain("point count must be positive"));
    }
    Ok(mu_total / (3.0 * points as f64).sqrt())
}

/// `X̄[k,l] + Δ_{k,l}/μ_p · z_{k,l}` with `z_{k,l}` drawn from the subseed of `(k, l)`.
pub fn pointwise_sanitize(
    mean: &PointCloud,
    sens: &PointwiseSensitivity,
    mu_p: f64,
    master_seed: u64,
) -> Result<PointCloud> {
    if mean.len() != sens.len() {
        return Err(Error::domain(format!(
            "mean has {} points, sensitivity has {}",
            mean.len(),
            sens.len()
        )));
    }
    if !(mu_p > 0.0 && mu_p.is_finite()) {
        return Err(Error::domain(format!("per-entry budget must be positive, got {mu_p}")));
    }
    let points = mean
        .points()
        .par_iter()
        .zip(sens.deltas())
        .enumerate()
        .map(|(k, (x, d))| {
            std::array::from_fn(|l| {
                if d[l] == 0.0 {
                    return x[l];
                }
                let z: f64 = NoiseSeed::for_point_release(master_seed, k, l)
                    .rng()
                    .sample(StandardNormal);
                x[l] + d[l] / mu_p * z
            })
        })
        .collect();
    PointCloud::new(points, mean.is_registered())
}

/// Release report with one record per entry, in `(k, l)` order.
pub fn pointwise_report(
    sens: &PointwiseSensitivity,
    mu_p: f64,
    master_seed: u64,
    n_individuals: usize,
    provenance: SensitivityProvenance,
) -> ReleaseReport {
    let mut releases = Vec::with_capacity(3 * sens.len());
    for (k, d) in sens.deltas().iter().enumerate() {
        for w in Coordinate::ALL {
            let l = w.index();
            releases.push(ReleaseRecord {
                curve_index: k,
                coordinate: w,
                mu: mu_p,
                phi: None,
                tau: None,
                delta_bound: d[l],
                sigma: d[l] / mu_p,
                seed: NoiseSeed::for_point_release(master_seed, k, l),
                sensitivity_provenance: provenance,
            });
        }
    }
    let mu_total = mu_p * (releases.len() as f64).sqrt();
    ReleaseReport {
        mechanism: "pointwise".into(),
        n_individuals,
        mu_total,
        releases,
    }
}
