//! Mean squared errors between a reference cloud and a private estimate,
//! and scale alignment of the estimate onto the reference.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{Point3, PointCloud};

pub const ALIGN_TOL: f64 = 1e-9;
pub const ALIGN_MAX_ITER: usize = 50;

fn dist_sq(a: &Point3, b: &Point3) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// `(1/P) Σ_k ‖x_k − y_k‖²` over corresponding rows.
pub fn mse_pointwise(reference: &PointCloud, estimate: &PointCloud) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::domain(format!(
            "point-wise MSE needs equal sizes, got {} and {}",
            reference.len(),
            estimate.len()
        )));
    }
    let total: f64 = reference
        .points()
        .iter()
        .zip(estimate.points())
        .map(|(a, b)| dist_sq(a, b))
        .sum();
    Ok(total / reference.len() as f64)
}

/// Index and squared distance of the reference point nearest to `q`.
/// Ties go to the lowest index.
fn nearest(reference: &[Point3], q: &Point3) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in reference.iter().enumerate() {
        let d = dist_sq(p, q);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn nearest_all(reference: &[Point3], estimate: &[Point3]) -> Vec<(usize, f64)> {
    estimate.par_iter().map(|q| nearest(reference, q)).collect()
}

/// `(1/M) Σ_j min_i ‖x_i − v_j‖²`, averaged over the estimate points.
///
/// Not symmetric: only estimate points are matched.
pub fn mse_nearest(reference: &PointCloud, estimate: &PointCloud) -> Result<f64> {
    if reference.is_empty() || estimate.is_empty() {
        return Err(Error::domain("nearest-point MSE needs non-empty clouds"));
    }
    let total: f64 = nearest_all(reference.points(), estimate.points())
        .iter()
        .map(|(_, d)| d)
        .sum();
    Ok(total / estimate.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleAlignment {
    pub scale: f64,
    pub scaled: PointCloud,
    pub iterations: usize,
    /// `mse_nearest(reference, a · estimate)` at the start and after each iteration.
    pub objective_history: Vec<f64>,
}

impl ScaleAlignment {
    pub fn objective(&self) -> f64 {
        *self.objective_history.last().expect("history starts with a = 1")
    }
}

/// Finds `a > 0` minimizing `mse_nearest(reference, a · estimate)` by
/// alternating nearest-neighbor matching with the closed-form scale
/// `a = Σ⟨x_c, v⟩ / Σ‖v‖²`, starting from `a = 1`.
///
/// Registered clouds of equal size are also tried with row-to-row matches
/// as the first correspondence; the run with the lower objective wins.
pub fn align_scale(reference: &PointCloud, estimate: &PointCloud) -> Result<ScaleAlignment> {
    if reference.is_empty() || estimate.is_empty() {
        return Err(Error::domain("scale alignment needs non-empty clouds"));
    }
    let v = estimate.points();
    let norm_sq: f64 = v.iter().map(|p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sum();
    if norm_sq == 0.0 {
        return Err(Error::domain("cannot scale an all-zero estimate"));
    }
    let x = reference.points();
    let nearest_start = nearest_all(x, v);
    let start_objective = nearest_start.iter().map(|(_, d)| d).sum::<f64>() / v.len() as f64;

    let mut best = iterate_scale(x, v, norm_sq, nearest_start, start_objective);
    if reference.is_registered() && estimate.is_registered() && x.len() == v.len() {
        let rows = (0..v.len()).map(|k| (k, dist_sq(&x[k], &v[k]))).collect();
        let alt = iterate_scale(x, v, norm_sq, rows, start_objective);
        if alt.1.last() < best.1.last() {
            best = alt;
        }
    }
    let (scale, objective_history, iterations) = best;
    Ok(ScaleAlignment {
        scale,
        scaled: estimate.scaled(scale),
        iterations,
        objective_history,
    })
}

fn iterate_scale(
    x: &[Point3],
    v: &[Point3],
    norm_sq: f64,
    mut matches: Vec<(usize, f64)>,
    start_objective: f64,
) -> (f64, Vec<f64>, usize) {
    let m = v.len() as f64;
    let mut a = 1.0;
    let mut history = vec![start_objective];
    let mut iterations = 0;
    while iterations < ALIGN_MAX_ITER {
        iterations += 1;
        let dot: f64 = matches
            .iter()
            .zip(v)
            .map(|((i, _), q)| x[*i][0] * q[0] + x[*i][1] * q[1] + x[*i][2] * q[2])
            .sum();
        let next = dot / norm_sq;
        // For unrelated clouds the matched least-squares scale can be
        // non-positive; the current positive scale is kept.
        if !(next > 0.0 && next.is_finite()) {
            break;
        }
        let scaled: Vec<Point3> = v.iter().map(|q| q.map(|c| next * c)).collect();
        let candidate = nearest_all(x, &scaled);
        let objective = candidate.iter().map(|(_, d)| d).sum::<f64>() / m;
        let prev = *history.last().expect("non-empty");
        // Keep the previous scale if a step would not improve the objective.
        if objective > prev {
            break;
        }
        let step = (next - a).abs();
        a = next;
        matches = candidate;
        history.push(objective);
        if step < ALIGN_TOL {
            break;
        }
    }
    (a, history, iterations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    MsePointwise,
    MseNearest,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::MsePointwise => "mse-pointwise",
            Metric::MseNearest => "mse-nearest",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub metric: Metric,
    pub reference_id: String,
    pub estimate_id: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub records: Vec<EvaluationRecord>,
}

impl EvaluationReport {
    pub fn push_pointwise(
        &mut self,
        reference_id: &str,
        reference: &PointCloud,
        estimate_id: &str,
        estimate: &PointCloud,
    ) -> Result<f64> {
        let value = mse_pointwise(reference, estimate)?;
        self.records.push(EvaluationRecord {
            metric: Metric::MsePointwise,
            reference_id: reference_id.into(),
            estimate_id: estimate_id.into(),
            value,
            scale_a: None,
            iterations: None,
        });
        Ok(value)
    }

    /// Aligns the scale of `estimate` first, then records the nearest-point MSE.
    pub fn push_nearest(
        &mut self,
        reference_id: &str,
        reference: &PointCloud,
        estimate_id: &str,
        estimate: &PointCloud,
    ) -> Result<f64> {
        let aligned = align_scale(reference, estimate)?;
        let value = mse_nearest(reference, &aligned.scaled)?;
        self.records.push(EvaluationRecord {
            metric: Metric::MseNearest,
            reference_id: reference_id.into(),
            estimate_id: estimate_id.into(),
            value,
            scale_a: Some(aligned.scale),
            iterations: Some(aligned.iterations),
        });
        Ok(value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("evaluation report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_file(path, &(self.to_json() + "\n"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))
    }
}

impl fmt::Display for EvaluationReport {
    /// One row per record, values in scientific notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<14} {:<20} {:<20} {:>12} {:>12} {:>6}",
            "metric", "reference", "estimate", "value", "scale_a", "iter"
        )?;
        for r in &self.records {
            let a = r.scale_a.map(|a| format!("{a:.6}")).unwrap_or_else(|| "-".into());
            let it = r.iterations.map(|i| i.to_string()).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<14} {:<20} {:<20} {:>12.4e} {:>12} {:>6}",
                r.metric.to_string(),
                r.reference_id,
                r.estimate_id,
                r.value,
                a,
                it
            )?;
        }
        Ok(())
    }
}
