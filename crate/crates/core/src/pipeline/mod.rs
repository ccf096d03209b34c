//! File-based experiment stages.
//!
//! Layout, relative to the configured directories:
//!
//! ```text
//! <input_dir>/surface_NNNN.csv          raw surfaces (generate)
//! <output_dir>/aligned/surface_NNNN.csv normalized and aligned (preprocess)
//! <output_dir>/curves/curves_NNNN.csv   radial curves (extract)
//! <output_dir>/functional/              private and non-private means (sanitize)
//! <output_dir>/baseline/                point-wise mean and its release (baseline)
//! <output_dir>/evaluation.{json,txt}    MSE table (evaluate)
//! <output_dir>/verify/                  privacy-loss check (verify)
//! ```

mod config;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

pub use config::{PipelineConfig, SensitivityMode};

use crate::baseline::{pointwise_mean, pointwise_report, pointwise_sanitize, split_budget, PointwiseSensitivity};
use crate::circle_kernel::{CircleGrid, KernelEigenbasis};
use crate::error::{Error, Result};
use crate::evaluation::EvaluationReport;
use crate::gdp::verify::verify_privacy_loss;
use crate::gdp::{
    adjacent_curve_samples, calibrate_sigma, sanitize, sensitivity_bound, tau_from_sample, Coordinate, PrivacyBudget,
    PrivacyVerification, ReleaseRecord, ReleaseReport, SensitivityProvenance,
};
use crate::io::{list_csv, write_file};
use crate::rkhs_mean::{rkhs_mean, CurveSample};
use crate::seed::NoiseSeed;
use crate::surface::{
    align_surface, curves_to_point_cloud, extract_radial_curves, generate_synthetic_dataset, normalize,
    read_point_cloud, read_surface, write_curves_obj, write_point_cloud, write_surface, DiskSurface, PointCloud,
    RadialCurveSet,
};

const SURFACE_PREFIX: &str = "surface_";
const CURVES_PREFIX: &str = "curves_";
const GPA_MAX_ITER: usize = 20;
const GPA_TOL: f64 = 1e-12;

/// Artifact paths derived from a config.
#[derive(Debug, Clone)]
pub struct Layout {
    pub input_dir: PathBuf,
    pub aligned_dir: PathBuf,
    pub curves_dir: PathBuf,
    pub functional_dir: PathBuf,
    pub baseline_dir: PathBuf,
    pub verify_dir: PathBuf,
    pub output_dir: PathBuf,
}

impl Layout {
    pub fn new(config: &PipelineConfig) -> Self {
        let out = &config.output_dir;
        Layout {
            input_dir: config.input_dir.clone(),
            aligned_dir: out.join("aligned"),
            curves_dir: out.join("curves"),
            functional_dir: out.join("functional"),
            baseline_dir: out.join("baseline"),
            verify_dir: out.join("verify"),
            output_dir: out.clone(),
        }
    }

    pub fn private_curves(&self) -> PathBuf {
        self.functional_dir.join("private_curves.csv")
    }

    pub fn private_cloud(&self) -> PathBuf {
        self.functional_dir.join("private_cloud.csv")
    }

    pub fn rkhs_mean_cloud(&self) -> PathBuf {
        self.functional_dir.join("rkhs_mean_cloud.csv")
    }

    pub fn functional_report(&self) -> PathBuf {
        self.functional_dir.join("release_report.json")
    }

    pub fn pointwise_mean(&self) -> PathBuf {
        self.baseline_dir.join("pointwise_mean.csv")
    }

    pub fn baseline_cloud(&self) -> PathBuf {
        self.baseline_dir.join("private_cloud.csv")
    }

    pub fn baseline_report(&self) -> PathBuf {
        self.baseline_dir.join("release_report.json")
    }

    pub fn evaluation(&self) -> PathBuf {
        self.output_dir.join("evaluation.json")
    }

    pub fn verification(&self) -> PathBuf {
        self.verify_dir.join("privacy_verification.json")
    }
}

fn numbered(dir: &Path, prefix: &str, i: usize) -> PathBuf {
    dir.join(format!("{prefix}{i:04}.csv"))
}

fn non_empty(files: Vec<PathBuf>, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    if files.is_empty() {
        return Err(Error::file(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, format!("no {prefix}*.csv files")),
        ));
    }
    Ok(files)
}

/// Runs `f` on a pool with `threads` workers (all cores for 0).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(f)
}

pub fn read_surfaces(dir: &Path) -> Result<Vec<DiskSurface>> {
    let files = non_empty(list_csv(dir, SURFACE_PREFIX)?, dir, SURFACE_PREFIX)?;
    files.par_iter().map(|p| read_surface(p)).collect()
}

fn write_surfaces(dir: &Path, surfaces: &[DiskSurface]) -> Result<()> {
    surfaces
        .par_iter()
        .enumerate()
        .try_for_each(|(i, s)| write_surface(s, &numbered(dir, SURFACE_PREFIX, i)))
}

pub fn read_curve_sets(dir: &Path) -> Result<Vec<RadialCurveSet>> {
    let files = non_empty(list_csv(dir, CURVES_PREFIX)?, dir, CURVES_PREFIX)?;
    files.par_iter().map(|p| RadialCurveSet::read_csv(p)).collect()
}

pub fn run_generate(config: &PipelineConfig) -> Result<usize> {
    config.validate()?;
    let data = generate_synthetic_dataset(config.n_individuals, &config.synthetic(), config.seed)?;
    write_surfaces(&config.input_dir, &data.surfaces)?;
    Ok(data.surfaces.len())
}

fn mean_surface(surfaces: &[DiskSurface]) -> Result<DiskSurface> {
    let first = &surfaces[0];
    let n = surfaces.len() as f64;
    let mut acc = vec![[0.0; 3]; first.points().len()];
    for s in surfaces {
        for (a, p) in acc.iter_mut().zip(s.points()) {
            for k in 0..3 {
                a[k] += p[k];
            }
        }
    }
    first.with_points(acc.into_iter().map(|a| a.map(|v| v / n)).collect())
}

/// Normalizes every surface, then rotates each onto the running mean until
/// the mean stops changing (generalized Procrustes).
pub fn preprocess_surfaces(surfaces: &[DiskSurface]) -> Result<Vec<DiskSurface>> {
    let first = surfaces
        .first()
        .ok_or_else(|| Error::domain("no surfaces to preprocess"))?;
    for (i, s) in surfaces.iter().enumerate() {
        if s.radii() != first.radii() || s.angles() != first.angles() {
            return Err(Error::domain(format!(
                "surface {i} is sampled on a different grid than surface 0"
            )));
        }
    }
    let normalized: Vec<DiskSurface> = surfaces.par_iter().map(normalize).collect::<Result<_>>()?;
    let mut aligned = normalized.clone();
    for _ in 0..GPA_MAX_ITER {
        let template = mean_surface(&aligned)?;
        let next: Vec<DiskSurface> = normalized
            .par_iter()
            .map(|s| align_surface(s, &template).map(|(_, a)| a))
            .collect::<Result<_>>()?;
        let change = next
            .iter()
            .zip(&aligned)
            .flat_map(|(a, b)| a.points().iter().zip(b.points()))
            .flat_map(|(p, q)| (0..3).map(move |k| (p[k] - q[k]).abs()))
            .fold(0.0, f64::max);
        aligned = next;
        if change < GPA_TOL {
            break;
        }
    }
    Ok(aligned)
}

pub fn run_preprocess(config: &PipelineConfig) -> Result<usize> {
    config.validate()?;
    let layout = Layout::new(config);
    let aligned = preprocess_surfaces(&read_surfaces(&layout.input_dir)?)?;
    write_surfaces(&layout.aligned_dir, &aligned)?;
    Ok(aligned.len())
}

pub fn extract_all(surfaces: &[DiskSurface], config: &PipelineConfig) -> Result<Vec<RadialCurveSet>> {
    surfaces
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            if s.n_angles() != config.m {
                return Err(Error::domain(format!(
                    "surface {i} has {} angles but m = {}",
                    s.n_angles(),
                    config.m
                )));
            }
            extract_radial_curves(s, config.curves)
        })
        .collect()
}

pub fn run_extract(config: &PipelineConfig) -> Result<usize> {
    config.validate()?;
    let layout = Layout::new(config);
    let sets = extract_all(&read_surfaces(&layout.aligned_dir)?, config)?;
    sets.par_iter()
        .enumerate()
        .try_for_each(|(i, s)| s.write_csv(&numbered(&layout.curves_dir, CURVES_PREFIX, i)))?;
    Ok(sets.len())
}

/// The non-private RKHS means, their private releases, and the report.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalRelease {
    pub mean: RadialCurveSet,
    pub private: RadialCurveSet,
    pub report: ReleaseReport,
}

/// Sanitizes every coordinate of every radial curve across individuals.
pub fn sanitize_curve_sets(sets: &[RadialCurveSet], config: &PipelineConfig) -> Result<FunctionalRelease> {
    config.validate()?;
    let first = sets.first().ok_or_else(|| Error::domain("no curve sets to sanitize"))?;
    let grid = *first.grid();
    if grid.len() != config.m {
        return Err(Error::domain(format!(
            "curves have {} samples but m = {}",
            grid.len(),
            config.m
        )));
    }
    for (i, s) in sets.iter().enumerate() {
        if s.radii() != first.radii() || s.grid() != first.grid() {
            return Err(Error::domain(format!(
                "curve set {i} does not match the radii of set 0"
            )));
        }
    }
    let j_count = first.len();
    let budget = PrivacyBudget::new(config.mu_x, config.mu_y, config.mu_z, j_count)?;
    let basis = Arc::new(KernelEigenbasis::periodic(grid, &config.kernel()?)?);
    let n = sets.len();
    let phi = config.phi();
    let mu = config.mu();
    let supplied_tau = config.tau();
    let provenance = config.sensitivity.provenance();

    let results: Vec<(Vec<f64>, Vec<f64>, ReleaseRecord)> = (0..3 * j_count)
        .into_par_iter()
        .map(|idx| {
            let (j, w) = (idx / 3, idx % 3);
            let sample = CurveSample::new(grid, sets.iter().map(|s| s.coordinate(j, w).to_vec()).collect())?;
            let tau = match supplied_tau {
                Some(t) => t[w],
                None => tau_from_sample(&sample),
            };
            let delta = sensitivity_bound(tau, n, phi[w])?;
            let params = calibrate_sigma(delta, mu[w])?;
            let mean = rkhs_mean(&sample, &basis, phi[w])?;
            let seed = NoiseSeed::for_curve_release(config.seed, j, w);
            let release = sanitize(&mean, &params, seed);
            let record = ReleaseRecord {
                curve_index: j,
                coordinate: Coordinate::ALL[w],
                mu: mu[w],
                phi: Some(phi[w]),
                tau: Some(tau),
                delta_bound: delta,
                sigma: params.sigma(),
                seed,
                sensitivity_provenance: provenance,
            };
            Ok((mean.values().to_vec(), release.values, record))
        })
        .collect::<Result<_>>()?;

    let mut mean_curves = Vec::with_capacity(j_count);
    let mut private_curves = Vec::with_capacity(j_count);
    let mut releases = Vec::with_capacity(3 * j_count);
    for chunk in results.chunks(3) {
        mean_curves.push(std::array::from_fn(|w| chunk[w].0.clone()));
        private_curves.push(std::array::from_fn(|w| chunk[w].1.clone()));
        releases.extend(chunk.iter().map(|c| c.2.clone()));
    }
    let radii = first.radii().to_vec();
    Ok(FunctionalRelease {
        mean: RadialCurveSet::new(radii.clone(), grid, mean_curves)?,
        private: RadialCurveSet::new(radii, grid, private_curves)?,
        report: ReleaseReport {
            mechanism: "functional".into(),
            n_individuals: n,
            mu_total: budget.mu_total,
            releases,
        },
    })
}

pub fn run_sanitize(config: &PipelineConfig) -> Result<FunctionalRelease> {
    config.validate()?;
    let layout = Layout::new(config);
    let release = sanitize_curve_sets(&read_curve_sets(&layout.curves_dir)?, config)?;
    let dir = &layout.functional_dir;
    release.private.write_csv(&layout.private_curves())?;
    write_curves_obj(&release.private, &dir.join("private_curves.obj"))?;
    write_point_cloud(&curves_to_point_cloud(&release.private), &layout.private_cloud())?;
    release.mean.write_csv(&dir.join("rkhs_mean_curves.csv"))?;
    write_curves_obj(&release.mean, &dir.join("rkhs_mean_curves.obj"))?;
    write_point_cloud(&curves_to_point_cloud(&release.mean), &layout.rkhs_mean_cloud())?;
    release.report.write(&layout.functional_report())?;
    Ok(release)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRelease {
    pub mean: PointCloud,
    pub private: PointCloud,
    pub mu_p: f64,
    pub report: ReleaseReport,
}

pub fn baseline_release(clouds: &[PointCloud], mu_total: f64, seed: u64) -> Result<BaselineRelease> {
    let mean = pointwise_mean(clouds)?;
    let sens = PointwiseSensitivity::from_dataset(clouds)?;
    let mu_p = split_budget(mu_total, mean.len())?;
    let private = pointwise_sanitize(&mean, &sens, mu_p, seed)?;
    let report = pointwise_report(&sens, mu_p, seed, clouds.len(), SensitivityProvenance::DataDriven);
    Ok(BaselineRelease {
        mean,
        private,
        mu_p,
        report,
    })
}

pub fn run_baseline(config: &PipelineConfig) -> Result<BaselineRelease> {
    config.validate()?;
    let layout = Layout::new(config);
    let clouds: Vec<PointCloud> = read_surfaces(&layout.aligned_dir)?
        .iter()
        .map(DiskSurface::to_point_cloud)
        .collect();
    let release = baseline_release(&clouds, config.baseline_mu_total, config.seed)?;
    write_point_cloud(&release.mean, &layout.pointwise_mean())?;
    write_point_cloud(&release.private, &layout.baseline_cloud())?;
    release.report.write(&layout.baseline_report())?;
    Ok(release)
}

/// Compares one estimate file against one reference file.
pub fn evaluate_files(reference: &Path, estimate: &Path, pointwise: bool) -> Result<EvaluationReport> {
    let r = read_point_cloud(reference, true)?;
    let e = read_point_cloud(estimate, true)?;
    let (rid, eid) = (reference.display().to_string(), estimate.display().to_string());
    let mut report = EvaluationReport::default();
    if pointwise {
        report.push_pointwise(&rid, &r, &eid, &e)?;
    }
    report.push_nearest(&rid, &r, &eid, &e)?;
    Ok(report)
}

/// Table of errors against the non-private means:
/// baseline point-wise and nearest-point MSE, functional nearest-point MSE
/// against the point-wise mean and against the RKHS mean.
pub fn run_evaluate(config: &PipelineConfig) -> Result<EvaluationReport> {
    config.validate()?;
    let layout = Layout::new(config);
    let pw_mean = read_point_cloud(&layout.pointwise_mean(), true)?;
    let baseline = read_point_cloud(&layout.baseline_cloud(), true)?;
    let functional = read_point_cloud(&layout.private_cloud(), true)?;
    let rkhs = read_point_cloud(&layout.rkhs_mean_cloud(), true)?;
    let mut report = EvaluationReport::default();
    report.push_pointwise("pointwise-mean", &pw_mean, "baseline", &baseline)?;
    report.push_nearest("pointwise-mean", &pw_mean, "baseline", &baseline)?;
    report.push_nearest("pointwise-mean", &pw_mean, "functional", &functional)?;
    report.push_nearest("rkhs-mean", &rkhs, "functional", &functional)?;
    report.write(&layout.evaluation())?;
    write_file(&layout.output_dir.join("evaluation.txt"), &report.to_string())?;
    Ok(report)
}

/// Monte-Carlo privacy check on synthetic adjacent curve datasets with
/// ambient norm at most `τ` (`tau_z`, or 1 when sensitivity is data-driven),
/// smoothing `phi_z`, and budget `mu_z`.
pub fn run_verify(config: &PipelineConfig) -> Result<PrivacyVerification> {
    config.validate()?;
    let layout = Layout::new(config);
    let grid = CircleGrid::new(config.m)?;
    let tau = config.tau().map(|t| t[2]).unwrap_or(1.0);
    let basis = Arc::new(KernelEigenbasis::periodic(grid, &config.kernel()?)?);
    let (d, dp) = adjacent_curve_samples(grid, config.n_individuals, tau, config.seed)?;
    let mean_d = rkhs_mean(&d, &basis, config.phi_z)?;
    let mean_dp = rkhs_mean(&dp, &basis, config.phi_z)?;
    let params = calibrate_sigma(sensitivity_bound(tau, config.n_individuals, config.phi_z)?, config.mu_z)?;
    let report = verify_privacy_loss(&mean_d, &mean_dp, &params, config.n_samples, config.seed)?;
    let json = serde_json::to_string_pretty(&report).expect("verification serializes");
    write_file(&layout.verification(), &(json + "\n"))?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct DemoSummary {
    pub functional: FunctionalRelease,
    pub baseline: BaselineRelease,
    pub evaluation: EvaluationReport,
    pub verification: PrivacyVerification,
}

/// Every stage in order on a freshly generated dataset.
pub fn run_demo(config: &PipelineConfig) -> Result<DemoSummary> {
    config.validate()?;
    run_generate(config)?;
    run_preprocess(config)?;
    run_extract(config)?;
    let functional = run_sanitize(config)?;
    let baseline = run_baseline(config)?;
    let evaluation = run_evaluate(config)?;
    let verification = run_verify(config)?;
    Ok(DemoSummary {
        functional,
        baseline,
        evaluation,
        verification,
    })
}
