use std::path::Path;

use radial_gdp::evaluation::{align_scale, mse_nearest, mse_pointwise, Metric};
use radial_gdp::gdp::ReleaseReport;
use radial_gdp::pipeline::{self, Layout, PipelineConfig};
use radial_gdp::surface::{read_point_cloud, RadialCurveSet};

fn config(dir: &Path) -> PipelineConfig {
    PipelineConfig {
        n_individuals: 10,
        input_dir: dir.join("raw"),
        output_dir: dir.join("out"),
        ..PipelineConfig::default()
    }
}

fn run_through_baseline(cfg: &PipelineConfig) {
    pipeline::run_generate(cfg).unwrap();
    pipeline::run_preprocess(cfg).unwrap();
    pipeline::run_extract(cfg).unwrap();
    pipeline::run_sanitize(cfg).unwrap();
    pipeline::run_baseline(cfg).unwrap();
}

#[test]
fn default_report_lists_composed_budget() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    run_through_baseline(&cfg);
    let layout = Layout::new(&cfg);
    let report = ReleaseReport::read(&layout.functional_report()).unwrap();
    assert!((report.mu_total - 2.9661).abs() <= 5e-5);
    assert_eq!(report.releases.len(), 69);
    assert!((report.budget_squares() - report.mu_total.powi(2)).abs() <= 1e-10);

    let curves = RadialCurveSet::read_csv(&layout.private_curves()).unwrap();
    assert_eq!(curves.len(), 23);
    assert_eq!(curves.grid().len(), 80);
}

#[test]
fn evaluation_matches_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    run_through_baseline(&cfg);
    let report = pipeline::run_evaluate(&cfg).unwrap();
    let layout = Layout::new(&cfg);
    let mean = read_point_cloud(&layout.pointwise_mean(), true).unwrap();
    let baseline = read_point_cloud(&layout.baseline_cloud(), true).unwrap();
    let functional = read_point_cloud(&layout.private_cloud(), true).unwrap();

    assert_eq!(report.records.len(), 4);
    assert_eq!(report.records[0].metric, Metric::MsePointwise);
    assert_eq!(report.records[0].value, mse_pointwise(&mean, &baseline).unwrap());
    let fit = align_scale(&mean, &functional).unwrap();
    assert_eq!(report.records[2].value, mse_nearest(&mean, &fit.scaled).unwrap());
    assert_eq!(report.records[2].scale_a, Some(fit.scale));
    assert_eq!(report.records[2].iterations, Some(fit.iterations));
}

#[test]
fn baseline_budget_split_for_7150_points() {
    let dir = tempfile::tempdir().unwrap();
    // 65 radii x 110 angles = 7150 grid points.
    let cfg = PipelineConfig {
        n_individuals: 3,
        surface_radii: 65,
        surface_angles: 110,
        m: 110,
        baseline_mu_total: 3.0,
        ..config(dir.path())
    };
    pipeline::run_generate(&cfg).unwrap();
    pipeline::run_preprocess(&cfg).unwrap();
    let rel = pipeline::run_baseline(&cfg).unwrap();
    assert_eq!(rel.mean.len(), 7150);
    assert!((rel.mu_p - 0.0204837).abs() <= 5e-8);
    let report = ReleaseReport::read(&Layout::new(&cfg).baseline_report()).unwrap();
    assert!(report.releases.iter().all(|r| r.mu == rel.mu_p));
    assert!((report.mu_total - 3.0).abs() <= 1e-12);
}

#[test]
fn identical_individuals_give_noise_free_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        perturbation: 0.0,
        rotation_jitter: 0.0,
        scale_jitter: 0.0,
        translation_jitter: 0.0,
        n_individuals: 4,
        ..config(dir.path())
    };
    pipeline::run_generate(&cfg).unwrap();
    pipeline::run_preprocess(&cfg).unwrap();
    let rel = pipeline::run_baseline(&cfg).unwrap();
    assert_eq!(rel.private, rel.mean);
}

#[test]
fn equal_budgets_differ_only_through_tau_and_phi() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        mu_x: 0.4,
        mu_y: 0.4,
        mu_z: 0.4,
        ..config(dir.path())
    };
    pipeline::run_generate(&cfg).unwrap();
    pipeline::run_preprocess(&cfg).unwrap();
    pipeline::run_extract(&cfg).unwrap();
    let rel = pipeline::run_sanitize(&cfg).unwrap();
    let n = cfg.n_individuals as f64;
    for r in &rel.report.releases {
        let sigma = 2.0 * r.tau.unwrap() / (n * r.phi.unwrap().sqrt()) / 0.4;
        assert!((r.sigma - sigma).abs() <= 1e-15);
    }
}
