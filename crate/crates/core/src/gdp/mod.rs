//! Gaussian-process mechanism for releasing mean curves under μ-GDP.
//!
//! A penalized mean `h(D)` is released as `h(D) + σ Z`, where `Z` is a
//! zero-mean Gaussian process with the kernel as covariance and
//! `σ = Δ / μ`. The noise lives in the same eigenbasis as the mean, so the
//! released curve stays in the span of the retained modes.

pub mod accountant;
pub mod normal;
pub mod report;
pub mod verify;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::circle_kernel::KernelEigenbasis;
use crate::error::{Error, Result};
use crate::rkhs_mean::{CurveSample, RkhsMean};
use crate::seed::NoiseSeed;

pub use accountant::{compose, gaussian_tradeoff, gdp_to_dp_delta, PrivacyBudget};
pub use normal::{std_normal_cdf, std_normal_quantile};
pub use report::{Coordinate, ReleaseRecord, ReleaseReport, SensitivityProvenance};
pub use verify::{adjacent_curve_samples, verify_privacy_loss, PrivacyVerification};

/// Noise calibration for one release.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdpParams {
    mu: f64,
    delta_bound: f64,
    sigma: f64,
}

impl GdpParams {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn delta_bound(&self) -> f64 {
        self.delta_bound
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Sets `σ = Δ / μ`, the smallest noise scale that is μ-GDP.
pub fn calibrate_sigma(delta_bound: f64, mu: f64) -> Result<GdpParams> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    if !(delta_bound >= 0.0 && delta_bound.is_finite()) {
        return Err(Error::domain(format!(
            "sensitivity must be non-negative, got {delta_bound}"
        )));
    }
    Ok(GdpParams {
        mu,
        delta_bound,
        sigma: delta_bound / mu,
    })
}

/// RKHS sensitivity of the penalized mean, `Δ = 2τ / (n √φ)`.
pub fn sensitivity_bound(tau: f64, n: usize, phi: f64) -> Result<f64> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("phi must be positive, got {phi}")));
    }
    if n == 0 {
        return Err(Error::domain("sample size must be positive"));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::domain(format!("tau must be non-negative, got {tau}")));
    }
    Ok(2.0 * tau / (n as f64 * phi.sqrt()))
}

/// Largest ambient norm in the sample.
///
/// This bound is read off the confidential data, so releases that use it
/// must be reported as [`SensitivityProvenance::DataDriven`].
pub fn tau_from_sample(sample: &CurveSample) -> f64 {
    sample
        .curves()
        .iter()
        .map(|c| sample.grid().norm(c))
        .fold(0.0, f64::max)
}

/// One draw of `Z = Σ √λ_j ξ_j b_j` with `ξ_j` i.i.d. standard normal.
pub fn sample_gp_noise(basis: &KernelEigenbasis, seed: NoiseSeed) -> Vec<f64> {
    let mut rng = seed.rng();
    let scaled: Vec<f64> = basis
        .eigenvalues()
        .iter()
        .map(|l| {
            let xi: f64 = rng.sample(StandardNormal);
            l.sqrt() * xi
        })
        .collect();
    basis.synthesize(&scaled)
}

/// A privatized mean curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SanitizedCurve {
    pub values: Vec<f64>,
    pub params: GdpParams,
    pub seed: NoiseSeed,
}

/// Releases `h(D) + σ Z`.
pub fn sanitize(mean: &RkhsMean, params: &GdpParams, seed: NoiseSeed) -> SanitizedCurve {
    let noise = sample_gp_noise(mean.basis(), seed);
    let sigma = params.sigma();
    let values = mean.values().iter().zip(&noise).map(|(h, z)| h + sigma * z).collect();
    SanitizedCurve {
        values,
        params: *params,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_kernel::{CircleGrid, PeriodicKernelParams};
    use crate::rkhs_mean::rkhs_mean;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn basis(m: usize) -> Arc<KernelEigenbasis> {
        Arc::new(KernelEigenbasis::periodic(CircleGrid::new(m).unwrap(), &PeriodicKernelParams::default()).unwrap())
    }

    #[test]
    fn calibrate_examples() {
        assert_eq!(calibrate_sigma(0.0, 1.0).unwrap().sigma(), 0.0);
        assert_eq!(calibrate_sigma(2.0, 0.5).unwrap().sigma(), 4.0);
        let delta = sensitivity_bound(1.0, 1000, 0.005).unwrap();
        let p = calibrate_sigma(delta, 0.55).unwrap();
        assert_abs_diff_eq!(p.sigma(), 0.051426, epsilon = 5e-7);
        assert_eq!(p.sigma() * p.mu(), p.delta_bound());
        assert!(calibrate_sigma(1.0, 0.0).is_err());
        assert!(calibrate_sigma(1.0, -1.0).is_err());
    }

    #[test]
    fn sensitivity_examples() {
        assert_eq!(sensitivity_bound(0.0, 7, 0.3).unwrap(), 0.0);
        assert_eq!(sensitivity_bound(1.0, 1, 4.0).unwrap(), 1.0);
        assert_abs_diff_eq!(sensitivity_bound(1.0, 1000, 0.005).unwrap(), 0.0282843, epsilon = 5e-8);
        assert!(sensitivity_bound(1.0, 10, 0.0).is_err());
        assert!(sensitivity_bound(1.0, 0, 0.1).is_err());
    }

    #[test]
    fn tau_examples() {
        let g = CircleGrid::new(80).unwrap();
        let zero = CurveSample::new(g, vec![vec![0.0; 80]; 3]).unwrap();
        assert_eq!(tau_from_sample(&zero), 0.0);
        let consts = CurveSample::new(g, vec![vec![5.0; 80], vec![2.0; 80]]).unwrap();
        assert_abs_diff_eq!(tau_from_sample(&consts), 5.0, epsilon = 1e-14);
        let sines = (1..=3)
            .step_by(2)
            .map(|a| g.points().iter().map(|t| a as f64 * (2.0 * PI * t).sin()).collect())
            .collect();
        let s = CurveSample::new(g, sines).unwrap();
        assert_abs_diff_eq!(tau_from_sample(&s), 3.0 * 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(tau_from_sample(&s), 2.12132, epsilon = 1e-5);
    }

    #[test]
    fn noise_is_deterministic() {
        let b = basis(32);
        let s = NoiseSeed::new(9, 4);
        assert_eq!(sample_gp_noise(&b, s), sample_gp_noise(&b, s));
        assert_ne!(sample_gp_noise(&b, s), sample_gp_noise(&b, NoiseSeed::new(9, 5)));
    }

    #[test]
    fn zero_sigma_returns_mean() {
        let b = basis(16);
        let g = *b.grid();
        let curve: Vec<f64> = g.points().iter().map(|t| (2.0 * PI * t).cos()).collect();
        let mean = rkhs_mean(&CurveSample::new(g, vec![curve]).unwrap(), &b, 0.01).unwrap();
        let out = sanitize(&mean, &calibrate_sigma(0.0, 1.0).unwrap(), NoiseSeed::new(1, 1));
        assert_eq!(out.values, mean.values());
    }

    #[test]
    fn zero_mean_gives_pure_noise() {
        let b = basis(16);
        let g = *b.grid();
        let mean = rkhs_mean(&CurveSample::new(g, vec![vec![0.0; 16]]).unwrap(), &b, 0.01).unwrap();
        let seed = NoiseSeed::new(3, 7);
        let out = sanitize(&mean, &calibrate_sigma(1.0, 1.0).unwrap(), seed);
        assert_eq!(out.values, sample_gp_noise(&b, seed));
    }

    #[test]
    fn output_stays_in_retained_span() {
        let b = basis(24);
        let g = *b.grid();
        let curve: Vec<f64> = g.points().iter().map(|t| (6.0 * PI * t).sin() + 0.3).collect();
        let mean = rkhs_mean(&CurveSample::new(g, vec![curve]).unwrap(), &b, 0.01).unwrap();
        let out = sanitize(&mean, &calibrate_sigma(0.5, 0.7).unwrap(), NoiseSeed::new(11, 0));
        let reprojected = b.synthesize(&b.project(&out.values).unwrap());
        for (a, e) in out.values.iter().zip(&reprojected) {
            assert_abs_diff_eq!(*a, *e, epsilon = 1e-10);
        }
    }

    #[test]
    fn noise_mean_within_clt_bound() {
        let b = basis(16);
        let draws = 100_000;
        let mut sum = [0.0; 16];
        for d in 0..draws {
            let z = sample_gp_noise(&b, NoiseSeed::new(5, d));
            sum.iter_mut().zip(&z).for_each(|(s, v)| *s += v);
        }
        for (i, s) in sum.iter().enumerate() {
            let mean = s / draws as f64;
            let kii = b.kernel_matrix()[(i, i)];
            assert!(mean.abs() <= 4.0 * (kii / draws as f64).sqrt(), "component {i}: {mean}");
        }
    }

    #[test]
    fn noise_variance_per_mode() {
        let b = basis(20);
        let g = *b.grid();
        let mean = rkhs_mean(&CurveSample::new(g, vec![vec![1.0; 20]]).unwrap(), &b, 0.01).unwrap();
        let params = calibrate_sigma(0.6, 0.8).unwrap();
        let draws = 100_000;
        let modes = b.num_modes();
        let mut sum = vec![0.0; modes];
        let mut sumsq = vec![0.0; modes];
        for d in 0..draws {
            let out = sanitize(&mean, &params, NoiseSeed::new(6, d));
            let resid: Vec<f64> = out.values.iter().zip(mean.values()).map(|(a, h)| a - h).collect();
            for (j, c) in b.project(&resid).unwrap().into_iter().enumerate() {
                sum[j] += c;
                sumsq[j] += c * c;
            }
        }
        let s2 = params.sigma().powi(2);
        for j in 0..modes {
            let n = draws as f64;
            let var = sumsq[j] / n - (sum[j] / n).powi(2);
            let expected = s2 * b.eigenvalues()[j];
            assert!(
                ((var - expected) / expected).abs() <= 0.05,
                "mode {j}: {var} vs {expected}"
            );
        }
    }

    #[test]
    fn averaged_releases_are_unbiased() {
        let b = basis(16);
        let g = *b.grid();
        let curve: Vec<f64> = g.points().iter().map(|t| (2.0 * PI * t).sin()).collect();
        let mean = rkhs_mean(&CurveSample::new(g, vec![curve]).unwrap(), &b, 0.01).unwrap();
        let params = calibrate_sigma(1.0, 1.0).unwrap();
        let draws = 100_000;
        let mut acc = [0.0; 16];
        for d in 0..draws {
            let out = sanitize(&mean, &params, NoiseSeed::new(8, d));
            acc.iter_mut().zip(&out.values).for_each(|(a, v)| *a += v);
        }
        for (i, (a, h)) in acc.iter().zip(mean.values()).enumerate() {
            let tol = 4.0 * params.sigma() * (b.kernel_matrix()[(i, i)] / draws as f64).sqrt();
            assert!((a / draws as f64 - h).abs() <= tol);
        }
    }
}
