//! Monte-Carlo check of the privacy-loss distribution of the mechanism.
//!
//! For adjacent means `h = h(D)` and `h' = h(D')` and an output
//! `y = h + σZ`, the log density ratio is
//!
//! ```text
//! PL(y) = (⟨h − h', y⟩_K − (‖h‖²_K − ‖h'‖²_K) / 2) / σ²
//! ```
//!
//! and `⟨h − h', Z⟩_K ~ N(0, ‖h − h'‖²_K)`. The verifier draws releases under
//! both datasets and compares tail probabilities of `PL` and the type-II
//! error of the likelihood-ratio test with their closed forms.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::accountant::gaussian_tradeoff;
use super::normal::std_normal_cdf;
use super::{sanitize, GdpParams};
use crate::circle_kernel::CircleGrid;
use crate::error::{Error, Result};
use crate::rkhs_mean::{CurveSample, RkhsMean};
use crate::seed::{NoiseSeed, StreamTag};

pub const MIN_SAMPLES: usize = 10_000;
pub const DEFAULT_EPSILONS: [f64; 8] = [0.0, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Number of Monte-Carlo standard errors tolerated before flagging a check.
const SE_MULTIPLIER: f64 = 3.0;
/// Kolmogorov-Smirnov critical constant at the 1% level.
const KS_CRITICAL_1PCT: f64 = 1.628;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityCheck {
    pub expected_sd: f64,
    pub empirical_mean: f64,
    pub empirical_sd: f64,
    pub ks_statistic: f64,
    pub ks_critical: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCheck {
    pub epsilon: f64,
    /// Fraction of draws with `PL > ε`.
    pub empirical: f64,
    /// `Φ(−σε/Δ̃ + Δ̃/2σ)` for the realized distance `Δ̃`.
    pub predicted: f64,
    /// `Φ(−ε/μ + μ/2)`, the tail allowed by the budget.
    pub gdp_bound: f64,
    pub std_error: f64,
    pub matches_prediction: bool,
    pub within_gdp_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCheck {
    pub alpha: f64,
    pub empirical_type1: f64,
    pub empirical_type2: f64,
    /// `G_μ(α)`.
    pub gdp_bound: f64,
    pub std_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyVerification {
    pub n_samples: usize,
    pub seed: u64,
    pub mu: f64,
    pub sigma: f64,
    pub delta_bound: f64,
    /// `‖h(D) − h(D')‖_K`.
    pub realized_distance: f64,
    pub within_sensitivity: bool,
    pub normality: NormalityCheck,
    pub tails: Vec<TailCheck>,
    pub tradeoff: TradeoffCheck,
}

impl PrivacyVerification {
    pub fn passed(&self) -> bool {
        self.within_sensitivity
            && self.normality.passed
            && self.tails.iter().all(|t| t.matches_prediction && t.within_gdp_bound)
            && self.tradeoff.passed
    }
}

/// Runs the privacy-loss verification with the default ε grid and α.
pub fn verify_privacy_loss(
    mean_d: &RkhsMean,
    mean_d_prime: &RkhsMean,
    params: &GdpParams,
    n_samples: usize,
    seed: u64,
) -> Result<PrivacyVerification> {
    verify_privacy_loss_with(
        mean_d,
        mean_d_prime,
        params,
        n_samples,
        seed,
        &DEFAULT_EPSILONS,
        DEFAULT_ALPHA,
    )
}

pub fn verify_privacy_loss_with(
    mean_d: &RkhsMean,
    mean_d_prime: &RkhsMean,
    params: &GdpParams,
    n_samples: usize,
    seed: u64,
    epsilons: &[f64],
    alpha: f64,
) -> Result<PrivacyVerification> {
    mean_d.check_same_basis(mean_d_prime)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "privacy verification needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha {alpha} outside (0, 1)")));
    }
    let basis = mean_d.basis();
    let lambdas = basis.eigenvalues();
    let sigma = params.sigma();
    let distance = mean_d.rkhs_distance(mean_d_prime)?;
    if sigma == 0.0 && distance > 0.0 {
        return Err(Error::domain(
            "zero noise scale cannot hide a non-zero difference between means",
        ));
    }

    let gap: Vec<f64> = mean_d
        .coefficients()
        .iter()
        .zip(mean_d_prime.coefficients())
        .map(|(a, b)| a - b)
        .collect();
    // ⟨h − h', y⟩_K computed from the grid values of a release.
    let statistic = |values: &[f64]| -> f64 {
        let proj = basis.project(values).expect("release lives on the basis grid");
        proj.iter().zip(&gap).zip(lambdas).map(|((p, g), l)| p * g / l).sum()
    };
    let draw = |mean: &RkhsMean, tag: StreamTag, i: usize| -> f64 {
        let release = sanitize(mean, params, NoiseSeed::derive(seed, tag, i as u64, 0));
        statistic(&release.values)
    };

    let under_d: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| draw(mean_d, StreamTag::VerifyNull, i))
        .collect();
    let under_d_prime: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| draw(mean_d_prime, StreamTag::VerifyAlt, i))
        .collect();

    let norm_sq_d = mean_d.rkhs_norm().powi(2);
    let norm_sq_dp = mean_d_prime.rkhs_norm().powi(2);
    let offset = (norm_sq_d - norm_sq_dp) / 2.0;
    let privacy_loss = |l: f64| -> f64 {
        if distance == 0.0 {
            0.0
        } else {
            (l - offset) / (sigma * sigma)
        }
    };
    let gap_dot_h: f64 = mean_d.rkhs_inner(mean_d)? - mean_d_prime.rkhs_inner(mean_d)?;

    let n = n_samples as f64;

    // ⟨h − h', Z⟩_K with Z = (y − h) / σ.
    let normality = {
        let w: Vec<f64> = if distance == 0.0 {
            vec![0.0; n_samples]
        } else {
            under_d.iter().map(|l| (l - gap_dot_h) / sigma).collect()
        };
        let mean = w.iter().sum::<f64>() / n;
        let sd = (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let ks = if distance == 0.0 {
            0.0
        } else {
            ks_statistic(w, |x| std_normal_cdf(x / distance))
        };
        let ks_critical = KS_CRITICAL_1PCT / n.sqrt();
        let sd_ok = if distance == 0.0 {
            sd == 0.0
        } else {
            ((sd / distance) - 1.0).abs() <= 4.0 * (1.0 / (2.0 * n)).sqrt()
        };
        NormalityCheck {
            expected_sd: distance,
            empirical_mean: mean,
            empirical_sd: sd,
            ks_statistic: ks,
            ks_critical,
            passed: ks <= ks_critical && sd_ok && mean.abs() <= 4.0 * distance / n.sqrt() + 1e-12,
        }
    };

    let losses: Vec<f64> = under_d.iter().map(|&l| privacy_loss(l)).collect();
    let tails = epsilons
        .iter()
        .map(|&eps| {
            let empirical = losses.iter().filter(|&&pl| pl > eps).count() as f64 / n;
            let predicted = if distance == 0.0 {
                if eps < 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                std_normal_cdf(-sigma * eps / distance + distance / (2.0 * sigma))
            };
            let mu = params.mu();
            let gdp_bound = std_normal_cdf(-eps / mu + mu / 2.0);
            let std_error = (predicted * (1.0 - predicted) / n).sqrt();
            let bound_error = (gdp_bound * (1.0 - gdp_bound) / n).sqrt();
            TailCheck {
                epsilon: eps,
                empirical,
                predicted,
                gdp_bound,
                std_error,
                matches_prediction: (empirical - predicted).abs() <= SE_MULTIPLIER * std_error + 1e-12,
                within_gdp_bound: empirical <= gdp_bound + SE_MULTIPLIER * bound_error + 1e-12,
            }
        })
        .collect();

    let gdp_bound = gaussian_tradeoff(params.mu(), alpha)?;
    let std_error = (gdp_bound * (1.0 - gdp_bound) / n).sqrt();
    let (empirical_type1, empirical_type2) = if distance == 0.0 {
        // The outputs are identically distributed; the best test is a coin flip.
        (alpha, 1.0 - alpha)
    } else {
        // Reject D when ⟨h − h', y⟩_K is small.
        let mut sorted = under_d.clone();
        sorted.sort_by(f64::total_cmp);
        let cut = sorted[((alpha * n).floor() as usize).min(n_samples - 1)];
        let type1 = under_d.iter().filter(|&&l| l <= cut).count() as f64 / n;
        let type2 = under_d_prime.iter().filter(|&&l| l > cut).count() as f64 / n;
        (type1, type2)
    };
    let tradeoff = TradeoffCheck {
        alpha,
        empirical_type1,
        empirical_type2,
        gdp_bound,
        std_error,
        passed: empirical_type2 >= gdp_bound - SE_MULTIPLIER * std_error,
    };

    Ok(PrivacyVerification {
        n_samples,
        seed,
        mu: params.mu(),
        sigma,
        delta_bound: params.delta_bound(),
        realized_distance: distance,
        within_sensitivity: distance <= params.delta_bound() * (1.0 + 1e-12),
        normality,
        tails,
        tradeoff,
    })
}

/// Two adjacent samples of `n` random smooth curves with ambient norm in
/// `[τ/2, τ]`; the second replaces the last curve of the first.
pub fn adjacent_curve_samples(grid: CircleGrid, n: usize, tau: f64, seed: u64) -> Result<(CurveSample, CurveSample)> {
    if n == 0 {
        return Err(Error::domain("adjacent samples need at least one curve"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    let curves: Vec<Vec<f64>> = (0..=n)
        .map(|i| random_curve(&grid, tau, NoiseSeed::derive(seed, StreamTag::VerifyData, i as u64, 0)))
        .collect();
    let d = CurveSample::new(grid, curves[..n].to_vec())?;
    let mut other = curves[..n].to_vec();
    other[n - 1] = curves[n].clone();
    Ok((d, CurveSample::new(grid, other)?))
}

/// Low-degree trigonometric polynomial rescaled to a random norm in `[τ/2, τ]`.
fn random_curve(grid: &CircleGrid, tau: f64, seed: NoiseSeed) -> Vec<f64> {
    const DEGREE: usize = 5;
    let mut rng = seed.rng();
    let coef: Vec<[f64; 2]> = (0..=DEGREE)
        .map(|k| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            [a / (1 + k) as f64, b / (1 + k) as f64]
        })
        .collect();
    let target = tau * rng.random_range(0.5..=1.0);
    let values: Vec<f64> = grid
        .points()
        .iter()
        .map(|t| {
            coef.iter()
                .enumerate()
                .map(|(k, c)| {
                    let x = 2.0 * std::f64::consts::PI * k as f64 * t;
                    c[0] * x.cos() + c[1] * x.sin()
                })
                .sum()
        })
        .collect();
    let norm = grid.norm(&values);
    if norm == 0.0 {
        return vec![target; values.len()];
    }
    // Rescaling can overshoot τ by one rounding step; clamp from below.
    let scale = target / norm;
    let mut out: Vec<f64> = values.iter().map(|v| v * scale).collect();
    while grid.norm(&out) > tau {
        out.iter_mut().for_each(|v| *v *= 1.0 - 1e-15);
    }
    out
}

fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_kernel::{CircleGrid, KernelEigenbasis, PeriodicKernelParams};
    use crate::gdp::calibrate_sigma;
    use crate::rkhs_mean::{rkhs_mean, CurveSample};
    use std::sync::Arc;

    #[test]
    fn identical_means_have_zero_loss() {
        let b = Arc::new(
            KernelEigenbasis::periodic(CircleGrid::new(8).unwrap(), &PeriodicKernelParams::default()).unwrap(),
        );
        let s = CurveSample::new(*b.grid(), vec![vec![0.5; 8], vec![1.0; 8]]).unwrap();
        let m = rkhs_mean(&s, &b, 0.1).unwrap();
        let params = calibrate_sigma(0.3, 1.0).unwrap();
        let report = verify_privacy_loss(&m, &m.clone(), &params, MIN_SAMPLES, 1).unwrap();
        assert_eq!(report.realized_distance, 0.0);
        for t in &report.tails {
            if t.epsilon >= 0.0 {
                assert_eq!(t.empirical, 0.0);
                assert_eq!(t.predicted, 0.0);
            }
        }
        assert!(report.passed());
    }

    #[test]
    fn adjacent_samples_differ_in_one_curve() {
        let g = CircleGrid::new(40).unwrap();
        let (d, dp) = adjacent_curve_samples(g, 6, 1.0, 3).unwrap();
        assert_eq!(d.curves()[..5], dp.curves()[..5]);
        assert_ne!(d.curves()[5], dp.curves()[5]);
        for c in d.curves().iter().chain(dp.curves()) {
            let n = g.norm(c);
            assert!((0.5 - 1e-12..=1.0).contains(&n), "norm {n}");
        }
        assert_eq!(adjacent_curve_samples(g, 6, 1.0, 3).unwrap().0, d);
    }

    #[test]
    fn rejects_small_sample_and_foreign_basis() {
        let b1 = Arc::new(
            KernelEigenbasis::periodic(CircleGrid::new(8).unwrap(), &PeriodicKernelParams::default()).unwrap(),
        );
        let b2 = Arc::new(
            KernelEigenbasis::periodic(
                CircleGrid::new(8).unwrap(),
                &PeriodicKernelParams::new(2.0, 1.0).unwrap(),
            )
            .unwrap(),
        );
        let s = CurveSample::new(*b1.grid(), vec![vec![0.5; 8]]).unwrap();
        let m1 = rkhs_mean(&s, &b1, 0.1).unwrap();
        let m2 = rkhs_mean(&s, &b2, 0.1).unwrap();
        let params = calibrate_sigma(0.3, 1.0).unwrap();
        assert!(verify_privacy_loss(&m1, &m1, &params, 100, 1).is_err());
        assert!(matches!(
            verify_privacy_loss(&m1, &m2, &params, MIN_SAMPLES, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let sample: Vec<f64> = (0..n)
            .map(|i| crate::gdp::std_normal_quantile((i as f64 + 0.5) / n as f64))
            .collect();
        assert!(ks_statistic(sample, std_normal_cdf) <= 0.5 / n as f64 + 1e-9);
    }
}
