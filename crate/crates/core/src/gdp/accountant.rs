//! GDP budget arithmetic: composition, trade-off curves, and conversion to
//! `(ε, δ)` guarantees.

use serde::{Deserialize, Serialize};

use super::normal::{std_normal_cdf, std_normal_quantile};
use crate::error::{Error, Result};

/// Budget of `n` composed μ-GDP mechanisms: `√(Σ μ_i²)`.
pub fn compose(budgets: &[f64]) -> Result<f64> {
    if budgets.is_empty() {
        return Err(Error::domain("cannot compose an empty list of budgets"));
    }
    if let Some(bad) = budgets.iter().find(|&&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::domain(format!("budget {bad} is not a positive finite number")));
    }
    Ok(budgets.iter().map(|m| m * m).sum::<f64>().sqrt())
}

/// Per-coordinate budgets shared by `curve_count` radial curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_z: f64,
    pub curve_count: usize,
    pub mu_total: f64,
}

impl PrivacyBudget {
    pub fn new(mu_x: f64, mu_y: f64, mu_z: f64, curve_count: usize) -> Result<Self> {
        if curve_count == 0 {
            return Err(Error::domain("curve count must be positive"));
        }
        for (name, mu) in [("mu_x", mu_x), ("mu_y", mu_y), ("mu_z", mu_z)] {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {mu}")));
            }
        }
        let mu_total = (curve_count as f64 * (mu_x * mu_x + mu_y * mu_y + mu_z * mu_z)).sqrt();
        Ok(PrivacyBudget {
            mu_x,
            mu_y,
            mu_z,
            curve_count,
            mu_total,
        })
    }

    pub fn per_coordinate(&self) -> [f64; 3] {
        [self.mu_x, self.mu_y, self.mu_z]
    }
}

/// `δ(ε) = Φ(−ε/μ + μ/2) − e^ε Φ(−ε/μ − μ/2)`, the smallest δ for which a
/// μ-GDP mechanism is `(ε, δ)`-DP.
pub fn gdp_to_dp_delta(mu: f64, epsilon: f64) -> Result<f64> {
    if !(mu > 0.0) || mu.is_nan() {
        return Err(Error::domain(format!("mu must be positive, got {mu}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let head = std_normal_cdf(-epsilon / mu + mu / 2.0);
    let tail = std_normal_cdf(-epsilon / mu - mu / 2.0);
    // e^ε Φ(·) evaluated in log space so that large ε does not overflow.
    let scaled_tail = if tail > 0.0 { (epsilon + tail.ln()).exp() } else { 0.0 };
    let delta = (head - scaled_tail).max(0.0);
    Ok(delta.min(1.0 - f64::EPSILON))
}

/// Gaussian trade-off curve `G_μ(α) = Φ(Φ⁻¹(1 − α) − μ)`.
pub fn gaussian_tradeoff(mu: f64, alpha: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::domain(format!("mu must be non-negative, got {mu}")));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha {alpha} outside [0, 1]")));
    }
    if alpha == 1.0 {
        return Ok(0.0);
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    Ok(std_normal_cdf(std_normal_quantile(1.0 - alpha) - mu))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn compose_examples() {
        assert_abs_diff_eq!(compose(&[3.0, 4.0]).unwrap(), 5.0, epsilon = 1e-15);
        let triples: Vec<f64> = (0..23).flat_map(|_| [0.2, 0.2, 0.55]).collect();
        assert_abs_diff_eq!(compose(&triples).unwrap(), 2.9661, epsilon = 5e-5);

        let releases = 7150 * 3;
        let mu_p = (9.0 / releases as f64).sqrt();
        let even = vec![mu_p; releases];
        assert_abs_diff_eq!(compose(&even).unwrap(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn compose_rejects_bad_budgets() {
        assert!(compose(&[]).is_err());
        assert!(compose(&[1.0, 0.0]).is_err());
        assert!(compose(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn budget_total() {
        let b = PrivacyBudget::new(0.2, 0.2, 0.55, 23).unwrap();
        assert_abs_diff_eq!(b.mu_total, 2.9661, epsilon = 5e-5);
        let squares = 23.0 * (0.2f64.powi(2) * 2.0 + 0.55f64.powi(2));
        assert!((b.mu_total.powi(2) - squares).abs() <= 1e-12);
        assert!(PrivacyBudget::new(0.2, 0.0, 0.1, 3).is_err());
        assert!(PrivacyBudget::new(0.2, 0.2, 0.1, 0).is_err());
    }

    #[test]
    fn delta_examples() {
        assert_abs_diff_eq!(gdp_to_dp_delta(1.0, 0.0).unwrap(), 0.382924922548026, epsilon = 1e-14);
        assert_eq!(gdp_to_dp_delta(1e-12, 1.0).unwrap(), 0.0);
        assert!(gdp_to_dp_delta(1.0, 10.0).unwrap() < 1e-15);
        assert!(gdp_to_dp_delta(0.0, 1.0).is_err());
        assert!(gdp_to_dp_delta(1.0, -1.0).is_err());
    }

    #[test]
    fn delta_at_zero_epsilon_closed_form() {
        // Φ(μ/2) − Φ(−μ/2) from mpmath.
        let reference = [
            (0.1, 0.039877611676744925404),
            (0.5, 0.19741265136584744848),
            (1.0, 0.38292492254802620728),
            (2.0, 0.68268949213708589717),
            (5.0, 0.98758066934844772967),
        ];
        for (mu, expected) in reference {
            assert_abs_diff_eq!(gdp_to_dp_delta(mu, 0.0).unwrap(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_is_nonincreasing_in_epsilon() {
        for mu in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let mut prev = f64::INFINITY;
            for k in 0..=100 {
                let d = gdp_to_dp_delta(mu, k as f64 * 0.1).unwrap();
                assert!((0.0..1.0).contains(&d));
                assert!(d <= prev, "mu={mu} eps={} d={d} prev={prev}", k as f64 * 0.1);
                prev = d;
            }
        }
    }

    #[test]
    fn tradeoff_examples() {
        assert_eq!(gaussian_tradeoff(2.0, 1.0).unwrap(), 0.0);
        for a in [0.0, 0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(gaussian_tradeoff(0.0, a).unwrap(), 1.0 - a, epsilon = 1e-14);
        }
        // Φ(Φ⁻¹(0.95) − 1) from mpmath.
        assert_abs_diff_eq!(
            gaussian_tradeoff(1.0, 0.05).unwrap(),
            0.740488977158556,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(gaussian_tradeoff(1.0, 0.05).unwrap(), 0.74051, epsilon = 5e-5);
    }

    proptest! {
        #[test]
        fn compose_permutation_and_nesting(a in 0.01..10.0f64, b in 0.01..10.0f64, c in 0.01..10.0f64) {
            let flat = compose(&[a, b, c]).unwrap();
            prop_assert!((compose(&[c, a, b]).unwrap() - flat).abs() <= 1e-12);
            prop_assert!((compose(&[a, compose(&[b, c]).unwrap()]).unwrap() - flat).abs() <= 1e-12);
        }
    }
}
