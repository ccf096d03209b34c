//! Standard normal CDF and quantile.
//!
//! `Φ` goes through the msun `erfc`, which keeps relative error near 1e-14
//! deep into the lower tail; the quantile uses Boost's `erfc_inv` as ported
//! by `statrs`.

use std::f64::consts::SQRT_2;

/// `Φ(x) = P(N(0, 1) ≤ x)`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / SQRT_2)
}

/// `Φ⁻¹(p)`, with `Φ⁻¹(0) = −∞` and `Φ⁻¹(1) = +∞`.
pub fn std_normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    -SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}
