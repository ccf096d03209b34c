//! Smoothness-penalized mean of closed scalar curves.
//!
//! The penalized problem `argmin_m Σ ‖f_i − m‖² + φ ‖m‖²_K` has the closed-form
//! solution `m = Σ_j λ_j / (λ_j + φ) ⟨f̄, b_j⟩ b_j` in the kernel eigenbasis,
//! where `f̄` is the sample mean.

use std::sync::Arc;

use crate::circle_kernel::{CircleGrid, KernelEigenbasis};
use crate::error::{Error, Result};

/// `n ≥ 1` scalar closed curves sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    grid: CircleGrid,
    curves: Vec<Vec<f64>>,
}

impl CurveSample {
    pub fn new(grid: CircleGrid, curves: Vec<Vec<f64>>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::domain("curve sample is empty"));
        }
        for (i, c) in curves.iter().enumerate() {
            grid.check_len(c, &format!("curve {i}"))?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("curve {i} has non-finite values")));
            }
        }
        Ok(CurveSample { grid, curves })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    pub fn curves(&self) -> &[Vec<f64>] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Pointwise average of the curves.
    pub fn pointwise_mean(&self) -> Vec<f64> {
        let n = self.curves.len() as f64;
        let mut mean = vec![0.0; self.grid.len()];
        for c in &self.curves {
            for (acc, v) in mean.iter_mut().zip(c) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= n);
        mean
    }
}

/// Penalized mean curve expressed in a kernel eigenbasis.
#[derive(Debug, Clone)]
pub struct RkhsMean {
    coefficients: Vec<f64>,
    values: Vec<f64>,
    phi: f64,
    basis: Arc<KernelEigenbasis>,
}

/// Computes the penalized mean of `sample` with smoothing penalty `phi`.
pub fn rkhs_mean(sample: &CurveSample, basis: &Arc<KernelEigenbasis>, phi: f64) -> Result<RkhsMean> {
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(Error::domain(format!("smoothing penalty phi must be > 0, got {phi}")));
    }
    if sample.grid() != basis.grid() {
        return Err(Error::domain(format!(
            "sample grid has {} points, basis grid has {}",
            sample.grid().len(),
            basis.grid().len()
        )));
    }
    let projections = basis.project(&sample.pointwise_mean())?;
    let coefficients: Vec<f64> = projections
        .iter()
        .zip(basis.eigenvalues())
        .map(|(p, l)| l / (l + phi) * p)
        .collect();
    Ok(RkhsMean::from_coefficients(basis.clone(), coefficients, phi))
}

impl RkhsMean {
    pub(crate) fn from_coefficients(basis: Arc<KernelEigenbasis>, coefficients: Vec<f64>, phi: f64) -> Self {
        let values = basis.synthesize(&coefficients);
        RkhsMean {
            coefficients,
            values,
            phi,
            basis,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn basis(&self) -> &Arc<KernelEigenbasis> {
        &self.basis
    }

    /// RKHS norm `√(Σ c_j² / λ_j)`.
    pub fn rkhs_norm(&self) -> f64 {
        rkhs_norm_of(&self.coefficients, self.basis.eigenvalues())
    }

    /// RKHS inner product `Σ c_j d_j / λ_j` with another mean on the same basis.
    pub fn rkhs_inner(&self, other: &RkhsMean) -> Result<f64> {
        self.check_same_basis(other)?;
        Ok(self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .zip(self.basis.eigenvalues())
            .map(|((a, b), l)| a * b / l)
            .sum())
    }

    /// RKHS distance `‖self − other‖_K`.
    pub fn rkhs_distance(&self, other: &RkhsMean) -> Result<f64> {
        self.check_same_basis(other)?;
        let diff: Vec<f64> = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a - b)
            .collect();
        Ok(rkhs_norm_of(&diff, self.basis.eigenvalues()))
    }

    pub(crate) fn check_same_basis(&self, other: &RkhsMean) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.same_as(&other.basis) {
            Ok(())
        } else {
            Err(Error::domain("means are expressed in different eigenbases"))
        }
    }
}

/// RKHS norm of a mean, see [`RkhsMean::rkhs_norm`].
pub fn rkhs_norm(mean: &RkhsMean) -> f64 {
    mean.rkhs_norm()
}

pub(crate) fn rkhs_norm_of(coefficients: &[f64], eigenvalues: &[f64]) -> f64 {
    coefficients
        .iter()
        .zip(eigenvalues)
        .map(|(c, l)| c * c / l)
        .sum::<f64>()
        .sqrt()
}

/// Discrete L² norm of a curve on `grid`.
pub fn ambient_norm(curve: &[f64], grid: &CircleGrid) -> Result<f64> {
    grid.check_len(curve, "curve")?;
    Ok(grid.norm(curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_kernel::PeriodicKernelParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn basis(m: usize) -> Arc<KernelEigenbasis> {
        Arc::new(KernelEigenbasis::periodic(CircleGrid::new(m).unwrap(), &PeriodicKernelParams::default()).unwrap())
    }

    fn smooth_curve(rng: &mut impl Rng, m: usize) -> Vec<f64> {
        let a: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        (0..m)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / m as f64;
                a[0] + a[1] * t.cos() + a[2] * t.sin() + a[3] * (3.0 * t).cos() + a[4] * (7.0 * t).sin()
            })
            .collect()
    }

    #[test]
    fn zero_sample_gives_zero_mean() {
        let b = basis(16);
        let s = CurveSample::new(*b.grid(), vec![vec![0.0; 16]]).unwrap();
        let mean = rkhs_mean(&s, &b, 0.1).unwrap();
        assert!(mean.coefficients().iter().all(|&c| c == 0.0));
        assert!(mean.values().iter().all(|&v| v == 0.0));
        assert_eq!(rkhs_norm(&mean), 0.0);
    }

    #[test]
    fn single_mode_shrinkage() {
        let b = basis(16);
        let phi = 0.03;
        let s = CurveSample::new(*b.grid(), vec![b.eigenvectors()[0].clone()]).unwrap();
        let mean = rkhs_mean(&s, &b, phi).unwrap();
        let l1 = b.eigenvalues()[0];
        assert_abs_diff_eq!(mean.coefficients()[0], l1 / (l1 + phi), epsilon = 1e-12);
        for c in &mean.coefficients()[1..] {
            assert_abs_diff_eq!(*c, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(mean.rkhs_norm(), (l1 / (l1 + phi)) / l1.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn opposite_curves_cancel() {
        let b = basis(20);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = smooth_curve(&mut rng, 20);
        let g: Vec<f64> = f.iter().map(|v| -v).collect();
        let mean = rkhs_mean(&CurveSample::new(*b.grid(), vec![f, g]).unwrap(), &b, 0.01).unwrap();
        assert!(mean.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = basis(8);
        let s = CurveSample::new(*b.grid(), vec![vec![1.0; 8]]).unwrap();
        assert!(matches!(rkhs_mean(&s, &b, 0.0), Err(Error::Domain(_))));
        assert!(matches!(rkhs_mean(&s, &b, -1.0), Err(Error::Domain(_))));
        let other = CurveSample::new(CircleGrid::new(9).unwrap(), vec![vec![1.0; 9]]).unwrap();
        assert!(matches!(rkhs_mean(&other, &b, 0.1), Err(Error::Domain(_))));
        assert!(CurveSample::new(*b.grid(), vec![]).is_err());
        assert!(CurveSample::new(*b.grid(), vec![vec![f64::NAN; 8]]).is_err());
    }

    #[test]
    fn ambient_norm_examples() {
        let g = CircleGrid::new(80).unwrap();
        assert_eq!(ambient_norm(&[0.0; 80], &g).unwrap(), 0.0);
        assert_abs_diff_eq!(ambient_norm(&[3.0; 80], &g).unwrap(), 3.0, epsilon = 1e-14);
        let g7 = CircleGrid::new(7).unwrap();
        assert_abs_diff_eq!(ambient_norm(&[3.0; 7], &g7).unwrap(), 3.0, epsilon = 1e-14);
        let s: Vec<f64> = g.points().iter().map(|t| (2.0 * PI * t).sin()).collect();
        assert_abs_diff_eq!(ambient_norm(&s, &g).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(ambient_norm(&s, &g).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-5);
    }

    #[test]
    fn values_equal_synthesized_coefficients() {
        let b = basis(24);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let curves = (0..5).map(|_| smooth_curve(&mut rng, 24)).collect();
        let mean = rkhs_mean(&CurveSample::new(*b.grid(), curves).unwrap(), &b, 0.02).unwrap();
        assert_eq!(mean.values(), b.synthesize(mean.coefficients()).as_slice());
    }

    #[test]
    fn vanishing_penalty_recovers_projection() {
        let b = basis(32);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let curves: Vec<Vec<f64>> = (0..4).map(|_| smooth_curve(&mut rng, 32)).collect();
        let sample = CurveSample::new(*b.grid(), curves).unwrap();
        let mean = rkhs_mean(&sample, &b, 1e-10).unwrap();
        let projection = b.synthesize(&b.project(&sample.pointwise_mean()).unwrap());
        for (a, e) in mean.values().iter().zip(&projection) {
            assert!((a - e).abs() <= 1e-6);
        }
    }

    #[test]
    fn triangle_inequality() {
        let b = basis(24);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let c1: Vec<f64> = (0..b.num_modes()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let c2: Vec<f64> = (0..b.num_modes()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let n1 = RkhsMean::from_coefficients(b.clone(), c1, 1.0).rkhs_norm();
            let n2 = RkhsMean::from_coefficients(b.clone(), c2, 1.0).rkhs_norm();
            let n3 = RkhsMean::from_coefficients(b.clone(), sum, 1.0).rkhs_norm();
            assert!(n3 <= n1 + n2 + 1e-9 * (n1 + n2));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn larger_penalty_shrinks_every_coefficient(seed in any::<u64>(), phi1 in 1e-4..1.0f64, factor in 1.0..100.0f64) {
            let b = basis(24);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let curves = (0..3).map(|_| smooth_curve(&mut rng, 24)).collect();
            let s = CurveSample::new(*b.grid(), curves).unwrap();
            let m1 = rkhs_mean(&s, &b, phi1).unwrap();
            let m2 = rkhs_mean(&s, &b, phi1 * factor).unwrap();
            for (c1, c2) in m1.coefficients().iter().zip(m2.coefficients()) {
                prop_assert!(c2.abs() <= c1.abs());
            }
        }

        #[test]
        fn pooled_mean_is_average_of_halves(seed in any::<u64>(), n in 1usize..6) {
            let b = basis(24);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d1: Vec<Vec<f64>> = (0..n).map(|_| smooth_curve(&mut rng, 24)).collect();
            let d2: Vec<Vec<f64>> = (0..n).map(|_| smooth_curve(&mut rng, 24)).collect();
            let pooled: Vec<Vec<f64>> = d1.iter().chain(&d2).cloned().collect();
            let g = *b.grid();
            let m1 = rkhs_mean(&CurveSample::new(g, d1).unwrap(), &b, 0.01).unwrap();
            let m2 = rkhs_mean(&CurveSample::new(g, d2).unwrap(), &b, 0.01).unwrap();
            let mp = rkhs_mean(&CurveSample::new(g, pooled).unwrap(), &b, 0.01).unwrap();
            for ((a, c), p) in m1.values().iter().zip(m2.values()).zip(mp.values()) {
                prop_assert!(((a + c) / 2.0 - p).abs() <= 1e-12);
            }
        }
    }
}
