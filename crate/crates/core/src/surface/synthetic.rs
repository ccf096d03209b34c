//! Synthetic face-like surfaces.
//!
//! Every individual shares a template height field over the unit disk (a
//! dome with a central nose bump, two eye bumps, and a mouth ridge) plus a
//! zero-mean, low-frequency random perturbation. An optional rigid and
//! scale jitter is applied afterwards so that normalization and alignment
//! have something to undo.

use nalgebra::Rotation3;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::procrustes::apply;
use super::{DiskSurface, Point3, PointCloud};
use crate::circle_kernel::CircleGrid;
use crate::error::{Error, Result};
use crate::seed::{NoiseSeed, StreamTag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    pub n_radii: usize,
    pub n_angles: usize,
    /// Scale of the per-individual shape perturbation.
    pub perturbation: f64,
    /// Standard deviation of the random rotation angle, in radians.
    pub rotation_jitter: f64,
    /// Standard deviation of the log scale factor.
    pub scale_jitter: f64,
    /// Standard deviation of each translation component.
    pub translation_jitter: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_radii: 46,
            n_angles: 80,
            perturbation: 0.05,
            rotation_jitter: 0.05,
            scale_jitter: 0.05,
            translation_jitter: 0.1,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_radii < 2 || self.n_angles < 3 {
            return Err(Error::domain(format!(
                "synthetic grid {}x{} is too small (need at least 2x3)",
                self.n_radii, self.n_angles
            )));
        }
        for (name, v) in [
            ("perturbation", self.perturbation),
            ("rotation_jitter", self.rotation_jitter),
            ("scale_jitter", self.scale_jitter),
            ("translation_jitter", self.translation_jitter),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        Ok(())
    }
}

fn gauss(dx: f64, dy: f64, sx: f64, sy: f64) -> f64 {
    (-0.5 * ((dx / sx).powi(2) + (dy / sy).powi(2))).exp()
}

/// Template height at disk position `(x, y) = r (cos θ, sin θ)`.
pub fn template_height(x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    let dome = 0.3 * (1.0 - r2);
    let nose = 0.35 * gauss(x, y + 0.05, 0.1, 0.16);
    let eyes = 0.08 * (gauss(x - 0.35, y - 0.3, 0.1, 0.07) + gauss(x + 0.35, y - 0.3, 0.1, 0.07));
    let mouth = 0.06 * gauss(x, y + 0.5, 0.22, 0.04);
    dome + nose + eyes + mouth
}

/// Low-frequency modes for the individual perturbation of the height.
fn perturbation_modes(x: f64, y: f64) -> [f64; 7] {
    let r2 = x * x + y * y;
    [
        1.0 - r2,
        x,
        y,
        x * x - y * y,
        2.0 * x * y,
        gauss(x, y + 0.05, 0.1, 0.16),
        gauss(x, y + 0.5, 0.22, 0.04),
    ]
}

/// `n` synthetic surfaces and the same data as registered point clouds.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub surfaces: Vec<DiskSurface>,
    pub clouds: Vec<PointCloud>,
}

pub fn generate_synthetic_dataset(n: usize, config: &SyntheticConfig, seed: u64) -> Result<SyntheticDataset> {
    if n == 0 {
        return Err(Error::domain("synthetic dataset size must be positive"));
    }
    config.validate()?;
    let radii = DiskSurface::uniform_radii(config.n_radii);
    let grid = CircleGrid::new(config.n_angles)?;

    let mut surfaces = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = NoiseSeed::derive(seed, StreamTag::Synthetic, i as u64, 0).rng();
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        let height: [f64; 7] = std::array::from_fn(|_| normal());
        let stretch = [normal(), normal()];
        let axis = [normal(), normal(), normal()];
        let angle = normal();
        let log_scale = normal();
        let shift: Point3 = [normal(), normal(), normal()];

        let amp = config.perturbation;
        let base = DiskSurface::from_fn(radii.clone(), grid, |r, t| {
            let (x, y) = (r * t.cos(), r * t.sin());
            let modes = perturbation_modes(x, y);
            let dz: f64 = modes.iter().zip(&height).map(|(m, a)| m * a).sum();
            [
                x * (1.0 + amp * stretch[0]),
                y * (1.0 + amp * stretch[1]),
                template_height(x, y) + amp * dz,
            ]
        })?;

        let axis_norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let rotation = if config.rotation_jitter > 0.0 && axis_norm > 0.0 {
            let scaled = nalgebra::Vector3::from(axis) * (config.rotation_jitter * angle / axis_norm);
            Rotation3::new(scaled).into_inner()
        } else {
            nalgebra::Matrix3::identity()
        };
        let scale = (config.scale_jitter * log_scale).exp();
        let offset = shift.map(|v| v * config.translation_jitter);
        let surface = if config.rotation_jitter == 0.0 && config.scale_jitter == 0.0 && config.translation_jitter == 0.0
        {
            base
        } else {
            base.map_points(|p| {
                let q = apply(&rotation, p);
                [
                    scale * q[0] + offset[0],
                    scale * q[1] + offset[1],
                    scale * q[2] + offset[2],
                ]
            })
        };
        surfaces.push(surface);
    }
    let clouds = surfaces.iter().map(DiskSurface::to_point_cloud).collect();
    Ok(SyntheticDataset { surfaces, clouds })
}
