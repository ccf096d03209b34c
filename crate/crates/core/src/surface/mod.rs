//! Disk-parameterized surfaces, point clouds, and face radial curves.

mod files;
mod geometry;
mod procrustes;
mod radial;
mod synthetic;

use serde::{Deserialize, Serialize};

use crate::circle_kernel::CircleGrid;
use crate::error::{Error, Result};

pub use files::{
    read_point_cloud, read_surface, write_curves_obj, write_point_cloud, write_surface, write_surface_obj,
};
pub use geometry::{area_weighted_centroid, normalize, surface_area};
pub use procrustes::{align_surface, procrustes_align, Rotation};
pub use radial::{curves_to_point_cloud, extract_radial_curves, select_radii, RadialCurveSet};
pub use synthetic::{generate_synthetic_dataset, template_height, SyntheticConfig, SyntheticDataset};

pub type Point3 = [f64; 3];

/// A map `f: D → R³` sampled at radii `r_i` and angles `θ_j = 2π j / m`.
///
/// Points are stored row-major: all angles of the first radius, then the
/// next radius, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSurface {
    radii: Vec<f64>,
    angles: CircleGrid,
    points: Vec<Point3>,
}

impl DiskSurface {
    pub fn new(radii: Vec<f64>, angles: CircleGrid, points: Vec<Point3>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::domain("surface needs at least one radius"));
        }
        if radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::domain("surface radii must lie in (0, 1]"));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("surface radii must be strictly increasing"));
        }
        if points.len() != radii.len() * angles.len() {
            return Err(Error::domain(format!(
                "surface has {} points, grid is {}x{}",
                points.len(),
                radii.len(),
                angles.len()
            )));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("surface has non-finite coordinates"));
        }
        Ok(DiskSurface { radii, angles, points })
    }

    /// Samples `f(r, θ)` on the grid.
    pub fn from_fn(radii: Vec<f64>, angles: CircleGrid, f: impl Fn(f64, f64) -> Point3) -> Result<Self> {
        let m = angles.len();
        let mut points = Vec::with_capacity(radii.len() * m);
        for &r in &radii {
            for j in 0..m {
                points.push(f(r, angle(j, m)));
            }
        }
        Self::new(radii, angles, points)
    }

    /// Radii `i / n` for `i = 1..=n`.
    pub fn uniform_radii(n: usize) -> Vec<f64> {
        (1..=n).map(|i| i as f64 / n as f64).collect()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &CircleGrid {
        &self.angles
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn n_radii(&self) -> usize {
        self.radii.len()
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn point(&self, i: usize, j: usize) -> Point3 {
        self.points[i * self.angles.len() + j]
    }

    pub fn theta(&self, j: usize) -> f64 {
        angle(j, self.angles.len())
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, f: impl Fn(Point3) -> Point3) -> DiskSurface {
        DiskSurface {
            radii: self.radii.clone(),
            angles: self.angles,
            points: self.points.iter().map(|&p| f(p)).collect(),
        }
    }

    /// `c · f + v`.
    pub fn scaled_translated(&self, c: f64, v: Point3) -> DiskSurface {
        self.map_points(|p| [c * p[0] + v[0], c * p[1] + v[1], c * p[2] + v[2]])
    }

    /// The grid points as a registered point cloud.
    pub fn to_point_cloud(&self) -> PointCloud {
        PointCloud {
            points: self.points.clone(),
            registered: true,
        }
    }

    pub(crate) fn with_points(&self, points: Vec<Point3>) -> Result<DiskSurface> {
        DiskSurface::new(self.radii.clone(), self.angles, points)
    }
}

pub(crate) fn angle(j: usize, m: usize) -> f64 {
    2.0 * std::f64::consts::PI * j as f64 / m as f64
}

/// A set of points in R³. `registered` marks clouds whose rows correspond
/// across a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Point3>,
    registered: bool,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>, registered: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("point cloud is empty"));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("point cloud has non-finite coordinates"));
        }
        Ok(PointCloud { points, registered })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_registered(&self) -> bool {
        self.registered
    }

    pub fn centroid(&self) -> Point3 {
        let n = self.points.len() as f64;
        let mut c = [0.0; 3];
        for p in &self.points {
            for k in 0..3 {
                c[k] += p[k];
            }
        }
        c.map(|v| v / n)
    }

    pub fn scaled(&self, a: f64) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|p| p.map(|v| a * v)).collect(),
            registered: self.registered,
        }
    }

    pub(crate) fn from_parts_unchecked(points: Vec<Point3>, registered: bool) -> Self {
        PointCloud { points, registered }
    }
}
