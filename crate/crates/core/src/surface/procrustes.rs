use nalgebra::{Matrix3, Vector3};

use super::{DiskSurface, Point3, PointCloud};
use crate::error::{Error, Result};

/// A proper rotation of R³, applied as `O · x`.
pub type Rotation = Matrix3<f64>;

const RANK_TOL: f64 = 1e-12;

/// Rotation `O` with `OᵀO = I`, `det O = 1` minimizing `Σ ‖O x_k − y_k‖²`
/// over corresponding rows of `cloud` (x) and `template` (y).
///
/// Rotates about the origin; both clouds are expected to be centered.
pub fn procrustes_align(cloud: &PointCloud, template: &PointCloud) -> Result<(Rotation, PointCloud)> {
    if cloud.len() != template.len() {
        return Err(Error::Alignment(format!(
            "clouds have {} and {} points; alignment needs registered clouds",
            cloud.len(),
            template.len()
        )));
    }
    if cloud.len() < 3 {
        return Err(Error::Alignment(format!(
            "alignment needs at least 3 points, got {}",
            cloud.len()
        )));
    }

    // Σ_k x_k y_kᵀ; the objective is maximized by O = V Uᵀ for H = U S Vᵀ.
    let mut h = Matrix3::zeros();
    for (x, y) in cloud.points().iter().zip(template.points()) {
        h += Vector3::from(*x) * Vector3::from(*y).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Alignment("SVD of the cross-covariance failed".into())),
    };
    let s = svd.singular_values;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let (largest, middle, smallest) = (s[order[0]], s[order[1]], order[2]);
    if !(largest > 0.0) || middle <= RANK_TOL * largest {
        return Err(Error::Alignment(format!(
            "cross-covariance has rank < 2 (singular values {:.3e}, {:.3e}, {:.3e}); rotation is not determined",
            s[0], s[1], s[2]
        )));
    }

    let v = v_t.transpose();
    let mut d = Matrix3::identity();
    if (v * u.transpose()).determinant() < 0.0 {
        d[(smallest, smallest)] = -1.0;
    }
    let rotation = v * d * u.transpose();

    let aligned = cloud.points().iter().map(|p| apply(&rotation, *p)).collect();
    Ok((
        rotation,
        PointCloud::from_parts_unchecked(aligned, cloud.is_registered()),
    ))
}

pub(crate) fn apply(rotation: &Rotation, p: Point3) -> Point3 {
    let q = rotation * Vector3::from(p);
    [q[0], q[1], q[2]]
}

/// Rotates `surface` onto `template`, treating grid points as registered.
pub fn align_surface(surface: &DiskSurface, template: &DiskSurface) -> Result<(Rotation, DiskSurface)> {
    let (rotation, aligned) = procrustes_align(&surface.to_point_cloud(), &template.to_point_cloud())?;
    Ok((rotation, surface.with_points(aligned.points().to_vec())?))
}
