//! Area, centroid, and normalization of disk surfaces.
//!
//! Partial derivatives use central differences: fourth order and periodic
//! in θ, second order on the (possibly non-uniform) radius grid with
//! one-sided stencils at the ends. Quadrature uses midpoint cells in r,
//! bounded by 0 and the outermost radius, and uniform weights in θ.

use std::f64::consts::PI;

use super::{DiskSurface, Point3};
use crate::error::{Error, Result};

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn combine(terms: &[(f64, Point3)]) -> Point3 {
    let mut out = [0.0; 3];
    for (w, p) in terms {
        for k in 0..3 {
            out[k] += w * p[k];
        }
    }
    out
}

fn check_grid(surface: &DiskSurface) -> Result<()> {
    if surface.n_radii() < 2 || surface.n_angles() < 3 {
        return Err(Error::domain(format!(
            "surface grid {}x{} is too coarse for differentiation (need at least 2x3)",
            surface.n_radii(),
            surface.n_angles()
        )));
    }
    Ok(())
}

fn d_theta(s: &DiskSurface, i: usize, j: usize) -> Point3 {
    let m = s.n_angles();
    let h = 2.0 * PI / m as f64;
    let at = |k: isize| s.point(i, (j as isize + k).rem_euclid(m as isize) as usize);
    if m >= 5 {
        combine(&[
            (-1.0 / (12.0 * h), at(2)),
            (8.0 / (12.0 * h), at(1)),
            (-8.0 / (12.0 * h), at(-1)),
            (1.0 / (12.0 * h), at(-2)),
        ])
    } else {
        combine(&[(1.0 / (2.0 * h), at(1)), (-1.0 / (2.0 * h), at(-1))])
    }
}

fn d_radius(s: &DiskSurface, i: usize, j: usize) -> Point3 {
    let r = s.radii();
    let n = r.len();
    if n == 2 {
        return sub(s.point(1, j), s.point(0, j)).map(|v| v / (r[1] - r[0]));
    }
    if i == 0 {
        let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
        combine(&[
            (-(2.0 * h1 + h2) / (h1 * (h1 + h2)), s.point(0, j)),
            ((h1 + h2) / (h1 * h2), s.point(1, j)),
            (-h1 / (h2 * (h1 + h2)), s.point(2, j)),
        ])
    } else if i == n - 1 {
        let (h1, h2) = (r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
        combine(&[
            (h2 / (h1 * (h1 + h2)), s.point(n - 3, j)),
            (-(h1 + h2) / (h1 * h2), s.point(n - 2, j)),
            ((h1 + 2.0 * h2) / (h2 * (h1 + h2)), s.point(n - 1, j)),
        ])
    } else {
        let (h1, h2) = (r[i] - r[i - 1], r[i + 1] - r[i]);
        combine(&[
            (-h2 / (h1 * (h1 + h2)), s.point(i - 1, j)),
            ((h2 - h1) / (h1 * h2), s.point(i, j)),
            (h1 / (h2 * (h1 + h2)), s.point(i + 1, j)),
        ])
    }
}

/// Radial cell widths: cells are bounded by midpoints between radii, by 0
/// below the first radius and by the last radius itself.
fn radial_weights(radii: &[f64]) -> Vec<f64> {
    let n = radii.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { 0.0 } else { 0.5 * (radii[i - 1] + radii[i]) };
            let hi = if i == n - 1 {
                radii[i]
            } else {
                0.5 * (radii[i] + radii[i + 1])
            };
            hi - lo
        })
        .collect()
}

/// Area element `‖f_r × f_θ‖ dr dθ` at every grid point.
fn area_elements(s: &DiskSurface) -> Result<Vec<f64>> {
    check_grid(s)?;
    let m = s.n_angles();
    let dtheta = 2.0 * PI / m as f64;
    let wr = radial_weights(s.radii());
    let mut out = Vec::with_capacity(s.points().len());
    for (i, w) in wr.iter().enumerate() {
        for j in 0..m {
            out.push(w * dtheta * norm(cross(d_radius(s, i, j), d_theta(s, i, j))));
        }
    }
    Ok(out)
}

/// `∫_D ‖f_r × f_θ‖ dr dθ` by quadrature on the sample grid.
pub fn surface_area(surface: &DiskSurface) -> Result<f64> {
    Ok(area_elements(surface)?.iter().sum())
}

/// Area-weighted centroid `∫ f ‖f_r × f_θ‖ / area`.
pub fn area_weighted_centroid(surface: &DiskSurface) -> Result<Point3> {
    let elems = area_elements(surface)?;
    let area: f64 = elems.iter().sum();
    if !(area > 0.0) {
        return Err(Error::domain("surface has zero area"));
    }
    let mut c = [0.0; 3];
    for (p, w) in surface.points().iter().zip(&elems) {
        for k in 0..3 {
            c[k] += w * p[k];
        }
    }
    Ok(c.map(|v| v / area))
}

/// Rescales to unit area and moves the area-weighted centroid to the origin.
///
/// Coordinates are divided by `√area`, since area scales quadratically with
/// the coordinates.
pub fn normalize(surface: &DiskSurface) -> Result<DiskSurface> {
    let area = surface_area(surface)?;
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::domain(format!("cannot normalize a surface with area {area}")));
    }
    let scale = 1.0 / area.sqrt();
    let scaled = surface.map_points(|p| p.map(|v| v * scale));
    let c = area_weighted_centroid(&scaled)?;
    Ok(scaled.map_points(|p| sub(p, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_kernel::CircleGrid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn flat_disk(nr: usize, m: usize) -> DiskSurface {
        DiskSurface::from_fn(DiskSurface::uniform_radii(nr), CircleGrid::new(m).unwrap(), |r, t| {
            [r * t.cos(), r * t.sin(), 0.0]
        })
        .unwrap()
    }

    fn bumpy(nr: usize, m: usize, a: f64, b: f64) -> DiskSurface {
        DiskSurface::from_fn(
            DiskSurface::uniform_radii(nr),
            CircleGrid::new(m).unwrap(),
            move |r, t| {
                let x = r * t.cos();
                let y = r * t.sin();
                [x + 0.1 * a * y, y, a * (-4.0 * r * r).exp() + b * x * y]
            },
        )
        .unwrap()
    }

    #[test]
    fn flat_disk_area_is_pi() {
        let area = surface_area(&flat_disk(100, 100)).unwrap();
        assert!((area - PI).abs() <= 1e-3, "area {area}");
    }

    #[test]
    fn hemisphere_area() {
        let s = DiskSurface::from_fn(
            DiskSurface::uniform_radii(200),
            CircleGrid::new(200).unwrap(),
            |r, t| {
                let polar = 0.5 * PI * r;
                [polar.sin() * t.cos(), polar.sin() * t.sin(), polar.cos()]
            },
        )
        .unwrap();
        let area = surface_area(&s).unwrap();
        assert!((area - 2.0 * PI).abs() <= 1e-2, "area {area}");
    }

    #[test]
    fn degenerate_grids_rejected() {
        let s = DiskSurface::from_fn(vec![1.0], CircleGrid::new(8).unwrap(), |_, _| [0.0; 3]).unwrap();
        assert!(matches!(surface_area(&s), Err(Error::Domain(_))));
        let s = flat_disk(4, 2);
        assert!(surface_area(&s).is_err());
        let zero = flat_disk(4, 8).map_points(|_| [1.0, 2.0, 3.0]);
        assert!(normalize(&zero).is_err());
    }

    #[test]
    fn normalized_flat_disk() {
        let s = flat_disk(50, 64);
        let area = surface_area(&s).unwrap();
        let n = normalize(&s).unwrap();
        assert_abs_diff_eq!(surface_area(&n).unwrap(), 1.0, epsilon = 1e-12);
        let c = area_weighted_centroid(&n).unwrap();
        assert!(c.iter().all(|v| v.abs() <= 1e-12));
        // The disk is already centered, so normalization is a pure scaling.
        let k = 1.0 / area.sqrt();
        for (p, q) in s.points().iter().zip(n.points()) {
            for d in 0..3 {
                assert_abs_diff_eq!(q[d], k * p[d], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let n = normalize(&bumpy(30, 40, 0.4, 0.2)).unwrap();
        let nn = normalize(&n).unwrap();
        for (p, q) in n.points().iter().zip(nn.points()) {
            for d in 0..3 {
                assert!((p[d] - q[d]).abs() <= 1e-9);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn area_is_homogeneous(c in 0.1..10.0f64, a in -1.0..1.0f64, b in -1.0..1.0f64) {
            let s = bumpy(12, 20, a, b);
            let base = surface_area(&s).unwrap();
            let scaled = surface_area(&s.scaled_translated(c, [0.3, -2.0, 5.0])).unwrap();
            prop_assert!(((scaled - c * c * base) / (c * c * base)).abs() <= 1e-9);
        }

        #[test]
        fn normalize_removes_scale_and_translation(c in 0.1..10.0f64, v in proptest::array::uniform3(-5.0..5.0f64), a in -1.0..1.0f64) {
            let s = bumpy(12, 20, a, 0.3);
            let base = normalize(&s).unwrap();
            let moved = normalize(&s.scaled_translated(c, v)).unwrap();
            prop_assert!((surface_area(&moved).unwrap() - 1.0).abs() <= 1e-6);
            for (p, q) in base.points().iter().zip(moved.points()) {
                for d in 0..3 {
                    prop_assert!((p[d] - q[d]).abs() <= 1e-9);
                }
            }
        }
    }
}
