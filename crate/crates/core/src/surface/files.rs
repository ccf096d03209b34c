//! Surface and point-cloud CSV files, and OBJ export.
//!
//! Surface files have header `r,theta,x,y,z` with one row per grid point,
//! row-major over `(r, θ)` and `θ_j = 2π j / m` in radians. Point-cloud
//! files have header `x,y,z`.

use std::fmt::Write as _;
use std::path::Path;

use super::radial::RadialCurveSet;
use super::{angle, DiskSurface, Point3, PointCloud};
use crate::circle_kernel::CircleGrid;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_f64, read_csv_named, write_file};

const SURFACE_HEADER: [&str; 5] = ["r", "theta", "x", "y", "z"];
const CLOUD_HEADER: [&str; 3] = ["x", "y", "z"];
const THETA_TOL: f64 = 1e-9;

pub fn write_surface(surface: &DiskSurface, path: &Path) -> Result<()> {
    let mut out = SURFACE_HEADER.join(",");
    out.push('\n');
    for (i, &r) in surface.radii().iter().enumerate() {
        for j in 0..surface.n_angles() {
            let p = surface.point(i, j);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(r),
                fmt_f64(surface.theta(j)),
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(p[2])
            );
        }
    }
    write_file(path, &out)
}

pub fn read_surface(path: &Path) -> Result<DiskSurface> {
    let rows = read_csv_named(path, &SURFACE_HEADER)?;
    if rows.is_empty() {
        return Err(Error::parse(path, 1, "surface file has no rows"));
    }
    let mut radii: Vec<f64> = Vec::new();
    let mut values = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        let r = parse_f64(path, *line, &rec[0])?;
        if radii.last() != Some(&r) {
            if radii.last().is_some_and(|&last| r < last) {
                return Err(Error::parse(path, *line, "radii must be non-decreasing row by row"));
            }
            radii.push(r);
        }
        let theta = parse_f64(path, *line, &rec[1])?;
        let p = [
            parse_f64(path, *line, &rec[2])?,
            parse_f64(path, *line, &rec[3])?,
            parse_f64(path, *line, &rec[4])?,
        ];
        values.push((*line, theta, p));
    }
    if rows.len() % radii.len() != 0 {
        return Err(Error::parse(
            path,
            rows.last().map(|r| r.0).unwrap_or(1),
            format!("{} rows do not form a grid over {} radii", rows.len(), radii.len()),
        ));
    }
    let m = rows.len() / radii.len();
    let mut points: Vec<Point3> = Vec::with_capacity(rows.len());
    for (k, (line, theta, p)) in values.into_iter().enumerate() {
        let (i, j) = (k / m, k % m);
        let r = parse_f64(path, line, &rows[k].1[0])?;
        if r != radii[i] {
            return Err(Error::parse(
                path,
                line,
                format!("expected radius {}, found {r}", radii[i]),
            ));
        }
        if (theta - angle(j, m)).abs() > THETA_TOL {
            return Err(Error::parse(
                path,
                line,
                format!("expected theta {}, found {theta}", angle(j, m)),
            ));
        }
        points.push(p);
    }
    DiskSurface::new(radii, CircleGrid::new(m)?, points).map_err(|e| Error::parse(path, 1, e.to_string()))
}

pub fn write_point_cloud(cloud: &PointCloud, path: &Path) -> Result<()> {
    let mut out = CLOUD_HEADER.join(",");
    out.push('\n');
    for p in cloud.points() {
        let _ = writeln!(out, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]));
    }
    write_file(path, &out)
}

/// Reads a point cloud; `registered` states whether rows correspond across files.
pub fn read_point_cloud(path: &Path, registered: bool) -> Result<PointCloud> {
    let rows = read_csv_named(path, &CLOUD_HEADER)?;
    let mut points = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        points.push([
            parse_f64(path, *line, &rec[0])?,
            parse_f64(path, *line, &rec[1])?,
            parse_f64(path, *line, &rec[2])?,
        ]);
    }
    PointCloud::new(points, registered).map_err(|e| Error::parse(path, 1, e.to_string()))
}

fn push_vertex(out: &mut String, p: Point3) {
    let _ = writeln!(out, "v {} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]));
}

/// Wireframe OBJ of a surface: one closed line per circle and one line per spoke.
pub fn write_surface_obj(surface: &DiskSurface, path: &Path) -> Result<()> {
    let m = surface.n_angles();
    let mut out = String::from("# disk surface wireframe\n");
    for p in surface.points() {
        push_vertex(&mut out, *p);
    }
    for i in 0..surface.n_radii() {
        let ring: Vec<String> = (0..=m).map(|j| (i * m + j % m + 1).to_string()).collect();
        let _ = writeln!(out, "l {}", ring.join(" "));
    }
    if surface.n_radii() > 1 {
        for j in 0..m {
            let spoke: Vec<String> = (0..surface.n_radii()).map(|i| (i * m + j + 1).to_string()).collect();
            let _ = writeln!(out, "l {}", spoke.join(" "));
        }
    }
    write_file(path, &out)
}

/// OBJ of a curve set: one closed polyline per curve.
pub fn write_curves_obj(set: &RadialCurveSet, path: &Path) -> Result<()> {
    let m = set.grid().len();
    let mut out = String::from("# radial curves\n");
    for j in 0..set.len() {
        for i in 0..m {
            push_vertex(
                &mut out,
                [
                    set.coordinate(j, 0)[i],
                    set.coordinate(j, 1)[i],
                    set.coordinate(j, 2)[i],
                ],
            );
        }
    }
    for j in 0..set.len() {
        let ring: Vec<String> = (0..=m).map(|i| (j * m + i % m + 1).to_string()).collect();
        let _ = writeln!(out, "l {}", ring.join(" "));
    }
    write_file(path, &out)
}
