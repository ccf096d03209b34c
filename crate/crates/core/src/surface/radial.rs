//! Face radial curves: the restriction of a disk surface to concentric
//! circles of the parameter disk.

use std::path::Path;

use super::{DiskSurface, Point3, PointCloud};
use crate::circle_kernel::CircleGrid;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, parse_f64, parse_usize, read_csv_named, write_file};

pub(crate) const CURVE_HEADER: [&str; 6] = ["curve", "radius", "t", "x", "y", "z"];

/// `J` closed space curves, each stored as three coordinate functions on
/// the angle grid (without the duplicated closing sample).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialCurveSet {
    radii: Vec<f64>,
    grid: CircleGrid,
    curves: Vec<[Vec<f64>; 3]>,
}

impl RadialCurveSet {
    pub fn new(radii: Vec<f64>, grid: CircleGrid, curves: Vec<[Vec<f64>; 3]>) -> Result<Self> {
        if curves.is_empty() || curves.len() != radii.len() {
            return Err(Error::domain(format!(
                "{} curves for {} radii",
                curves.len(),
                radii.len()
            )));
        }
        for (j, c) in curves.iter().enumerate() {
            for coord in c {
                grid.check_len(coord, &format!("radial curve {j}"))?;
                if coord.iter().any(|v| !v.is_finite()) {
                    return Err(Error::domain(format!("radial curve {j} has non-finite values")));
                }
            }
        }
        Ok(RadialCurveSet { radii, grid, curves })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    /// Coordinate `w` (0 = x, 1 = y, 2 = z) of curve `j` on the grid.
    pub fn coordinate(&self, j: usize, w: usize) -> &[f64] {
        &self.curves[j][w]
    }

    /// Coordinate curve with the closing sample `f(1) = f(0)` appended.
    pub fn closed_coordinate(&self, j: usize, w: usize) -> Vec<f64> {
        let c = &self.curves[j][w];
        let mut out = c.clone();
        out.push(c[0]);
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let m = self.grid.len();
        let mut out = CURVE_HEADER.join(",");
        out.push('\n');
        for j in 0..self.len() {
            let closed: Vec<Vec<f64>> = (0..3).map(|w| self.closed_coordinate(j, w)).collect();
            #[allow(clippy::needless_range_loop)]
            for i in 0..=m {
                let t = if i == m { 1.0 } else { self.grid.point(i) };
                out.push_str(&format!(
                    "{j},{},{},{},{},{}\n",
                    fmt_f64(self.radii[j]),
                    fmt_f64(t),
                    fmt_f64(closed[0][i]),
                    fmt_f64(closed[1][i]),
                    fmt_f64(closed[2][i])
                ));
            }
        }
        write_file(path, &out)
    }

    /// Reads a curve file. Each curve must carry `m + 1` rows whose last row
    /// repeats the first exactly.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let rows = read_csv_named(path, &CURVE_HEADER)?;
        let mut radii: Vec<f64> = Vec::new();
        let mut closed: Vec<[Vec<f64>; 3]> = Vec::new();
        let mut last_line = 1;
        for (line, rec) in &rows {
            last_line = *line;
            let j = parse_usize(path, *line, &rec[0])?;
            let r = parse_f64(path, *line, &rec[1])?;
            if j == closed.len() {
                radii.push(r);
                closed.push([Vec::new(), Vec::new(), Vec::new()]);
            } else if j + 1 != closed.len() {
                return Err(Error::parse(path, *line, format!("curve index {j} out of order")));
            } else if radii[j] != r {
                return Err(Error::parse(path, *line, format!("radius changes within curve {j}")));
            }
            for w in 0..3 {
                closed[j][w].push(parse_f64(path, *line, &rec[3 + w])?);
            }
        }
        if closed.is_empty() {
            return Err(Error::parse(path, last_line, "no curves in file"));
        }
        let samples = closed[0][0].len();
        if samples < 2 {
            return Err(Error::parse(path, last_line, "curves need at least two rows"));
        }
        let grid = CircleGrid::new(samples - 1)?;
        let mut curves = Vec::with_capacity(closed.len());
        for (j, mut c) in closed.into_iter().enumerate() {
            if c[0].len() != samples {
                return Err(Error::parse(
                    path,
                    last_line,
                    format!("curve {j} has {} rows, expected {samples}", c[0].len()),
                ));
            }
            for coord in c.iter_mut() {
                let end = coord.pop().expect("non-empty");
                if end != coord[0] {
                    return Err(Error::parse(
                        path,
                        last_line,
                        format!("curve {j} is not closed: last sample {end} != first {}", coord[0]),
                    ));
                }
            }
            curves.push(c);
        }
        RadialCurveSet::new(radii, grid, curves)
    }
}

/// Indices of the surface radii nearest to `j / J`, `j = 1..=J`.
pub fn select_radii(radii: &[f64], count: usize) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::domain("curve count must be positive"));
    }
    if count > radii.len() {
        return Err(Error::domain(format!(
            "cannot select {count} curves from {} radii",
            radii.len()
        )));
    }
    let mut picked: Vec<usize> = Vec::with_capacity(count);
    for j in 1..=count {
        let target = j as f64 / count as f64;
        let idx = radii
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
            .map(|(i, _)| i)
            .expect("radii non-empty");
        if picked.last() == Some(&idx) {
            return Err(Error::domain(format!(
                "radius grid too irregular: target radii {} and {target} map to the same circle",
                (j - 1) as f64 / count as f64
            )));
        }
        picked.push(idx);
    }
    Ok(picked)
}

/// Extracts `count` radial curves at radii `j / count`, `j = 1..=count`.
pub fn extract_radial_curves(surface: &DiskSurface, count: usize) -> Result<RadialCurveSet> {
    let picked = select_radii(surface.radii(), count)?;
    let m = surface.n_angles();
    let curves = picked
        .iter()
        .map(|&i| std::array::from_fn(|w| (0..m).map(|k| surface.point(i, k)[w]).collect()))
        .collect();
    let radii = picked.iter().map(|&i| surface.radii()[i]).collect();
    RadialCurveSet::new(radii, *surface.angles(), curves)
}

/// Discretizes the curves into `J × (m + 1)` points, closing sample included.
pub fn curves_to_point_cloud(set: &RadialCurveSet) -> PointCloud {
    let mut points: Vec<Point3> = Vec::with_capacity(set.len() * (set.grid.len() + 1));
    for j in 0..set.len() {
        let c = &set.curves[j];
        for i in 0..=set.grid.len() {
            let k = i % set.grid.len();
            points.push([c[0][k], c[1][k], c[2][k]]);
        }
    }
    PointCloud::from_parts_unchecked(points, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat_disk(nr: usize, m: usize) -> DiskSurface {
        DiskSurface::from_fn(DiskSurface::uniform_radii(nr), CircleGrid::new(m).unwrap(), |r, t| {
            [r * t.cos(), r * t.sin(), 0.0]
        })
        .unwrap()
    }

    #[test]
    fn flat_disk_curves_are_circles() {
        let s = flat_disk(12, 16);
        let set = extract_radial_curves(&s, 4).unwrap();
        assert_eq!(set.radii(), &[0.25, 0.5, 0.75, 1.0]);
        for j in 0..4 {
            let r = set.radii()[j];
            for (i, t) in set.grid().points().iter().enumerate() {
                assert!((set.coordinate(j, 0)[i] - r * (2.0 * PI * t).cos()).abs() < 1e-12);
                assert!((set.coordinate(j, 1)[i] - r * (2.0 * PI * t).sin()).abs() < 1e-12);
                assert_eq!(set.coordinate(j, 2)[i], 0.0);
            }
        }
    }

    #[test]
    fn all_radii_when_count_matches() {
        let s = flat_disk(7, 8);
        let set = extract_radial_curves(&s, 7).unwrap();
        assert_eq!(set.radii(), s.radii());
        assert!(matches!(extract_radial_curves(&s, 8), Err(Error::Domain(_))));
        assert!(extract_radial_curves(&s, 0).is_err());
    }

    #[test]
    fn extraction_only_reads_selected_circles() {
        let a = flat_disk(6, 8);
        let b = a.map_points(|p| p);
        // Perturb a circle that is not selected for J = 3 (radii 1/3, 2/3, 1 → indices 1, 3, 5).
        let mut pts = b.points().to_vec();
        for p in pts.iter_mut().take(8) {
            p[2] += 1.0;
        }
        let b = b.with_points(pts).unwrap();
        assert_eq!(
            extract_radial_curves(&a, 3).unwrap(),
            extract_radial_curves(&b, 3).unwrap()
        );
    }

    #[test]
    fn point_cloud_layout() {
        let s = flat_disk(23, 80);
        let set = extract_radial_curves(&s, 23).unwrap();
        assert_eq!(curves_to_point_cloud(&set).len(), 1863);

        let one = extract_radial_curves(&flat_disk(1, 4), 1).unwrap();
        let cloud = curves_to_point_cloud(&one);
        assert_eq!(cloud.len(), 5);
        assert_eq!(cloud.points()[0], cloud.points()[4]);
    }

    #[test]
    fn point_cloud_rows_reproduce_curves() {
        let set = extract_radial_curves(&flat_disk(10, 12), 5).unwrap();
        let cloud = curves_to_point_cloud(&set);
        for (j, chunk) in cloud.points().chunks(13).enumerate() {
            for w in 0..3 {
                let col: Vec<f64> = chunk.iter().map(|p| p[w]).collect();
                assert_eq!(col, set.closed_coordinate(j, w));
            }
        }
    }

    #[test]
    fn csv_round_trip_and_closure_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.csv");
        let set = extract_radial_curves(&flat_disk(10, 12), 5).unwrap();
        set.write_csv(&path).unwrap();
        assert_eq!(RadialCurveSet::read_csv(&path).unwrap(), set);

        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        // Row 13 closes curve 0; break its z value.
        let last = lines[13].rsplit_once(',').unwrap().0.to_string();
        lines[13] = format!("{last},0.5");
        std::fs::write(&path, lines.join("\n")).unwrap();
        match RadialCurveSet::read_csv(&path) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("not closed")),
            other => panic!("expected closure error, got {other:?}"),
        }
    }
}
