//! Periodic kernel on the unit circle and its eigenbasis on a uniform grid.
//!
//! Closed curves are parameterized by `t ∈ [0, 1]` with `t = 0` and `t = 1`
//! identified. The grid stores the `m` distinct points `i / m`; the closing
//! point is only re-added when curves are exported.
//!
//! Functions on the grid carry the uniform-quadrature inner product
//! `⟨f, g⟩ = (1/m) Σ f(t_i) g(t_i)`. The eigenbasis is orthonormal under that
//! inner product, and its eigenvalues are those of the covariance operator
//! `(C f)(t_i) = (1/m) Σ_k K_ik f(t_k)`, so that `Σ λ_j b_j b_jᵀ = K`. The raw
//! matrix eigenvalues are `m · λ_j`, see [`KernelEigenbasis::matrix_eigenvalues`].

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold under which eigenvalues are treated as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

const UNIT_TOL: f64 = 1e-9;
const ORTHO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleGrid {
    m: usize,
}

impl CircleGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("circle grid needs at least one point"));
        }
        Ok(CircleGrid { m })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.point(i)).collect()
    }

    /// Discrete inner product `(1/m) Σ f_i g_i`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.m);
        debug_assert_eq!(g.len(), self.m);
        f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() / self.m as f64
    }

    /// Discrete L² norm `√((1/m) Σ f_i²)`.
    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    pub(crate) fn check_len(&self, f: &[f64], what: &str) -> Result<()> {
        if f.len() != self.m {
            return Err(Error::domain(format!(
                "{what} has {} samples, grid has {}",
                f.len(),
                self.m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicKernelParams {
    rho: f64,
    alpha: f64,
}

impl PeriodicKernelParams {
    pub fn new(rho: f64, alpha: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::domain(format!("kernel range rho must be > 0, got {rho}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "kernel smoothness alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(PeriodicKernelParams { rho, alpha })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for PeriodicKernelParams {
    fn default() -> Self {
        PeriodicKernelParams { rho: 1.0, alpha: 1.0 }
    }
}

/// Maps `t ∈ [0, 1]` onto the unit circle.
pub fn wrap(t: f64) -> Result<[f64; 2]> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("wrap parameter {t} outside [0, 1]")));
    }
    let angle = 2.0 * PI * t;
    Ok([angle.cos(), angle.sin()])
}

/// Geodesic distance on the unit circle, `arccos⟨a, b⟩`.
///
/// Evaluated as `2·atan2(|a − b|, |a + b|)`, which equals the arccosine for
/// unit vectors but keeps full precision for nearby points.
pub fn circle_distance(a: [f64; 2], b: [f64; 2]) -> Result<f64> {
    for p in [a, b] {
        let n = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if !((n - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::domain(format!(
                "circle point ({}, {}) is not a unit vector",
                p[0], p[1]
            )));
        }
    }
    let diff = (a[0] - b[0]).hypot(a[1] - b[1]);
    let sum = (a[0] + b[0]).hypot(a[1] + b[1]);
    Ok((2.0 * diff.atan2(sum)).clamp(0.0, PI))
}

/// Powered-exponential kernel `exp(−(d(ω(s), ω(t)) / ρ)^α)`.
pub fn kernel_eval(s: f64, t: f64, params: &PeriodicKernelParams) -> Result<f64> {
    let d = circle_distance(wrap(s)?, wrap(t)?)?;
    Ok(kernel_of_distance(d, params))
}

fn kernel_of_distance(d: f64, params: &PeriodicKernelParams) -> f64 {
    (-(d / params.rho).powf(params.alpha)).exp()
}

/// Gram matrix `K_ij = k(ω(i/m), ω(j/m))`.
///
/// The grid is uniform, so `K_ij` depends only on the circular index offset
/// `min(|i − j|, m − |i − j|)`. Entries are evaluated once per offset, which
/// makes `K` exactly symmetric and exactly circulant.
pub fn build_kernel_matrix(grid: &CircleGrid, params: &PeriodicKernelParams) -> Result<DMatrix<f64>> {
    let m = grid.len();
    let half = m / 2;
    let row: Vec<f64> = (0..=half)
        .map(|k| kernel_eval(0.0, grid.point(k), params))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let off = i.abs_diff(j);
        row[off.min(m - off)]
    }))
}

/// Eigenpairs of a periodic kernel on a circle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEigenbasis {
    grid: CircleGrid,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
    kernel_matrix: DMatrix<f64>,
}

/// Eigendecomposition of a symmetric kernel matrix on `grid`.
///
/// Eigenpairs come back sorted by descending eigenvalue. Modes whose
/// eigenvalue falls below `EIGEN_CLAMP · λ_max` are dropped.
pub fn eigendecompose(grid: &CircleGrid, kernel: &DMatrix<f64>) -> Result<KernelEigenbasis> {
    let m = grid.len();
    if kernel.nrows() != m || kernel.ncols() != m {
        return Err(Error::domain(format!(
            "kernel matrix is {}x{}, grid has {m} points",
            kernel.nrows(),
            kernel.ncols()
        )));
    }
    if kernel.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("kernel matrix has non-finite entries".into()));
    }
    if kernel != &kernel.transpose() {
        return Err(Error::domain("kernel matrix is not symmetric"));
    }

    let eig = SymmetricEigen::try_new(kernel.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigen-solver did not converge".into()))?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda_max = eig.eigenvalues[order[0]];
    if !(lambda_max > 0.0) {
        return Err(Error::Numerical(format!(
            "kernel matrix has no positive eigenvalue (max {lambda_max})"
        )));
    }

    let scale = (m as f64).sqrt();
    let mut eigenvalues = Vec::new();
    let mut eigenvectors = Vec::new();
    for idx in order {
        let value = eig.eigenvalues[idx];
        if value < EIGEN_CLAMP * lambda_max {
            continue;
        }
        let col = eig.eigenvectors.column(idx);
        // Fix the sign so the largest-magnitude entry is positive.
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        eigenvalues.push(value / m as f64);
        eigenvectors.push(col.iter().map(|v| sign * scale * v).collect());
    }

    let basis = KernelEigenbasis {
        grid: *grid,
        eigenvalues,
        eigenvectors,
        kernel_matrix: kernel.clone(),
    };
    if basis.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Internal("retained eigenvalue is not positive".into()));
    }
    Ok(basis)
}

impl KernelEigenbasis {
    /// Kernel matrix and eigenbasis for the periodic kernel on `grid`.
    pub fn periodic(grid: CircleGrid, params: &PeriodicKernelParams) -> Result<Self> {
        let k = build_kernel_matrix(&grid, params)?;
        eigendecompose(&grid, &k)
    }

    /// Builds a basis from explicit eigenpairs. The kernel matrix is
    /// reconstructed as `Σ λ_j b_j b_jᵀ`.
    pub fn from_parts(grid: CircleGrid, eigenvalues: Vec<f64>, eigenvectors: Vec<Vec<f64>>) -> Result<Self> {
        let m = grid.len();
        if eigenvalues.is_empty() || eigenvalues.len() != eigenvectors.len() {
            return Err(Error::domain(format!(
                "{} eigenvalues for {} eigenvectors",
                eigenvalues.len(),
                eigenvectors.len()
            )));
        }
        if eigenvalues.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::domain("eigenvalues must be positive and finite"));
        }
        if eigenvalues.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("eigenvalues must be sorted in descending order"));
        }
        for (i, b) in eigenvectors.iter().enumerate() {
            grid.check_len(b, "eigenvector")?;
            for (j, c) in eigenvectors.iter().enumerate().take(i + 1) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let got = grid.inner(b, c);
                if (got - expected).abs() > ORTHO_TOL {
                    return Err(Error::domain(format!(
                        "eigenvectors {i} and {j} have inner product {got}, expected {expected}"
                    )));
                }
            }
        }
        let mut k = DMatrix::zeros(m, m);
        for (lambda, b) in eigenvalues.iter().zip(&eigenvectors) {
            for i in 0..m {
                for j in 0..m {
                    k[(i, j)] += lambda * b[i] * b[j];
                }
            }
        }
        Ok(KernelEigenbasis {
            grid,
            eigenvalues,
            eigenvectors,
            kernel_matrix: k,
        })
    }

    pub fn grid(&self) -> &CircleGrid {
        &self.grid
    }

    /// Operator eigenvalues `λ_j`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvalues of the kernel matrix itself, `m · λ_j`.
    pub fn matrix_eigenvalues(&self) -> Vec<f64> {
        let m = self.grid.len() as f64;
        self.eigenvalues.iter().map(|l| l * m).collect()
    }

    /// Eigenvectors `b_j` sampled on the grid, orthonormal under [`CircleGrid::inner`].
    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.eigenvectors
    }

    pub fn kernel_matrix(&self) -> &DMatrix<f64> {
        &self.kernel_matrix
    }

    pub fn num_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Coefficients `⟨f, b_j⟩` for every retained mode.
    pub fn project(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(f, "curve")?;
        Ok(self.eigenvectors.iter().map(|b| self.grid.inner(f, b)).collect())
    }

    /// `Σ_j c_j b_j` on the grid.
    pub fn synthesize(&self, coefficients: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coefficients.len(), self.num_modes());
        let mut out = vec![0.0; self.grid.len()];
        for (c, b) in coefficients.iter().zip(&self.eigenvectors) {
            for (o, v) in out.iter_mut().zip(b) {
                *o += c * v;
            }
        }
        out
    }

    /// Relative Frobenius error of `Σ λ_j b_j b_jᵀ` against the kernel matrix.
    pub fn reconstruction_error(&self) -> f64 {
        let m = self.grid.len();
        let mut recon = DMatrix::zeros(m, m);
        for (lambda, b) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..m {
                for j in 0..m {
                    recon[(i, j)] += lambda * b[i] * b[j];
                }
            }
        }
        (recon - &self.kernel_matrix).norm() / self.kernel_matrix.norm()
    }

    pub(crate) fn same_as(&self, other: &KernelEigenbasis) -> bool {
        std::ptr::eq(self, other)
            || (self.grid == other.grid
                && self.eigenvalues == other.eigenvalues
                && self.eigenvectors == other.eigenvectors)
    }

    /// Writes `eigenvalues.csv` and `eigenvectors.csv` into `dir`.
    ///
    /// `eigenvectors.csv` has one row per grid point and one column per mode.
    pub fn write_csv_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        let mut values = String::from("mode,eigenvalue\n");
        for (j, l) in self.eigenvalues.iter().enumerate() {
            values.push_str(&format!("{j},{l:?}\n"));
        }
        let path = dir.join("eigenvalues.csv");
        fs::write(&path, values).map_err(|e| Error::file(&path, e))?;

        let mut vectors = String::new();
        let header: Vec<String> = (0..self.num_modes()).map(|j| format!("b{j}")).collect();
        vectors.push_str(&header.join(","));
        vectors.push('\n');
        for i in 0..self.grid.len() {
            let row: Vec<String> = self.eigenvectors.iter().map(|b| format!("{:?}", b[i])).collect();
            vectors.push_str(&row.join(","));
            vectors.push('\n');
        }
        let path = dir.join("eigenvectors.csv");
        fs::write(&path, vectors).map_err(|e| Error::file(&path, e))?;
        Ok(())
    }

    pub fn read_csv_bundle(dir: &Path) -> Result<Self> {
        let path = dir.join("eigenvalues.csv");
        let mut eigenvalues = Vec::new();
        for (line, record) in crate::io::read_csv_rows(&path, 2)? {
            let v = crate::io::parse_f64(&path, line, &record[1])?;
            eigenvalues.push(v);
        }
        let path = dir.join("eigenvectors.csv");
        let rows = crate::io::read_csv_rows(&path, eigenvalues.len())?;
        let grid = CircleGrid::new(rows.len())?;
        let mut eigenvectors = vec![vec![0.0; rows.len()]; eigenvalues.len()];
        for (i, (line, record)) in rows.iter().enumerate() {
            for (j, field) in record.iter().enumerate() {
                eigenvectors[j][i] = crate::io::parse_f64(&path, *line, field)?;
            }
        }
        Self::from_parts(grid, eigenvalues, eigenvectors)
    }
}
