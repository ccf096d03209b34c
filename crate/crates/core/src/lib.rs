//! Gaussian differentially private mean curves for disk-parameterized
//! surfaces.
//!
//! A surface `f: D → R³` sampled on a polar grid is cut into concentric
//! closed curves. Each coordinate of each curve is summarized across
//! individuals by a smoothness-penalized mean in the RKHS of a periodic
//! kernel, then released with Gaussian-process noise calibrated to a μ-GDP
//! budget. A point-wise Gaussian baseline and MSE evaluation are included
//! for comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod circle_kernel;
pub mod error;
pub mod evaluation;
pub mod gdp;
pub mod io;
pub mod pipeline;
pub mod rkhs_mean;
pub mod seed;
pub mod surface;

pub use circle_kernel::{CircleGrid, KernelEigenbasis, PeriodicKernelParams};
pub use error::{Error, Result};
pub use rkhs_mean::{ambient_norm, rkhs_mean, rkhs_norm, CurveSample, RkhsMean};
pub use seed::NoiseSeed;
