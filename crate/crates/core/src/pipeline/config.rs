use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circle_kernel::PeriodicKernelParams;
use crate::error::{Error, Result};
use crate::gdp::verify::MIN_SAMPLES;
use crate::gdp::SensitivityProvenance;
use crate::surface::SyntheticConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SensitivityMode {
    /// `τ_w` is the largest curve norm in the data.
    #[default]
    DataDriven,
    /// `τ_w` comes from `tau_x`, `tau_y`, `tau_z`.
    Supplied,
}

impl SensitivityMode {
    pub fn provenance(self) -> SensitivityProvenance {
        match self {
            SensitivityMode::DataDriven => SensitivityProvenance::DataDriven,
            SensitivityMode::Supplied => SensitivityProvenance::Supplied,
        }
    }
}

/// Flat key-value configuration of the whole pipeline. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Angle grid size of the curves.
    pub m: usize,
    /// Number of radial curves.
    pub curves: usize,
    pub rho: f64,
    pub alpha: f64,
    pub phi_x: f64,
    pub phi_y: f64,
    pub phi_z: f64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_z: f64,
    pub seed: u64,
    pub sensitivity: SensitivityMode,
    pub tau_x: Option<f64>,
    pub tau_y: Option<f64>,
    pub tau_z: Option<f64>,
    /// Total budget of the point-wise baseline.
    pub baseline_mu_total: f64,
    /// Directory of raw surface files (`surface_*.csv`).
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses all available cores.
    pub threads: usize,
    /// Monte-Carlo draws per dataset for privacy verification.
    pub n_samples: usize,
    /// Individuals produced by `generate`.
    pub n_individuals: usize,
    pub surface_radii: usize,
    pub surface_angles: usize,
    pub perturbation: f64,
    pub rotation_jitter: f64,
    pub scale_jitter: f64,
    pub translation_jitter: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let synthetic = SyntheticConfig::default();
        PipelineConfig {
            m: 80,
            curves: 23,
            rho: 1.0,
            alpha: 1.0,
            phi_x: 0.01,
            phi_y: 0.01,
            phi_z: 0.005,
            mu_x: 0.2,
            mu_y: 0.2,
            mu_z: 0.55,
            seed: 1,
            sensitivity: SensitivityMode::DataDriven,
            tau_x: None,
            tau_y: None,
            tau_z: None,
            baseline_mu_total: 3.0,
            input_dir: PathBuf::from("data/raw"),
            output_dir: PathBuf::from("out"),
            threads: 0,
            n_samples: MIN_SAMPLES,
            n_individuals: 200,
            surface_radii: synthetic.n_radii,
            surface_angles: synthetic.n_angles,
            perturbation: synthetic.perturbation,
            rotation_jitter: synthetic.rotation_jitter,
            scale_jitter: synthetic.scale_jitter,
            translation_jitter: synthetic.translation_jitter,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive, got {v}")))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn phi(&self) -> [f64; 3] {
        [self.phi_x, self.phi_y, self.phi_z]
    }

    pub fn mu(&self) -> [f64; 3] {
        [self.mu_x, self.mu_y, self.mu_z]
    }

    /// Supplied `τ` per coordinate, if the mode is `supplied`.
    pub fn tau(&self) -> Option<[f64; 3]> {
        match self.sensitivity {
            SensitivityMode::DataDriven => None,
            SensitivityMode::Supplied => Some([
                self.tau_x.unwrap_or(f64::NAN),
                self.tau_y.unwrap_or(f64::NAN),
                self.tau_z.unwrap_or(f64::NAN),
            ]),
        }
    }

    pub fn kernel(&self) -> Result<PeriodicKernelParams> {
        PeriodicKernelParams::new(self.rho, self.alpha).map_err(|e| config_err(e.to_string()))
    }

    pub fn synthetic(&self) -> SyntheticConfig {
        SyntheticConfig {
            n_radii: self.surface_radii,
            n_angles: self.surface_angles,
            perturbation: self.perturbation,
            rotation_jitter: self.rotation_jitter,
            scale_jitter: self.scale_jitter,
            translation_jitter: self.translation_jitter,
        }
    }

    /// Checks every field against the preconditions of the stage that uses it.
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(config_err("m must be positive"));
        }
        if self.curves == 0 {
            return Err(config_err("curves must be positive"));
        }
        self.kernel()?;
        for (name, v) in [("phi_x", self.phi_x), ("phi_y", self.phi_y), ("phi_z", self.phi_z)] {
            positive(name, v)?;
        }
        for (name, v) in [("mu_x", self.mu_x), ("mu_y", self.mu_y), ("mu_z", self.mu_z)] {
            positive(name, v)?;
        }
        positive("baseline_mu_total", self.baseline_mu_total)?;
        if self.sensitivity == SensitivityMode::Supplied {
            for (name, v) in [("tau_x", self.tau_x), ("tau_y", self.tau_y), ("tau_z", self.tau_z)] {
                match v {
                    Some(t) if t >= 0.0 && t.is_finite() => {}
                    Some(t) => return Err(config_err(format!("{name} must be non-negative, got {t}"))),
                    None => return Err(config_err(format!("{name} is required with supplied sensitivity"))),
                }
            }
        }
        if self.n_samples < MIN_SAMPLES {
            return Err(config_err(format!(
                "n_samples must be at least {MIN_SAMPLES}, got {}",
                self.n_samples
            )));
        }
        if self.n_individuals < 2 {
            return Err(config_err("n_individuals must be at least 2"));
        }
        self.synthetic().validate().map_err(|e| config_err(e.to_string()))?;
        if self.surface_angles != self.m {
            return Err(config_err(format!(
                "surface_angles ({}) must equal m ({}) so curves share the kernel grid",
                self.surface_angles, self.m
            )));
        }
        if self.curves > self.surface_radii {
            return Err(config_err(format!(
                "cannot extract {} curves from {} radii",
                self.curves, self.surface_radii
            )));
        }
        Ok(())
    }
}
