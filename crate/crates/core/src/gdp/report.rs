//! Release reports: one record per noisy release plus the composed budget.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::NoiseSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    X,
    Y,
    Z,
}

impl Coordinate {
    pub const ALL: [Coordinate; 3] = [Coordinate::X, Coordinate::Y, Coordinate::Z];

    pub fn index(self) -> usize {
        match self {
            Coordinate::X => 0,
            Coordinate::Y => 1,
            Coordinate::Z => 2,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coordinate::X => "x",
            Coordinate::Y => "y",
            Coordinate::Z => "z",
        })
    }
}

/// Where the sensitivity bound of a release came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensitivityProvenance {
    /// Computed from the confidential data; the formal guarantee does not hold.
    DataDriven,
    /// Supplied independently of the data.
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseRecord {
    /// Radial curve index for curve releases, point index for point-wise releases.
    pub curve_index: usize,
    pub coordinate: Coordinate,
    pub mu: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<f64>,
    pub delta_bound: f64,
    pub sigma: f64,
    pub seed: NoiseSeed,
    pub sensitivity_provenance: SensitivityProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReleaseReport {
    pub mechanism: String,
    pub n_individuals: usize,
    pub mu_total: f64,
    pub releases: Vec<ReleaseRecord>,
}

impl ReleaseReport {
    /// `Σ μ_i²` over all releases.
    pub fn budget_squares(&self) -> f64 {
        self.releases.iter().map(|r| r.mu * r.mu).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("release report serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_file(path, &(self.to_json() + "\n"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line() as u64, e.to_string()))
    }
}
