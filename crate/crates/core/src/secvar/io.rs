//! Spectra tables and the regression-constant file.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lamella::lamella_mode_matrix;
use super::threshold::{GammaThreshold, KThreshold};
use crate::error::{Error, Result};

/// Writes `q,eig1..eig2k` rows with ascending eigenvalues of `M(q)`.
pub fn write_spectra<W: Write>(k: usize, m: f64, gamma: f64, qs: &[u32], mut out: W) -> Result<()> {
    let cols: Vec<String> = (1..=2 * k).map(|i| format!("eig{i}")).collect();
    writeln!(out, "q,{}", cols.join(","))?;
    for &q in qs {
        let eig = lamella_mode_matrix(k, m, gamma, q as f64)?.eigenvalues();
        let row: Vec<String> = eig.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{q},{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaConstant {
    pub m: f64,
    pub k: usize,
    pub dim: usize,
    pub gamma_c: f64,
    pub bracket: (f64, f64),
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KConstant {
    pub m: f64,
    pub gamma: f64,
    pub dim: usize,
    pub k0: usize,
    pub k_max: usize,
}

/// Derived thresholds recorded for regression runs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConstants {
    pub tool_version: String,
    #[serde(default)]
    pub gamma_c: Vec<GammaConstant>,
    #[serde(default)]
    pub k0: Vec<KConstant>,
}

impl RegressionConstants {
    pub fn new() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    /// Records a located threshold; ranges without a sign change are skipped.
    pub fn push_gamma(&mut self, t: &GammaThreshold) -> bool {
        match (t.gamma_c, t.bracket) {
            (Some(gamma_c), Some(bracket)) => {
                self.gamma_c.push(GammaConstant {
                    m: t.m,
                    k: t.k,
                    dim: t.dim,
                    gamma_c,
                    bracket,
                    tolerance: t.tolerance,
                });
                true
            }
            _ => false,
        }
    }

    pub fn push_k(&mut self, t: &KThreshold, dim: usize) -> bool {
        match t.k0 {
            Some(k0) => {
                self.k0.push(KConstant {
                    m: t.m,
                    gamma: t.gamma,
                    dim,
                    k0,
                    k_max: t.k_max,
                });
                true
            }
            None => false,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}
