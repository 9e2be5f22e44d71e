//! Shape description files and the measurements CSV.
//!
//! A shape file is TOML with one `[shape]` table:
//!
//! ```toml
//! [shape]
//! kind = "lamella"   # or "droplets", "graph"
//! dim = 2
//! k = 1
//! m = 0.0
//! axis = 1           # defaults to dim - 1
//! ```
//!
//! Droplets use `centers = [[x, y], ...]` and `radii = [r, ...]`; graphs add
//! `psi = [[...], ...]` (one row of heights per interface) to the lamella keys.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Droplet, Lamella, ShapeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeRecord {
    pub kind: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeFile {
    shape: ShapeRecord,
}

fn missing(key: &str) -> Error {
    Error::Parse(format!("shape record is missing `{key}`"))
}

impl ShapeRecord {
    pub fn to_shape(&self) -> Result<ShapeConfig> {
        let lamella = || -> Result<Lamella> {
            let k = self.k.ok_or_else(|| missing("k"))?;
            let m = self.m.ok_or_else(|| missing("m"))?;
            let axis = self.axis.unwrap_or(self.dim.saturating_sub(1));
            match ShapeConfig::lamella(k, m, axis, self.dim)? {
                ShapeConfig::Lamella(l) => Ok(l),
                _ => unreachable!(),
            }
        };
        match self.kind.as_str() {
            "lamella" => Ok(ShapeConfig::Lamella(lamella()?)),
            "graph" => ShapeConfig::graph(lamella()?, self.psi.clone().ok_or_else(|| missing("psi"))?),
            "droplets" | "droplet" => {
                let centers = self.centers.clone().ok_or_else(|| missing("centers"))?;
                let radii = self.radii.clone().ok_or_else(|| missing("radii"))?;
                if centers.len() != radii.len() {
                    return Err(Error::Parse("centers and radii differ in length".into()));
                }
                let droplets = centers
                    .into_iter()
                    .zip(radii)
                    .map(|(center, radius)| Droplet { center, radius })
                    .collect();
                ShapeConfig::droplets(self.dim, droplets)
            }
            other => Err(Error::Parse(format!("unknown shape kind `{other}`"))),
        }
    }

    pub fn from_shape(shape: &ShapeConfig) -> Self {
        match shape {
            ShapeConfig::Lamella(l) => ShapeRecord {
                kind: "lamella".into(),
                dim: l.dim,
                k: Some(l.k),
                m: Some(l.m),
                axis: Some(l.axis),
                ..Default::default()
            },
            ShapeConfig::Graph(g) => ShapeRecord {
                kind: "graph".into(),
                dim: g.base.dim,
                k: Some(g.base.k),
                m: Some(g.base.m),
                axis: Some(g.base.axis),
                psi: Some(g.psi.clone()),
                ..Default::default()
            },
            ShapeConfig::Droplets { dim, droplets } => ShapeRecord {
                kind: "droplets".into(),
                dim: *dim,
                centers: Some(droplets.iter().map(|d| d.center.clone()).collect()),
                radii: Some(droplets.iter().map(|d| d.radius).collect()),
                ..Default::default()
            },
        }
    }
}

pub fn parse_shape(text: &str) -> Result<ShapeConfig> {
    let file: ShapeFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.shape.to_shape()
}

pub fn shape_to_string(shape: &ShapeConfig) -> String {
    toml::to_string(&ShapeFile {
        shape: ShapeRecord::from_shape(shape),
    })
    .expect("shape records serialize")
}

pub fn read_shape(path: &Path) -> Result<ShapeConfig> {
    parse_shape(&std::fs::read_to_string(path)?)
}

pub fn write_shape(shape: &ShapeConfig, path: &Path) -> Result<()> {
    std::fs::write(path, shape_to_string(shape))?;
    Ok(())
}

/// One row of a measurements table.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub quantity: String,
    pub value: f64,
    pub grid: String,
    pub notes: String,
}

impl Measurement {
    pub fn new(quantity: &str, value: f64, grid: &str, notes: &str) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            grid: grid.into(),
            notes: notes.into(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `quantity,value,grid,notes` rows. Values use Rust's shortest
/// round-trip formatting.
pub fn write_measurements<W: Write>(rows: &[Measurement], mut out: W) -> Result<()> {
    writeln!(out, "quantity,value,grid,notes")?;
    for r in rows {
        writeln!(
            out,
            "{},{:e},{},{}",
            csv_field(&r.quantity),
            r.value,
            csv_field(&r.grid),
            csv_field(&r.notes)
        )?;
    }
    Ok(())
}

/// Formats grid sizes as `256x256`.
pub fn grid_label(sizes: &[usize]) -> String {
    sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x")
}
