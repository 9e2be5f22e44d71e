//! Parametric configurations on the torus: lamellar stacks, droplets and
//! graph perturbations of lamellae.

pub mod alpha;
pub mod file;
pub mod mesh;
pub mod raster;
pub mod spectrum;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::fourier1d::Fourier1D;
use crate::field::green::circle_distance;
use crate::tolerances::COLLISION_GUARD;

pub use alpha::{alpha_distance, AlphaResult};
pub use mesh::{boundary_mesh, BoundaryMesh, MeshComponent};
pub use raster::{perimeter_grid, rasterize, volume_fraction, IndicatorField};
pub use spectrum::{indicator_series, project};

/// `k` equally spaced strips of total volume fraction `a = (m+1)/2`, stacked
/// along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lamella {
    pub k: usize,
    pub m: f64,
    pub axis: usize,
    pub dim: usize,
}

/// One flat interface of a lamella: position along the axis and the sign of
/// `ν·e_axis` (−1 on the lower face of a strip, +1 on the upper).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface {
    pub position: f64,
    pub orientation: f64,
}

impl Lamella {
    pub fn a(&self) -> f64 {
        0.5 * (self.m + 1.0)
    }

    /// Interfaces in the order lower₁, upper₁, lower₂, upper₂, ...
    pub fn interfaces(&self) -> Vec<Interface> {
        let k = self.k as f64;
        let a = self.a();
        (0..self.k)
            .flat_map(|i| {
                let lo = i as f64 / k;
                [
                    Interface {
                        position: lo,
                        orientation: -1.0,
                    },
                    Interface {
                        position: lo + a / k,
                        orientation: 1.0,
                    },
                ]
            })
            .collect()
    }

    /// Smallest distance between neighbouring interfaces.
    pub fn gap(&self) -> f64 {
        let a = self.a();
        a.min(1.0 - a) / self.k as f64
    }

    /// Lateral axes (all axes but the stacking one).
    pub fn lateral_axes(&self) -> Vec<usize> {
        (0..self.dim).filter(|&a| a != self.axis).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("strip count must be at least 1".into()));
        }
        if !(self.m > -1.0 && self.m < 1.0) {
            return Err(Error::InvalidParameter(format!("m = {} must lie in (-1, 1)", self.m)));
        }
        if !(1..=3).contains(&self.dim) || self.axis >= self.dim {
            return Err(Error::InvalidParameter(format!(
                "axis {} invalid in dimension {}",
                self.axis, self.dim
            )));
        }
        Ok(())
    }

    /// Is `x` (the coordinate along the axis) inside a strip?
    pub fn contains(&self, x: f64) -> bool {
        let k = self.k as f64;
        let t = (x * k).rem_euclid(1.0);
        t < self.a()
    }
}

/// A disc (in `T²`) or ball (in `T³`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Droplet {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Droplet {
    /// Squared minimal-image distance from the center.
    pub fn dist_sq(&self, x: &[f64]) -> f64 {
        self.center
            .iter()
            .zip(x)
            .map(|(c, y)| circle_distance(y - c).powi(2))
            .sum()
    }

    pub fn volume(&self) -> f64 {
        match self.center.len() {
            2 => PI * self.radius * self.radius,
            _ => 4.0 / 3.0 * PI * self.radius.powi(3),
        }
    }

    pub fn area(&self) -> f64 {
        match self.center.len() {
            2 => 2.0 * PI * self.radius,
            _ => 4.0 * PI * self.radius * self.radius,
        }
    }
}

/// Graph perturbation of a 2D lamella. Interface `j` is displaced to
/// `x_axis = s_j + ψ_j(x_lat)`, with `ψ_j` sampled at `x_lat = l/n` and
/// extended by trigonometric interpolation. Heights are vertical (along
/// `+e_axis`), so `ψ ≡ c` on every interface is a rigid translation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPerturbation {
    pub base: Lamella,
    pub psi: Vec<Vec<f64>>,
}

impl GraphPerturbation {
    pub fn new(base: Lamella, psi: Vec<Vec<f64>>) -> Result<Self> {
        let g = Self { base, psi };
        g.validate()?;
        Ok(g)
    }

    /// Flat perturbation with `n` samples per interface.
    pub fn flat(base: Lamella, n: usize) -> Result<Self> {
        Self::new(base, vec![vec![0.0; n]; 2 * base.k])
    }

    pub fn samples(&self) -> usize {
        self.psi.first().map_or(0, Vec::len)
    }

    pub fn series(&self) -> Vec<Fourier1D> {
        self.psi.iter().map(|p| Fourier1D::from_samples(p)).collect()
    }

    fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.base.dim != 2 {
            return Err(Error::Unsupported(
                "graph perturbations are implemented for two-dimensional lamellae".into(),
            ));
        }
        if self.psi.len() != 2 * self.base.k {
            return Err(Error::InvalidParameter(format!(
                "expected {} height functions, got {}",
                2 * self.base.k,
                self.psi.len()
            )));
        }
        let n = self.samples();
        if n < 4 || self.psi.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidParameter(
                "height functions need a common sample count of at least 4".into(),
            ));
        }
        if self.psi.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let limit = COLLISION_GUARD * self.base.gap();
        // check the interpolant, not only the samples
        let fine = (8 * n).max(256);
        for s in self.series() {
            let peak = s.resample(fine, 0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak >= limit {
                return Err(Error::Collision(format!("max |psi| = {peak:.4e} exceeds {limit:.4e}")));
            }
        }
        Ok(())
    }

    /// Displacement along `ν` of interface `j`: `φ_j = (ν·e_axis) ψ_j`.
    pub fn normal_displacement(&self) -> Vec<Vec<f64>> {
        self.base
            .interfaces()
            .iter()
            .zip(&self.psi)
            .map(|(itf, p)| p.iter().map(|v| itf.orientation * v).collect())
            .collect()
    }

    /// `|E| - |base|`, exact for the interpolated heights.
    pub fn volume_change(&self) -> f64 {
        self.base
            .interfaces()
            .iter()
            .zip(self.series())
            .map(|(itf, s)| itf.orientation * s.mean())
            .sum()
    }

    /// Copy with heights scaled by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let psi = self.psi.iter().map(|p| p.iter().map(|v| t * v).collect()).collect();
        Self::new(self.base, psi)
    }

    /// Moves upper interfaces up and lower ones down by the same constant so
    /// the enclosed volume equals that of the base lamella exactly.
    pub fn volume_corrected(&self) -> Result<Self> {
        let c = -self.volume_change() / (2 * self.base.k) as f64;
        let psi = self
            .base
            .interfaces()
            .iter()
            .zip(&self.psi)
            .map(|(itf, p)| p.iter().map(|v| v + itf.orientation * c).collect())
            .collect();
        Self::new(self.base, psi)
    }

    /// First-step recentering shift: `σ = ∫φ(ν·e_axis) / ‖ν·e_axis‖²` along
    /// the axis, zero across it (the flat normals have no lateral part).
    pub fn recenter_translation(&self) -> Vec<f64> {
        let series = self.series();
        let sigma = series.iter().map(Fourier1D::mean).sum::<f64>() / series.len() as f64;
        let mut shift = vec![0.0; self.base.dim];
        shift[self.base.axis] = sigma;
        shift
    }

    /// Translates the configuration by `-shift`.
    pub fn apply_shift(&self, shift: &[f64]) -> Result<Self> {
        let lateral = self.base.lateral_axes()[0];
        let n = self.samples();
        let series = self.series();
        let psi = series
            .iter()
            .map(|s| {
                (0..n)
                    .map(|l| s.eval(l as f64 / n as f64 + shift[lateral], 0) - shift[self.base.axis])
                    .collect()
            })
            .collect();
        Self::new(self.base, psi)
    }

    /// `Σ_j ∫ φ_j ν_axis` evaluated from the samples (trapezoid rule).
    pub fn translation_moment(&self) -> f64 {
        self.psi.iter().map(|p| p.iter().sum::<f64>() / p.len() as f64).sum()
    }

    /// Axis coordinate of interface `j` above lateral position `x`.
    pub fn height(&self, series: &[Fourier1D], j: usize, x: f64) -> f64 {
        self.base.interfaces()[j].position + series[j].eval(x, 0)
    }
}

/// A parametric configuration together with its ambient dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ShapeConfig {
    Lamella(Lamella),
    Droplets { dim: usize, droplets: Vec<Droplet> },
    Graph(GraphPerturbation),
}

impl ShapeConfig {
    /// Lamella `L_k` with interfaces at `(i-1)/k` and `(i-1)/k + a/k`.
    pub fn lamella(k: usize, m: f64, axis: usize, dim: usize) -> Result<Self> {
        let l = Lamella { k, m, axis, dim };
        l.validate()?;
        Ok(ShapeConfig::Lamella(l))
    }

    pub fn droplet(center: &[f64], radius: f64) -> Result<Self> {
        Self::droplets(
            center.len(),
            vec![Droplet {
                center: center.to_vec(),
                radius,
            }],
        )
    }

    pub fn droplets(dim: usize, droplets: Vec<Droplet>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("droplets in dimension {dim}")));
        }
        for d in &droplets {
            if d.center.len() != dim {
                return Err(Error::InvalidParameter("droplet center has wrong dimension".into()));
            }
            if !(d.radius > 0.0 && d.radius < 0.5) {
                return Err(Error::InvalidParameter(format!(
                    "droplet radius {} must lie in (0, 1/2)",
                    d.radius
                )));
            }
        }
        for (i, d) in droplets.iter().enumerate() {
            for e in &droplets[i + 1..] {
                if d.dist_sq(&e.center).sqrt() <= d.radius + e.radius {
                    return Err(Error::Collision("droplets overlap".into()));
                }
            }
        }
        if droplets.is_empty() {
            return Err(Error::InvalidParameter("empty droplet list".into()));
        }
        Ok(ShapeConfig::Droplets { dim, droplets })
    }

    pub fn graph(base: Lamella, psi: Vec<Vec<f64>>) -> Result<Self> {
        Ok(ShapeConfig::Graph(GraphPerturbation::new(base, psi)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ShapeConfig::Lamella(l) => l.dim,
            ShapeConfig::Droplets { dim, .. } => *dim,
            ShapeConfig::Graph(g) => g.base.dim,
        }
    }

    /// `|E|`.
    pub fn volume(&self) -> f64 {
        match self {
            ShapeConfig::Lamella(l) => l.a(),
            ShapeConfig::Droplets { droplets, .. } => droplets.iter().map(Droplet::volume).sum(),
            ShapeConfig::Graph(g) => g.base.a() + g.volume_change(),
        }
    }

    /// `m = 2|E| - 1`.
    pub fn mass(&self) -> f64 {
        2.0 * self.volume() - 1.0
    }

    /// Membership test at a point of the torus.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ShapeConfig::Lamella(l) => l.contains(x[l.axis]),
            ShapeConfig::Droplets { droplets, .. } => droplets.iter().any(|d| d.dist_sq(x) < d.radius * d.radius),
            ShapeConfig::Graph(g) => graph_contains(g, &g.series(), x),
        }
    }

    /// Exact perimeter; graph interfaces by trapezoid quadrature of the arc
    /// length of the interpolated heights.
    pub fn perimeter_exact(&self) -> f64 {
        match self {
            ShapeConfig::Lamella(l) => 2.0 * l.k as f64,
            ShapeConfig::Droplets { droplets, .. } => droplets.iter().map(Droplet::area).sum(),
            ShapeConfig::Graph(g) => {
                let fine = (16 * g.samples()).max(4096);
                g.series()
                    .iter()
                    .map(|s| {
                        let d = s.resample(fine, 1);
                        d.iter().map(|p| (1.0 + p * p).sqrt()).sum::<f64>() / fine as f64
                    })
                    .sum()
            }
        }
    }
}

pub(crate) fn graph_contains(g: &GraphPerturbation, series: &[Fourier1D], x: &[f64]) -> bool {
    let lat = x[g.base.lateral_axes()[0]];
    let y = x[g.base.axis];
    let k = g.base.k;
    (0..k).any(|i| {
        let lo = g.height(series, 2 * i, lat);
        let hi = g.height(series, 2 * i + 1, lat);
        // the strip may straddle the periodic seam
        (-1..=1).any(|w| {
            let yy = y + w as f64;
            yy >= lo && yy < hi
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lamella_interfaces() {
        let ShapeConfig::Lamella(l) = ShapeConfig::lamella(1, 0.0, 1, 2).unwrap() else {
            unreachable!()
        };
        let pos: Vec<f64> = l.interfaces().iter().map(|i| i.position).collect();
        assert_eq!(pos, vec![0.0, 0.5]);
        let ShapeConfig::Lamella(l2) = ShapeConfig::lamella(2, 0.0, 1, 2).unwrap() else {
            unreachable!()
        };
        let pos: Vec<f64> = l2.interfaces().iter().map(|i| i.position).collect();
        assert_eq!(pos, vec![0.0, 0.25, 0.5, 0.75]);
        let m = 1.0 - 2.0 / PI;
        let ShapeConfig::Lamella(l3) = ShapeConfig::lamella(1, m, 1, 2).unwrap() else {
            unreachable!()
        };
        assert!((l3.a() - (1.0 - 1.0 / PI)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(ShapeConfig::lamella(1, 1.0, 1, 2).is_err());
        assert!(ShapeConfig::lamella(1, -1.0, 1, 2).is_err());
        assert!(ShapeConfig::lamella(0, 0.0, 1, 2).is_err());
        assert!(ShapeConfig::droplet(&[0.5, 0.5], 0.5).is_err());
        assert!(ShapeConfig::droplets(
            2,
            vec![
                Droplet {
                    center: vec![0.2, 0.5],
                    radius: 0.15
                },
                Droplet {
                    center: vec![0.45, 0.5],
                    radius: 0.15
                },
            ]
        )
        .is_err());
    }

    #[test]
    fn exact_perimeters() {
        assert_eq!(ShapeConfig::lamella(3, 0.2, 1, 2).unwrap().perimeter_exact(), 6.0);
        let d = ShapeConfig::droplet(&[0.5, 0.5], 0.25).unwrap();
        assert!((d.perimeter_exact() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn collision_guard() {
        let base = Lamella {
            k: 1,
            m: 0.0,
            axis: 1,
            dim: 2,
        };
        let n = 32;
        let big: Vec<f64> = (0..n).map(|l| 0.3 * (2.0 * PI * l as f64 / n as f64).sin()).collect();
        assert!(matches!(
            GraphPerturbation::new(base, vec![big, vec![0.0; n]]),
            Err(Error::Collision(_))
        ));
    }

    #[test]
    fn rigid_shift_recenters_exactly() {
        let base = Lamella {
            k: 2,
            m: 0.1,
            axis: 1,
            dim: 2,
        };
        let g = GraphPerturbation::new(base, vec![vec![0.01; 16]; 4]).unwrap();
        let s = g.recenter_translation();
        assert!((s[1] - 0.01).abs() < 1e-15 && s[0] == 0.0);
        let back = g.apply_shift(&s).unwrap();
        assert!(back.psi.iter().flatten().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn volume_correction_is_exact() {
        let base = Lamella {
            k: 1,
            m: 0.0,
            axis: 1,
            dim: 2,
        };
        let n = 16;
        let p: Vec<f64> = (0..n)
            .map(|l| 0.02 + 0.01 * (2.0 * PI * l as f64 / n as f64).cos())
            .collect();
        let g = GraphPerturbation::new(base, vec![p.clone(), vec![0.0; n]]).unwrap();
        assert!((g.volume_change() + 0.02).abs() < 1e-15);
        let c = g.volume_corrected().unwrap();
        assert!(c.volume_change().abs() < 1e-15);
    }
}
