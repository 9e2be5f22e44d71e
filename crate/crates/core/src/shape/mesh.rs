//! Discretized boundaries of planar configurations.
//!
//! Every boundary component is a closed curve `γ: [0,1) → T²` sampled at the
//! uniform parameters `t_i = i/n`. Quadrature weights are `|γ'(t_i)|/n`, the
//! periodic trapezoid rule in the curve parameter.

use std::f64::consts::PI;

use serde::Serialize;

use super::{GraphPerturbation, ShapeConfig};
use crate::error::{Error, Result};
use crate::tolerances::MIN_MESH_POINTS;

#[derive(Debug, Clone, Serialize)]
pub struct MeshComponent {
    pub points: Vec<[f64; 2]>,
    /// Outward unit normals.
    pub normals: Vec<[f64; 2]>,
    /// Mean curvature `div ν`, positive for convex components.
    pub curvature: Vec<f64>,
    /// `|γ'(t_i)|`.
    pub speed: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MeshComponent {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryMesh {
    pub components: Vec<MeshComponent>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.components.iter().map(MeshComponent::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn length(&self) -> f64 {
        self.components.iter().map(MeshComponent::length).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.components.iter().flat_map(|c| c.points.iter())
    }

    pub fn normals(&self) -> impl Iterator<Item = &[f64; 2]> {
        self.components.iter().flat_map(|c| c.normals.iter())
    }

    pub fn curvature(&self) -> impl Iterator<Item = &f64> {
        self.components.iter().flat_map(|c| c.curvature.iter())
    }

    pub fn weights(&self) -> impl Iterator<Item = &f64> {
        self.components.iter().flat_map(|c| c.weights.iter())
    }
}

fn graph_components(g: &GraphPerturbation, n: usize) -> Vec<MeshComponent> {
    let axis = g.base.axis;
    let lat = g.base.lateral_axes()[0];
    let itf = g.base.interfaces();
    g.series()
        .iter()
        .zip(&itf)
        .map(|(s, i)| {
            let h = s.resample(n, 0);
            let d1 = s.resample(n, 1);
            let d2 = s.resample(n, 2);
            let sigma = i.orientation;
            let mut c = MeshComponent {
                points: Vec::with_capacity(n),
                normals: Vec::with_capacity(n),
                curvature: Vec::with_capacity(n),
                speed: Vec::with_capacity(n),
                weights: Vec::with_capacity(n),
            };
            for l in 0..n {
                let sp = (1.0 + d1[l] * d1[l]).sqrt();
                let mut p = [0.0; 2];
                p[lat] = l as f64 / n as f64;
                p[axis] = i.position + h[l];
                let mut nu = [0.0; 2];
                nu[lat] = -sigma * d1[l] / sp;
                nu[axis] = sigma / sp;
                c.points.push(p);
                c.normals.push(nu);
                c.curvature.push(-sigma * d2[l] / sp.powi(3));
                c.speed.push(sp);
                c.weights.push(sp / n as f64);
            }
            c
        })
        .collect()
}

/// Samples `n_points` nodes on every boundary component of a planar shape.
pub fn boundary_mesh(shape: &ShapeConfig, n_points: usize) -> Result<BoundaryMesh> {
    if shape.dim() != 2 {
        return Err(Error::Unsupported(
            "boundary meshes exist only in two dimensions".into(),
        ));
    }
    if n_points < MIN_MESH_POINTS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_MESH_POINTS} points per component are required"
        )));
    }
    let components = match shape {
        ShapeConfig::Lamella(l) => graph_components(&GraphPerturbation::flat(*l, 8)?, n_points),
        ShapeConfig::Graph(g) => graph_components(g, n_points.max(g.samples())),
        ShapeConfig::Droplets { droplets, .. } => droplets
            .iter()
            .map(|d| {
                let r = d.radius;
                let n = n_points;
                let mut c = MeshComponent {
                    points: Vec::with_capacity(n),
                    normals: Vec::with_capacity(n),
                    curvature: vec![1.0 / r; n],
                    speed: vec![2.0 * PI * r; n],
                    weights: vec![2.0 * PI * r / n as f64; n],
                };
                for i in 0..n {
                    let th = 2.0 * PI * i as f64 / n as f64;
                    let (s, co) = th.sin_cos();
                    c.points.push([
                        (d.center[0] + r * co).rem_euclid(1.0),
                        (d.center[1] + r * s).rem_euclid(1.0),
                    ]);
                    c.normals.push([co, s]);
                }
                c
            })
            .collect(),
    };
    Ok(BoundaryMesh { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Lamella;

    #[test]
    fn droplet_mesh() {
        let m = boundary_mesh(&ShapeConfig::droplet(&[0.5, 0.5], 0.25).unwrap(), 128).unwrap();
        assert!(m.curvature().all(|&k| (k - 4.0).abs() < 1e-14));
        assert!((m.length() - PI / 2.0).abs() < 1e-12);
        assert!(m
            .normals()
            .all(|n| ((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lamella_mesh_is_flat() {
        let m = boundary_mesh(&ShapeConfig::lamella(1, 0.0, 1, 2).unwrap(), 64).unwrap();
        assert_eq!(m.components.len(), 2);
        assert!(m.curvature().all(|&k| k == 0.0));
        assert_eq!(m.components[0].normals[0], [0.0, -1.0]);
        assert_eq!(m.components[1].normals[0], [0.0, 1.0]);
        assert!((m.length() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graph_curvature_linearizes() {
        let base = Lamella {
            k: 1,
            m: 0.0,
            axis: 1,
            dim: 2,
        };
        let n = 64;
        for delta in [1e-3, 1e-4] {
            let psi: Vec<f64> = (0..n).map(|l| delta * (2.0 * PI * l as f64 / n as f64).sin()).collect();
            let s = ShapeConfig::graph(base, vec![psi, vec![0.0; n]]).unwrap();
            let m = boundary_mesh(&s, n).unwrap();
            let c = &m.components[0];
            for l in 0..n {
                let lin = -4.0 * PI * PI * delta * (2.0 * PI * l as f64 / n as f64).sin();
                assert!((c.curvature[l] - lin).abs() < 1e3 * delta * delta);
            }
        }
    }

    #[test]
    fn coarse_mesh_rejected() {
        assert!(boundary_mesh(&ShapeConfig::lamella(1, 0.0, 1, 2).unwrap(), 16).is_err());
    }
}
