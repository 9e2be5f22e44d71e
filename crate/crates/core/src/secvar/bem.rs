//! Boundary-element assembly of the second variation on planar boundaries.
//!
//! Nodes are the mesh points; a boundary field `φ` is its vector of nodal
//! values and `∂²J(E)[φ] ≈ φᵀAφ` with
//!
//! * Dirichlet block `Dᵀ diag(1/(n|γ'|)) D` from the spectral derivative `D`
//!   in the curve parameter,
//! * curvature block `-diag(w κ²)`,
//! * nonlocal block `8γ W K W`, `K ≈ G` with the logarithmic self-interaction
//!   integrated by trigonometric product quadrature,
//! * potential block `4γ diag(w ∂_ν v)`, where `∂_ν v` comes from the
//!   boundary identity `∇v_E(x) = -2∫_{∂E} G(x,y) ν(y) dy`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field::green::{green_regular_part_2d, green_torus_2d};
use crate::shape::{BoundaryMesh, MeshComponent};
use crate::tolerances::{GREEN_SUM_TOL, MAX_DENSE_NODES};

#[derive(Debug, Clone)]
pub struct QuadraticFormMatrix {
    pub matrix: DMatrix<f64>,
    /// Dirichlet block alone; `W + dirichlet` is the `H¹` Gram matrix.
    pub dirichlet: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub normals: Vec<[f64; 2]>,
    /// `∂_ν v_E` at the nodes.
    pub normal_derivative: Vec<f64>,
    /// Node index range of each boundary component.
    pub components: Vec<std::ops::Range<usize>>,
    pub gamma: f64,
}

impl QuadraticFormMatrix {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn value(&self, phi: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(phi);
        v.dot(&(&self.matrix * &v))
    }

    /// `Σ w φ²`.
    pub fn l2_norm_sq(&self, phi: &[f64]) -> f64 {
        phi.iter().zip(&self.weights).map(|(p, w)| w * p * p).sum()
    }

    /// Typical size of the form per unit `L²` mass: `max_i |A_ii| / w_i`.
    pub fn scale(&self) -> f64 {
        (0..self.len()).fold(0.0f64, |m, i| m.max(self.matrix[(i, i)].abs() / self.weights[i]))
    }

    /// Nodal trace of `ν·e`.
    pub fn normal_trace(&self, e: [f64; 2]) -> Vec<f64> {
        self.normals.iter().map(|n| n[0] * e[0] + n[1] * e[1]).collect()
    }
}

/// Spectral differentiation matrix on `n` equispaced points of `[0,1)`.
pub fn spectral_derivative_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            return 0.0;
        }
        let d = i as i64 - j as i64;
        let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let x = PI * d as f64 / n as f64;
        if n.is_multiple_of(2) {
            PI * sign / x.tan()
        } else {
            PI * sign / x.sin()
        }
    })
}

/// Product-quadrature weights for `-(1/2π) log|2 sin π(t - τ)|` against the
/// trigonometric interpolant, as a function of the index offset.
fn log_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|d| {
            let mut s = 0.0;
            let half = n / 2;
            for m in 1..=half {
                let c = (2.0 * PI * (m * d) as f64 / n as f64).cos();
                let w = if n.is_multiple_of(2) && m == half { 0.5 } else { 1.0 };
                s += w * 2.0 * c / (4.0 * PI * m as f64);
            }
            s / n as f64
        })
        .collect()
}

fn sep(p: &[f64; 2], q: &[f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

fn min_image_dist(d: [f64; 2]) -> f64 {
    let w = |x: f64| x - x.round();
    (w(d[0]).powi(2) + w(d[1]).powi(2)).sqrt()
}

fn check_separation(mesh: &BoundaryMesh) -> Result<()> {
    let comps = &mesh.components;
    for (a, ca) in comps.iter().enumerate() {
        for cb in &comps[a + 1..] {
            let h = ca.weights.iter().chain(&cb.weights).fold(0.0f64, |m, &w| m.max(w));
            let dmin = ca
                .points
                .iter()
                .flat_map(|p| cb.points.iter().map(move |q| min_image_dist(sep(p, q))))
                .fold(f64::INFINITY, f64::min);
            if dmin < 2.0 * h {
                return Err(Error::MeshTooCoarse(format!(
                    "components are {dmin:.3e} apart with node spacing {h:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// Matrix `K` with `Σ_j K_ij w_j f_j ≈ ∫_{∂E} G(x_i, y) f(y) dy`.
fn kernel_matrix(mesh: &BoundaryMesh) -> DMatrix<f64> {
    let total = mesh.len();
    let mut k = DMatrix::zeros(total, total);
    let r0 = green_regular_part_2d([0.0, 0.0]);
    let mut offsets = Vec::with_capacity(mesh.components.len());
    let mut o = 0;
    for c in &mesh.components {
        offsets.push(o);
        o += c.len();
    }
    for (ia, ca) in mesh.components.iter().enumerate() {
        let oa = offsets[ia];
        let n = ca.len();
        let lw = log_weights(n);
        for i in 0..n {
            for j in 0..n {
                let d = (i + n - j) % n;
                let smooth = if i == j {
                    r0 - (ca.speed[i] / (2.0 * PI)).ln() / (2.0 * PI)
                } else {
                    let t = d as f64 / n as f64;
                    green_torus_2d(sep(&ca.points[i], &ca.points[j]), GREEN_SUM_TOL)
                        + (2.0 * (PI * t).sin()).abs().ln() / (2.0 * PI)
                };
                k[(oa + i, oa + j)] = n as f64 * lw[d] + smooth;
            }
        }
        for (ib, cb) in mesh.components.iter().enumerate().skip(ia + 1) {
            let ob = offsets[ib];
            for (i, p) in ca.points.iter().enumerate() {
                for (j, q) in cb.points.iter().enumerate() {
                    let g = green_torus_2d(sep(p, q), GREEN_SUM_TOL);
                    k[(oa + i, ob + j)] = g;
                    k[(ob + j, oa + i)] = g;
                }
            }
        }
    }
    k
}

fn component_dirichlet(c: &MeshComponent) -> DMatrix<f64> {
    let n = c.len();
    let d = spectral_derivative_matrix(n);
    let scale = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        c.speed.iter().map(|s| 1.0 / (n as f64 * s)),
    ));
    let mut q = d.transpose() * scale * d;
    if n.is_multiple_of(2) {
        // D annihilates the alternating Nyquist vector, whose interpolant
        // cos(πnt) still has ∫φ'² = (πn)²/2 per unit coefficient
        let inv_speed = c.speed.iter().map(|s| 1.0 / s).sum::<f64>() / n as f64;
        let alpha = PI * PI * inv_speed / 2.0;
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                q[(i, j)] += alpha * sign;
            }
        }
    }
    q
}

/// Assembles `∂²J(E)` on the mesh nodes.
pub fn assemble_boundary_form(mesh: &BoundaryMesh, gamma: f64) -> Result<QuadraticFormMatrix> {
    let total = mesh.len();
    if total > MAX_DENSE_NODES {
        return Err(Error::InvalidParameter(format!(
            "{total} nodes exceed the dense limit of {MAX_DENSE_NODES}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter("gamma must be ≥ 0".into()));
    }
    check_separation(mesh)?;
    let weights: Vec<f64> = mesh.weights().copied().collect();
    let normals: Vec<[f64; 2]> = mesh.normals().copied().collect();
    let curvature: Vec<f64> = mesh.curvature().copied().collect();

    let mut dirichlet = DMatrix::zeros(total, total);
    let mut components = Vec::new();
    let mut o = 0;
    for c in &mesh.components {
        let n = c.len();
        dirichlet.view_mut((o, o), (n, n)).copy_from(&component_dirichlet(c));
        components.push(o..o + n);
        o += n;
    }

    let k = kernel_matrix(mesh);
    let normal_derivative: Vec<f64> = (0..total)
        .map(|i| {
            -2.0 * (0..total)
                .map(|j| {
                    let dot = normals[i][0] * normals[j][0] + normals[i][1] * normals[j][1];
                    k[(i, j)] * weights[j] * dot
                })
                .sum::<f64>()
        })
        .collect();

    let mut a = dirichlet.clone();
    for i in 0..total {
        for j in 0..total {
            a[(i, j)] += 8.0 * gamma * weights[i] * k[(i, j)] * weights[j];
        }
        a[(i, i)] += weights[i] * (4.0 * gamma * normal_derivative[i] - curvature[i] * curvature[i]);
    }
    let matrix = (&a + a.transpose()) * 0.5;
    let dirichlet = (&dirichlet + dirichlet.transpose()) * 0.5;
    Ok(QuadraticFormMatrix {
        matrix,
        dirichlet,
        weights,
        normals,
        normal_derivative,
        components,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{boundary_mesh, ShapeConfig};

    #[test]
    fn derivative_matrix_is_exact_on_trig_polynomials() {
        for n in [16, 17] {
            let d = spectral_derivative_matrix(n);
            let f: Vec<f64> = (0..n).map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).sin()).collect();
            let df = &d * nalgebra::DVector::from_vec(f);
            for i in 0..n {
                let exact = 6.0 * PI * (2.0 * PI * 3.0 * i as f64 / n as f64).cos();
                assert!((df[i] - exact).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lamella_normal_derivative() {
        let s = ShapeConfig::lamella(1, 0.2, 1, 2).unwrap();
        let f = assemble_boundary_form(&boundary_mesh(&s, 64).unwrap(), 1.0).unwrap();
        let a = 0.6;
        for d in &f.normal_derivative {
            assert!((d + a * (1.0 - a)).abs() < 1e-10, "{d}");
        }
    }

    #[test]
    fn droplet_normal_derivative_is_near_uniform() {
        // ∂_ν v on a small disc is close to the free-space value -r
        let s = ShapeConfig::droplet(&[0.5, 0.5], 0.1).unwrap();
        let f = assemble_boundary_form(&boundary_mesh(&s, 128).unwrap(), 1.0).unwrap();
        let mean = f.normal_derivative.iter().sum::<f64>() / f.len() as f64;
        // -r + πr³ (flux of the neutralizing background)
        assert!((mean - (-0.1 + PI * 1e-3)).abs() < 1e-4, "{mean}");
    }
}
