//! Optimal-profile initial data and the one-dimensional interfacial cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::flow::{run_flow, FlowOptions};
use super::{check_resolution, diffuse_energy};
use crate::error::{Error, Result};
use crate::field::green::circle_distance;
use crate::field::{ScalarField, TorusGrid};
use crate::shape::ShapeConfig;

/// Signed distance to `∂E`, positive inside. Graph interfaces use the
/// vertical distance, which is accurate for small slopes.
fn signed_distances(shape: &ShapeConfig, grid: &TorusGrid) -> Result<Vec<f64>> {
    if shape.dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "shape dimension {} vs grid dimension {}",
            shape.dim(),
            grid.dim()
        )));
    }
    let mut out = vec![0.0; grid.len()];
    match shape {
        ShapeConfig::Lamella(l) => {
            let (k, a) = (l.k as f64, l.a());
            grid.for_each_cell(|flat, idx| {
                let t = (grid.coordinate(l.axis, idx[l.axis]) * k).rem_euclid(1.0);
                out[flat] = if t < a { t.min(a - t) } else { -(t - a).min(1.0 - t) } / k;
            });
        }
        ShapeConfig::Droplets { droplets, .. } => {
            let mut x = vec![0.0; grid.dim()];
            grid.for_each_cell(|flat, idx| {
                for (axis, &i) in idx.iter().enumerate() {
                    x[axis] = grid.coordinate(axis, i);
                }
                out[flat] = droplets
                    .iter()
                    .map(|d| d.radius - d.dist_sq(&x).sqrt())
                    .fold(f64::NEG_INFINITY, f64::max);
            });
        }
        ShapeConfig::Graph(g) => {
            let lat = g.base.lateral_axes()[0];
            let series = g.series();
            let heights: Vec<Vec<f64>> = (0..grid.size(lat))
                .map(|i| {
                    let x = grid.coordinate(lat, i);
                    (0..series.len()).map(|j| g.height(&series, j, x)).collect()
                })
                .collect();
            let mut x = vec![0.0; grid.dim()];
            grid.for_each_cell(|flat, idx| {
                for (axis, &i) in idx.iter().enumerate() {
                    x[axis] = grid.coordinate(axis, i);
                }
                let y = x[g.base.axis];
                let d = heights[idx[lat]]
                    .iter()
                    .map(|h| circle_distance(y - h).abs())
                    .fold(f64::INFINITY, f64::min);
                out[flat] = if shape.contains(&x) { d } else { -d };
            });
        }
    }
    Ok(out)
}

/// `u = tanh(d/ε)` with `d` the signed distance to `∂E`; the exact
/// one-dimensional minimizer across a flat interface.
pub fn tanh_profile(shape: &ShapeConfig, grid: &TorusGrid, epsilon: f64) -> Result<ScalarField> {
    check_resolution(grid, epsilon)?;
    let d = signed_distances(shape, grid)?;
    ScalarField::new(grid.clone(), d.into_iter().map(|d| (d / epsilon).tanh()).collect())
}

/// Adds uniform noise of the given amplitude with its mean removed, so the
/// mass of `u` is unchanged.
pub fn add_noise(u: &ScalarField, amplitude: f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..u.values().len())
        .map(|_| amplitude * rng.gen_range(-1.0..1.0))
        .collect();
    let mean = noise.iter().sum::<f64>() / noise.len() as f64;
    let mut out = u.clone();
    for (v, n) in out.values_mut().iter_mut().zip(&noise) {
        *v += n - mean;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub epsilon: Vec<f64>,
    /// Relaxed energy per interface at each `ε`.
    pub cost: Vec<f64>,
    /// Linear extrapolation to `ε = 0` from the two smallest widths.
    pub extrapolated: f64,
}

/// Relaxed `γ₀ = 0` energy of a 1D periodic profile with interfaces at the
/// given positions (alternating up/down, so an even count).
pub fn relaxed_energy_1d(epsilon: f64, n: usize, interfaces: &[f64]) -> Result<f64> {
    if interfaces.is_empty() || !interfaces.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "a periodic profile needs an even, nonzero number of interfaces".into(),
        ));
    }
    let grid = TorusGrid::new(&[n])?;
    check_resolution(&grid, epsilon)?;
    let mut sorted = interfaces.to_vec();
    sorted.sort_by(f64::total_cmp);
    let u0 = ScalarField::from_fn(&grid, |x| {
        let (d, idx) = sorted
            .iter()
            .enumerate()
            .map(|(j, p)| (circle_distance(x[0] - p), j))
            .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
            .expect("nonempty");
        // +1 just above even-indexed interfaces
        let s = if idx % 2 == 0 { 1.0 } else { -1.0 };
        (s * d / epsilon).tanh()
    });
    let opts = FlowOptions {
        dt: 0.05 * epsilon,
        max_steps: 20_000,
        stop_tol: 1e-8,
        ..FlowOptions::default()
    };
    let state = run_flow(u0, epsilon, 0.0, &opts)?;
    diffuse_energy(&state.u, epsilon, 0.0).map(|e| e.total)
}

/// Interfacial cost of the double well from relaxed 1D profiles with one
/// interface pinned at `1/4` (its partner at `3/4`), per interface.
pub fn profile_constant(epsilon_list: &[f64], n: usize) -> Result<ProfileReport> {
    if epsilon_list.is_empty() {
        return Err(Error::InvalidParameter("empty epsilon list".into()));
    }
    let cost = epsilon_list
        .iter()
        .map(|&e| Ok(relaxed_energy_1d(e, n, &[0.25, 0.75])? / 2.0))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..cost.len()).collect();
    order.sort_by(|&a, &b| epsilon_list[a].total_cmp(&epsilon_list[b]));
    let extrapolated = match order.as_slice() {
        [i] => cost[*i],
        [i, j, ..] => {
            let (e1, e2) = (epsilon_list[*i], epsilon_list[*j]);
            if (e2 - e1).abs() < f64::EPSILON {
                cost[*i]
            } else {
                cost[*i] - e1 * (cost[*j] - cost[*i]) / (e2 - e1)
            }
        }
        [] => unreachable!(),
    };
    Ok(ProfileReport {
        epsilon: epsilon_list.to_vec(),
        cost,
        extrapolated,
    })
}
