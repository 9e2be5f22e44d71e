//! Second differences of the sharp energy along graph perturbations of a
//! lamella, compared against the exact quadratic form.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lamella::{lamella_form_value, StabilityReport};
use crate::error::{Error, Result};
use crate::field::TorusGrid;
use crate::shape::{GraphPerturbation, Lamella, ShapeConfig};
use crate::sharp::energy_of_shape;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdReport {
    pub t: Vec<f64>,
    /// `(J(E_t) + J(E_{-t}) - 2J(E)) / t²` for each `t`.
    pub second_differences: Vec<f64>,
    /// Richardson limit from the two smallest `t`.
    pub extrapolated: f64,
    pub form_value: f64,
    pub ratio: f64,
    pub energy: f64,
}

fn graph_energy(g: &GraphPerturbation, gamma: f64, grid: &TorusGrid) -> Result<f64> {
    Ok(energy_of_shape(&ShapeConfig::Graph(g.clone()), gamma, grid)?.total)
}

/// Volume-corrected `E_t` with heights `tψ`.
fn perturbed(base: Lamella, psi: &[Vec<f64>], t: f64) -> Result<GraphPerturbation> {
    let scaled = psi.iter().map(|p| p.iter().map(|v| t * v).collect()).collect();
    GraphPerturbation::new(base, scaled)?.volume_corrected()
}

/// Normal displacement of the volume-corrected direction (linear in `ψ`).
fn corrected_displacement(base: Lamella, psi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let itfs = base.interfaces();
    let mean = |p: &Vec<f64>| p.iter().sum::<f64>() / p.len() as f64;
    let dv: f64 = itfs.iter().zip(psi).map(|(i, p)| i.orientation * mean(p)).sum();
    let c = -dv / (2 * base.k) as f64;
    itfs.iter()
        .zip(psi)
        .map(|(i, p)| p.iter().map(|v| i.orientation * v + c).collect())
        .collect()
}

/// Eliminates the `t²` error term using two step sizes.
pub fn richardson(t1: f64, r1: f64, t2: f64, r2: f64) -> f64 {
    let (a, b) = (t1 * t1, t2 * t2);
    if (a - b).abs() < f64::EPSILON * a.max(b) {
        return r2;
    }
    (a * r2 - b * r1) / (a - b)
}

/// Compares symmetric second differences of `J` along the volume-corrected
/// family `E_t` (vertical heights `tψ_j`) with `∂²J(L_k)[φ]`, `φ` the normal
/// displacement of the corrected direction.
pub fn finite_difference_check(
    base: Lamella,
    psi: &[Vec<f64>],
    gamma: f64,
    t_list: &[f64],
    grid: &TorusGrid,
) -> Result<FdReport> {
    if t_list.len() < 2 || t_list.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameter("need at least two positive step sizes".into()));
    }
    let flat = GraphPerturbation::flat(base, psi.first().map_or(0, Vec::len))?;
    let j0 = graph_energy(&flat, gamma, grid)?;
    let mut second_differences = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let jp = graph_energy(&perturbed(base, psi, t)?, gamma, grid)?;
        let jm = graph_energy(&perturbed(base, psi, -t)?, gamma, grid)?;
        second_differences.push((jp + jm - 2.0 * j0) / (t * t));
    }
    let mut order: Vec<usize> = (0..t_list.len()).collect();
    order.sort_by(|&a, &b| t_list[a].total_cmp(&t_list[b]));
    let (i1, i2) = (order[1], order[0]);
    let extrapolated = richardson(t_list[i1], second_differences[i1], t_list[i2], second_differences[i2]);
    let form_value = lamella_form_value(base.k, base.m, gamma, &corrected_displacement(base, psi))?;
    Ok(FdReport {
        t: t_list.to_vec(),
        second_differences,
        extrapolated,
        form_value,
        ratio: extrapolated / form_value,
        energy: j0,
    })
}

/// `α(L_k, F)` for a graph perturbation `F` of `L_k`, computed from the
/// heights: lateral shifts leave `L_k` invariant, so only the axis shift `σ`
/// matters and `α = min_σ Σ_j ∫|ψ_j - σ|`, attained at the median.
pub fn graph_alpha(g: &GraphPerturbation, resolution: usize) -> f64 {
    let fine = resolution.max(g.samples());
    let mut values: Vec<f64> = g.series().iter().flat_map(|s| s.resample(fine, 0)).collect();
    values.sort_by(f64::total_cmp);
    let sigma = values[values.len() / 2];
    values.iter().map(|v| (v - sigma).abs()).sum::<f64>() / fine as f64
}

/// Heights `ψ_j(x) = (ν_j·e_axis) v_j cos(2πqx)` realizing a lamella mode.
pub fn mode_direction(base: Lamella, report: &StabilityReport, samples: usize) -> Result<Vec<Vec<f64>>> {
    if base.dim != 2 {
        return Err(Error::Unsupported("mode directions are built for 2D lamellae".into()));
    }
    if report.eigenvector.len() != 2 * base.k {
        return Err(Error::InvalidParameter("eigenvector does not match the lamella".into()));
    }
    let q = report.q.round();
    Ok(base
        .interfaces()
        .iter()
        .zip(&report.eigenvector)
        .map(|(itf, v)| {
            (0..samples)
                .map(|l| itf.orientation * v * (2.0 * PI * q * l as f64 / samples as f64).cos())
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingReport {
    pub samples: usize,
    /// `min (J(F) - J(E)) / α(E,F)²` over the samples.
    pub min_ratio: f64,
    pub min_gap: f64,
    /// `(J(F) - J(E), α)` per sample.
    pub pairs: Vec<(f64, f64)>,
}

/// Random volume-corrected graph perturbations of `L_k`: a few lateral
/// modes per interface with random phases, amplitude drawn up to
/// `max_amplitude` times the interface gap.
pub fn random_perturbation(
    base: Lamella,
    samples: usize,
    modes: usize,
    max_amplitude: f64,
    rng: &mut impl Rng,
) -> Result<GraphPerturbation> {
    let scale = rng.gen_range(0.1..1.0) * max_amplitude * base.gap();
    let mut psi = vec![vec![0.0; samples]; 2 * base.k];
    for row in psi.iter_mut() {
        for q in 1..=modes {
            let c = rng.gen_range(-1.0..1.0) / q as f64;
            let phase = rng.gen_range(0.0..2.0 * PI);
            for (l, v) in row.iter_mut().enumerate() {
                *v += c * (2.0 * PI * q as f64 * l as f64 / samples as f64 + phase).cos();
            }
        }
        // occasional rigid offsets exercise the volume correction
        let offset = rng.gen_range(-0.3..0.3);
        row.iter_mut().for_each(|v| *v += offset);
    }
    let peak = psi.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let psi: Vec<Vec<f64>> = psi
        .into_iter()
        .map(|r| r.into_iter().map(|v| v * scale / peak).collect())
        .collect();
    GraphPerturbation::new(base, psi)?.volume_corrected()
}

/// Samples `(J(F) - J(E)) / α(E,F)²` over random admissible perturbations.
pub fn quantitative_sampling(
    base: Lamella,
    gamma: f64,
    count: usize,
    max_amplitude: f64,
    seed: u64,
    grid: &TorusGrid,
) -> Result<SamplingReport> {
    let samples = grid.sizes()[base.lateral_axes()[0]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j0 = graph_energy(&GraphPerturbation::flat(base, samples)?, gamma, grid)?;
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let f = random_perturbation(base, samples, 4, max_amplitude, &mut rng)?;
        let gap = graph_energy(&f, gamma, grid)? - j0;
        pairs.push((gap, graph_alpha(&f, 4096)));
    }
    let min_ratio = pairs
        .iter()
        .filter(|(_, a)| *a > 0.0)
        .map(|(d, a)| d / (a * a))
        .fold(f64::INFINITY, f64::min);
    let min_gap = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok(SamplingReport {
        samples: count,
        min_ratio,
        min_gap,
        pairs,
    })
}
