//! Minimal eigenvalue of the boundary form on the complement of the mean and
//! translation functionals.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::bem::QuadraticFormMatrix;
use crate::error::{Error, Result};
use crate::tolerances::{CONSTRAINT_RANK_TOL, TRANSLATION_NORM_MIN};

#[derive(Debug, Clone, Copy, Default)]
pub struct ConstraintOptions {
    /// Zero mean on every boundary component instead of a single total mean.
    pub per_component_mean: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstrainedSpectrum {
    /// Minimal Rayleigh quotient `φᵀAφ / ∫φ²`.
    pub min_eigenvalue: f64,
    /// Lowest constrained eigenvalues (ascending, `L²` normalization).
    pub eigenvalues: Vec<f64>,
    /// Minimizer of `φᵀAφ / ∫φ²`, normalized to `∫φ² = 1`.
    pub eigenvector: Vec<f64>,
    /// Minimal Rayleigh quotient against `‖φ‖²_{H¹} = ∫|D_τφ|² + φ²`.
    pub h1_min: f64,
    /// Eigenbasis of `a_ij = ∫ν_iν_j`.
    pub frame: [[f64; 2]; 2],
    /// Frame directions whose translation functional was imposed.
    pub translations: Vec<usize>,
    pub constraint_count: usize,
}

fn frame(form: &QuadraticFormMatrix) -> ([[f64; 2]; 2], [f64; 2]) {
    let mut a = [[0.0; 2]; 2];
    for (n, w) in form.normals.iter().zip(&form.weights) {
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] += w * n[i] * n[j];
            }
        }
    }
    let eig = SymmetricEigen::new(nalgebra::Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]));
    let e = eig.eigenvectors;
    (
        [[e[(0, 0)], e[(1, 0)]], [e[(0, 1)], e[(1, 1)]]],
        [eig.eigenvalues[0], eig.eigenvalues[1]],
    )
}

/// Constraint functionals `φ ↦ Σ_i c_i φ_i` as coefficient vectors.
fn constraints(form: &QuadraticFormMatrix, opts: ConstraintOptions) -> (Vec<Vec<f64>>, [[f64; 2]; 2], Vec<usize>) {
    let n = form.len();
    let mut rows = Vec::new();
    if opts.per_component_mean {
        for r in &form.components {
            let mut c = vec![0.0; n];
            for i in r.clone() {
                c[i] = form.weights[i];
            }
            rows.push(c);
        }
    } else {
        rows.push(form.weights.clone());
    }
    let (fr, norms) = frame(form);
    let mut used = Vec::new();
    for (d, e) in fr.iter().enumerate() {
        if norms[d].max(0.0).sqrt() > TRANSLATION_NORM_MIN {
            let tr = form.normal_trace(*e);
            rows.push(tr.iter().zip(&form.weights).map(|(t, w)| t * w).collect());
            used.push(d);
        }
    }
    (rows, fr, used)
}

/// Lowest eigenpair of `A y = λ y` restricted to the orthogonal complement of
/// the (orthonormalized) constraint vectors.
fn restricted_min(a: &DMatrix<f64>, cons: &[DVector<f64>], strict: bool) -> Result<(Vec<f64>, DVector<f64>)> {
    let n = a.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in cons {
        let mut v = c.clone();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm <= CONSTRAINT_RANK_TOL * c.norm() {
            if !strict {
                continue;
            }
            return Err(Error::RankDeficient(format!(
                "constraint {} depends on the previous ones",
                basis.len()
            )));
        }
        basis.push(v / norm);
    }
    let mut p = DMatrix::<f64>::identity(n, n);
    for b in &basis {
        p -= b * b.transpose();
    }
    let bound = (0..n)
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let sigma = 2.0 * bound + 1.0;
    let shifted = &p * a * &p + (DMatrix::<f64>::identity(n, n) - &p) * sigma;
    let eig = SymmetricEigen::new((&shifted + shifted.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals: Vec<f64> = order
        .iter()
        .map(|&i| eig.eigenvalues[i])
        .filter(|&v| v < 0.5 * sigma)
        .collect();
    let vec = eig.eigenvectors.column(order[0]).into_owned();
    Ok((vals, vec))
}

/// Generalized problem `A φ = λ B φ` on the constrained subspace, with `B`
/// symmetric positive definite. Returns ascending eigenvalues and the
/// minimizer in `φ` coordinates.
fn generalized_min(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    rows: &[Vec<f64>],
    strict: bool,
) -> Result<(Vec<f64>, DVector<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NonConvergence("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NonConvergence("singular Gram factor".into()))?;
    let at = &linv * a * linv.transpose();
    // c·φ = c·L^{-T} y = (L^{-1} c)·y
    let cons: Vec<DVector<f64>> = rows.iter().map(|r| &linv * DVector::from_column_slice(r)).collect();
    let (vals, y) = restricted_min(&at, &cons, strict)?;
    let phi = linv.transpose() * y;
    Ok((vals, phi))
}

pub fn constrained_min_eig(form: &QuadraticFormMatrix) -> Result<ConstrainedSpectrum> {
    constrained_min_eig_with(form, ConstraintOptions::default())
}

pub fn constrained_min_eig_with(form: &QuadraticFormMatrix, opts: ConstraintOptions) -> Result<ConstrainedSpectrum> {
    let n = form.len();
    let (rows, fr, used) = constraints(form, opts);
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(&form.weights));
    // per-component means already span the translations of flat interfaces
    let strict = !opts.per_component_mean;
    let (vals, phi) = generalized_min(&form.matrix, &w, &rows, strict)?;
    let h1 = &w + &form.dirichlet;
    let (h1_vals, _) = generalized_min(&form.matrix, &h1, &rows, strict)?;
    let mut eigenvector: Vec<f64> = phi.iter().copied().collect();
    let norm = form.l2_norm_sq(&eigenvector).sqrt();
    eigenvector.iter_mut().for_each(|x| *x /= norm);
    debug_assert_eq!(eigenvector.len(), n);
    Ok(ConstrainedSpectrum {
        min_eigenvalue: vals[0],
        eigenvalues: vals,
        eigenvector,
        h1_min: h1_vals[0],
        frame: fr,
        translations: used,
        constraint_count: rows.len(),
    })
}
