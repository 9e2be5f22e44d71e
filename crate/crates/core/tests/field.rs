use std::f64::consts::PI;

use okstab::field::green::{green_function_2d, green_kernel_screened, kernel_mean_zero};
use okstab::field::spectral::{dirichlet_energy, laplacian, solve_poisson_periodic};
use okstab::shape::project;
use okstab::{ScalarField, ShapeConfig, TorusGrid};
use proptest::prelude::*;

mod common;
use common::{bernoulli_kernel, raw_sum, screened_sum};

fn band_limited(grid: &TorusGrid, modes: &[(i32, i32, f64, f64)]) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|&(p, q, a, phase)| a * (2.0 * PI * (p as f64 * x[0] + q as f64 * x[1]) + phase).cos())
            .sum()
    })
}

fn mode() -> impl Strategy<Value = (i32, i32, f64, f64)> {
    (-20i32..=20, -20i32..=20, -1.0..1.0f64, 0.0..2.0 * PI).prop_filter("zero mode", |m| m.0 != 0 || m.1 != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solver_residual_is_at_round_off(modes in prop::collection::vec(mode(), 1..6)) {
        let grid = TorusGrid::new(&[64, 64]).unwrap();
        let f = band_limited(&grid, &modes).mean_removed();
        let v = solve_poisson_periodic(&f).unwrap();
        let lap = laplacian(&v);
        let res = lap.values().iter().zip(f.values()).map(|(l, f)| (l + f).abs()).fold(0.0, f64::max);
        prop_assert!(res <= 1e-10 * f.max_abs(), "residual {res:e}");
        prop_assert!(v.mean().abs() < 1e-14);
    }

    #[test]
    fn dirichlet_energy_equals_source_pairing(modes in prop::collection::vec(mode(), 1..6)) {
        let grid = TorusGrid::new(&[64, 32]).unwrap();
        let f = band_limited(&grid, &modes).mean_removed();
        let v = solve_poisson_periodic(&f).unwrap();
        let e = dirichlet_energy(&v).unwrap();
        let pairing = v.inner(&f).unwrap();
        prop_assert!((e - pairing).abs() <= 1e-10 * pairing.abs(), "{e:e} vs {pairing:e}");
    }

    #[test]
    fn green_function_is_translation_invariant(
        x in (0.0..1.0f64, 0.0..1.0f64),
        y in (0.0..1.0f64, 0.0..1.0f64),
        t in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let g = green_function_2d([x.0, x.1], [y.0, y.1], 1e-16);
        prop_assume!(g.is_ok());
        let g = g.unwrap();
        let shifted = green_function_2d([x.0 + t.0, x.1 + t.1], [y.0 + t.0, y.1 + t.1], 1e-16).unwrap();
        let swapped = green_function_2d([y.0, y.1], [x.0, x.1], 1e-16).unwrap();
        prop_assert!((g - shifted).abs() <= 1e-12 * g.abs().max(1.0));
        prop_assert!((g - swapped).abs() <= 1e-12 * g.abs().max(1.0));
    }
}

/// `v` for `u_L - m` on the circle: piecewise quadratic, symmetric about each
/// strip center, with zero mean.
fn lamella_potential(a: f64, x: f64) -> f64 {
    let c0 = a * (1.0 - a) * (1.0 - 2.0 * a) / 6.0;
    if x < a {
        -(1.0 - a) * x * x + a * (1.0 - a) * x + c0
    } else {
        let y = x - a;
        a * y * y - a * (1.0 - a) * y + c0
    }
}

/// `Σ_{|n|>N/2} |v̂_n|` for the strip `[0, a)`: the part of the exact series
/// a grid of `N` points cannot carry.
fn truncation_tail(a: f64, n: usize) -> f64 {
    (n / 2..2_000_000)
        .map(|j| {
            let k = j as f64;
            2.0 * (2.0 * (PI * k * a).sin().abs() / (PI * k)) / (4.0 * PI * PI * k * k)
        })
        .sum()
}

fn max_potential_error(a: f64, n: usize) -> f64 {
    let grid = TorusGrid::new(&[n]).unwrap();
    // strip [0, a): m = 2a - 1
    let shape = ShapeConfig::lamella(1, 2.0 * a - 1.0, 0, 1).unwrap();
    let f = project(&shape, &grid).unwrap().map(|v| v - (2.0 * a - 1.0));
    let v = solve_poisson_periodic(&f).unwrap();
    (0..n)
        .map(|i| (v.values()[i] - lamella_potential(a, grid.coordinate(0, i))).abs())
        .fold(0.0, f64::max)
}

#[test]
fn lamella_potential_matches_piecewise_quadratic() {
    for &a in &[0.5, 0.3, 0.75] {
        let err = max_potential_error(a, 1024);
        let tail = truncation_tail(a, 1024);
        assert!(
            err <= tail * (1.0 + 1e-6) + 1e-14,
            "a = {a}: error {err:e} above the series tail {tail:e}"
        );
        assert!(max_potential_error(a, 2048) <= 1e-8, "a = {a}");

        let grid = TorusGrid::new(&[1024]).unwrap();
        let shape = ShapeConfig::lamella(1, 2.0 * a - 1.0, 0, 1).unwrap();
        let f = project(&shape, &grid).unwrap().map(|v| v - (2.0 * a - 1.0));
        let e = dirichlet_energy(&solve_poisson_periodic(&f).unwrap()).unwrap();
        let exact = a * a * (1.0 - a) * (1.0 - a) / 3.0;
        assert!((e - exact).abs() <= 1e-8, "a = {a}: energy {e} vs {exact}");
    }
}

#[test]
fn lamella_energy_converges_at_second_order() {
    // rasterized strip with a·n whole cells, so the sampled volume is exact
    let a = 0.3;
    let exact = a * a * (1.0 - a) * (1.0 - a) / 3.0;
    let err = |n: usize| {
        let grid = TorusGrid::new(&[n]).unwrap();
        let u = ScalarField::from_fn(&grid, |x| if x[0] < a { 1.0 } else { -1.0 });
        assert!((u.mean() - (2.0 * a - 1.0)).abs() < 1e-12);
        let e = dirichlet_energy(&solve_poisson_periodic(&u.mean_removed()).unwrap()).unwrap();
        (e - exact).abs()
    };
    let (e1, e2, e3) = (err(160), err(320), err(640));
    assert!(e2 < e1 / 3.5 && e3 < e2 / 3.5, "errors {e1:e}, {e2:e}, {e3:e}");
}

#[test]
fn mean_zero_kernel_matches_fourier_sum() {
    for &s in &[0.0, 0.1, 0.25, 0.5, 0.9] {
        assert!((kernel_mean_zero(s) - bernoulli_kernel(s)).abs() < 1e-15);
    }
    assert!((kernel_mean_zero(0.0) - 1.0 / 12.0).abs() < 1e-15);
    assert!((kernel_mean_zero(0.5) + 1.0 / 24.0).abs() < 1e-15);
}

#[test]
fn screened_kernel_matches_spectral_sums() {
    for q in 1..=8u32 {
        let lambda = 2.0 * PI * q as f64;
        for &s in &[0.0, 0.03, 0.2, 0.37, 0.5, 0.81] {
            let g = green_kernel_screened(q, s);
            // Kummer tail after 1e5 terms is below λ²/(3·16π⁴·1e15)
            let accel = screened_sum(lambda, s, 100_000);
            assert!(
                (g - accel).abs() <= 1e-10 * g.abs().max(1e-3),
                "q={q} s={s}: {g:e} vs {accel:e}"
            );
            // the plain truncated sum is off by at most its tail, Σ_{n>N} 2/(4π²n²)
            let raw = raw_sum(lambda, s, 100_000);
            let tail = 2.0 / (4.0 * PI * PI * 1e5);
            assert!((g - raw).abs() <= tail, "q={q} s={s}");
        }
    }
}

/// `G(d)` from the heat-regularized lattice sum: for `t > 0`,
/// `Σ_{ξ≠0} cos(2πξ·d) e^{-4π²t|ξ|²}/(4π²|ξ|²) = G(d) + t - ∫₀ᵗ p_s(d) ds`
/// with `p_s` the periodic heat kernel, negligible for `|d|²/4t ≫ 1`.
fn heat_regularized_green(d: [f64; 2], t: f64) -> f64 {
    let r = ((40.0 / (4.0 * PI * PI * t)).sqrt()).ceil() as i64;
    let mut sum = 0.0;
    for p in -r..=r {
        let cp = 2.0 * PI * p as f64 * d[0];
        for q in 0..=r {
            if p == 0 && q == 0 {
                continue;
            }
            let k2 = 4.0 * PI * PI * (p * p + q * q) as f64;
            let w = if q == 0 { 1.0 } else { 2.0 };
            sum += w * (cp + 2.0 * PI * q as f64 * d[1]).cos() * (-t * k2).exp() / k2;
        }
    }
    sum - t
}

#[test]
fn torus_green_function_matches_regularized_lattice_sum() {
    let t = 1e-4;
    for d in [
        [0.0, 0.5],
        [0.5, 0.5],
        [0.2, 0.1],
        [0.31, -0.42],
        [0.0, 0.25],
        [0.45, 0.05],
    ] {
        let g = green_function_2d([0.0, 0.0], d, 1e-16).unwrap();
        let oracle = heat_regularized_green(d, t);
        assert!((g - oracle).abs() < 1e-10, "d = {d:?}: {g:e} vs {oracle:e}");
    }
}

#[test]
fn green_function_matches_mollified_point_source() {
    // -Δv = δ_σ - 1 with a narrow periodic Gaussian δ_σ; away from the
    // source v differs from G by O(σ²) through the heat-flow identity above
    let n = 512;
    let sigma = 0.01;
    let grid = TorusGrid::new(&[n, n]).unwrap();
    let f = ScalarField::from_fn(&grid, |x| {
        let mut s = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                let dx = x[0] - 0.5 + i as f64;
                let dy = x[1] - 0.5 + j as f64;
                s += (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
        }
        s / (2.0 * PI * sigma * sigma)
    })
    .mean_removed();
    let v = solve_poisson_periodic(&f).unwrap();
    // (0.5, 0.5) + (0, 0.5) lies at a cell corner; use the nearest cell
    // center and the Green function at that exact separation
    let idx = [n / 2, 0];
    let c = grid.cell_center(&idx);
    let g = green_function_2d([0.5, 0.5], [c[0], c[1]], 1e-16).unwrap();
    let approx = v.values()[grid.flat_index(&idx)] - sigma * sigma / 2.0;
    assert!(((approx - g) / g).abs() < 1e-4, "{approx:e} vs {g:e}");
}
