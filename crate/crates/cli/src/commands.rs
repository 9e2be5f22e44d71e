//! Subcommand parameter tables and their implementations. Each command
//! writes CSV (with the provenance block) to `--output` or stdout and a short
//! human summary to stderr.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use okstab::diffuse::{
    add_noise, classify_flow, continue_flow, gamma_from_gamma0, load_checkpoint, save_checkpoint, seeded_lamella,
    tanh_profile, write_history, FlowOptions, FlowState,
};
use okstab::secvar::threshold::stability_threshold_k_up_to;
use okstab::secvar::{
    finite_difference_check, graph_alpha, lamella_min_eigenvalue, mode_direction, quantitative_sampling,
    stability_threshold_gamma, write_spectra, RegressionConstants,
};
use okstab::shape::file::{grid_label, read_shape, write_measurements, Measurement};
use okstab::shape::{alpha_distance, boundary_mesh, rasterize, GraphPerturbation, Lamella};
use okstab::sharp::{el_residual, energy_of_shape, isoperimetric_compare, strip_disc_crossing, write_energy_table};
use okstab::{ShapeConfig, TorusGrid};
use rayon::prelude::*;

use crate::config::{p, Kind, Param, RunConfig};
use crate::CliError;

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [Param],
    pub run: fn(&RunConfig) -> Result<Output, CliError>,
}

/// CSV body plus the stderr summary. `failure` marks a numerical failure
/// (exit code 2) whose output is still written.
pub struct Output {
    pub csv: Vec<u8>,
    pub summary: String,
    pub failure: Option<String>,
}

impl Output {
    fn ok(csv: Vec<u8>, summary: String) -> Self {
        Self {
            csv,
            summary,
            failure: None,
        }
    }
}

const OUTPUT: Param = p("output", Kind::Str, None, "CSV destination (stdout when absent)");

macro_rules! shape_params {
    ($($extra:expr),* $(,)?) => {
        &[
            p("shape", Kind::Str, Some("lamella"), "lamella, droplet or file"),
            p("k", Kind::Int, Some("1"), "strip count"),
            p("m", Kind::Float, Some("0"), "volume parameter, |E| = (1+m)/2"),
            p("dim", Kind::Int, Some("2"), "ambient dimension"),
            p("axis", Kind::Int, None, "lamella normal axis (default dim-1)"),
            p("center", Kind::FloatList, None, "droplet center"),
            p("radius", Kind::Float, None, "droplet radius"),
            p("shape-file", Kind::Str, None, "shape description file"),
            OUTPUT,
            $($extra),*
        ]
    };
}

pub const COMMANDS: &[Command] = &[
    Command {
        name: "energy",
        about: "sharp-interface energy of a shape",
        params: shape_params![
            p("gamma", Kind::Float, Some("0"), "nonlocal coefficient"),
            p("grid", Kind::Int, Some("512"), "samples per axis"),
        ],
        run: energy,
    },
    Command {
        name: "stability-scan",
        about: "minimal second-variation eigenvalue of lamellae over a gamma range",
        params: &[
            p("k", Kind::IntList, Some("1"), "strip counts"),
            p("m", Kind::FloatList, Some("0"), "volume parameters"),
            p("gamma-min", Kind::Float, Some("0"), "first gamma"),
            p("gamma-max", Kind::Float, Some("200"), "last gamma"),
            p("gamma-steps", Kind::Int, Some("21"), "number of gamma values"),
            p("dim", Kind::Int, Some("2"), "ambient dimension"),
            p(
                "q-max",
                Kind::Int,
                Some("1"),
                "initial lateral cutoff (enlarged as needed)",
            ),
            p(
                "spectra",
                Kind::Str,
                None,
                "also write q,eig1..eig2k for the first k, m at gamma-max",
            ),
            p("spectra-q-max", Kind::Int, Some("20"), "largest q in the spectra table"),
            OUTPUT,
        ],
        run: stability_scan,
    },
    Command {
        name: "threshold",
        about: "stability threshold in gamma (kind = gamma) or in k (kind = k)",
        params: &[
            p("kind", Kind::Str, Some("gamma"), "gamma or k"),
            p("m", Kind::Float, Some("0"), "volume parameter"),
            p("k", Kind::IntList, Some("1"), "strip counts (kind = gamma)"),
            p(
                "gamma",
                Kind::FloatList,
                Some("200"),
                "nonlocal coefficients (kind = k)",
            ),
            p("dim", Kind::Int, Some("2"), "ambient dimension"),
            p(
                "k-max",
                Kind::Int,
                Some("200"),
                "largest strip count scanned (kind = k)",
            ),
            p(
                "constants",
                Kind::Str,
                None,
                "write located thresholds to this TOML file",
            ),
            OUTPUT,
        ],
        run: threshold,
    },
    Command {
        name: "perturb-test",
        about: "(J(F) - J(E)) / alpha(E,F)^2 over random perturbations of a lamella",
        params: &[
            p("k", Kind::Int, Some("1"), "strip count"),
            p("m", Kind::Float, Some("0"), "volume parameter"),
            p("gamma", Kind::Float, Some("50"), "nonlocal coefficient"),
            p("count", Kind::Int, Some("100"), "number of perturbations"),
            p(
                "amplitude",
                Kind::Float,
                Some("0.2"),
                "largest height as a fraction of the interface gap",
            ),
            p("seed", Kind::Int, Some("1"), "random seed"),
            p("grid", Kind::Int, Some("128"), "samples per axis"),
            OUTPUT,
        ],
        run: perturb_test,
    },
    Command {
        name: "fd-check",
        about: "second differences of J against the quadratic form",
        params: &[
            p("k", Kind::Int, Some("1"), "strip count"),
            p("m", Kind::Float, Some("0"), "volume parameter"),
            p("gamma", Kind::Float, Some("1"), "nonlocal coefficient"),
            p("direction", Kind::Str, Some("cos"), "cos, translation or critical"),
            p("q", Kind::Int, Some("1"), "lateral frequency of the cos direction"),
            p(
                "interface",
                Kind::Int,
                Some("0"),
                "interface carrying the cos direction",
            ),
            p("t", Kind::FloatList, Some("0.01,0.005"), "step sizes"),
            p("grid", Kind::Int, Some("256"), "samples per axis"),
            OUTPUT,
        ],
        run: fd_check,
    },
    Command {
        name: "flow",
        about: "mass-conserving gradient flow of the diffuse energy",
        params: shape_params![
            p("epsilon", Kind::Float, Some("0.04"), "interface width"),
            p("gamma0", Kind::Float, Some("0"), "diffuse nonlocal coefficient"),
            p("grid", Kind::Int, Some("128"), "samples per axis"),
            p("dt", Kind::Float, Some("0.02"), "time step"),
            p("max-steps", Kind::Int, Some("2000"), "step budget"),
            p("max-time", Kind::Float, None, "time budget"),
            p("stop-tol", Kind::Float, Some("1e-6"), "residual for convergence"),
            p(
                "noise",
                Kind::Float,
                Some("0"),
                "uniform noise amplitude added to the initial profile"
            ),
            p("seed", Kind::Int, Some("1"), "noise seed"),
            p(
                "seed-amplitude",
                Kind::Float,
                Some("0"),
                "displace a 2D lamella along its critical mode"
            ),
            p("checkpoint", Kind::Str, None, "write the final state here"),
            p("resume", Kind::Str, None, "start from this checkpoint"),
        ],
        run: flow,
    },
    Command {
        name: "iso-compare",
        about: "perimeters of the classical candidates at volume (1+m)/2",
        params: &[
            p("m", Kind::Float, Some("0"), "volume parameter"),
            p("dim", Kind::Int, Some("2"), "ambient dimension"),
            OUTPUT,
        ],
        run: iso_compare,
    },
    Command {
        name: "criticality",
        about: "Euler-Lagrange residual H + 4 gamma v - lambda on the boundary",
        params: shape_params![
            p("gamma", Kind::Float, Some("0"), "nonlocal coefficient"),
            p("grid", Kind::Int, Some("256"), "samples per axis"),
            p("n-points", Kind::Int, Some("256"), "boundary nodes per component"),
        ],
        run: criticality,
    },
    Command {
        name: "alpha",
        about: "asymmetry index between two shapes on a grid",
        params: &[
            p("a", Kind::Str, None, "first shape file"),
            p("b", Kind::Str, None, "second shape file"),
            p("grid", Kind::Int, Some("128"), "samples per axis"),
            OUTPUT,
        ],
        run: alpha,
    },
];

fn shape_from(cfg: &RunConfig) -> Result<ShapeConfig, CliError> {
    let dim = cfg.usize("dim")?;
    match cfg.str("shape")? {
        "lamella" => {
            let axis = cfg.opt_usize("axis")?.unwrap_or(dim.saturating_sub(1));
            Ok(ShapeConfig::lamella(cfg.usize("k")?, cfg.f64("m")?, axis, dim)?)
        }
        "droplet" => {
            let center = if cfg.has("center") {
                cfg.f64_list("center")?
            } else {
                vec![0.5; dim]
            };
            let radius = cfg.f64("radius")?;
            Ok(ShapeConfig::droplet(&center, radius)?)
        }
        "file" => {
            let path = cfg.str("shape-file")?;
            Ok(read_shape(Path::new(path))?)
        }
        other => Err(CliError::Usage(format!("unknown shape `{other}`"))),
    }
}

fn grid_for(dim: usize, n: usize) -> Result<TorusGrid, CliError> {
    Ok(TorusGrid::new(&vec![n; dim])?)
}

fn shape_k(shape: &ShapeConfig) -> usize {
    match shape {
        ShapeConfig::Lamella(l) => l.k,
        ShapeConfig::Graph(g) => g.base.k,
        ShapeConfig::Droplets { .. } => 0,
    }
}

fn lamella2d(cfg: &RunConfig) -> Result<Lamella, CliError> {
    match ShapeConfig::lamella(cfg.usize("k")?, cfg.f64("m")?, 1, 2)? {
        ShapeConfig::Lamella(l) => Ok(l),
        _ => unreachable!(),
    }
}

fn energy(cfg: &RunConfig) -> Result<Output, CliError> {
    let shape = shape_from(cfg)?;
    let gamma = cfg.f64("gamma")?;
    let grid = grid_for(shape.dim(), cfg.usize("grid")?)?;
    let e = energy_of_shape(&shape, gamma, &grid)?;
    let mut csv = Vec::new();
    write_energy_table(&[(shape.mass(), shape_k(&shape), e)], &mut csv)?;
    let summary = format!(
        "total {:.12} (perimeter {:.12}, nonlocal {:.6e})",
        e.total, e.perimeter, e.nonlocal
    );
    Ok(Output::ok(csv, summary))
}

fn gamma_range(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let (lo, hi, n) = (cfg.f64("gamma-min")?, cfg.f64("gamma-max")?, cfg.usize("gamma-steps")?);
    if n == 0 {
        return Err(CliError::Usage("--gamma-steps must be positive".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn stability_scan(cfg: &RunConfig) -> Result<Output, CliError> {
    let ks = cfg.usize_list("k")?;
    let ms = cfg.f64_list("m")?;
    let gammas = gamma_range(cfg)?;
    let dim = cfg.usize("dim")?;
    let q_max = cfg.usize("q-max")? as u32;
    let mut points = Vec::new();
    for &k in &ks {
        for &m in &ms {
            points.extend(gammas.iter().map(|&g| (k, m, g)));
        }
    }
    let reports = points
        .par_iter()
        .map(|&(k, m, g)| lamella_min_eigenvalue(k, m, g, q_max, dim))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Vec::new();
    writeln!(csv, "m,gamma,k,min_eigenvalue,h1_min,q,bloch,mode,stable")?;
    for r in &reports {
        writeln!(
            csv,
            "{:e},{:e},{},{:e},{:e},{:e},{},{},{}",
            r.m,
            r.gamma,
            r.k,
            r.min_eigenvalue,
            r.h1_min,
            r.q,
            r.bloch,
            r.mode,
            r.is_stable()
        )?;
    }
    if let Some(path) = cfg.opt_str("spectra")? {
        let (k, m) = (ks[0], ms[0]);
        let gamma = *gammas.last().expect("nonempty range");
        let qs: Vec<u32> = (0..=cfg.usize("spectra-q-max")? as u32).collect();
        let mut out = cfg.provenance().into_bytes();
        write_spectra(k, m, gamma, &qs, &mut out)?;
        std::fs::write(path, out)?;
    }
    let unstable = reports.iter().filter(|r| !r.is_stable()).count();
    Ok(Output::ok(
        csv,
        format!("{} points, {unstable} unstable", reports.len()),
    ))
}

fn threshold(cfg: &RunConfig) -> Result<Output, CliError> {
    let m = cfg.f64("m")?;
    let dim = cfg.usize("dim")?;
    let mut csv = Vec::new();
    let mut constants = RegressionConstants::new();
    let mut summary = Vec::new();
    match cfg.str("kind")? {
        "gamma" => {
            let ks = cfg.usize_list("k")?;
            let found = ks
                .par_iter()
                .map(|&k| stability_threshold_gamma(m, k, dim))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(
                csv,
                "m,k,dim,gamma_c,gamma_lo,gamma_hi,lambda_lo,lambda_hi,tolerance,note"
            )?;
            for t in &found {
                let (lo, hi) = t.bracket.map_or((String::new(), String::new()), |(a, b)| {
                    (format!("{a:e}"), format!("{b:e}"))
                });
                let (llo, lhi) = t.lambda_at_bracket.map_or((String::new(), String::new()), |(a, b)| {
                    (format!("{a:e}"), format!("{b:e}"))
                });
                let gc = t.gamma_c.map_or(String::new(), |g| format!("{g:e}"));
                writeln!(
                    csv,
                    "{:e},{},{},{gc},{lo},{hi},{llo},{lhi},{:e},{}",
                    t.m, t.k, t.dim, t.tolerance, t.note
                )?;
                constants.push_gamma(t);
                summary.push(match t.gamma_c {
                    Some(g) => format!("k={}: gamma_c = {g:.7}", t.k),
                    None => format!("k={}: {}", t.k, t.note),
                });
            }
        }
        "k" => {
            let gammas = cfg.f64_list("gamma")?;
            let k_max = cfg.usize("k-max")?;
            let found = gammas
                .par_iter()
                .map(|&g| stability_threshold_k_up_to(m, g, dim, k_max))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(csv, "m,gamma,dim,k0,k_max,min_eigenvalue_at_k0")?;
            for t in &found {
                let (k0, lam) = t.k0.map_or((String::new(), String::new()), |k| {
                    (k.to_string(), format!("{:e}", t.min_eigenvalues[k - 1]))
                });
                writeln!(csv, "{:e},{:e},{dim},{k0},{},{lam}", t.m, t.gamma, t.k_max)?;
                constants.push_k(t, dim);
                summary.push(match t.k0 {
                    Some(k) => format!("gamma={}: k0 = {k}", t.gamma),
                    None => format!("gamma={}: unstable at k_max = {}", t.gamma, t.k_max),
                });
            }
        }
        other => return Err(CliError::Usage(format!("--kind must be gamma or k, got `{other}`"))),
    }
    if let Some(path) = cfg.opt_str("constants")? {
        constants.save(Path::new(path))?;
    }
    Ok(Output::ok(csv, summary.join("\n")))
}

fn perturb_test(cfg: &RunConfig) -> Result<Output, CliError> {
    let base = lamella2d(cfg)?;
    let gamma = cfg.f64("gamma")?;
    let grid = grid_for(2, cfg.usize("grid")?)?;
    let report = quantitative_sampling(
        base,
        gamma,
        cfg.usize("count")?,
        cfg.f64("amplitude")?,
        cfg.u64("seed")?,
        &grid,
    )?;
    let mut csv = Vec::new();
    writeln!(csv, "sample,energy_gap,alpha,ratio")?;
    for (i, (d, a)) in report.pairs.iter().enumerate() {
        writeln!(csv, "{i},{d:e},{a:e},{:e}", d / (a * a))?;
    }
    let stab = lamella_min_eigenvalue(base.k, base.m, gamma, 1, 2)?;
    let mut summary = format!(
        "min eigenvalue {:.6}; min ratio {:.6e} over {} samples",
        stab.min_eigenvalue, report.min_ratio, report.samples
    );
    if !stab.is_stable() {
        // exhibit a descent direction along the critical mode
        let n = grid.size(0);
        let amp = 0.1 * base.gap();
        let psi = mode_direction(base, &stab, n)?
            .into_iter()
            .map(|r| r.into_iter().map(|v| amp * v).collect())
            .collect();
        let f = GraphPerturbation::new(base, psi)?.volume_corrected()?;
        let flat = GraphPerturbation::flat(base, n)?;
        let jf = energy_of_shape(&ShapeConfig::Graph(f.clone()), gamma, &grid)?.total;
        let je = energy_of_shape(&ShapeConfig::Graph(flat), gamma, &grid)?.total;
        let a = graph_alpha(&f, 4096);
        writeln!(csv, "critical,{:e},{a:e},{:e}", jf - je, (jf - je) / (a * a))?;
        summary.push_str(&format!("; critical mode gives J(F) - J(E) = {:.6e}", jf - je));
    }
    Ok(Output::ok(csv, summary))
}

fn fd_check(cfg: &RunConfig) -> Result<Output, CliError> {
    let base = lamella2d(cfg)?;
    let gamma = cfg.f64("gamma")?;
    let n = cfg.usize("grid")?;
    let grid = grid_for(2, n)?;
    let psi: Vec<Vec<f64>> = match cfg.str("direction")? {
        "cos" => {
            let q = cfg.usize("q")? as f64;
            let j = cfg.usize("interface")?;
            if j >= 2 * base.k {
                return Err(CliError::Usage(format!("--interface must be below {}", 2 * base.k)));
            }
            (0..2 * base.k)
                .map(|i| {
                    (0..n)
                        .map(|l| {
                            if i == j {
                                (2.0 * PI * q * l as f64 / n as f64).cos()
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        }
        "translation" => vec![vec![1.0; n]; 2 * base.k],
        "critical" => mode_direction(base, &lamella_min_eigenvalue(base.k, base.m, gamma, 1, 2)?, n)?,
        other => return Err(CliError::Usage(format!("unknown direction `{other}`"))),
    };
    let r = finite_difference_check(base, &psi, gamma, &cfg.f64_list("t")?, &grid)?;
    let mut csv = Vec::new();
    writeln!(csv, "t,second_difference,form_value,ratio")?;
    for (t, d) in r.t.iter().zip(&r.second_differences) {
        writeln!(csv, "{t:e},{d:e},{:e},{:e}", r.form_value, d / r.form_value)?;
    }
    writeln!(csv, "0e0,{:e},{:e},{:e}", r.extrapolated, r.form_value, r.ratio)?;
    let summary = format!(
        "extrapolated {:.8e}, form {:.8e}, ratio {:.6}",
        r.extrapolated, r.form_value, r.ratio
    );
    Ok(Output::ok(csv, summary))
}

fn flow(cfg: &RunConfig) -> Result<Output, CliError> {
    let epsilon = cfg.f64("epsilon")?;
    let gamma0 = cfg.f64("gamma0")?;
    let opts = FlowOptions {
        dt: cfg.f64("dt")?,
        max_steps: cfg.usize("max-steps")?,
        stop_tol: cfg.f64("stop-tol")?,
        max_time: cfg.opt_f64("max-time")?,
    };
    let shape = shape_from(cfg)?;
    let state = if let Some(path) = cfg.opt_str("resume")? {
        load_checkpoint(Path::new(path))?
    } else {
        let grid = grid_for(shape.dim(), cfg.usize("grid")?)?;
        let seed_amp = cfg.f64("seed-amplitude")?;
        let u0 = match &shape {
            ShapeConfig::Lamella(l) if seed_amp > 0.0 && l.dim == 2 => {
                let report = lamella_min_eigenvalue(l.k, l.m, gamma_from_gamma0(gamma0), 1, 2)?;
                seeded_lamella(*l, &report, seed_amp, &grid, epsilon)?
            }
            _ => tanh_profile(&shape, &grid, epsilon)?,
        };
        let noise = cfg.f64("noise")?;
        let u0 = if noise > 0.0 {
            add_noise(&u0, noise, cfg.u64("seed")?)
        } else {
            u0
        };
        FlowState::new(u0, epsilon, gamma0)?
    };
    let e0 = state.energy().total;
    let state = continue_flow(state, &opts)?;
    if let Some(path) = cfg.opt_str("checkpoint")? {
        save_checkpoint(&state, Path::new(path))?;
    }
    let mut csv = Vec::new();
    write_history(&state.history, &mut csv)?;
    let mut summary = format!(
        "steps {} t {:.4} energy {:.10e} (initial {:.10e}) residual {:.3e} mean {:.3e}",
        state.steps,
        state.time,
        state.energy().total,
        e0,
        state.residual(),
        state.mean()
    );
    if let ShapeConfig::Lamella(l) = &shape {
        if l.dim == state.u.grid().dim() {
            let v = classify_flow(*l, e0, &state)?;
            summary.push_str(&format!("\nthresholded alpha {} cells: {:?}", v.alpha_cells, v.outcome));
        }
    }
    let failure = (!state.converged).then(|| {
        format!(
            "flow did not converge: residual {:.3e} after {} steps",
            state.residual(),
            state.steps
        )
    });
    Ok(Output { csv, summary, failure })
}

fn iso_compare(cfg: &RunConfig) -> Result<Output, CliError> {
    let dim = cfg.usize("dim")?;
    let cands = isoperimetric_compare(cfg.f64("m")?, dim)?;
    let mut csv = Vec::new();
    writeln!(csv, "candidate,radius,perimeter,valid,minimal")?;
    for c in &cands {
        let r = c.radius.map_or(String::new(), |r| format!("{r:e}"));
        writeln!(csv, "{},{r},{:e},{},{}", c.name, c.perimeter, c.valid, c.minimal)?;
    }
    let best = cands.iter().find(|c| c.minimal).map_or("none", |c| c.name);
    let mut summary = format!("least perimeter: {best}");
    if dim == 2 {
        summary.push_str(&format!(
            "; strip/disc crossing at |m| = {:.9}",
            strip_disc_crossing(1e-12)
        ));
    }
    Ok(Output::ok(csv, summary))
}

fn criticality(cfg: &RunConfig) -> Result<Output, CliError> {
    let shape = shape_from(cfg)?;
    let gamma = cfg.f64("gamma")?;
    let grid = grid_for(shape.dim(), cfg.usize("grid")?)?;
    let mesh = boundary_mesh(&shape, cfg.usize("n-points")?)?;
    let r = el_residual(&shape, &mesh, gamma, &grid)?;
    let label = grid_label(grid.sizes());
    let notes = r.warnings.join("; ");
    let rows = [
        Measurement::new("lambda", r.lambda, &label, ""),
        Measurement::new("residual_sup", r.residual_sup, &label, &notes),
    ];
    let mut csv = Vec::new();
    write_measurements(&rows, &mut csv)?;
    let mut summary = format!("lambda {:.10e}, sup residual {:.3e}", r.lambda, r.residual_sup);
    for w in &r.warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    Ok(Output::ok(csv, summary))
}

fn alpha(cfg: &RunConfig) -> Result<Output, CliError> {
    let a = read_shape(Path::new(cfg.str("a")?))?;
    let b = read_shape(Path::new(cfg.str("b")?))?;
    if a.dim() != b.dim() {
        return Err(CliError::Usage("shapes have different dimensions".into()));
    }
    let grid = grid_for(a.dim(), cfg.usize("grid")?)?;
    let r = alpha_distance(&rasterize(&a, &grid)?, &rasterize(&b, &grid)?)?;
    let label = grid_label(grid.sizes());
    let shift = r.shift.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
    let rows = [
        Measurement::new("alpha", r.value, &label, &format!("shift {shift}")),
        Measurement::new("alpha_cells", r.cells as f64, &label, ""),
    ];
    let mut csv = Vec::new();
    write_measurements(&rows, &mut csv)?;
    Ok(Output::ok(
        csv,
        format!("alpha {:e} ({} cells, shift {shift})", r.value, r.cells),
    ))
}
