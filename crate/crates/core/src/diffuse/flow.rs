//! Mass-conserving L² gradient flow of `E_ε`, semi-implicit in Fourier space.

use std::io::Write;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_params, check_resolution, energy_from_spectrum, DiffuseEnergy};
use crate::error::{Error, Result};
use crate::fft;
use crate::field::snapshot::{load_snapshot, save_snapshot};
use crate::field::spectral::wave_numbers_sq;
use crate::field::ScalarField;
use crate::tolerances::FLOW_ENERGY_SLACK;

/// Steps between refreshes of the stabilization constant.
const STABILIZATION_REFRESH: usize = 100;
/// Consecutive halvings before a step is declared failed.
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    /// `‖δE/δu - mean‖∞` after the step.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub dt: f64,
    pub max_steps: usize,
    pub stop_tol: f64,
    /// Optional cap on the model time.
    pub max_time: Option<f64>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            max_steps: 10_000,
            stop_tol: 1e-6,
            max_time: None,
        }
    }
}

/// Spectral data of the current iterate, reused by the next step.
#[derive(Debug, Clone)]
struct Analysis {
    spec: Vec<Complex64>,
    well_spec: Vec<Complex64>,
    energy: DiffuseEnergy,
    residual: f64,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub u: ScalarField,
    pub epsilon: f64,
    pub gamma0: f64,
    pub time: f64,
    pub steps: usize,
    /// Last accepted step size.
    pub dt: f64,
    pub stabilization: f64,
    pub history: Vec<HistoryEntry>,
    pub converged: bool,
    pub rejected: usize,
    k2: Vec<f64>,
    analysis: Analysis,
}

/// `(4/ε)u(u²-1)`, the derivative of the well term.
fn well_derivative(u: &[f64], epsilon: f64) -> Vec<f64> {
    u.iter().map(|v| 4.0 / epsilon * v * (v * v - 1.0)).collect()
}

fn stabilization_for(u: &[f64], epsilon: f64) -> f64 {
    // 2 max|W''| / ε with W'' = 12u² - 4
    let w2 = u.iter().map(|v| (12.0 * v * v - 4.0).abs()).fold(0.0, f64::max);
    2.0 * w2 / epsilon
}

fn analyze(u: &[f64], sizes: &[usize], k2: &[f64], epsilon: f64, gamma0: f64) -> Analysis {
    let spec = fft::forward_real(u, sizes);
    let well_spec = fft::forward_real(&well_derivative(u, epsilon), sizes);
    let energy = energy_from_spectrum(u, &spec, k2, epsilon, gamma0);
    // δE/δu = -2εΔu + W'(u)/ε + 2γ₀v, mean removed by dropping the zero bin
    let mut mu: Vec<Complex64> = spec
        .iter()
        .zip(&well_spec)
        .zip(k2)
        .map(|((c, w), &k)| {
            if k > 0.0 {
                c * (2.0 * epsilon * k + 2.0 * gamma0 / k) + w
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    mu[0] = Complex64::new(0.0, 0.0);
    let residual = fft::inverse_real(mu, sizes)
        .iter()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    Analysis {
        spec,
        well_spec,
        energy,
        residual,
    }
}

impl FlowState {
    pub fn new(u: ScalarField, epsilon: f64, gamma0: f64) -> Result<Self> {
        check_params(epsilon, gamma0)?;
        check_resolution(u.grid(), epsilon)?;
        u.ensure_finite()?;
        let grid = u.grid().clone();
        let k2 = wave_numbers_sq(grid.sizes(), &vec![1.0; grid.dim()]);
        let analysis = analyze(u.values(), grid.sizes(), &k2, epsilon, gamma0);
        let stabilization = stabilization_for(u.values(), epsilon);
        let history = vec![HistoryEntry {
            step: 0,
            t: 0.0,
            energy: analysis.energy.total,
            residual: analysis.residual,
        }];
        Ok(Self {
            u,
            epsilon,
            gamma0,
            time: 0.0,
            steps: 0,
            dt: 0.0,
            stabilization,
            history,
            converged: false,
            rejected: 0,
            k2,
            analysis,
        })
    }

    pub fn energy(&self) -> DiffuseEnergy {
        self.analysis.energy
    }

    pub fn residual(&self) -> f64 {
        self.analysis.residual
    }

    pub fn mean(&self) -> f64 {
        self.u.mean()
    }

    /// Turns an unconverged run into an error carrying the diagnostics.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            return Ok(self);
        }
        Err(Error::NonConvergence(format!(
            "residual {:.3e} after {} steps (t = {:.4e}, energy = {:.10e}, {} rejected steps)",
            self.residual(),
            self.steps,
            self.time,
            self.energy().total,
            self.rejected
        )))
    }

    fn candidate(&self, dt: f64) -> Vec<f64> {
        let (eps, g0, s) = (self.epsilon, self.gamma0, self.stabilization);
        let a = &self.analysis;
        let spec: Vec<Complex64> = a
            .spec
            .iter()
            .zip(&a.well_spec)
            .zip(&self.k2)
            .map(|((c, w), &k)| {
                if k == 0.0 {
                    return *c;
                }
                let implicit = 1.0 + dt * (2.0 * eps * k + s + 2.0 * g0 / k);
                (c * (1.0 + dt * s) - w * dt) / implicit
            })
            .collect();
        let mut spec = spec;
        // the zero bin is carried over unchanged: mass is exact
        spec[0] = a.spec[0];
        fft::inverse_real(spec, self.u.grid().sizes())
    }
}

/// One accepted step of size at most `dt`; the step is halved while the
/// energy would increase by more than the relative slack.
pub fn flow_step(state: &FlowState, dt: f64) -> Result<FlowState> {
    let mut next = state.clone();
    advance(&mut next, dt)?;
    Ok(next)
}

fn advance(state: &mut FlowState, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let e_old = state.analysis.energy.total;
    let mut h = dt;
    let mut rejected = 0;
    loop {
        let u = state.candidate(h);
        let a = analyze(&u, state.u.grid().sizes(), &state.k2, state.epsilon, state.gamma0);
        let ok = a.energy.total.is_finite()
            && a.energy.total <= e_old + FLOW_ENERGY_SLACK * e_old.abs().max(f64::MIN_POSITIVE);
        if ok {
            state.steps += 1;
            state.time += h;
            state.dt = h;
            state.rejected += rejected;
            state.u = ScalarField::new(state.u.grid().clone(), u)?;
            if state.steps.is_multiple_of(STABILIZATION_REFRESH) {
                state.stabilization = stabilization_for(state.u.values(), state.epsilon);
            }
            state.history.push(HistoryEntry {
                step: state.steps,
                t: state.time,
                energy: a.energy.total,
                residual: a.residual,
            });
            state.analysis = a;
            return Ok(());
        }
        rejected += 1;
        if rejected > MAX_HALVINGS {
            return Err(Error::NonConvergence(format!(
                "energy increase persists at dt = {h:e} (step {}, energy {e_old:e})",
                state.steps
            )));
        }
        h *= 0.5;
    }
}

/// Iterates [`flow_step`] until the residual drops below `stop_tol`, the step
/// budget or the time cap is exhausted. `converged` records which.
pub fn run_flow(u0: ScalarField, epsilon: f64, gamma0: f64, opts: &FlowOptions) -> Result<FlowState> {
    let state = FlowState::new(u0, epsilon, gamma0)?;
    continue_flow(state, opts)
}

/// Resumes a flow from an existing state.
pub fn continue_flow(mut state: FlowState, opts: &FlowOptions) -> Result<FlowState> {
    if !(opts.stop_tol > 0.0) {
        return Err(Error::InvalidParameter("stop_tol must be positive".into()));
    }
    let mut dt = opts.dt;
    let start = state.steps;
    while state.residual() > opts.stop_tol {
        if state.steps - start >= opts.max_steps || opts.max_time.is_some_and(|t| state.time >= t) {
            state.converged = false;
            return Ok(state);
        }
        advance(&mut state, dt)?;
        // recover from halvings gradually
        dt = (1.5 * state.dt).min(opts.dt);
    }
    state.converged = true;
    Ok(state)
}

pub fn write_history<W: Write>(history: &[HistoryEntry], mut out: W) -> Result<()> {
    writeln!(out, "step,t,energy,residual")?;
    for h in history {
        writeln!(out, "{},{:e},{:e},{:e}", h.step, h.t, h.energy, h.residual)?;
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the field snapshot to `path` and `epsilon`, `gamma0`, `t`, `step`,
/// `energy` as `key = value` lines to `path.meta`.
pub fn save_checkpoint(state: &FlowState, path: &Path) -> Result<()> {
    save_snapshot(&state.u, path)?;
    let meta = format!(
        "epsilon = {:e}\ngamma0 = {:e}\nt = {:e}\nstep = {}\nenergy = {:e}\n",
        state.epsilon,
        state.gamma0,
        state.time,
        state.steps,
        state.energy().total
    );
    std::fs::write(sidecar(path), meta)?;
    Ok(())
}

/// Restores a checkpoint. The history restarts at the saved step.
pub fn load_checkpoint(path: &Path) -> Result<FlowState> {
    let u = load_snapshot(path)?;
    let text = std::fs::read_to_string(sidecar(path))?;
    let get = |key: &str| -> Result<String> {
        text.lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim().to_string())
            .ok_or_else(|| Error::Parse(format!("checkpoint sidecar lacks `{key}`")))
    };
    let num = |s: String| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
    let epsilon = num(get("epsilon")?)?;
    let gamma0 = num(get("gamma0")?)?;
    let time = num(get("t")?)?;
    let steps: usize = get("step")?.parse().map_err(|e| Error::Parse(format!("step: {e}")))?;
    let mut state = FlowState::new(u, epsilon, gamma0)?;
    state.time = time;
    state.steps = steps;
    state.history = vec![HistoryEntry {
        step: steps,
        t: time,
        energy: state.energy().total,
        residual: state.residual(),
    }];
    Ok(state)
}
