//! Strang-split spectral propagation on a periodic grid.
//!
//! One step of size `du` is: half potential phase, exact kinetic phase
//! `e^{−i q² du}` in Fourier space, half potential phase. Time-dependent
//! potentials are evaluated at the midpoint of each half substep.

use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::analytic::{soliton_field, soliton_parameters};
use super::grid::{Grid, WaveField};
use crate::analysis::{density_moments, fidelity, EvolutionReport, EDGE_WIDTH};
use crate::error::{Error, Result};
use crate::profile::CurvatureProfile;

/// Edge modulus that triggers the boundary-leak warning.
pub const LEAK_WARNING_AMPLITUDE: f64 = 1e-6;

pub const DEFAULT_GRID_N: usize = 1024;
pub const DEFAULT_DOMAIN: (f64, f64) = (-40.0, 40.0);
pub const DEFAULT_DU: f64 = 1e-3;
pub const DEFAULT_RECORD_EVERY: usize = 100;

/// Time stepping and recording cadence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub du: f64,
    pub n_steps: usize,
    /// Record every this many steps; `0` records only the start and the end.
    pub record_every: usize,
}

impl StepControl {
    pub fn new(du: f64, n_steps: usize, record_every: usize) -> Self {
        StepControl {
            du,
            n_steps,
            record_every,
        }
    }

    /// Steps of size `du` that reach `u_final` (rounded to the nearest step).
    pub fn to_time(u_final: f64, du: f64, record_every: usize) -> Self {
        let n_steps = (u_final / du).round().max(0.0) as usize;
        StepControl {
            du,
            n_steps,
            record_every,
        }
    }

    pub fn final_time(&self) -> f64 {
        self.n_steps as f64 * self.du
    }

    fn validate(&self) -> Result<()> {
        if !(self.du.is_finite() && self.du > 0.0) {
            return Err(Error::NonPositiveStep(self.du));
        }
        Ok(())
    }

    fn records_at(&self, step: usize) -> bool {
        step == 0
            || step == self.n_steps
            || (self.record_every > 0 && step.is_multiple_of(self.record_every))
    }
}

/// Pointwise closed form `ψ(s1, u)` compared against at every record.
pub type Oracle<'a> = &'a (dyn Fn(f64, f64) -> Complex64 + Sync);

struct SplitStep {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kinetic: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SplitStep {
    fn new(grid: Grid, du: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let scale = 1.0 / grid.n() as f64;
        let kinetic = grid
            .wavenumbers()
            .into_iter()
            .map(|q| Complex64::from_polar(scale, -q * q * du))
            .collect();
        let scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len()];
        SplitStep {
            forward,
            inverse,
            kinetic,
            scratch,
        }
    }

    fn kinetic_step(&mut self, psi: &mut [Complex64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (z, k) in psi.iter_mut().zip(&self.kinetic) {
            *z *= k;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }
}

/// Records observables; reports a leak once.
struct Recorder<'a> {
    report: EvolutionReport,
    oracle: Option<Oracle<'a>>,
    warned: bool,
}

impl<'a> Recorder<'a> {
    fn new(oracle: Option<Oracle<'a>>) -> Self {
        Recorder {
            report: EvolutionReport {
                fidelities: oracle.map(|_| Vec::new()),
                ..Default::default()
            },
            oracle,
            warned: false,
        }
    }

    fn record(&mut self, psi: &WaveField, u: f64) -> Result<()> {
        let (norm, center, var) = density_moments(psi);
        let r = &mut self.report;
        r.times.push(u);
        r.norms.push(norm);
        r.centers.push(center);
        r.widths.push(var.max(0.0).sqrt());
        if let (Some(oracle), Some(f)) = (self.oracle, r.fidelities.as_mut()) {
            let reference = WaveField::from_fn(psi.grid, |s| oracle(s, u));
            f.push(fidelity(psi, &reference)?);
        }
        let edge = psi.edge_abs(EDGE_WIDTH);
        r.max_edge_amplitude = r.max_edge_amplitude.max(edge);
        if edge > LEAK_WARNING_AMPLITUDE && !self.warned {
            warn!("wavefunction reaches the domain edge at u = {u}: |psi| = {edge:e}");
            self.warned = true;
        }
        Ok(())
    }
}

/// Called with `(u, ψ)` at every recorded time.
pub type Observer<'a> = &'a mut dyn FnMut(f64, &WaveField);

fn evolve<'a>(
    psi0: &WaveField,
    control: &StepControl,
    oracle: Option<Oracle<'a>>,
    mut observer: Option<Observer<'_>>,
    mut potential_half_step: impl FnMut(&mut [Complex64], f64, f64),
) -> Result<(WaveField, EvolutionReport)> {
    control.validate()?;
    let grid = psi0.grid;
    let mut ss = SplitStep::new(grid, control.du);
    let mut psi = psi0.clone();
    let mut rec = Recorder::new(oracle);
    rec.record(&psi, 0.0)?;
    if let Some(obs) = observer.as_mut() {
        obs(0.0, &psi);
    }
    let du = control.du;
    for step in 1..=control.n_steps {
        let u = (step - 1) as f64 * du;
        potential_half_step(&mut psi.values, u + 0.25 * du, 0.5 * du);
        ss.kinetic_step(&mut psi.values);
        potential_half_step(&mut psi.values, u + 0.75 * du, 0.5 * du);
        if control.records_at(step) {
            let u = step as f64 * du;
            rec.record(&psi, u)?;
            if let Some(obs) = observer.as_mut() {
                obs(u, &psi);
            }
        }
    }
    Ok((psi, rec.report))
}

/// Evolves `i ψ_u + ψ_{s1 s1} + (k²/2) ψ = 0` with `k` from `profile`.
pub fn evolve_linear(
    psi0: &WaveField,
    profile: &CurvatureProfile,
    control: &StepControl,
    oracle: Option<Oracle<'_>>,
) -> Result<(WaveField, EvolutionReport)> {
    evolve_linear_observed(psi0, profile, control, oracle, None)
}

/// [`evolve_linear`] that also hands every recorded field to `observer`.
pub fn evolve_linear_observed(
    psi0: &WaveField,
    profile: &CurvatureProfile,
    control: &StepControl,
    oracle: Option<Oracle<'_>>,
    observer: Option<Observer<'_>>,
) -> Result<(WaveField, EvolutionReport)> {
    let grid = psi0.grid;
    let points: Vec<f64> = grid.points().collect();
    let half = 0.5 * control.du;
    if profile.is_time_dependent() {
        evolve(psi0, control, oracle, observer, |psi, u, h| {
            for (z, &s) in psi.iter_mut().zip(&points) {
                let k = profile.eval(s, u);
                *z *= Complex64::from_polar(1.0, 0.5 * k * k * h);
            }
        })
    } else {
        let phase: Vec<Complex64> = points
            .iter()
            .map(|&s| {
                let k = profile.eval(s, 0.0);
                Complex64::from_polar(1.0, 0.5 * k * k * half)
            })
            .collect();
        evolve(psi0, control, oracle, observer, |psi, _, _| {
            for (z, p) in psi.iter_mut().zip(&phase) {
                *z *= p;
            }
        })
    }
}

/// Evolves the cubic equation `i ψ_u + ψ_{s1 s1} + (|ψ|²/2) ψ = 0`.
///
/// The nonlinear substep is the exact phase rotation `e^{i |ψ|² h / 2}`,
/// since `|ψ|` is invariant under it.
pub fn evolve_cnlse(
    psi0: &WaveField,
    control: &StepControl,
    oracle: Option<Oracle<'_>>,
) -> Result<(WaveField, EvolutionReport)> {
    evolve_cnlse_observed(psi0, control, oracle, None)
}

/// [`evolve_cnlse`] that also hands every recorded field to `observer`.
pub fn evolve_cnlse_observed(
    psi0: &WaveField,
    control: &StepControl,
    oracle: Option<Oracle<'_>>,
    observer: Option<Observer<'_>>,
) -> Result<(WaveField, EvolutionReport)> {
    evolve(psi0, control, oracle, observer, |psi, _, h| {
        for z in psi.iter_mut() {
            *z *= Complex64::from_polar(1.0, 0.5 * z.norm_sqr() * h);
        }
    })
}

/// Both runs of a linear-vs-cubic comparison and their terminal fidelity.
#[derive(Debug, Clone)]
pub struct EquivalenceOutcome {
    pub fidelity: f64,
    pub linear: (WaveField, EvolutionReport),
    pub cnlse: (WaveField, EvolutionReport),
}

/// Starts the soliton `(alpha, v)` under both the cubic equation and the
/// linear equation driven by the traveling curvature `k(s1 − potential_v u)`.
pub fn equivalence_run(
    alpha: f64,
    v: f64,
    potential_v: f64,
    grid: &Grid,
    control: &StepControl,
) -> Result<EquivalenceOutcome> {
    let p = soliton_parameters(alpha, v)?;
    let profile = CurvatureProfile::kovalevskaya(alpha, potential_v)?;
    let psi0 = soliton_field(&p, *grid, 0.0);
    let (linear, cnlse) = rayon::join(
        || evolve_linear(&psi0, &profile, control, None),
        || evolve_cnlse(&psi0, control, None),
    );
    let (linear, cnlse) = (linear?, cnlse?);
    let fidelity = fidelity(&linear.0, &cnlse.0)?;
    Ok(EquivalenceOutcome {
        fidelity,
        linear,
        cnlse,
    })
}

/// Terminal fidelity between the cubic run and the linear run in the
/// matching traveling potential, both started from the `(alpha, v)` soliton.
pub fn cnlse_linear_equivalence(
    alpha: f64,
    v: f64,
    u_final: f64,
    grid: &Grid,
    du: f64,
) -> Result<f64> {
    let control = StepControl::to_time(u_final, du, 0);
    Ok(equivalence_run(alpha, v, v, grid, &control)?.fidelity)
}
