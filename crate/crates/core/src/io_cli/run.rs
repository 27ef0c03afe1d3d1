//! Dispatch of a [`RunConfig`] to the numerical modules and emission of its artifacts.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{InitialState, Mode, RunConfig, SweepParam};
use super::output::{write_frame_path, write_json, write_residuals, write_snapshots};
use crate::analysis::{envelope_velocity, EvolutionReport, LEAK_RATIO};
use crate::error::{Error, Result};
use crate::kirchhoff_static::{
    curvature_ode_residual, sample_static_configuration, solve_case_phi, static_system_residual,
    MaterialCase, ResidualSummary, RodParams, SechSolution,
};
use crate::profile::CurvatureProfile;
use crate::quantum_transport::{
    analytic_envelope_soliton, carrier_velocity, equivalence_run, evolve_cnlse_observed,
    evolve_linear_observed, gauge_factor, soliton_parameters, GaugeDirection, Grid, StepControl,
    WaveField,
};
use crate::rod_geometry::{
    curvature_from_curve, end_tangent_deviation, min_self_distance, reconstruct_curve,
    torsion_from_curve, Frame, FramePath, Vec3,
};

/// Torsion is compared against `tau0` only where the curvature exceeds this.
pub const TORSION_CHECK_FLOOR: f64 = 1e-2;
/// Arclength over which end tangents must stay fixed.
pub const TANGENT_TAIL: f64 = 5.0;
/// Polyline resolution of the self-intersection scan.
pub const SELF_INTERSECTION_RESOLUTION: f64 = 0.1;
/// Arclength separation beyond which a close approach counts as the loop
/// folding back on itself rather than neighbouring segments.
pub const LOOP_GAP: f64 = 2.0;

#[derive(Debug, Clone, Serialize)]
pub struct NumericDefault {
    pub name: &'static str,
    pub value: Value,
    pub meaning: &'static str,
}

/// Every default and tolerance that can affect a run.
pub fn numeric_defaults() -> Vec<NumericDefault> {
    use super::config::*;
    use crate::quantum_transport::solver::*;
    use crate::rod_geometry::*;
    let d = |name, value: Value, meaning| NumericDefault {
        name,
        value,
        meaning,
    };
    vec![
        d("alpha", json!(DEFAULT_ALPHA), "C2 - tau0^2 when neither alpha nor C2 is given"),
        d("tau0", json!(DEFAULT_TAU0), "constant torsion"),
        d("phi", json!(std::f64::consts::PI), "strip angle (multiple of pi/2)"),
        d("sigma", json!(DEFAULT_SIGMA), "Poisson ratio for static-check material parameters"),
        d("step", json!(DEFAULT_STEP), "arclength step of reconstructions and residuals"),
        d("s1_range_spatial", json!([DEFAULT_RANGE.0, DEFAULT_RANGE.1]), "reconstruct/static-check interval"),
        d("s1_range_quantum", json!([DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1]), "periodic domain of the solvers"),
        d("n", json!(DEFAULT_GRID_N), "solver grid points"),
        d("du", json!(DEFAULT_DU), "solver time step"),
        d("n_steps", json!(DEFAULT_EVOLVE_STEPS), "solver steps when neither n_steps nor u_final is given"),
        d("record_every", json!(DEFAULT_RECORD_EVERY), "steps between recorded observables"),
        d("gaussian_width", json!(DEFAULT_GAUSSIAN_WIDTH), "width of the Gaussian initial state"),
        d("torsion_curvature_floor", json!(TORSION_CURVATURE_FLOOR), "torsion masked where k <= floor"),
        d("torsion_check_floor", json!(TORSION_CHECK_FLOOR), "torsion compared with tau0 where k > floor"),
        d("frame_tolerance", json!(FRAME_TOLERANCE), "orthonormality tolerance of input frames"),
        d("tangent_tail", json!(TANGENT_TAIL), "arclength window of the end-tangent check"),
        d("self_intersection_resolution", json!(SELF_INTERSECTION_RESOLUTION), "polyline spacing of the self-distance scan"),
        d("loop_gap", json!(LOOP_GAP), "arclength gap of the loop closest-approach measure"),
        d("leak_warning_amplitude", json!(LEAK_WARNING_AMPLITUDE), "edge |psi| that triggers the leak warning"),
        d("leak_ratio", json!(LEAK_RATIO), "edge/peak ratio above which moments are refused"),
        d("alpha_consistency_tolerance", json!(ALPHA_CONSISTENCY_TOLERANCE), "allowed |C2 - tau0^2 - alpha|"),
        d("phi_tolerance", json!(crate::kirchhoff_static::PHI_TOLERANCE), "quarter-turn recognition tolerance"),
    ]
}

/// Plain-text rendering of [`numeric_defaults`].
pub fn defaults_table() -> String {
    let rows = numeric_defaults();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = format!("conformon {}\n\nnumeric defaults:\n", env!("CARGO_PKG_VERSION"));
    for r in rows {
        out.push_str(&format!(
            "  {:<width$}  {:<14}  {}\n",
            r.name,
            r.value.to_string(),
            r.meaning
        ));
    }
    out
}

/// What a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub summary: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructSummary {
    pub alpha: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub tau0: f64,
    pub phi: f64,
    pub samples: usize,
    pub curvature_roundtrip_max_error: f64,
    pub peak_curvature: f64,
    pub peak_curvature_s1: f64,
    pub torsion_max_deviation: f64,
    pub torsion_checked_samples: usize,
    pub end_tangent_deviation: [f64; 2],
    pub min_self_distance: f64,
    pub min_self_distance_s1: [f64; 2],
    pub loop_closest_approach: f64,
    pub loop_closest_approach_s1: [f64; 2],
    pub max_orthonormality_defect: f64,
    pub end_to_end_distance: f64,
}

/// Reconstructs the sech conformation and checks it against its own input.
pub fn reconstruct_with_summary(config: &RunConfig) -> Result<(FramePath, ReconstructSummary)> {
    let rod = &config.rod;
    let profile = if rod.alpha == 0.0 {
        CurvatureProfile::Zero
    } else {
        CurvatureProfile::sech(rod.alpha)?
    };
    let path = reconstruct_curve(
        &profile,
        rod.tau0,
        rod.phi,
        (config.grid.s1_min, config.grid.s1_max),
        config.step,
        &Frame::identity_at(Vec3::zeros()),
    )?;
    let summary = summarize_conformation(&path, &profile, rod.tau0)?;
    Ok((
        path,
        ReconstructSummary {
            alpha: rod.alpha,
            c2: rod.c2,
            phi: rod.phi,
            ..summary
        },
    ))
}

pub fn summarize_conformation(
    path: &FramePath,
    profile: &CurvatureProfile,
    tau0: f64,
) -> Result<ReconstructSummary> {
    let k = curvature_from_curve(path)?;
    let interior = &path.samples[1..path.len() - 1];
    let mut roundtrip = 0.0f64;
    let (mut peak, mut peak_s1) = (0.0f64, f64::NAN);
    for (ki, p) in k.iter().zip(interior) {
        roundtrip = roundtrip.max((ki - profile.eval(p.s1, 0.0)).abs());
        if *ki > peak {
            peak = *ki;
            peak_s1 = p.s1;
        }
    }
    let tors = torsion_from_curve(path)?;
    let mut tdev = 0.0f64;
    let mut checked = 0;
    for (j, t) in tors.iter().enumerate() {
        // torsion index j sits at sample j + 2, curvature index at sample j + 1
        if let Some(t) = t {
            if k[j + 1] > TORSION_CHECK_FLOOR {
                tdev = tdev.max((t - tau0).abs());
                checked += 1;
            }
        }
    }
    let (t0, t1) = end_tangent_deviation(path, TANGENT_TAIL)?;
    let approach = min_self_distance(path, SELF_INTERSECTION_RESOLUTION, 0.0)?;
    let fold = min_self_distance(path, SELF_INTERSECTION_RESOLUTION, LOOP_GAP)?;
    let first = path.samples[0].frame.position;
    let last = path.samples[path.len() - 1].frame.position;
    Ok(ReconstructSummary {
        alpha: f64::NAN,
        c2: f64::NAN,
        tau0,
        phi: f64::NAN,
        samples: path.len(),
        curvature_roundtrip_max_error: roundtrip,
        peak_curvature: peak,
        peak_curvature_s1: peak_s1,
        torsion_max_deviation: tdev,
        torsion_checked_samples: checked,
        end_tangent_deviation: [t0, t1],
        min_self_distance: approach.distance,
        min_self_distance_s1: [approach.s1_a, approach.s1_b],
        loop_closest_approach: fold.distance,
        loop_closest_approach_s1: [fold.s1_a, fold.s1_b],
        max_orthonormality_defect: path.max_orthonormality_defect(),
        end_to_end_distance: (last - first).norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StaticSummary {
    pub case: MaterialCase,
    pub params: RodParams,
    pub alpha: f64,
    pub ode_residual_max: f64,
    pub system: ResidualSummary,
    pub system_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolveSummary {
    pub solver: &'static str,
    pub alpha: f64,
    pub v: f64,
    pub v_potential: Option<f64>,
    pub tau0: f64,
    pub u_final: f64,
    pub n_steps: usize,
    pub final_fidelity: Option<f64>,
    pub envelope_velocity: Option<f64>,
    pub carrier_velocity: Option<f64>,
    pub peak_amplitude: f64,
    pub relative_norm_drift: f64,
    pub max_edge_amplitude: f64,
    pub gauged_snapshots: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceSummary {
    pub alpha: f64,
    pub v: f64,
    pub v_potential: f64,
    pub u_final: f64,
    pub fidelity: f64,
    pub linear_envelope_velocity: Option<f64>,
    pub cnlse_envelope_velocity: Option<f64>,
    pub linear_report: EvolutionReport,
    pub cnlse_report: EvolutionReport,
}

struct Emitter<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Emitter<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn run_reconstruct(config: &RunConfig, out: &mut Emitter) -> Result<Value> {
    let (path, summary) = reconstruct_with_summary(config)?;
    write_frame_path(&out.path("curve.csv"), &path)?;
    write_json(&out.path("summary.json"), &summary)?;
    to_value(&summary)
}

fn run_static_check(config: &RunConfig, out: &mut Emitter) -> Result<Value> {
    let rod = &config.rod;
    let case = solve_case_phi(rod.phi, rod.sigma)?;
    let params = RodParams::from_case(&case, rod.c2, rod.tau0);
    let sol = if config.allow_zero_alpha {
        SechSolution::new_allow_flat(rod.c2, rod.tau0)?
    } else {
        SechSolution::new(rod.c2, rod.tau0)?
    };
    let range = (config.grid.s1_min, config.grid.s1_max);
    let samples = sample_static_configuration(
        &params,
        |s| sol.curvature(s),
        |s| sol.slope(s),
        range,
        config.step,
    )?;
    let ode = curvature_ode_residual(&samples.curvature, rod.c2, rod.tau0, config.step)?;
    let system = static_system_residual(&params, &samples.darboux, &samples.force, config.step)?;
    let interior = &samples.s1[1..samples.s1.len() - 1];
    write_residuals(&out.path("residuals.csv"), interior, &system)?;
    let norms = system.summary(config.step);
    write_json(&out.path("residuals.json"), &norms)?;
    let summary = StaticSummary {
        case,
        params,
        alpha: sol.alpha,
        ode_residual_max: ode.iter().map(|r| r.abs()).fold(0.0, f64::max),
        system_max: system.max_abs(),
        system: norms,
    };
    write_json(&out.path("summary.json"), &summary)?;
    to_value(&summary)
}

fn initial_state(config: &RunConfig, grid: Grid) -> Result<WaveField> {
    let s = &config.soliton;
    Ok(match s.initial {
        InitialState::Soliton => {
            let p = soliton_parameters(config.rod.alpha, s.v)?;
            WaveField::from_fn(grid, |x| analytic_envelope_soliton(&p, x, 0.0))
        }
        InitialState::Gaussian => {
            let (w, lambda) = (s.gaussian_width, 0.5 * s.v);
            WaveField::from_fn(grid, |x| {
                Complex64::from_polar((-0.5 * (x / w) * (x / w)).exp(), lambda * x)
            })
        }
    })
}

fn run_evolve(config: &RunConfig, out: &mut Emitter, linear: bool) -> Result<Value> {
    let grid = Grid::new(config.grid.s1_min, config.grid.s1_max, config.grid.n)?;
    let control = StepControl::new(config.time.du, config.time.n_steps, config.time.record_every);
    let s = &config.soliton;
    let alpha = config.rod.alpha;
    let tau0 = config.rod.tau0;
    let p = soliton_parameters(alpha, s.v)?;
    let psi0 = initial_state(config, grid)?;

    let exact = s.initial == InitialState::Soliton && (!linear || s.v_potential == s.v);
    let oracle_fn = move |x: f64, u: f64| analytic_envelope_soliton(&p, x, u);
    let oracle: Option<crate::quantum_transport::Oracle<'_>> =
        if exact { Some(&oracle_fn) } else { None };

    let mut snapshots: Vec<(f64, WaveField)> = Vec::new();
    let gauged = s.gauged;
    let mut observe = |u: f64, psi: &WaveField| {
        let field = if gauged {
            psi.scaled(gauge_factor(tau0, u, GaugeDirection::Forward))
        } else {
            psi.clone()
        };
        snapshots.push((u, field));
    };
    let (psi, report) = if linear {
        let profile = CurvatureProfile::kovalevskaya(alpha, s.v_potential)?;
        evolve_linear_observed(&psi0, &profile, &control, oracle, Some(&mut observe))?
    } else {
        evolve_cnlse_observed(&psi0, &control, oracle, Some(&mut observe))?
    };

    write_snapshots(&out.path("snapshots.csv"), &snapshots)?;
    write_json(&out.path("report.json"), &report)?;
    let summary = EvolveSummary {
        solver: if linear { "linear" } else { "cnlse" },
        alpha,
        v: s.v,
        v_potential: linear.then_some(s.v_potential),
        tau0,
        u_final: control.final_time(),
        n_steps: control.n_steps,
        final_fidelity: report.final_fidelity(),
        envelope_velocity: envelope_velocity(&report).ok(),
        carrier_velocity: carrier_velocity(&p).ok(),
        peak_amplitude: psi.max_abs(),
        relative_norm_drift: report.relative_norm_drift(),
        max_edge_amplitude: report.max_edge_amplitude,
        gauged_snapshots: gauged,
    };
    write_json(&out.path("summary.json"), &summary)?;
    to_value(&summary)
}

fn run_equivalence(config: &RunConfig, out: &mut Emitter) -> Result<Value> {
    let grid = Grid::new(config.grid.s1_min, config.grid.s1_max, config.grid.n)?;
    let control = StepControl::new(config.time.du, config.time.n_steps, config.time.record_every);
    let s = &config.soliton;
    let outcome = equivalence_run(config.rod.alpha, s.v, s.v_potential, &grid, &control)?;
    let summary = EquivalenceSummary {
        alpha: config.rod.alpha,
        v: s.v,
        v_potential: s.v_potential,
        u_final: control.final_time(),
        fidelity: outcome.fidelity,
        linear_envelope_velocity: envelope_velocity(&outcome.linear.1).ok(),
        cnlse_envelope_velocity: envelope_velocity(&outcome.cnlse.1).ok(),
        linear_report: outcome.linear.1,
        cnlse_report: outcome.cnlse.1,
    };
    write_json(&out.path("equivalence.json"), &summary)?;
    write_snapshots(
        &out.path("snapshots.csv"),
        &[
            (control.final_time(), outcome.linear.0),
            (control.final_time(), outcome.cnlse.0),
        ],
    )?;
    to_value(&summary)
}

fn run_sweep(config: &RunConfig, out: &mut Emitter) -> Result<Value> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep mode without sweep settings".into()))?;
    let key = sweep.param.key();
    let dir = out.dir.to_path_buf();
    let results: Vec<Result<RunOutcome>> = sweep
        .items
        .par_iter()
        .enumerate()
        .map(|(i, item)| run(item, &dir.join(format!("{key}_{i:02}"))))
        .collect();
    let mut items = Vec::with_capacity(results.len());
    for ((i, r), value) in results.into_iter().enumerate().zip(&sweep.values) {
        let r = r?;
        out.files.extend(
            r.files
                .iter()
                .map(|f| format!("{key}_{i:02}/{f}")),
        );
        items.push(json!({ "value": value, "dir": format!("{key}_{i:02}"), "summary": r.summary }));
    }
    let mut summary = json!({ "param": key, "mode": sweep.mode, "items": items });
    if sweep.mode == Mode::Reconstruct {
        let metric = |it: &Value, key: &str| it["summary"][key].as_f64().unwrap_or(f64::NAN);
        let mut rows: Vec<(f64, f64, f64)> = items
            .iter()
            .map(|it| {
                (
                    it["value"].as_f64().unwrap_or(f64::NAN),
                    metric(it, "peak_curvature"),
                    metric(it, "loop_closest_approach"),
                )
            })
            .collect();
        // tightest first: largest peak curvature
        rows.sort_by(|a, b| b.1.total_cmp(&a.1));
        summary["tightness_order"] = json!(rows.iter().map(|r| r.0).collect::<Vec<_>>());
        if sweep.param == SweepParam::Tau0 {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            summary["more_curved_for_smaller_tau0"] =
                json!(rows.windows(2).all(|w| w[0].1 > w[1].1));
            summary["loop_opens_with_tau0"] = json!(rows.windows(2).all(|w| w[0].2 < w[1].2));
        }
    }
    write_json(&out.path("sweep.json"), &summary)?;
    Ok(summary)
}

/// Runs `config`, writing its artifacts and `manifest.json` into `out_dir`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut out = Emitter {
        dir: out_dir,
        files: Vec::new(),
    };
    let summary = match config.mode {
        Mode::Reconstruct => run_reconstruct(config, &mut out)?,
        Mode::StaticCheck => run_static_check(config, &mut out)?,
        Mode::EvolveLinear => run_evolve(config, &mut out, true)?,
        Mode::EvolveCnlse => run_evolve(config, &mut out, false)?,
        Mode::Equivalence => run_equivalence(config, &mut out)?,
        Mode::Sweep => run_sweep(config, &mut out)?,
    };
    let mut files = out.files;
    files.push("manifest.json".into());
    let manifest = json!({
        "tool": "conformon",
        "version": env!("CARGO_PKG_VERSION"),
        "mode": config.mode,
        "config": config,
        "defaults": numeric_defaults(),
        "files": files,
        "summary": summary,
    });
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(RunOutcome {
        mode: config.mode,
        out_dir: out_dir.to_path_buf(),
        files,
        summary,
    })
}

/// Machine-readable failure record.
pub fn error_record(err: &Error) -> Value {
    json!({ "status": "error", "kind": err.kind(), "message": err.to_string() })
}

/// Writes `error.json`, creating `out_dir` if the run failed before it existed.
pub fn write_error_record(out_dir: &Path, err: &Error) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    write_json(&out_dir.join("error.json"), &error_record(err))
}
