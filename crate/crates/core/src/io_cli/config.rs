//! Run configuration: a flat TOML document resolved against per-mode defaults.
//!
//! ```toml
//! mode = "reconstruct"
//! alpha = 1.0
//! tau0 = 1.0
//! ```
//!
//! Unknown keys are rejected. `alpha`, `C2` and `tau0` are tied by
//! `alpha = C2 − tau0²`; any two determine the third and giving all three
//! inconsistently is an error.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_transport::solver::{
    DEFAULT_DOMAIN, DEFAULT_DU, DEFAULT_GRID_N, DEFAULT_RECORD_EVERY,
};
use crate::rod_geometry::{DEFAULT_RANGE, DEFAULT_STEP};

/// Absolute tolerance on `alpha = C2 − tau0²` when all three are given.
pub const ALPHA_CONSISTENCY_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TAU0: f64 = 1.0;
pub const DEFAULT_SIGMA: f64 = 0.5;
pub const DEFAULT_EVOLVE_STEPS: usize = 1000;
pub const DEFAULT_GAUSSIAN_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Reconstruct,
    StaticCheck,
    EvolveLinear,
    EvolveCnlse,
    Equivalence,
    Sweep,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Reconstruct => "reconstruct",
            Mode::StaticCheck => "static-check",
            Mode::EvolveLinear => "evolve-linear",
            Mode::EvolveCnlse => "evolve-cnlse",
            Mode::Equivalence => "equivalence",
            Mode::Sweep => "sweep",
        }
    }

    fn is_spatial(&self) -> bool {
        matches!(self, Mode::Reconstruct | Mode::StaticCheck)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// Closed-form envelope soliton with parameters `(alpha, v)`.
    Soliton,
    /// Unit-amplitude Gaussian carrying momentum `v/2`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "C2")]
    C2,
    #[serde(rename = "tau0")]
    Tau0,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "v_potential")]
    VPotential,
    #[serde(rename = "sigma")]
    Sigma,
}

impl SweepParam {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::C2 => "C2",
            SweepParam::Tau0 => "tau0",
            SweepParam::V => "v",
            SweepParam::VPotential => "v_potential",
            SweepParam::Sigma => "sigma",
        }
    }
}

/// The document as written, before defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mode: Option<Mode>,
    pub alpha: Option<f64>,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    pub tau0: Option<f64>,
    pub phi: Option<f64>,
    pub sigma: Option<f64>,
    pub v: Option<f64>,
    pub v_potential: Option<f64>,
    pub initial: Option<InitialState>,
    pub gaussian_width: Option<f64>,
    pub gauged: Option<bool>,
    pub s1_min: Option<f64>,
    pub s1_max: Option<f64>,
    pub n: Option<usize>,
    pub step: Option<f64>,
    pub du: Option<f64>,
    pub n_steps: Option<usize>,
    pub u_final: Option<f64>,
    pub record_every: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub allow_zero_alpha: Option<bool>,
    pub sweep_param: Option<SweepParam>,
    pub sweep_values: Option<Vec<f64>>,
    pub sweep_mode: Option<Mode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodConfig {
    pub alpha: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub tau0: f64,
    pub phi: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonConfig {
    pub v: f64,
    /// Velocity of the traveling curvature that drives the linear solver.
    pub v_potential: f64,
    pub initial: InitialState,
    pub gaussian_width: f64,
    /// Emit snapshots of the torsion-gauged wavefunction instead of ψ.
    pub gauged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub s1_min: f64,
    pub s1_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub du: f64,
    pub n_steps: usize,
    pub record_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub mode: Mode,
    /// One fully resolved config per value, in order.
    pub items: Vec<RunConfig>,
}

/// A validated run description with every default applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub rod: RodConfig,
    pub soliton: SolitonConfig,
    pub grid: GridConfig,
    /// Arclength step of reconstructions and residual checks.
    pub step: f64,
    pub time: TimeConfig,
    pub output_dir: Option<PathBuf>,
    pub allow_zero_alpha: bool,
    pub sweep: Option<SweepConfig>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(config_err(format!("{name} must be finite, got {x}")))
    }
}

fn resolve_rod(raw: &RawConfig, allow_zero: bool) -> Result<RodConfig> {
    let tau0 = finite("tau0", raw.tau0.unwrap_or(DEFAULT_TAU0))?;
    let tau0_sq = tau0 * tau0;
    let (alpha, c2) = match (raw.alpha, raw.c2) {
        (Some(alpha), Some(c2)) => {
            let (alpha, c2) = (finite("alpha", alpha)?, finite("C2", c2)?);
            if (c2 - tau0_sq - alpha).abs() > ALPHA_CONSISTENCY_TOLERANCE {
                return Err(config_err(format!(
                    "alpha = {alpha} contradicts C2 - tau0^2 = {} (C2 = {c2}, tau0 = {tau0})",
                    c2 - tau0_sq
                )));
            }
            (alpha, c2)
        }
        (Some(alpha), None) => {
            let alpha = finite("alpha", alpha)?;
            (alpha, alpha + tau0_sq)
        }
        (None, Some(c2)) => {
            let c2 = finite("C2", c2)?;
            (c2 - tau0_sq, c2)
        }
        (None, None) => (DEFAULT_ALPHA, DEFAULT_ALPHA + tau0_sq),
    };
    if alpha < 0.0 {
        return Err(config_err(format!(
            "C2 = {c2} must exceed tau0^2 = {tau0_sq} (alpha = {alpha} < 0)"
        )));
    }
    if alpha == 0.0 && !allow_zero {
        return Err(config_err(format!(
            "C2 = {c2} equals tau0^2 = {tau0_sq}; the flat alpha = 0 limit needs allow_zero_alpha = true"
        )));
    }
    let phi = finite("phi", raw.phi.unwrap_or(PI))?;
    crate::kirchhoff_static::quarter_turns(phi)
        .map_err(|_| config_err(format!("phi = {phi} must be a multiple of pi/2")))?;
    Ok(RodConfig {
        alpha,
        c2,
        tau0,
        phi,
        sigma: finite("sigma", raw.sigma.unwrap_or(DEFAULT_SIGMA))?,
    })
}

fn resolve(raw: &RawConfig, mode: Mode) -> Result<RunConfig> {
    let allow_zero_alpha = raw.allow_zero_alpha.unwrap_or(false);
    let rod = resolve_rod(raw, allow_zero_alpha)?;

    let grid_mode = match mode {
        Mode::Sweep => raw.sweep_mode.unwrap_or(Mode::Reconstruct),
        m => m,
    };
    let (lo, hi) = if grid_mode.is_spatial() {
        DEFAULT_RANGE
    } else {
        DEFAULT_DOMAIN
    };
    let grid = GridConfig {
        s1_min: finite("s1_min", raw.s1_min.unwrap_or(lo))?,
        s1_max: finite("s1_max", raw.s1_max.unwrap_or(hi))?,
        n: raw.n.unwrap_or(DEFAULT_GRID_N),
    };
    if grid.s1_max <= grid.s1_min {
        return Err(config_err(format!(
            "s1_max = {} must exceed s1_min = {}",
            grid.s1_max, grid.s1_min
        )));
    }
    if !grid_mode.is_spatial() && (grid.n < 16 || !grid.n.is_power_of_two()) {
        return Err(config_err(format!(
            "grid n = {} must be a power of two and at least 16",
            grid.n
        )));
    }

    let step = finite("step", raw.step.unwrap_or(DEFAULT_STEP))?;
    if step <= 0.0 {
        return Err(config_err(format!("step must be positive, got {step}")));
    }
    let du = finite("du", raw.du.unwrap_or(DEFAULT_DU))?;
    if du <= 0.0 {
        return Err(config_err(format!("du must be positive, got {du}")));
    }
    let n_steps = match (raw.n_steps, raw.u_final) {
        (Some(n), Some(u)) => {
            let implied = (u / du).round();
            if implied != n as f64 {
                return Err(config_err(format!(
                    "n_steps = {n} contradicts u_final / du = {u} / {du} = {implied}"
                )));
            }
            n
        }
        (Some(n), None) => n,
        (None, Some(u)) => {
            let u = finite("u_final", u)?;
            if u < 0.0 {
                return Err(config_err(format!("u_final must be non-negative, got {u}")));
            }
            (u / du).round() as usize
        }
        (None, None) => DEFAULT_EVOLVE_STEPS,
    };
    let time = TimeConfig {
        du,
        n_steps,
        record_every: raw.record_every.unwrap_or(DEFAULT_RECORD_EVERY),
    };

    let v = finite("v", raw.v.unwrap_or(0.0))?;
    let soliton = SolitonConfig {
        v,
        v_potential: finite("v_potential", raw.v_potential.unwrap_or(v))?,
        initial: raw.initial.unwrap_or(InitialState::Soliton),
        gaussian_width: finite(
            "gaussian_width",
            raw.gaussian_width.unwrap_or(DEFAULT_GAUSSIAN_WIDTH),
        )?,
        gauged: raw.gauged.unwrap_or(false),
    };
    if soliton.gaussian_width <= 0.0 {
        return Err(config_err("gaussian_width must be positive"));
    }

    let sweep = if mode == Mode::Sweep {
        Some(resolve_sweep(raw)?)
    } else {
        if raw.sweep_param.is_some() || raw.sweep_values.is_some() || raw.sweep_mode.is_some() {
            return Err(config_err(format!(
                "sweep_* keys are only valid in sweep mode, not {}",
                mode.name()
            )));
        }
        None
    };

    Ok(RunConfig {
        mode,
        rod,
        soliton,
        grid,
        step,
        time,
        output_dir: raw.output_dir.clone(),
        allow_zero_alpha,
        sweep,
    })
}

fn resolve_sweep(raw: &RawConfig) -> Result<SweepConfig> {
    let param = raw
        .sweep_param
        .ok_or_else(|| config_err("sweep mode needs sweep_param"))?;
    let values = raw
        .sweep_values
        .clone()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| config_err("sweep mode needs a non-empty sweep_values list"))?;
    let mode = raw.sweep_mode.unwrap_or(Mode::Reconstruct);
    if mode == Mode::Sweep {
        return Err(config_err("sweep_mode cannot itself be sweep"));
    }
    let items = values
        .iter()
        .map(|&x| {
            let mut item = raw.clone();
            item.mode = Some(mode);
            item.sweep_param = None;
            item.sweep_values = None;
            item.sweep_mode = None;
            item.output_dir = None;
            let slot = match param {
                SweepParam::Alpha => &mut item.alpha,
                SweepParam::C2 => &mut item.c2,
                SweepParam::Tau0 => &mut item.tau0,
                SweepParam::V => &mut item.v,
                SweepParam::VPotential => &mut item.v_potential,
                SweepParam::Sigma => &mut item.sigma,
            };
            *slot = Some(x);
            resolve(&item, mode)
                .map_err(|e| config_err(format!("sweep item {} = {x}: {e}", param.key())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepConfig {
        param,
        values,
        mode,
        items,
    })
}

pub fn parse_raw(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| config_err(e.to_string()))
}

/// Parses and validates a document that names its own `mode`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw = parse_raw(text)?;
    let mode = raw
        .mode
        .ok_or_else(|| config_err("missing mode"))?;
    resolve(&raw, mode)
}

/// Parses a document for a mode chosen on the command line; a `mode` key in
/// the document must agree with it.
pub fn parse_config_for(text: &str, mode: Mode) -> Result<RunConfig> {
    let raw = parse_raw(text)?;
    if let Some(m) = raw.mode {
        if m != mode {
            return Err(config_err(format!(
                "config mode {} contradicts command-line mode {}",
                m.name(),
                mode.name()
            )));
        }
    }
    resolve(&raw, mode)
}

/// Built-in demonstration document for each mode.
pub fn demo_config(mode: Mode) -> &'static str {
    match mode {
        Mode::Reconstruct => "mode = \"reconstruct\"\nalpha = 1.0\ntau0 = 1.0\n",
        Mode::StaticCheck => "mode = \"static-check\"\nC2 = 2.0\ntau0 = 1.0\nsigma = 0.5\n",
        Mode::EvolveLinear => {
            "mode = \"evolve-linear\"\nalpha = 1.0\ntau0 = 1.0\nv = 1.0\nu_final = 5.0\n"
        }
        Mode::EvolveCnlse => {
            "mode = \"evolve-cnlse\"\nalpha = 1.0\ntau0 = 1.0\nv = 1.0\nu_final = 5.0\n"
        }
        Mode::Equivalence => {
            "mode = \"equivalence\"\nalpha = 1.0\ntau0 = 1.0\nv = 1.0\nu_final = 2.0\n"
        }
        Mode::Sweep => {
            "mode = \"sweep\"\nC2 = 2.0\ntau0 = 1.0\nsweep_param = \"tau0\"\nsweep_values = [0.7, 1.0, 1.23]\nsweep_mode = \"reconstruct\"\n"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_reconstruct_gets_loop_defaults() {
        let c = parse_config("mode = \"reconstruct\"\nalpha = 1\ntau0 = 1\n").unwrap();
        assert_eq!(c.rod.c2, 2.0);
        assert_eq!(c.rod.phi, PI);
        assert_eq!((c.grid.s1_min, c.grid.s1_max), (-20.0, 20.0));
        assert_eq!(c.step, 1e-3);
    }

    #[test]
    fn consistent_triple_accepted() {
        let c = parse_config("mode = \"reconstruct\"\nC2 = 2.0\ntau0 = 1.0\nalpha = 1.0\n").unwrap();
        assert_eq!(c.rod.alpha, 1.0);
    }

    #[test]
    fn contradiction_names_both_values() {
        let e = parse_config("mode = \"reconstruct\"\nC2 = 2.0\ntau0 = 1.0\nalpha = 1.5\n")
            .unwrap_err()
            .to_string();
        assert!(e.contains("alpha = 1.5") && e.contains("C2 - tau0^2 = 1"), "{e}");
    }

    #[test]
    fn reality_condition() {
        let e = parse_config("mode = \"reconstruct\"\nC2 = 1.0\ntau0 = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("allow_zero_alpha"));
        let c = parse_config("mode = \"reconstruct\"\nC2 = 1.0\ntau0 = 1.0\nallow_zero_alpha = true\n")
            .unwrap();
        assert_eq!(c.rod.alpha, 0.0);
        assert!(parse_config("mode = \"reconstruct\"\nC2 = 0.5\ntau0 = 1.0\n").is_err());
        assert!(parse_config(
            "mode = \"reconstruct\"\nC2 = 0.5\ntau0 = 1.0\nallow_zero_alpha = true\n"
        )
        .is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = parse_config("mode = \"reconstruct\"\ntua0 = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("tua0"), "{e}");
    }

    #[test]
    fn evolve_grid_must_be_power_of_two() {
        assert!(parse_config("mode = \"evolve-cnlse\"\nn = 1000\n").is_err());
        // spatial modes ignore n
        assert!(parse_config("mode = \"reconstruct\"\nn = 1000\n").is_ok());
        let c = parse_config("mode = \"evolve-cnlse\"\n").unwrap();
        assert_eq!((c.grid.s1_min, c.grid.s1_max, c.grid.n), (-40.0, 40.0, 1024));
    }

    #[test]
    fn time_keys() {
        let c = parse_config("mode = \"equivalence\"\nu_final = 2.0\n").unwrap();
        assert_eq!(c.time.n_steps, 2000);
        assert!(parse_config("mode = \"equivalence\"\nu_final = 2.0\nn_steps = 100\n").is_err());
    }

    #[test]
    fn mode_agreement() {
        assert!(parse_config_for("mode = \"reconstruct\"\n", Mode::Sweep).is_err());
        assert!(parse_config_for("alpha = 2.0\n", Mode::EvolveCnlse).is_ok());
        assert!(parse_config("alpha = 2.0\n").is_err());
        assert!(parse_config("mode = \"reconstruct\"\nsweep_param = \"tau0\"\n").is_err());
    }

    #[test]
    fn sweep_items_resolve_independently() {
        let c = parse_config(demo_config(Mode::Sweep)).unwrap();
        let s = c.sweep.unwrap();
        let alphas: Vec<f64> = s.items.iter().map(|i| i.rod.alpha).collect();
        assert!((alphas[0] - 1.51).abs() < 1e-12);
        assert_eq!(alphas[1], 1.0);
        assert!((alphas[2] - (2.0 - 1.23 * 1.23)).abs() < 1e-12);
        assert!(s.items.iter().all(|i| i.rod.c2 == 2.0 && i.mode == Mode::Reconstruct));
        // τ0² ≥ C2 inside the sweep is caught up front
        let bad = "mode = \"sweep\"\nC2 = 2.0\nsweep_param = \"tau0\"\nsweep_values = [1.0, 1.5]\n";
        assert!(parse_config(bad).unwrap_err().to_string().contains("tau0 = 1.5"));
    }

    #[test]
    fn demos_parse() {
        for m in [
            Mode::Reconstruct,
            Mode::StaticCheck,
            Mode::EvolveLinear,
            Mode::EvolveCnlse,
            Mode::Equivalence,
            Mode::Sweep,
        ] {
            let c = parse_config(demo_config(m)).unwrap();
            assert_eq!(c.mode, m);
        }
    }
}
