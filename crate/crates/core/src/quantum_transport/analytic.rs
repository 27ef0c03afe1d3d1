//! Closed-form states of the curvature-driven Schrödinger equation.
//!
//! Working variables are the rescaled arclength `s1` and time `u`, in which
//! the equation reads `i ψ_u + ψ_{s1 s1} + (k²/2) ψ = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::WaveField;
use crate::error::{Error, Result};
use crate::profile::{check_alpha, sech_profile};

/// Physical constants entering only through the variable rescaling
/// `u = (ħ/4m) t`, `s = √2 s1`, and the potential prefactor `ħ²/2m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessConvention {
    pub hbar: f64,
    pub mass: f64,
}

impl DimensionlessConvention {
    pub const ELECTRON_SI: DimensionlessConvention = DimensionlessConvention {
        hbar: 1.054_571_817e-34,
        mass: 9.109_383_701_5e-31,
    };

    /// `(s, t) ↦ (s1, u)`.
    pub fn to_dimensionless(&self, s: f64, t: f64) -> (f64, f64) {
        (s / std::f64::consts::SQRT_2, self.hbar / (4.0 * self.mass) * t)
    }

    /// `(s1, u) ↦ (s, t)`.
    pub fn to_physical(&self, s1: f64, u: f64) -> (f64, f64) {
        (s1 * std::f64::consts::SQRT_2, 4.0 * self.mass / self.hbar * u)
    }

    /// `ħ²/2m`.
    pub fn potential_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

/// Geometry-induced potential `prefactor · (−k²/4 + τ0²/2)`.
pub fn effective_potential(k: f64, tau0: f64, prefactor: f64) -> f64 {
    prefactor * (-0.25 * k * k + 0.5 * tau0 * tau0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeDirection {
    /// `ψ ↦ ψ1 = ψ e^{−i τ0² u}`.
    Forward,
    /// `ψ1 ↦ ψ`.
    Inverse,
}

/// Unimodular factor relating the torsion-shifted and unshifted wavefunctions.
pub fn gauge_factor(tau0: f64, u: f64, direction: GaugeDirection) -> Complex64 {
    let theta = tau0 * tau0 * u;
    match direction {
        GaugeDirection::Forward => Complex64::from_polar(1.0, -theta),
        GaugeDirection::Inverse => Complex64::from_polar(1.0, theta),
    }
}

pub fn gauge_transform(psi: &WaveField, tau0: f64, u: f64, direction: GaugeDirection) -> WaveField {
    psi.scaled(gauge_factor(tau0, u, direction))
}

/// `2√α sech(√α s1) e^{iαu}`.
pub fn analytic_breather(alpha: f64, s1: f64, u: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    Ok(Complex64::from_polar(sech_profile(alpha, s1), alpha * u))
}

/// Envelope and phase parameters of the traveling soliton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub alpha: f64,
    pub v: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// `λ = v/2`, `μ = α − v²/4`.
pub fn soliton_parameters(alpha: f64, v: f64) -> Result<SolitonParams> {
    check_alpha(alpha)?;
    if !v.is_finite() {
        return Err(Error::NonFinite {
            what: "envelope velocity",
            at: f64::NAN,
        });
    }
    let lambda = 0.5 * v;
    Ok(SolitonParams {
        alpha,
        v,
        lambda,
        mu: alpha - lambda * lambda,
    })
}

impl SolitonParams {
    /// Modulus profile `2√α sech(√α (s1 − v u))`.
    pub fn envelope(&self, s1: f64, u: f64) -> f64 {
        sech_profile(self.alpha, s1 - self.v * u)
    }

    /// Phase `λ s1 + μ u`.
    pub fn phase(&self, s1: f64, u: f64) -> f64 {
        self.lambda * s1 + self.mu * u
    }
}

/// `2√α sech(√α (s1 − v u)) e^{i(λ s1 + μ u)}`.
pub fn analytic_envelope_soliton(p: &SolitonParams, s1: f64, u: f64) -> Complex64 {
    Complex64::from_polar(p.envelope(s1, u), p.phase(s1, u))
}

/// Phase velocity `V_c = −μ/λ = (v² − 4α)/(2v)`.
pub fn carrier_velocity(p: &SolitonParams) -> Result<f64> {
    if p.v == 0.0 {
        return Err(Error::UndefinedCarrier);
    }
    Ok((p.v * p.v - 4.0 * p.alpha) / (2.0 * p.v))
}

/// `v (v − 2 V_c)`, which equals `4α` for every soliton.
pub fn velocity_product(p: &SolitonParams) -> Result<f64> {
    let vc = carrier_velocity(p)?;
    Ok(p.v * (p.v - 2.0 * vc))
}

/// Envelope soliton carried back through the torsion gauge: the envelope
/// soliton times `e^{−i τ0² u}`, i.e. phase `(v/2) s1 + (C2 − 2τ0² − v²/4) u`.
pub fn analytic_gauged_soliton(p: &SolitonParams, tau0: f64, s1: f64, u: f64) -> Complex64 {
    analytic_envelope_soliton(p, s1, u) * gauge_factor(tau0, u, GaugeDirection::Forward)
}

/// Traveling curvature wave `2√α sech(√α (s1 − v u))`.
pub fn kovalevskaya_curvature(alpha: f64, v: f64, s1: f64, u: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(sech_profile(alpha, s1 - v * u))
}

/// Closed-form soliton sampled on a grid at time `u`.
pub fn soliton_field(p: &SolitonParams, grid: super::Grid, u: f64) -> WaveField {
    WaveField::from_fn(grid, |s| analytic_envelope_soliton(p, s, u))
}
