//! Curvature profiles shared by the rod and quantum modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A curvature function `k(s1, u)`.
///
/// Static profiles ignore `u`. The traveling profile is the Kovalevskaya
/// solitary wave `2√α sech(√α (s1 − v u))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurvatureProfile {
    Zero,
    Constant { k: f64 },
    Sech { alpha: f64 },
    Kovalevskaya { alpha: f64, v: f64 },
}

pub(crate) fn sech(x: f64) -> f64 {
    // cosh overflows past |x| ~ 710; sech is exactly representable as 0 there anyway.
    let ax = x.abs();
    if ax > 700.0 {
        0.0
    } else {
        let e = (-ax).exp();
        2.0 * e / (1.0 + e * e)
    }
}

/// `2√α sech(√α x)` without argument checks.
pub(crate) fn sech_profile(alpha: f64, x: f64) -> f64 {
    let r = alpha.sqrt();
    2.0 * r * sech(r * x)
}

/// Derivative of [`sech_profile`] with respect to `x`.
pub(crate) fn sech_profile_slope(alpha: f64, x: f64) -> f64 {
    let r = alpha.sqrt();
    -r * sech_profile(alpha, x) * (r * x).tanh()
}

impl CurvatureProfile {
    pub fn constant(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::NonFinite {
                what: "constant curvature",
                at: f64::NAN,
            });
        }
        if k < 0.0 {
            return Err(Error::NegativeCurvature(k));
        }
        Ok(CurvatureProfile::Constant { k })
    }

    pub fn sech(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(CurvatureProfile::Sech { alpha })
    }

    pub fn kovalevskaya(alpha: f64, v: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                what: "wave velocity",
                at: f64::NAN,
            });
        }
        Ok(CurvatureProfile::Kovalevskaya { alpha, v })
    }

    /// Curvature at arclength `s1` and rescaled time `u`.
    pub fn eval(&self, s1: f64, u: f64) -> f64 {
        match *self {
            CurvatureProfile::Zero => 0.0,
            CurvatureProfile::Constant { k } => k,
            CurvatureProfile::Sech { alpha } => sech_profile(alpha, s1),
            CurvatureProfile::Kovalevskaya { alpha, v } => sech_profile(alpha, s1 - v * u),
        }
    }

    /// Arclength derivative `∂k/∂s1`.
    pub fn slope(&self, s1: f64, u: f64) -> f64 {
        match *self {
            CurvatureProfile::Zero | CurvatureProfile::Constant { .. } => 0.0,
            CurvatureProfile::Sech { alpha } => sech_profile_slope(alpha, s1),
            CurvatureProfile::Kovalevskaya { alpha, v } => sech_profile_slope(alpha, s1 - v * u),
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, CurvatureProfile::Kovalevskaya { v, .. } if *v != 0.0)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha.is_infinite() {
        return Err(Error::NonFinite {
            what: "alpha",
            at: f64::NAN,
        });
    }
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    Ok(())
}
