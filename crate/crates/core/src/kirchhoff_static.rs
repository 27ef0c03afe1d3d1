//! Static Kirchhoff rod: material reductions, the curvature ODE and its
//! sech solution, the closed-form force field, and residual evaluators.
//!
//! Every residual evaluator uses second-order central differences at interior
//! samples only, so its discretisation error is `O(step²)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{check_alpha, sech_profile, sech_profile_slope};
use crate::rod_geometry::DarbouxComponents;

/// Tolerance for recognising φ as a multiple of π/2.
pub const PHI_TOLERANCE: f64 = 1e-12;

/// `b = 2a / ((1 + σ)(1 + a))`.
pub fn derive_b(a: f64, sigma: f64) -> Result<f64> {
    let denom = (1.0 + sigma) * (1.0 + a);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::SingularDenominator { a, sigma });
    }
    Ok(2.0 * a / denom)
}

/// Which reduction of the static system a strip angle selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// φ ≡ 0 or π: the torsion equation forces `b = 2a`.
    Even,
    /// φ ≡ π/2 or 3π/2: the torsion equation forces `b = 2`.
    Odd,
}

/// Reduces φ to its quarter-turn index `n mod 4` where `φ = nπ/2`.
pub fn quarter_turns(phi: f64) -> Result<u8> {
    if !phi.is_finite() {
        return Err(Error::PhiNotQuarterTurn(phi));
    }
    let n = (phi / FRAC_PI_2).round();
    if (phi - n * FRAC_PI_2).abs() > PHI_TOLERANCE * phi.abs().max(1.0) {
        return Err(Error::PhiNotQuarterTurn(phi));
    }
    Ok(n.rem_euclid(4.0) as u8)
}

pub fn branch_of(phi: f64) -> Result<Branch> {
    Ok(if quarter_turns(phi)? % 2 == 0 {
        Branch::Even
    } else {
        Branch::Odd
    })
}

/// `(sin φ, cos φ)` rounded to the exact values `{−1, 0, 1}` for quarter turns.
fn quarter_sin_cos(phi: f64) -> Result<(f64, f64)> {
    Ok(match quarter_turns(phi)? {
        0 => (0.0, 1.0),
        1 => (1.0, 0.0),
        2 => (0.0, -1.0),
        _ => (-1.0, 0.0),
    })
}

/// Material parameters selected by a strip angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialCase {
    pub phi: f64,
    pub sigma: f64,
    pub branch: Branch,
    pub a: f64,
    pub b: f64,
    /// For the even branch, the asymmetry value `−1/(1+σ)` as printed in the
    /// source derivation; it does not satisfy `b(a, σ) = 2a`. Reported, never used.
    pub printed_a: Option<f64>,
}

/// Solves the `b`-formula together with the branch condition.
///
/// Odd branch: `a = −(1+σ)/σ`, `b = 2`. Even branch: `b(a, σ) = 2a` with
/// `a ≠ 0` gives `(1+σ)(1+a) = 1`, i.e. `a = −σ/(1+σ)`.
pub fn solve_case_phi(phi: f64, sigma: f64) -> Result<MaterialCase> {
    let branch = branch_of(phi)?;
    if !sigma.is_finite() || sigma == -1.0 {
        return Err(Error::SingularCase { phi, sigma });
    }
    let (a, printed_a) = match branch {
        Branch::Odd => {
            if sigma == 0.0 {
                return Err(Error::SingularCase { phi, sigma });
            }
            (-(1.0 + sigma) / sigma, None)
        }
        Branch::Even => {
            // σ = 0 collapses the nonzero root onto a = 0.
            if sigma == 0.0 {
                return Err(Error::SingularCase { phi, sigma });
            }
            (-sigma / (1.0 + sigma), Some(-1.0 / (1.0 + sigma)))
        }
    };
    let b = derive_b(a, sigma)?;
    Ok(MaterialCase {
        phi,
        sigma,
        branch,
        a,
        b,
        printed_a,
    })
}

/// Material and load constants of a rod in static equilibrium.
///
/// The model's stated asymmetry range `0 < a ≤ 1` is not enforced: both
/// quarter-turn reductions produce negative `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RodParams {
    pub a: f64,
    pub sigma: f64,
    pub b: f64,
    pub c2: f64,
    pub tau0: f64,
    pub phi: f64,
}

impl RodParams {
    /// Builds parameters with `b` derived from `(a, σ)`.
    pub fn new(a: f64, sigma: f64, c2: f64, tau0: f64, phi: f64) -> Result<Self> {
        quarter_turns(phi)?;
        let b = derive_b(a, sigma)?;
        Ok(RodParams {
            a,
            sigma,
            b,
            c2,
            tau0,
            phi,
        })
    }

    pub fn from_case(case: &MaterialCase, c2: f64, tau0: f64) -> Self {
        RodParams {
            a: case.a,
            sigma: case.sigma,
            b: case.b,
            c2,
            tau0,
            phi: case.phi,
        }
    }

    /// `C2 − τ0²`, the sech-solution parameter.
    pub fn alpha(&self) -> f64 {
        self.c2 - self.tau0 * self.tau0
    }
}

/// The nontrivial static solution `k(s) = 2√α sech(√α s)` with `α = C2 − τ0²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SechSolution {
    pub c2: f64,
    pub tau0: f64,
    pub alpha: f64,
}

impl SechSolution {
    /// Requires `C2 > τ0²`; the curvature would be imaginary otherwise.
    pub fn new(c2: f64, tau0: f64) -> Result<Self> {
        let tau0_sq = tau0 * tau0;
        if !(c2 > tau0_sq) {
            return Err(Error::RealityViolated { c2, tau0_sq });
        }
        Ok(SechSolution {
            c2,
            tau0,
            alpha: c2 - tau0_sq,
        })
    }

    /// As [`SechSolution::new`] but also admits the flat limit `C2 = τ0²` (α = 0).
    pub fn new_allow_flat(c2: f64, tau0: f64) -> Result<Self> {
        let tau0_sq = tau0 * tau0;
        if c2 == tau0_sq {
            return Ok(SechSolution {
                c2,
                tau0,
                alpha: 0.0,
            });
        }
        Self::new(c2, tau0)
    }

    pub fn from_alpha(alpha: f64, tau0: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(SechSolution {
            c2: alpha + tau0 * tau0,
            tau0,
            alpha,
        })
    }

    pub fn curvature(&self, s1: f64) -> f64 {
        sech_profile(self.alpha, s1)
    }

    pub fn slope(&self, s1: f64) -> f64 {
        sech_profile_slope(self.alpha, s1)
    }

    /// Peak curvature `k0 = 2√α`.
    pub fn peak(&self) -> f64 {
        2.0 * self.alpha.sqrt()
    }
}

/// `2√α sech(√α s1)`.
pub fn sech_curvature(alpha: f64, s1: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(sech_profile(alpha, s1))
}

/// Radius of the circular-helix solution, `√(2(C2 − τ0²))`.
pub fn helix_curvature(c2: f64, tau0: f64) -> Result<f64> {
    let tau0_sq = tau0 * tau0;
    if c2 < tau0_sq {
        return Err(Error::RealityViolated { c2, tau0_sq });
    }
    Ok((2.0 * (c2 - tau0_sq)).sqrt())
}

fn second_difference(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
}

fn first_difference(f: &[f64], i: usize, h: f64) -> f64 {
    (f[i + 1] - f[i - 1]) / (2.0 * h)
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::NonPositiveStep(step));
    }
    Ok(())
}

/// `k_ss + k³/2 − (C2 − τ0²) k` at interior samples `1..n-1`.
pub fn curvature_ode_residual(k: &[f64], c2: f64, tau0: f64, step: f64) -> Result<Vec<f64>> {
    check_step(step)?;
    if k.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: k.len(),
        });
    }
    let alpha = c2 - tau0 * tau0;
    Ok((1..k.len() - 1)
        .map(|i| second_difference(k, i, step) + 0.5 * k[i].powi(3) - alpha * k[i])
        .collect())
}

/// Force components in the material frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceTorqueState {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

impl ForceTorqueState {
    /// Torque components `(k1, a k2, b k3)` in the material frame.
    pub fn torque(d: &DarbouxComponents, a: f64, b: f64) -> [f64; 3] {
        [d.k1, a * d.k2, b * d.k3]
    }
}

/// Closed-form force of the φ = π reduction:
/// `(a k_s, (a − b) τ0 k, a(−k²/2 + C2))`.
pub fn static_force_field(params: &RodParams, k: f64, k_s: f64) -> ForceTorqueState {
    let RodParams { a, b, c2, tau0, .. } = *params;
    ForceTorqueState {
        g1: a * k_s,
        g2: (a - b) * tau0 * k,
        g3: a * (-0.5 * k * k + c2),
    }
}

/// Force field for any quarter-turn strip angle.
///
/// With `(sin φ, cos φ) = (σ1, σ2) ∈ {0, ±1}²` the balance laws integrate to
/// `g = (−a σ2 k_s + (b−1) σ1 τ0 k, σ1 k_s + (b−a) σ2 τ0 k, g3)` where `g3`
/// is `a(−k²/2 + C2)` on the even branch and `−k²/2 + C2` on the odd one.
/// At φ = π this is [`static_force_field`].
pub fn branch_force_field(params: &RodParams, k: f64, k_s: f64) -> Result<ForceTorqueState> {
    let (s, c) = quarter_sin_cos(params.phi)?;
    let RodParams { a, b, c2, tau0, .. } = *params;
    let tension = -0.5 * k * k + c2;
    let g3 = match branch_of(params.phi)? {
        Branch::Even => a * tension,
        Branch::Odd => tension,
    };
    Ok(ForceTorqueState {
        g1: -a * c * k_s + (b - 1.0) * s * tau0 * k,
        g2: s * k_s + (b - a) * c * tau0 * k,
        g3,
    })
}

/// Six residual arrays of the static balance equations at interior samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemResidual {
    pub equations: [Vec<f64>; 6],
}

/// Per-equation norms of a [`SystemResidual`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_abs: [f64; 6],
    pub l2: [f64; 6],
}

impl SystemResidual {
    pub fn len(&self) -> usize {
        self.equations[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_abs(&self) -> f64 {
        self.summary(1.0).max_abs.iter().cloned().fold(0.0, f64::max)
    }

    /// Max and discrete L2 norms (`√(Σ r² h)`) per equation.
    pub fn summary(&self, step: f64) -> ResidualSummary {
        let mut max_abs = [0.0; 6];
        let mut l2 = [0.0; 6];
        for (j, r) in self.equations.iter().enumerate() {
            max_abs[j] = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
            l2[j] = (r.iter().map(|x| x * x).sum::<f64>() * step).sqrt();
        }
        ResidualSummary { max_abs, l2 }
    }
}

/// Evaluates the six static equations
///
/// ```text
/// g1' + k2 g3 − k3 g2          g2 − k1' − (b−a) k2 k3
/// g2' + k3 g1 − k1 g3          g1 + a k2' − (b−1) k1 k3
/// g3' + k1 g2 − k2 g1          b k3' + (a−1) k1 k2
/// ```
///
/// on uniformly sampled Darboux components and forces.
pub fn static_system_residual(
    params: &RodParams,
    darboux: &[DarbouxComponents],
    force: &[ForceTorqueState],
    step: f64,
) -> Result<SystemResidual> {
    check_step(step)?;
    let n = darboux.len();
    if force.len() != n {
        return Err(Error::LengthMismatch {
            what: "force samples",
            expected: n,
            got: force.len(),
        });
    }
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let (a, b) = (params.a, params.b);
    let col = |f: &dyn Fn(usize) -> f64| (0..n).map(f).collect::<Vec<f64>>();
    let k1 = col(&|i| darboux[i].k1);
    let k2 = col(&|i| darboux[i].k2);
    let k3 = col(&|i| darboux[i].k3);
    let g1 = col(&|i| force[i].g1);
    let g2 = col(&|i| force[i].g2);
    let g3 = col(&|i| force[i].g3);

    let mut eq: [Vec<f64>; 6] = Default::default();
    for r in eq.iter_mut() {
        r.reserve(n - 2);
    }
    for i in 1..n - 1 {
        let d = |f: &[f64]| first_difference(f, i, step);
        eq[0].push(d(&g1) + k2[i] * g3[i] - k3[i] * g2[i]);
        eq[1].push(d(&g2) + k3[i] * g1[i] - k1[i] * g3[i]);
        eq[2].push(d(&g3) + k1[i] * g2[i] - k2[i] * g1[i]);
        eq[3].push(g2[i] - d(&k1) - (b - a) * k2[i] * k3[i]);
        eq[4].push(g1[i] + a * d(&k2) - (b - 1.0) * k1[i] * k3[i]);
        eq[5].push(b * d(&k3) + (a - 1.0) * k1[i] * k2[i]);
    }
    Ok(SystemResidual { equations: eq })
}

/// Samples of a static configuration on a uniform arclength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticSamples {
    pub s1: Vec<f64>,
    pub curvature: Vec<f64>,
    pub darboux: Vec<DarbouxComponents>,
    pub force: Vec<ForceTorqueState>,
}

/// Samples `k(s)`, the material rates at constant torsion and angle, and the
/// closed-form force for the parameters' branch.
pub fn sample_static_configuration(
    params: &RodParams,
    curvature: impl Fn(f64) -> f64,
    slope: impl Fn(f64) -> f64,
    s_range: (f64, f64),
    step: f64,
) -> Result<StaticSamples> {
    check_step(step)?;
    let count = ((s_range.1 - s_range.0) / step + 1e-9).floor() as usize + 1;
    let (sn, cs) = quarter_sin_cos(params.phi)?;
    let mut out = StaticSamples {
        s1: Vec::with_capacity(count),
        curvature: Vec::with_capacity(count),
        darboux: Vec::with_capacity(count),
        force: Vec::with_capacity(count),
    };
    for i in 0..count {
        let s = s_range.0 + i as f64 * step;
        let k = curvature(s);
        if !k.is_finite() {
            return Err(Error::NonFinite {
                what: "curvature",
                at: s,
            });
        }
        out.s1.push(s);
        out.curvature.push(k);
        out.darboux.push(DarbouxComponents {
            k1: k * sn,
            k2: k * cs,
            k3: params.tau0,
        });
        out.force.push(branch_force_field(params, k, slope(s))?);
    }
    Ok(out)
}

/// `C2 = k0²/4 + τ0²`.
pub fn tension_torsion_constraint(k0: f64, tau0: f64) -> f64 {
    0.25 * k0 * k0 + tau0 * tau0
}

/// Canonical strip angle for each branch, as used in the worked reductions.
pub fn canonical_phi(branch: Branch) -> f64 {
    match branch {
        Branch::Even => PI,
        Branch::Odd => FRAC_PI_2,
    }
}
