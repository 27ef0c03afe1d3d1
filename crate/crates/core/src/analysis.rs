//! Observables of a sampled wavefunction and the time series a solver run produces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_transport::WaveField;

/// Samples at each end inspected by the leak guard.
pub const EDGE_WIDTH: usize = 4;

/// Edge-to-peak modulus ratio above which first moments are refused.
pub const LEAK_RATIO: f64 = 1e-6;

/// `∫|ψ|² ds1` as a plain Riemann sum (spectrally accurate on a periodic grid).
pub fn field_norm(psi: &WaveField) -> f64 {
    psi.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * psi.grid.spacing()
}

/// `(norm, mean, variance)` of the density `|ψ|²`, without leak checks.
pub(crate) fn density_moments(psi: &WaveField) -> (f64, f64, f64) {
    let mut m0 = 0.0;
    let mut m1 = 0.0;
    for (s, z) in psi.grid.points().zip(&psi.values) {
        let w = z.norm_sqr();
        m0 += w;
        m1 += w * s;
    }
    if m0 == 0.0 {
        return (0.0, f64::NAN, f64::NAN);
    }
    let mean = m1 / m0;
    let var = psi
        .grid
        .points()
        .zip(&psi.values)
        .map(|(s, z)| z.norm_sqr() * (s - mean) * (s - mean))
        .sum::<f64>()
        / m0;
    (m0 * psi.grid.spacing(), mean, var)
}

fn leak_guard(psi: &WaveField) -> Result<()> {
    let peak = psi.max_abs();
    if peak == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let ratio = psi.edge_abs(EDGE_WIDTH) / peak;
    if ratio > LEAK_RATIO {
        return Err(Error::BoundaryLeak { ratio });
    }
    Ok(())
}

/// `∫ s1 |ψ|² / ∫ |ψ|²`. The first moment is not periodic-safe, so fields
/// that reach the boundary are rejected.
pub fn localization_center(psi: &WaveField) -> Result<f64> {
    leak_guard(psi)?;
    Ok(density_moments(psi).1)
}

/// Root central second moment of `|ψ|²`.
pub fn localization_width(psi: &WaveField) -> Result<f64> {
    leak_guard(psi)?;
    Ok(density_moments(psi).2.sqrt())
}

/// `|⟨a,b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity(a: &WaveField, b: &WaveField) -> Result<f64> {
    let ab = a.inner(b)?;
    let aa = a.inner(a)?.re;
    let bb = b.inner(b)?.re;
    if aa == 0.0 || bb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((ab.norm_sqr() / (aa * bb)).min(1.0))
}

/// Time series recorded during an evolution.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionReport {
    #[serde(rename = "u")]
    pub times: Vec<f64>,
    #[serde(rename = "norm")]
    pub norms: Vec<f64>,
    #[serde(rename = "center")]
    pub centers: Vec<f64>,
    #[serde(rename = "width")]
    pub widths: Vec<f64>,
    #[serde(rename = "fidelity")]
    pub fidelities: Option<Vec<f64>>,
    /// Largest edge modulus seen at any recorded time.
    #[serde(skip)]
    pub max_edge_amplitude: f64,
}

impl EvolutionReport {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|norm(u) − norm(0)| / norm(0)` over the record.
    pub fn relative_norm_drift(&self) -> f64 {
        match self.norms.first() {
            Some(&n0) if n0 > 0.0 => self
                .norms
                .iter()
                .map(|n| ((n - n0) / n0).abs())
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.fidelities.as_ref().and_then(|f| f.last().copied())
    }
}

/// Least-squares slope of `center` against `u`.
pub fn envelope_velocity(report: &EvolutionReport) -> Result<f64> {
    let n = report.times.len();
    if n < 2 || report.centers.len() != n {
        return Err(Error::DegenerateTimeSpan);
    }
    let nf = n as f64;
    let tm = report.times.iter().sum::<f64>() / nf;
    let cm = report.centers.iter().sum::<f64>() / nf;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, c) in report.times.iter().zip(&report.centers) {
        sxy += (t - tm) * (c - cm);
        sxx += (t - tm) * (t - tm);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateTimeSpan);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_transport::{analytic_breather, Grid};
    use num_complex::Complex64;

    fn grid() -> Grid {
        Grid::new(-40.0, 40.0, 1024).unwrap()
    }

    fn breather(shift: f64) -> WaveField {
        WaveField::from_fn(grid(), |s| analytic_breather(1.0, s - shift, 0.0).unwrap())
    }

    #[test]
    fn norm_examples() {
        assert!((field_norm(&breather(0.0)) - 8.0).abs() < 1e-6);
        assert_eq!(field_norm(&WaveField::zeros(grid())), 0.0);
        let b = breather(0.0);
        let doubled = b.scaled(Complex64::new(2.0, 0.0));
        assert!((field_norm(&doubled) - 4.0 * field_norm(&b)).abs() < 1e-12);
    }

    #[test]
    fn center_examples() {
        assert!(localization_center(&breather(0.0)).unwrap().abs() < 1e-8);
        assert!((localization_center(&breather(3.0)).unwrap() - 3.0).abs() < 1e-6);
        assert!(matches!(
            localization_center(&WaveField::zeros(grid())),
            Err(Error::ZeroNorm)
        ));
        let flat = WaveField::from_fn(grid(), |_| Complex64::new(1.0, 0.0));
        assert!(matches!(localization_center(&flat), Err(Error::BoundaryLeak { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let b = breather(0.0);
        assert!((fidelity(&b, &b).unwrap() - 1.0).abs() < 1e-15);
        let rotated = b.scaled(Complex64::from_polar(1.0, 0.83));
        assert!((fidelity(&b, &rotated).unwrap() - 1.0).abs() < 1e-15);
        let z = WaveField::zeros(grid());
        assert!(matches!(fidelity(&b, &z), Err(Error::ZeroNorm)));
        let other = WaveField::zeros(Grid::new(-40.0, 40.0, 512).unwrap());
        assert!(matches!(fidelity(&b, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn velocity_needs_time_span() {
        let mut r = EvolutionReport {
            times: vec![0.0],
            centers: vec![0.0],
            ..Default::default()
        };
        assert!(matches!(envelope_velocity(&r), Err(Error::DegenerateTimeSpan)));
        r.times = vec![1.0, 1.0];
        r.centers = vec![0.0, 1.0];
        assert!(matches!(envelope_velocity(&r), Err(Error::DegenerateTimeSpan)));
        r.times = vec![0.0, 1.0, 2.0];
        r.centers = vec![1.0, 0.5, 0.0];
        assert!((envelope_velocity(&r).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn report_json_keys() {
        let r = EvolutionReport {
            times: vec![0.0],
            norms: vec![8.0],
            centers: vec![0.0],
            widths: vec![0.9],
            fidelities: Some(vec![1.0]),
            max_edge_amplitude: 0.0,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["center", "fidelity", "norm", "u", "width"]);
    }
}
