use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[s1_min, s1_max)` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    s1_min: f64,
    s1_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(s1_min: f64, s1_max: f64, n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if !(s1_min.is_finite() && s1_max.is_finite() && s1_max > s1_min) {
            return Err(Error::InvalidGridInterval {
                min: s1_min,
                max: s1_max,
            });
        }
        Ok(Grid { s1_min, s1_max, n })
    }

    pub fn s1_min(&self) -> f64 {
        self.s1_min
    }

    pub fn s1_max(&self) -> f64 {
        self.s1_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.s1_max - self.s1_min
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.s1_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dq = 2.0 * std::f64::consts::PI / self.length();
        let n = self.n as i64;
        (0..n)
            .map(|m| if m < n / 2 { m } else { m - n } as f64 * dq)
            .collect()
    }
}

/// Complex field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl WaveField {
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        WaveField {
            values: grid.points().map(f).collect(),
            grid,
        }
    }

    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                what: "field values",
                expected: grid.n(),
                got: values.len(),
            });
        }
        Ok(WaveField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        WaveField {
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
            grid,
        }
    }

    /// Discrete inner product `Σ conj(a_j) b_j Δs1`.
    pub fn inner(&self, other: &WaveField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.spacing())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus over the outermost `width` samples at either end.
    pub fn edge_abs(&self, width: usize) -> f64 {
        let n = self.values.len();
        let w = width.min(n / 2);
        self.values[..w]
            .iter()
            .chain(&self.values[n - w..])
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    /// Grid index and position of the largest modulus.
    pub fn argmax_abs(&self) -> (usize, f64) {
        let (j, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bj, bv), (j, z)| {
                let v = z.norm_sqr();
                if v > bv {
                    (j, v)
                } else {
                    (bj, bv)
                }
            });
        (j, self.grid.point(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(-1.0, 1.0, 8), Err(Error::InvalidGridSize(8))));
        assert!(matches!(Grid::new(-1.0, 1.0, 100), Err(Error::InvalidGridSize(100))));
        assert!(matches!(
            Grid::new(1.0, 1.0, 16),
            Err(Error::InvalidGridInterval { .. })
        ));
        let g = Grid::new(-40.0, 40.0, 1024).unwrap();
        assert_eq!(g.spacing(), 80.0 / 1024.0);
        assert_eq!(g.point(512), 0.0);
    }

    #[test]
    fn wavenumbers_fft_order() {
        let g = Grid::new(0.0, 2.0 * std::f64::consts::PI, 16).unwrap();
        let q = g.wavenumbers();
        assert_eq!(q[0], 0.0);
        assert!((q[1] - 1.0).abs() < 1e-15);
        assert!((q[8] + 8.0).abs() < 1e-12);
        assert!((q[15] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn inner_needs_matching_grids() {
        let a = WaveField::zeros(Grid::new(0.0, 1.0, 16).unwrap());
        let b = WaveField::zeros(Grid::new(0.0, 2.0, 16).unwrap());
        assert!(matches!(a.inner(&b), Err(Error::GridMismatch)));
    }
}
