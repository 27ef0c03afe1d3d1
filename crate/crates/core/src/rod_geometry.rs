//! Darboux-frame kinematics of a thin rod.
//!
//! The material frame `(d1, d2, d3)` moves along the arclength by
//! `d_i' = K × d_i` with the Darboux vector `K = k1 d1 + k2 d2 + k3 d3`, and
//! the centreline follows `R' = d3`. The triad is carried as a unit
//! quaternion mapping the lab basis onto `(d1, d2, d3)`, so the body-frame
//! rates `(k1, k2, k3)` drive it directly through `q' = ½ q ⊗ (0, k)`.

use nalgebra::{Matrix3, Quaternion, Rotation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::profile::CurvatureProfile;

pub type Vec3 = Vector3<f64>;

/// Torsion is masked where the extracted curvature falls to this level or below.
pub const TORSION_CURVATURE_FLOOR: f64 = 1e-4;

/// Tolerance on the frame invariants checked on input frames.
pub const FRAME_TOLERANCE: f64 = 1e-9;

/// Default arclength step for reconstructions.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Default reconstruction interval, wide enough for the α = 1 loop tails to vanish.
pub const DEFAULT_RANGE: (f64, f64) = (-20.0, 20.0);

/// Position and material triad at one arclength sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub position: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

impl Frame {
    /// Lab-aligned triad `(d1, d2, d3) = (x, y, z)` at `position`.
    pub fn identity_at(position: Vec3) -> Self {
        Frame {
            position,
            d1: Vec3::x(),
            d2: Vec3::y(),
            d3: Vec3::z(),
        }
    }

    pub fn from_rotation(position: Vec3, rotation: &UnitQuaternion<f64>) -> Self {
        Frame {
            position,
            d1: rotation * Vec3::x(),
            d2: rotation * Vec3::y(),
            d3: rotation * Vec3::z(),
        }
    }

    /// Largest violation of unit length, mutual orthogonality, or `d1 = d2 × d3`.
    pub fn orthonormality_defect(&self) -> f64 {
        let unit = [self.d1, self.d2, self.d3]
            .iter()
            .map(|d| (d.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        let handed = (self.d1 - self.d2.cross(&self.d3)).norm();
        let ortho = self
            .d1
            .dot(&self.d2)
            .abs()
            .max(self.d2.dot(&self.d3).abs())
            .max(self.d3.dot(&self.d1).abs());
        unit.max(handed).max(ortho)
    }

    pub fn rotation(&self) -> UnitQuaternion<f64> {
        let m = Matrix3::from_columns(&[self.d1, self.d2, self.d3]);
        UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m))
    }

    /// Image of this frame under the rigid motion `x ↦ rotation·x + shift`.
    pub fn transformed(&self, rotation: &UnitQuaternion<f64>, shift: &Vec3) -> Self {
        Frame {
            position: rotation * self.position + shift,
            d1: rotation * self.d1,
            d2: rotation * self.d2,
            d3: rotation * self.d3,
        }
    }
}

/// Components of the Darboux vector in the material frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxComponents {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl DarbouxComponents {
    pub fn as_vector(&self) -> Vec3 {
        Vec3::new(self.k1, self.k2, self.k3)
    }

    /// Lab-frame Darboux vector `k1 d1 + k2 d2 + k3 d3`.
    pub fn in_frame(&self, f: &Frame) -> Vec3 {
        f.d1 * self.k1 + f.d2 * self.k2 + f.d3 * self.k3
    }
}

/// `(k sin φ, k cos φ, τ + φ_s)`: curvature, torsion and strip angle to material rates.
pub fn darboux_from_scalars(k: f64, tau: f64, phi: f64, phi_s: f64) -> DarbouxComponents {
    let (s, c) = phi.sin_cos();
    DarbouxComponents {
        k1: k * s,
        k2: k * c,
        k3: tau + phi_s,
    }
}

/// Arclength derivatives of the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameRate {
    pub position: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

pub fn frame_derivative(f: &Frame, d: &DarbouxComponents) -> FrameRate {
    let k = d.in_frame(f);
    FrameRate {
        position: f.d3,
        d1: k.cross(&f.d1),
        d2: k.cross(&f.d2),
        d3: k.cross(&f.d3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub s1: f64,
    pub frame: Frame,
}

/// Uniformly sampled frames along the rod.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePath {
    pub samples: Vec<PathSample>,
    pub step: f64,
}

impl FramePath {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn s1(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|p| p.s1)
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.samples.iter().map(|p| p.frame.position)
    }

    pub fn max_orthonormality_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| p.frame.orthonormality_defect())
            .fold(0.0, f64::max)
    }
}

fn body_rate_quaternion(q: &Quaternion<f64>, omega: &Vec3) -> Quaternion<f64> {
    q * Quaternion::from_imag(*omega) * 0.5
}

fn tangent_of(q: &Quaternion<f64>) -> Vec3 {
    UnitQuaternion::new_normalize(*q) * Vec3::z()
}

/// Integrates the frame equations along `s1` for a constant strip angle `phi`.
///
/// Uses classical RK4 on (position, quaternion) with the quaternion
/// renormalised after every step. The path holds `⌊range/step⌋ + 1` samples
/// starting at `s_range.0` with `initial` as its first frame.
pub fn reconstruct_curve(
    profile: &CurvatureProfile,
    tau0: f64,
    phi: f64,
    s_range: (f64, f64),
    step: f64,
    initial: &Frame,
) -> Result<FramePath> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::NonPositiveStep(step));
    }
    let (s0, s_end) = s_range;
    if !(s0.is_finite() && s_end.is_finite()) || s_end < s0 {
        return Err(Error::InvalidGridInterval {
            min: s0,
            max: s_end,
        });
    }
    if !(tau0.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite {
            what: "torsion or strip angle",
            at: s0,
        });
    }
    let defect = initial.orthonormality_defect();
    if !(defect <= FRAME_TOLERANCE) {
        return Err(Error::InvalidFrame { defect });
    }

    let count = ((s_end - s0) / step + 1e-9).floor() as usize + 1;
    let rates = |s: f64| -> Result<Vec3> {
        let k = profile.eval(s, 0.0);
        if !k.is_finite() {
            return Err(Error::NonFinite {
                what: "curvature",
                at: s,
            });
        }
        Ok(darboux_from_scalars(k, tau0, phi, 0.0).as_vector())
    };

    let mut samples = Vec::with_capacity(count);
    let mut pos = initial.position;
    let mut q = *initial.rotation().quaternion();
    samples.push(PathSample {
        s1: s0,
        frame: *initial,
    });

    let mut w_lo = rates(s0)?;
    for i in 1..count {
        let s = s0 + (i - 1) as f64 * step;
        let w_mid = rates(s + 0.5 * step)?;
        let w_hi = rates(s0 + i as f64 * step)?;

        let k1q = body_rate_quaternion(&q, &w_lo);
        let k1r = tangent_of(&q);
        let q2 = q + k1q * (0.5 * step);
        let k2q = body_rate_quaternion(&q2, &w_mid);
        let k2r = tangent_of(&q2);
        let q3 = q + k2q * (0.5 * step);
        let k3q = body_rate_quaternion(&q3, &w_mid);
        let k3r = tangent_of(&q3);
        let q4 = q + k3q * step;
        let k4q = body_rate_quaternion(&q4, &w_hi);
        let k4r = tangent_of(&q4);

        q += (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (step / 6.0);
        q = q.normalize();
        pos += (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (step / 6.0);

        let rot = UnitQuaternion::new_unchecked(q);
        samples.push(PathSample {
            s1: s0 + i as f64 * step,
            frame: Frame::from_rotation(pos, &rot),
        });
        w_lo = w_hi;
    }
    Ok(FramePath { samples, step })
}

/// Central-difference `|d3'|` at samples `1..n-1` (the two end samples are dropped).
pub fn curvature_from_curve(path: &FramePath) -> Result<Vec<f64>> {
    let n = path.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let h = path.step;
    Ok(path
        .samples
        .windows(3)
        .map(|w| ((w[2].frame.d3 - w[0].frame.d3) / (2.0 * h)).norm())
        .collect())
}

/// Torsion `d3·(d3' × d3'')/k²` at samples `2..n-2`, using five-point stencils.
///
/// Entries are `None` where the local curvature is at or below
/// [`TORSION_CURVATURE_FLOOR`].
pub fn torsion_from_curve(path: &FramePath) -> Result<Vec<Option<f64>>> {
    let n = path.len();
    if n < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: n });
    }
    let h = path.step;
    Ok(path
        .samples
        .windows(5)
        .map(|w| {
            let t = |j: usize| w[j].frame.d3;
            let t1 = (t(0) - t(1) * 8.0 + t(3) * 8.0 - t(4)) / (12.0 * h);
            let t2 = (-t(0) + t(1) * 16.0 - t(2) * 30.0 + t(3) * 16.0 - t(4)) / (12.0 * h * h);
            let k = t1.norm();
            if k <= TORSION_CURVATURE_FLOOR {
                None
            } else {
                Some(t(2).dot(&t1.cross(&t2)) / (k * k))
            }
        })
        .collect())
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Largest angle between each end tangent and the tangents within `tail` arclength of it.
///
/// Returns `(start, end)` deviations in radians; small values mean the
/// curve has straightened out toward a fixed direction at that end.
pub fn end_tangent_deviation(path: &FramePath, tail: f64) -> Result<(f64, f64)> {
    let n = path.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let m = ((tail / path.step).round() as usize).clamp(1, n - 1);
    let first = path.samples[0].frame.d3;
    let last = path.samples[n - 1].frame.d3;
    let start = path.samples[..=m]
        .iter()
        .map(|p| angle_between(&first, &p.frame.d3))
        .fold(0.0, f64::max);
    let end = path.samples[n - 1 - m..]
        .iter()
        .map(|p| angle_between(&last, &p.frame.d3))
        .fold(0.0, f64::max);
    Ok((start, end))
}

/// Closest approach between two non-adjacent segments of a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfApproach {
    pub distance: f64,
    pub s1_a: f64,
    pub s1_b: f64,
}

fn segment_distance(p0: &Vec3, p1: &Vec3, q0: &Vec3, q1: &Vec3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(&d1);
    let e = d2.dot(&d2);
    let f = d2.dot(&r);
    let c = d1.dot(&r);
    let b = d1.dot(&d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 {
        ((b * f - c * e) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    ((p0 + d1 * s) - (q0 + d2 * t)).norm()
}

/// Resamples the centreline every `resolution` of arclength and returns the
/// closest approach between segments that do not share a vertex and whose
/// start points are at least `min_gap` apart in arclength.
pub fn min_self_distance(path: &FramePath, resolution: f64, min_gap: f64) -> Result<SelfApproach> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::NonPositiveStep(resolution));
    }
    let stride = ((resolution / path.step).round() as usize).max(1);
    let pts: Vec<(f64, Vec3)> = path
        .samples
        .iter()
        .step_by(stride)
        .map(|p| (p.s1, p.frame.position))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4 * stride,
            got: path.len(),
        });
    }
    let mut best = SelfApproach {
        distance: f64::INFINITY,
        s1_a: f64::NAN,
        s1_b: f64::NAN,
    };
    let segs = pts.len() - 1;
    for i in 0..segs {
        for j in i + 2..segs {
            if pts[j].0 - pts[i].0 < min_gap {
                continue;
            }
            let d = segment_distance(&pts[i].1, &pts[i + 1].1, &pts[j].1, &pts[j + 1].1);
            if d < best.distance {
                best = SelfApproach {
                    distance: d,
                    s1_a: pts[i].0,
                    s1_b: pts[j].0,
                };
            }
        }
    }
    Ok(best)
}
