//! Checks against closed forms computed independently of the library.

use std::f64::consts::{FRAC_PI_2, PI};

use conformon::analysis::{
    envelope_velocity, field_norm, fidelity, localization_center, localization_width,
};
use conformon::kirchhoff_static::{
    sample_static_configuration, solve_case_phi, static_system_residual, Branch, RodParams,
    SechSolution,
};
use conformon::quantum_transport::{
    analytic_breather, analytic_envelope_soliton, analytic_gauged_soliton, evolve_cnlse,
    evolve_linear, kovalevskaya_curvature, soliton_field, soliton_parameters, Grid, StepControl,
    WaveField,
};
use conformon::rod_geometry::{
    curvature_from_curve, reconstruct_curve, torsion_from_curve, Frame, FramePath,
};
use conformon::CurvatureProfile;
use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftPlanner;

fn origin() -> Frame {
    Frame::identity_at(Vector3::zeros())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

#[test]
fn sech_round_trip_through_the_centreline() {
    for (alpha, tau0) in [(1.0, 1.0), (0.5, 0.3), (2.0, -1.0)] {
        let profile = CurvatureProfile::sech(alpha).unwrap();
        let path = reconstruct_curve(&profile, tau0, PI, (-20.0, 20.0), 1e-3, &origin()).unwrap();
        let k = curvature_from_curve(&path).unwrap();
        let err = k
            .iter()
            .enumerate()
            .map(|(i, ki)| (ki - 2.0 * alpha.sqrt() * sech(alpha.sqrt() * path.samples[i + 1].s1)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5, "alpha {alpha}: {err:e}");
    }
}

fn circumradius(a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) -> f64 {
    let (ab, bc, ca) = ((b - a).norm(), (c - b).norm(), (a - c).norm());
    ab * bc * ca / (2.0 * (b - a).cross(&(c - a)).norm())
}

#[test]
fn constant_curvature_and_torsion_trace_a_helix() {
    let (k, tau) = (1.0, 1.0);
    let profile = CurvatureProfile::constant(k).unwrap();
    let path = reconstruct_curve(&profile, tau, PI, (0.0, 20.0), 1e-3, &origin()).unwrap();
    // The Darboux vector is fixed in space along a helix and gives the axis.
    let f0 = &path.samples[0].frame;
    let omega = f0.d2 * (-k) + f0.d3 * tau;
    let axis = omega.normalize();
    let rate = tau / (k * k + tau * tau).sqrt();
    let radius = k / (k * k + tau * tau);
    assert!((radius - 0.5).abs() < 1e-15);

    let flat = |p: Vector3<f64>| p - axis * p.dot(&axis);
    for i in (0..path.len() - 2000).step_by(1500) {
        let s = path.samples[i].s1;
        let p = path.samples[i].frame.position;
        assert!((p.dot(&axis) - rate * s).abs() < 1e-9, "axial drift at {s}");
        let r = circumradius(
            flat(p),
            flat(path.samples[i + 1000].frame.position),
            flat(path.samples[i + 2000].frame.position),
        );
        assert!((r - radius).abs() < 1e-9, "radius {r} at {s}");
    }
    for t in torsion_from_curve(&path).unwrap() {
        assert!((t.unwrap() - tau).abs() < 1e-6);
    }
}

fn static_residual(phi: f64, sigma: f64) -> f64 {
    let case = solve_case_phi(phi, sigma).unwrap();
    let sol = SechSolution::from_alpha(1.0, 0.8).unwrap();
    let params = RodParams::from_case(&case, sol.c2, sol.tau0);
    let samples = sample_static_configuration(
        &params,
        |s| sol.curvature(s),
        |s| sol.slope(s),
        (-20.0, 20.0),
        1e-3,
    )
    .unwrap();
    static_system_residual(&params, &samples.darboux, &samples.force, 1e-3)
        .unwrap()
        .max_abs()
}

#[test]
fn every_quarter_turn_balances() {
    for phi in [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
        for sigma in [0.3, 0.5, 2.0] {
            let r = static_residual(phi, sigma);
            assert!(r <= 1e-5, "phi {phi}, sigma {sigma}: {r:e}");
        }
    }
    assert_eq!(solve_case_phi(FRAC_PI_2, 0.5).unwrap().branch, Branch::Odd);
}

#[test]
fn wrong_material_constants_break_the_balance() {
    let case = solve_case_phi(PI, 0.5).unwrap();
    let sol = SechSolution::from_alpha(1.0, 1.0).unwrap();
    let mut params = RodParams::from_case(&case, sol.c2, sol.tau0);
    params.a = case.printed_a.unwrap();
    let samples =
        sample_static_configuration(&params, |s| sol.curvature(s), |s| sol.slope(s), (-20.0, 20.0), 1e-3)
            .unwrap();
    let r = static_system_residual(&params, &samples.darboux, &samples.force, 1e-3).unwrap();
    assert!(r.max_abs() > 1e-2);
}

/// `ψ_ss` on a periodic grid by FFT.
fn spectral_second_derivative(psi: &WaveField) -> Vec<Complex64> {
    let n = psi.grid.n();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = psi.values.clone();
    fwd.process(&mut buf);
    let l = psi.grid.length();
    for (j, z) in buf.iter_mut().enumerate() {
        let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
        let q = 2.0 * PI * m / l;
        *z *= -q * q / n as f64;
    }
    inv.process(&mut buf);
    buf
}

/// Max of `|i ψ_u + ψ_ss + V ψ|` with `ψ_u` by a fourth-order central difference.
fn pde_residual(
    grid: Grid,
    psi: &dyn Fn(f64, f64) -> Complex64,
    potential: &dyn Fn(f64, f64, Complex64) -> f64,
    u: f64,
) -> f64 {
    let h = 1e-3;
    let at = |t: f64| WaveField::from_fn(grid, |s| psi(s, t));
    let now = at(u);
    let (m2, m1, p1, p2) = (at(u - 2.0 * h), at(u - h), at(u + h), at(u + 2.0 * h));
    let pss = spectral_second_derivative(&now);
    grid.points()
        .enumerate()
        .map(|(j, s)| {
            let pu = (m2.values[j] - 8.0 * m1.values[j] + 8.0 * p1.values[j] - p2.values[j]) / (12.0 * h);
            let z = now.values[j];
            (Complex64::i() * pu + pss[j] + potential(s, u, z) * z).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn closed_forms_solve_their_equations() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    let alpha = 1.3;
    let breather = |s: f64, u: f64| analytic_breather(alpha, s, u).unwrap();
    let static_pot = |s: f64, _: f64, _: Complex64| 0.5 * 4.0 * alpha * sech(alpha.sqrt() * s).powi(2);
    let r = pde_residual(grid, &breather, &static_pot, 0.7);
    assert!(r <= 1e-6, "breather {r:e}");

    for v in [-0.8, 0.0, 1.0] {
        let p = soliton_parameters(alpha, v).unwrap();
        let soliton = |s: f64, u: f64| analytic_envelope_soliton(&p, s, u);
        let cubic = |_: f64, _: f64, z: Complex64| 0.5 * z.norm_sqr();
        let r = pde_residual(grid, &soliton, &cubic, 1.1);
        assert!(r <= 1e-6, "soliton v={v}: {r:e}");
        let moving = |s: f64, u: f64, _: Complex64| {
            0.5 * kovalevskaya_curvature(alpha, v, s, u).unwrap().powi(2)
        };
        let r = pde_residual(grid, &soliton, &moving, 1.1);
        assert!(r <= 1e-6, "soliton in moving potential v={v}: {r:e}");

        let tau0 = 0.9;
        let gauged = |s: f64, u: f64| analytic_gauged_soliton(&p, tau0, s, u);
        let shifted = |s: f64, u: f64, _: Complex64| {
            0.5 * kovalevskaya_curvature(alpha, v, s, u).unwrap().powi(2) - tau0 * tau0
        };
        let r = pde_residual(grid, &gauged, &shifted, 1.1);
        assert!(r <= 1e-6, "gauged v={v}: {r:e}");
    }
}

#[test]
fn breather_norm_and_width() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    for alpha in [0.5, 1.0, 4.0] {
        let psi = WaveField::from_fn(grid, |s| analytic_breather(alpha, s, 0.3).unwrap());
        let density = |s: f64| 4.0 * alpha * sech(alpha.sqrt() * s).powi(2);
        let norm_q = simpson(density, -40.0, 40.0, 200_000);
        let var_q = simpson(|s| s * s * density(s), -40.0, 40.0, 200_000) / norm_q;
        let expected_width = PI / (12.0 * alpha).sqrt();
        assert!((norm_q - 8.0 * alpha.sqrt()).abs() < 1e-10);
        assert!((var_q.sqrt() - expected_width).abs() < 1e-10);
        assert!((field_norm(&psi) - norm_q).abs() < 1e-10);
        assert!((localization_width(&psi).unwrap() - expected_width).abs() < 1e-9);
    }
    assert!((PI / 12f64.sqrt() - 0.906_899_682_117_108_9).abs() < 1e-15);
}

#[test]
fn sech_profile_turns_by_two_pi() {
    for alpha in [0.25f64, 1.0, 9.0] {
        let total = simpson(|s| 2.0 * alpha.sqrt() * sech(alpha.sqrt() * s), -60.0, 60.0, 200_000);
        assert!((total - 2.0 * PI).abs() < 1e-8, "{total}");
    }
}

#[test]
fn breather_stays_where_the_curvature_peaks() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    let psi0 = WaveField::from_fn(grid, |s| analytic_breather(1.0, s, 0.0).unwrap());
    let profile = CurvatureProfile::sech(1.0).unwrap();
    let (psi, report) = evolve_linear(&psi0, &profile, &StepControl::to_time(2.0, 1e-3, 200), None).unwrap();
    let (j, _) = psi.argmax_abs();
    assert_eq!(grid.point(j), 0.0);
    for (c, w) in report.centers.iter().zip(&report.widths) {
        assert!(c.abs() < 1e-10);
        assert!((w - PI / 12f64.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn free_gaussian_spreads_and_keeps_its_norm() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    let psi0 = WaveField::from_fn(grid, |s| Complex64::new((-0.5 * s * s).exp(), 0.0));
    let (psi, report) =
        evolve_linear(&psi0, &CurvatureProfile::Zero, &StepControl::to_time(2.0, 1e-3, 100), None).unwrap();
    assert!(report.relative_norm_drift() <= 1e-10);
    assert!(report.widths.windows(2).all(|w| w[1] > w[0]));
    // i ψ_u + ψ_ss = 0 spreads a unit Gaussian as σ(u)² = (1 + 4u²)/2.
    let expected = ((1.0 + 16.0) / 2.0f64).sqrt();
    assert!((localization_width(&psi).unwrap() - expected).abs() < 1e-8);
    // It is not the breather.
    let breather = WaveField::from_fn(grid, |s| analytic_breather(1.0, s, 2.0).unwrap());
    assert!(fidelity(&psi, &breather).unwrap() < 0.9);
}

#[test]
fn backward_soliton_velocity() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    let p = soliton_parameters(1.0, -0.5).unwrap();
    let (psi, report) =
        evolve_cnlse(&soliton_field(&p, grid, 0.0), &StepControl::to_time(4.0, 1e-3, 100), None).unwrap();
    assert!((envelope_velocity(&report).unwrap() + 0.5).abs() < 0.005);
    assert!((localization_center(&psi).unwrap() + 2.0).abs() < 1e-3);
}

#[test]
fn linear_and_cubic_runs_move_together() {
    let grid = Grid::new(-40.0, 40.0, 1024).unwrap();
    let p = soliton_parameters(1.0, 1.0).unwrap();
    let psi0 = soliton_field(&p, grid, 0.0);
    let control = StepControl::to_time(3.0, 1e-3, 100);
    let (_, lin) =
        evolve_linear(&psi0, &CurvatureProfile::kovalevskaya(1.0, 1.0).unwrap(), &control, None).unwrap();
    let (_, cub) = evolve_cnlse(&psi0, &control, None).unwrap();
    let (vl, vc) = (envelope_velocity(&lin).unwrap(), envelope_velocity(&cub).unwrap());
    assert!((vl - vc).abs() <= 0.01 * vc.abs(), "{vl} vs {vc}");
}

#[test]
fn frame_path_has_expected_sampling() {
    let profile = CurvatureProfile::sech(1.0).unwrap();
    let path: FramePath = reconstruct_curve(&profile, 1.0, PI, (-20.0, 20.0), 1e-3, &origin()).unwrap();
    assert_eq!(path.len(), 40_001);
    assert!((path.samples.last().unwrap().s1 - 20.0).abs() < 1e-12);
}

#[test]
fn traveling_curvature_solves_the_comoving_ode() {
    use conformon::kirchhoff_static::curvature_ode_residual;
    let (alpha, v, u, tau0) = (1.7, 0.6, 2.5, 0.4);
    let step = 1e-3;
    let k: Vec<f64> = (0..=40_000)
        .map(|i| kovalevskaya_curvature(alpha, v, -20.0 + v * u + i as f64 * step, u).unwrap())
        .collect();
    let r = curvature_ode_residual(&k, alpha + tau0 * tau0, tau0, step).unwrap();
    assert!(r.iter().all(|x| x.abs() <= 1e-5));
}
