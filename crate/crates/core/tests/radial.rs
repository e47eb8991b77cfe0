use std::f64::consts::PI;

use ptorsion::radial::{
    a_p, ball_critical_trajectory, energy_ball_critical, energy_slab, phase_portrait, radial_c_p, shoot_ball,
    slab_trajectory, solve_slab, trajectory_drift, PortraitParams, PortraitSystem, Variant, Window,
};
use ptorsion::solver::Regime;
use ptorsion::special::a_p_gamma;
use ptorsion::Error;

/// Power series of the Bessel function J0, accurate for |x| < 10.
fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

fn j0_first_root() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn bessel_oracle_matches_tabulated_root() {
    assert!((j0_first_root() - 2.404_825_557_695_773).abs() < 1e-12);
}

#[test]
fn a_p_values() {
    assert!((a_p(1.0) - 2.0).abs() < 1e-10);
    assert!((a_p(2.0) - PI / 2.0).abs() < 1e-10);
    for p in [1.0, 1.5, 2.0, 3.0, 4.0, 10.0] {
        assert!((a_p(p) - a_p_gamma(p)).abs() < 1e-9, "p = {p}");
    }
}

#[test]
fn slab_p1_is_the_parabola() {
    let prof = solve_slab(1.0, 2.0, 1e-13).unwrap();
    assert!((prof.u_max() - 1.0).abs() < 1e-8);
    for s in prof.samples.iter().step_by(997) {
        assert!((s.u - (1.0 - s.r * s.r)).abs() < 1e-8, "x = {}", s.r);
    }
}

#[test]
fn slab_p2_is_the_cosine_mode() {
    let prof = solve_slab(2.0, PI * PI / 4.0, 1e-13).unwrap();
    assert!((prof.lambda - PI * PI / 4.0).abs() < 1e-9);
    let worst = prof.samples.iter().map(|s| (s.u - (PI * s.r / 2.0).cos()).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn slab_equality_in_the_inradius_bound() {
    for p in [1.0, 1.5, 2.0, 3.0] {
        let prof = solve_slab(p, 1.0, 1e-13).unwrap();
        let lhs = prof.u_max().powf(2.0 - p);
        let rhs = 2.0 * prof.lambda / (p * a_p_gamma(p).powi(2));
        assert!((lhs - rhs).abs() / rhs < 1e-6, "p = {p}: {lhs} vs {rhs}");
        assert!((prof.first_zero - 1.0).abs() < 1e-9);
    }
}

#[test]
fn slab_profiles_are_symmetric_and_positive() {
    let prof = solve_slab(3.0, 1.0, 1e-13).unwrap();
    let m = prof.samples.len();
    let mid = &prof.samples[m / 2];
    assert!(mid.r.abs() < 1e-12);
    assert!(mid.u_prime.abs() < 1e-7 * prof.u_max());
    for k in 1..m - 1 {
        assert!(prof.samples[k].u > 0.0);
        assert!((prof.samples[k].u - prof.samples[m - 1 - k].u).abs() < 1e-8);
    }
}

#[test]
fn slab_energy_is_conserved() {
    assert_eq!(energy_slab(0.0, 1.0, 2.5, 7.0), 1.0);
    assert!((energy_slab(1.0, 0.0, 1.5, 1.0) - 4.0 / 3.0).abs() < 1e-15);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let prof = solve_slab(p, 1.0, 1e-13).unwrap();
        let (lo, hi) = prof
            .samples
            .iter()
            .map(|s| energy_slab(s.u, s.u_prime, p, prof.lambda))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
        assert!(hi - lo <= 1e-8, "p = {p}: drift {}", hi - lo);
        // from the maximum down to just above the zero, where the force is smooth
        let path = slab_trajectory(1.0, 0.0, p, 1.0, 1.0, 1e-4);
        assert!(path.last().unwrap()[1] > 0.0);
        assert!(trajectory_drift(&path, |u, v| energy_slab(u, v, p, 1.0)) <= 1e-8);
    }
}

#[test]
fn disk_p2_recovers_bessel_eigenvalue() {
    let j = j0_first_root();
    let prof = shoot_ball(2, 2.0, 1e-14).unwrap();
    assert!((prof.lambda - j * j).abs() < 1e-6, "{}", prof.lambda);
    assert!((radial_c_p(&prof) - j * j).abs() < 1e-5);
    assert!(prof.samples[0].u_prime == 0.0);
    assert!(prof.samples.last().unwrap().u.abs() < 1e-8);
}

#[test]
fn disk_p1_is_the_torsion_function() {
    let prof = shoot_ball(2, 1.0, 1e-14).unwrap();
    assert_eq!(prof.lambda, 2.0);
    assert!((prof.samples[0].u - 0.5).abs() < 1e-8);
    for s in prof.samples.iter().step_by(1001) {
        assert!((s.u - (1.0 - s.r * s.r) / 2.0).abs() < 1e-8);
    }
    assert!((radial_c_p(&prof) - 8.0 / PI).abs() < 1e-6);
}

#[test]
fn three_ball_eigenvalue_is_pi_squared() {
    let prof = shoot_ball(3, 2.0, 1e-14).unwrap();
    assert!((radial_c_p(&prof) - PI * PI).abs() < 1e-5);
    // sin(πr)/(πr) mode
    for s in prof.samples.iter().skip(1).step_by(1003) {
        let x = PI * s.r;
        assert!((s.u - x.sin() / x).abs() < 1e-7);
    }
}

#[test]
fn critical_and_supercritical_shots_are_refused() {
    match shoot_ball(3, 6.0, 1e-12) {
        Err(Error::SupercriticalRefused { regime: Regime::Critical, .. }) => {}
        other => panic!("{other:?}"),
    }
    match shoot_ball(4, 5.0, 1e-12) {
        Err(Error::SupercriticalRefused { regime: Regime::Supercritical, .. }) => {}
        other => panic!("{other:?}"),
    }
    assert!(shoot_ball(3, 5.0, 1e-12).is_ok());
}

#[test]
fn ball_critical_energy_variants() {
    for v in [Variant::Printed, Variant::Conserved] {
        assert_eq!(energy_ball_critical(0.0, 0.0, 3, 1.0, v), 0.0);
    }
    assert!((energy_ball_critical(1.0, 0.0, 3, 1.0, Variant::Printed) + 1.0 / 3.0).abs() < 1e-15);

    let path = ball_critical_trajectory(0.3, 0.1, 3, 1.0, 10.0, 1e-4);
    let conserved = trajectory_drift(&path, |v, d| energy_ball_critical(v, d, 3, 1.0, Variant::Conserved));
    let printed = trajectory_drift(&path, |v, d| energy_ball_critical(v, d, 3, 1.0, Variant::Printed));
    assert!(conserved <= 1e-8, "{conserved}");
    assert!(printed > 1e-3, "{printed}");

    // dE/dt by central differences along the flow
    let dt = path[1][0] - path[0][0];
    let e: Vec<f64> = path.iter().map(|s| energy_ball_critical(s[1], s[2], 3, 1.0, Variant::Conserved)).collect();
    let worst = (1..e.len() - 1).map(|k| ((e[k + 1] - e[k - 1]) / (2.0 * dt)).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn slab_portrait_contains_closed_curve_through_unit_slope() {
    let params = PortraitParams { p: 1.5, n: 1, lambda: 1.0, variant: Variant::Conserved };
    let window = Window { u: [-2.0, 2.0], u_prime: [-2.0, 2.0] };
    let data = phase_portrait(PortraitSystem::SlabEnergy, params, &[1.0], window, 200).unwrap();
    assert!(data.max_level_error() <= 1e-9);
    assert_eq!(data.curves[0].len(), 1);
    let curve = &data.curves[0][0];
    assert_eq!(curve.first(), curve.last());
    for target in [[0.0, 1.0], [0.0, -1.0]] {
        let d = curve.iter().map(|q| (q[0] - target[0]).hypot(q[1] - target[1])).fold(f64::INFINITY, f64::min);
        assert!(d < 0.02, "{d}");
    }
}

#[test]
fn critical_portrait_has_separatrix_through_origin() {
    for variant in [Variant::Conserved, Variant::Printed] {
        let params = PortraitParams { p: 6.0, n: 3, lambda: 1.0, variant };
        let window = Window { u: [-1.5, 1.5], u_prime: [-1.0, 1.0] };
        let data = phase_portrait(PortraitSystem::BallCriticalEnergy, params, &[-0.05, 0.0, 0.1], window, 150).unwrap();
        assert!(data.max_level_error() <= 1e-9);
        let origin_dist = data.curves[1]
            .iter()
            .flatten()
            .map(|q| q[0].hypot(q[1]))
            .fold(f64::INFINITY, f64::min);
        assert!(origin_dist < 1e-9, "{origin_dist}");
    }
}

#[test]
fn level_below_window_minimum_gives_no_curves() {
    let params = PortraitParams { p: 2.0, n: 1, lambda: 1.0, variant: Variant::Conserved };
    let window = Window { u: [0.0, 1.0], u_prime: [0.0, 1.0] };
    let data = phase_portrait(PortraitSystem::SlabEnergy, params, &[-1.0], window, 20).unwrap();
    assert!(data.curves[0].is_empty());
    assert!(phase_portrait(PortraitSystem::SlabEnergy, params, &[1.0], Window { u: [1.0, 1.0], ..window }, 20).is_err());
}

#[test]
fn portrait_exports_are_deterministic() {
    let params = PortraitParams { p: 1.5, n: 1, lambda: 1.0, variant: Variant::Conserved };
    let window = Window { u: [-2.0, 2.0], u_prime: [-2.0, 2.0] };
    let a = phase_portrait(PortraitSystem::SlabEnergy, params, &[0.5, 1.0], window, 60).unwrap();
    let b = phase_portrait(PortraitSystem::SlabEnergy, params, &[0.5, 1.0], window, 60).unwrap();
    assert_eq!(a.level_csv(1), b.level_csv(1));
    assert_eq!(a.to_svg(), b.to_svg());
    assert!(a.level_csv(0).starts_with("curve,u,u_prime\n"));
    let manifest = a.manifest(&["l0.csv".into(), "l1.csv".into()]);
    assert_eq!(manifest["levels"][1]["file"], "l1.csv");
}

#[test]
fn disk_profiles_agree_with_grid_solves() {
    use std::sync::Arc;

    use ptorsion::geometry::{rasterize, DomainSpec};
    use ptorsion::solver::{solve_eigen, SolveOptions};

    let mask = Arc::new(rasterize(&DomainSpec::Disk { radius: 1.0 }, 1.0 / 64.0).unwrap());
    for p in [1.0, 1.5, 2.0, 3.0] {
        let radial = radial_c_p(&shoot_ball(2, p, 1e-14).unwrap());
        let grid = solve_eigen(&mask, p, &SolveOptions::default()).unwrap().c_p;
        let rel = (grid - radial).abs() / radial;
        assert!(rel < 0.02, "p = {p}: grid {grid} radial {radial} ({rel:.4})");
    }
}
