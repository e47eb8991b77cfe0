//! End-to-end acceptance gate. Each test prints one line with its verdict and
//! the sub-checks behind it, then asserts.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ptorsion::exitwalk::{compare_torsion, default_eps, wos_exit_time};
use ptorsion::field::{dirichlet_energy, laplacian_apply, lp_norm_p, phi_p, GridField};
use ptorsion::geometry::{rasterize, DomainSpec, GridMask};
use ptorsion::inequalities::*;
use ptorsion::radial::{
    ball_critical_trajectory, energy_ball_critical, energy_slab, phase_portrait, radial_c_p, shoot_ball,
    slab_trajectory, solve_slab, trajectory_drift, PortraitParams, PortraitSystem, Variant, Window,
};
use ptorsion::solver::{angular_deviation, log_concavity_check, random_positive_field, solve_eigen, SolveOptions};
use ptorsion::special::{a_p, a_p_gamma, a_p_quadrature};
use ptorsion::symmetrize::{distribution_volume, rearrange};

const H: f64 = 1.0 / 64.0;

struct Gate {
    name: &'static str,
    started: Instant,
    limit: Option<Duration>,
    checks: Vec<(String, bool)>,
}

impl Gate {
    fn new(name: &'static str) -> Gate {
        Gate { name, started: Instant::now(), limit: None, checks: Vec::new() }
    }

    fn within(mut self, secs: u64) -> Gate {
        self.limit = Some(Duration::from_secs(secs));
        self
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        if let Some(limit) = self.limit {
            self.check(format!("runtime {:.1}s <= {}s", elapsed.as_secs_f64(), limit.as_secs()), elapsed <= limit);
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
        let detail = if failed.is_empty() {
            format!("{} checks", self.checks.len())
        } else {
            format!("failed: {}", failed.join("; "))
        };
        println!("[{verdict}] {}: {detail}", self.name);
        assert!(failed.is_empty(), "{} failed: {}", self.name, failed.join("; "));
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Power series of J0.
fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

fn j01_squared() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let j = 0.5 * (lo + hi);
    j * j
}

fn disk() -> DomainSpec {
    DomainSpec::Disk { radius: 1.0 }
}

fn square() -> DomainSpec {
    DomainSpec::Rectangle { half_widths: [0.5, 0.5] }
}

fn mask(d: &DomainSpec, h: f64) -> Arc<GridMask> {
    Arc::new(rasterize(d, h).unwrap())
}

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

/// `C_p` on `[−1,1]×[−R,R]` for `R = 4, 8, 16` at spacing 1/16.
fn long_rectangles(p: f64) -> Vec<f64> {
    [4.0, 8.0, 16.0]
        .iter()
        .map(|&r| {
            let m = mask(&DomainSpec::Rectangle { half_widths: [1.0, r] }, 1.0 / 16.0);
            solve_eigen(&m, p, &SolveOptions::default()).unwrap().c_p
        })
        .collect()
}

#[test]
fn slab_eigenvalue_from_shooting_and_long_rectangles() {
    let mut g = Gate::new("slab p=2 eigenvalue").within(60);
    let target = PI * PI / 4.0;
    let lam = solve_slab(2.0, 2.0, 1e-13).unwrap().lambda;
    g.check(format!("shooting |Λ - π²/4| = {:.2e} <= 1e-6", (lam - target).abs()), (lam - target).abs() <= 1e-6);
    let c = long_rectangles(2.0);
    g.check(format!("grid values {c:?} decrease"), c[0] > c[1] && c[1] > c[2]);
    g.check("grid values stay above π²/4 less 2%", c.iter().all(|&v| v > target * (1.0 - 0.02)));
    g.check(format!("R = 16 within 2%: {:.3e}", rel(c[2], target)), rel(c[2], target) <= 0.02);
    g.finish();
}

#[test]
fn slab_degenerate_limits_on_long_rectangles() {
    let mut g = Gate::new("slab limits p=1 and p=3").within(120);
    let c1 = long_rectangles(1.0);
    g.check(format!("C_1 {c1:?} decreasing"), c1[0] > c1[1] && c1[1] > c1[2]);
    let ratio = c1[2] / c1[0];
    g.check(format!("C_1(16)/C_1(4) = {ratio:.4} < 0.3"), ratio < 0.3);
    let c3 = long_rectangles(3.0);
    g.check(format!("C_3 {c3:?} increasing"), c3[0] < c3[1] && c3[1] < c3[2]);
    // growth per doubling of R must not collapse
    let (first, last) = ((c3[1] / c3[0]).ln(), (c3[2] / c3[1]).ln());
    g.check(format!("C_3 log-growth {last:.4} >= half of {first:.4}"), last >= 0.5 * first);
    g.finish();
}

#[test]
fn disk_endpoints() {
    let mut g = Gate::new("disk endpoints p=1, p=2").within(60);
    let (torsion, bessel) = (8.0 / PI, j01_squared());
    let m = mask(&disk(), H);
    let grid1 = solve_eigen(&m, 1.0, &SolveOptions::default()).unwrap().c_p;
    let grid2 = solve_eigen(&m, 2.0, &SolveOptions::default()).unwrap().c_p;
    g.check(format!("grid C_1 vs 8/π: {:.3e} <= 2%", rel(grid1, torsion)), rel(grid1, torsion) <= 0.02);
    g.check(format!("grid C_2 vs j²: {:.3e} <= 1.5%", rel(grid2, bessel)), rel(grid2, bessel) <= 0.015);
    let rad1 = radial_c_p(&shoot_ball(2, 1.0, 1e-14).unwrap());
    let rad2 = radial_c_p(&shoot_ball(2, 2.0, 1e-14).unwrap());
    g.check(format!("radial C_1 vs 8/π: {:.3e} <= 1e-5", rel(rad1, torsion)), rel(rad1, torsion) <= 1e-5);
    g.check(format!("radial C_2 vs j²: {:.3e} <= 1e-5", rel(rad2, bessel)), rel(rad2, bessel) <= 1e-5);
    g.check(format!("grid/radial p=1 {:.3e} <= 2%", rel(grid1, rad1)), rel(grid1, rad1) <= 0.02);
    g.check(format!("grid/radial p=2 {:.3e} <= 2%", rel(grid2, rad2)), rel(grid2, rad2) <= 0.02);
    g.finish();
}

#[test]
fn energy_identity_and_rigidity_product() {
    let mut g = Gate::new("energy identity and C_p·R_p = 1");
    let cases = [(disk(), 1.0), (disk(), 1.5), (disk(), 2.0), (disk(), 3.0), (square(), 1.0), (square(), 2.0), (square(), 3.0)];
    for (d, p) in cases {
        let res = solve_eigen(&mask(&d, H), p, &SolveOptions::default()).unwrap();
        let defect = res.energy_identity_defect();
        g.check(format!("{} p={p}: identity defect {defect:.2e} <= 1e-6", d.kind_name()), defect <= 1e-6);
        let product = res.c_p * res.r_p;
        g.check(
            format!("{} p={p}: |C_p·R_p - 1| = {:.3e} <= 1e-10", d.kind_name(), (product - 1.0).abs()),
            (product - 1.0).abs() <= 1e-10,
        );
    }
    g.finish();
}

#[test]
fn scaling_law_exponents() {
    let mut g = Gate::new("scaling law exponents");
    for d in [disk(), square()] {
        for p in [1.0, 2.0, 3.0] {
            for r in [0.5, 2.0] {
                let rep = check_scaling_law(&d, p, r, &cfg()).unwrap();
                let measured = rep.inputs["measured_exponent"].as_f64().unwrap();
                let n = 2.0;
                let expected = n - 2.0 - 2.0 * n / p;
                g.check(
                    format!("{} p={p} r={r}: exponent {measured:.6} vs {expected:.6}", d.kind_name()),
                    rel(measured, expected) <= 0.02,
                );
            }
        }
    }
    g.finish();
}

#[test]
fn holder_comparison_is_strict() {
    let mut g = Gate::new("volume-normalized C_p strictly decreasing in p");
    let c = cfg();
    let need = 5.0 * c.solver_tolerance();
    for d in [disk(), square()] {
        for (p, q) in [(1.0, 2.0), (2.0, 3.0), (1.5, 2.5)] {
            let rep = check_holder_comparison(&d, p, q, &c).unwrap();
            g.check(
                format!("{} ({p},{q}): margin {:.3e} >= {need:.1e}", d.kind_name(), rep.margin),
                rep.pass && rep.margin >= need,
            );
        }
    }
    let fr = check_frequency_rigidity(&disk(), &c).unwrap();
    g.check(format!("disk λ = {:.5} < 4A/P = {:.5}", fr.lhs, fr.rhs), fr.pass);
    g.finish();
}

#[test]
fn faber_krahn_square_against_disk() {
    let mut g = Gate::new("equal-area disk minimizes C_p");
    let c = cfg();
    for p in [1.0, 1.5, 2.0, 3.0] {
        let rep = check_faber_krahn(&square(), p, &c).unwrap();
        let gap = rep.inputs["relative_margin_to_ball"].as_f64().unwrap();
        g.check(format!("square p={p}: gap {gap:.4} >= 3%"), rep.pass && gap >= 0.03);
    }
    for p in [1.0, 2.0] {
        let rep = check_faber_krahn(&disk(), p, &c).unwrap();
        g.check(
            format!("disk p={p}: |margin| {:.2e} <= {:.1e}", rep.margin.abs(), c.solver_tolerance()),
            rep.margin.abs() <= c.solver_tolerance(),
        );
    }
    g.finish();
}

#[test]
fn inradius_bound_and_slab_equality() {
    let mut g = Gate::new("inradius bound with A_p");
    let c = cfg();
    let domains =
        [disk(), DomainSpec::Rectangle { half_widths: [1.0, 0.5] }, DomainSpec::Rectangle { half_widths: [0.5, 0.5] }];
    for d in &domains {
        for p in [1.0, 2.0, 3.0] {
            let rep = check_pfunction_bound(d, p, &c).unwrap();
            g.check(format!("{} p={p}: {:.5} <= {:.5}", rep.claim_id, rep.lhs, rep.rhs), rep.pass && rep.lhs <= rep.rhs);
        }
    }
    for p in [1.0, 1.5, 2.0, 3.0] {
        let rep = check_pfunction_slab(p, 1e-6).unwrap();
        g.check(format!("slab p={p}: equality margin {:.2e}", rep.margin), rep.pass);
    }
    // Δu + 2 = 0 on the unit slab: u_M = R² exactly
    let u_m = solve_slab(1.0, 2.0, 1e-13).unwrap().u_max();
    g.check(format!("slab p=1: u_M = {u_m:.9} vs R² = 1"), (u_m - 1.0).abs() <= 1e-6);
    let lam = solve_slab(2.0, 2.0, 1e-13).unwrap().lambda;
    g.check(format!("slab p=2: λ = {lam:.9} vs π²/4"), (lam - PI * PI / 4.0).abs() <= 1e-6);
    g.finish();
}

#[test]
fn a_p_two_routes() {
    let mut g = Gate::new("A_p quadrature and Gamma routes");
    for p in [1.0, 1.5, 2.0, 3.0, 10.0] {
        let (q, gm) = (a_p_quadrature(p), a_p_gamma(p));
        g.check(format!("p={p}: |quad - gamma| = {:.2e}", (q - gm).abs()), (q - gm).abs() <= 1e-9);
    }
    g.check("A_1 = 2", (a_p(1.0) - 2.0).abs() <= 1e-10);
    g.check("A_2 = π/2", (a_p(2.0) - PI / 2.0).abs() <= 1e-10);
    g.finish();
}

#[test]
fn energy_conservation_along_trajectories() {
    let mut g = Gate::new("energy conservation");
    for p in [1.0, 1.5, 2.0, 3.0] {
        let prof = solve_slab(p, 1.0, 1e-13).unwrap();
        let drift = trajectory_drift(
            &prof.samples.iter().map(|s| [s.r, s.u, s.u_prime]).collect::<Vec<_>>(),
            |u, v| energy_slab(u, v, p, prof.lambda),
        );
        g.check(format!("slab profile p={p}: drift {drift:.2e} <= 1e-8"), drift <= 1e-8);
        let path = slab_trajectory(1.0, 0.0, p, 1.0, 1.0, 1e-4);
        let drift = trajectory_drift(&path, |u, v| energy_slab(u, v, p, 1.0));
        g.check(format!("slab trajectory p={p}: drift {drift:.2e} <= 1e-8"), drift <= 1e-8);
    }
    for n in [3, 4, 5] {
        let path = ball_critical_trajectory(0.3, 0.1, n, 1.0, 10.0, 1e-4);
        let conserved = trajectory_drift(&path, |v, d| energy_ball_critical(v, d, n, 1.0, Variant::Conserved));
        let printed = trajectory_drift(&path, |v, d| energy_ball_critical(v, d, n, 1.0, Variant::Printed));
        g.check(format!("ball n={n}: conserved drift {conserved:.2e} <= 1e-8"), conserved <= 1e-8);
        println!("  ball n={n}: drift of the printed quadratic coefficient {printed:.3e}");
    }
    g.finish();
}

#[test]
fn phase_portrait_level_sets() {
    let mut g = Gate::new("phase portrait level sets");
    let slab = phase_portrait(
        PortraitSystem::SlabEnergy,
        PortraitParams { p: 1.5, n: 1, lambda: 1.0, variant: Variant::Conserved },
        &[0.25, 0.5, 1.0, 2.0],
        Window { u: [-2.5, 2.5], u_prime: [-2.0, 2.0] },
        400,
    )
    .unwrap();
    g.check(format!("slab p=3/2 level error {:.2e}", slab.max_level_error()), slab.max_level_error() <= 1e-9);
    g.check("slab p=3/2 every level non-empty", slab.curves.iter().all(|c| !c.is_empty()));
    for variant in [Variant::Conserved, Variant::Printed] {
        let ball = phase_portrait(
            PortraitSystem::BallCriticalEnergy,
            PortraitParams { p: 6.0, n: 3, lambda: 1.0, variant },
            &[-0.03, 0.0, 0.05, 0.2],
            Window { u: [-1.6, 1.6], u_prime: [-1.2, 1.2] },
            400,
        )
        .unwrap();
        g.check(format!("ball n=3 {variant:?} level error {:.2e}", ball.max_level_error()), ball.max_level_error() <= 1e-9);
        g.check(format!("ball n=3 {variant:?} every level non-empty"), ball.curves.iter().all(|c| !c.is_empty()));
    }
    g.finish();
}

#[test]
fn exit_time_oracle() {
    let mut g = Gate::new("walk-on-spheres exit times").within(120);
    for (i, r) in [0.0, 0.2, 0.4, 0.6, 0.8].into_iter().enumerate() {
        let pt = [r, 0.0];
        let est = wos_exit_time(&disk(), pt, 100_000, default_eps(&disk(), pt).unwrap(), 2024 + i as u64).unwrap();
        let exact = (1.0 - r * r) / 2.0;
        g.check(
            format!("disk r={r}: |{:.5} - {exact:.5}| <= 3·{:.2e}", est.mean, est.std_error),
            (est.mean - exact).abs() <= 3.0 * est.std_error,
        );
    }
    let rep = compare_torsion(&square(), &[[0.0, 0.0]], 100_000, 7, H).unwrap();
    g.check(format!("square center: gap/allowance {:.3}", rep.lhs), rep.pass);
    g.finish();
}

#[test]
fn tent_energies() {
    let mut g = Gate::new("tent energies");
    let m = mask(&disk(), H);
    let mut last = f64::INFINITY;
    for delta in [0.5, 0.2, 0.1] {
        let e = dirichlet_energy(&ptorsion::inequalities::tent_field(&m, delta));
        let exact = PI * (1.0 + delta) / (1.0 - delta);
        g.check(format!("δ={delta}: {e:.5} vs {exact:.5}"), rel(e, exact) <= 0.02);
        g.check(format!("δ={delta}: decreasing toward π"), e < last && e > PI);
        last = e;
    }
    g.finish();
}

#[test]
fn property_suites() {
    let mut g = Gate::new("property suites");
    let m = mask(&disk(), 1.0 / 32.0);

    let u = random_positive_field(&m, 3);
    let worst_scale = [1e-3, 0.5, 7.0, 1e4]
        .iter()
        .flat_map(|&k| [1.0, 1.5, 2.0, 3.0].map(|p| rel(phi_p(&u.scaled(k), p).unwrap(), phi_p(&u, p).unwrap())))
        .fold(0.0, f64::max);
    g.check(format!("Φ_p scale invariance {worst_scale:.2e} <= 1e-12"), worst_scale <= 1e-12);

    let v = random_positive_field(&m, 4);
    let (a, b) = (laplacian_apply(&u).dot(&v), u.dot(&laplacian_apply(&v)));
    g.check(format!("Laplacian symmetry {:.2e}", rel(a, b)), rel(a, b) <= 1e-13);

    let r = rearrange(&u).unwrap();
    let norm_gap = [1.0, 2.0, 3.0]
        .iter()
        .map(|&q| rel(lp_norm_p(&r.field, q).unwrap(), lp_norm_p(&u, q).unwrap()))
        .fold(0.0, f64::max);
    g.check(format!("rearrangement norms {norm_gap:.2e}"), norm_gap <= 1e-13);
    let same_distribution =
        [0.1, 0.3, 0.6, 0.9].iter().all(|&t| distribution_volume(&u, t) == distribution_volume(&r.field, t));
    g.check("rearrangement distribution exact", same_distribution);
    let sorted_values = |f: &GridField| {
        let mut s = f.values().to_vec();
        s.sort_by(f64::total_cmp);
        s
    };
    g.check("rearrangement value multiset", sorted_values(&u) == sorted_values(&r.field));

    let dm = mask(&disk(), H);
    for p in [1.0, 1.5, 2.0, 3.0] {
        let res = solve_eigen(&dm, p, &SolveOptions::default()).unwrap();
        g.check(format!("p={p}: min u = {:.2e} > 0", res.u.min()), res.u.min() > 0.0);
        let dev = angular_deviation(&res.u, H);
        g.check(format!("p={p}: angular deviation {dev:.4} <= 3%"), dev <= 0.03);
    }

    let opts = SolveOptions::default();
    let seeded: Vec<f64> = [Some(1), Some(2), None]
        .iter()
        .map(|&s| solve_eigen(&m, 3.0, &SolveOptions { seed: s, ..opts }).unwrap().c_p)
        .collect();
    let spread = seeded.iter().map(|&c| rel(c, seeded[2])).fold(0.0, f64::max);
    g.check(format!("seed spread {spread:.2e} <= 10·tol"), spread <= 10.0 * opts.tol);

    for p in [1.0, 2.0] {
        let res = solve_eigen(&dm, p, &opts).unwrap();
        let rep = log_concavity_check(&res, &disk()).unwrap();
        g.check(format!("log-concavity p={p}: {:.2e} <= {:.2e}", rep.lhs, rep.rhs), rep.pass);
    }
    g.finish();
}
