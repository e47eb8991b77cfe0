//! Checks of the scaling law, monotonicity, Hölder comparison, Faber–Krahn,
//! inradius and P-function bounds, continuity in `p`, and the `p → ∞` probe.
//!
//! Every check solves from scratch and returns [`CheckReport`]s whose verdicts
//! can be recomputed from the stored numbers.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::check::{CheckReport, Relation, Verdict};
use crate::error::{Error, Result};
use crate::exitwalk;
use crate::field::{dirichlet_energy, phi_p, GridField};
use crate::geometry::{equal_count_disk, inradius, rasterize, scale_domain, volume, DomainSpec, GridMask};
use crate::radial::{radial_c_p, shoot_ball, solve_slab};
use crate::solver::{log_concavity_check, solve_eigen, SolveOptions, SolveResult};
use crate::special::a_p;

/// Relative slack allowed by the inradius and P-function checks.
pub const GRID_SLACK: f64 = 0.02;

/// Resolution and solver settings shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub h: f64,
    pub solve: SolveOptions,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { h: 1.0 / 64.0, solve: SolveOptions::default() }
    }
}

impl CheckConfig {
    /// Accuracy of one solve: the looser of the stopping tolerances.
    pub fn solver_tolerance(&self) -> f64 {
        self.solve.tol.max(self.solve.residual_tol)
    }

    /// Tolerance of strict comparisons between two solves: three times their combined tolerance.
    pub fn strict_tolerance(&self) -> f64 {
        3.0 * 2.0 * self.solver_tolerance()
    }
}

fn domain_value(d: &DomainSpec) -> Value {
    serde_json::to_value(d).unwrap_or(Value::Null)
}

/// Rasterizes and solves; also returns the mask.
pub fn solve_domain(domain: &DomainSpec, p: f64, h: f64, opts: &SolveOptions) -> Result<(Arc<GridMask>, SolveResult)> {
    let mask = Arc::new(rasterize(domain, h)?);
    let res = solve_eigen(&mask, p, opts)?;
    Ok((mask, res))
}

fn tag(domain: &DomainSpec) -> String {
    match domain {
        DomainSpec::Disk { radius } => format!("disk(r={radius})"),
        DomainSpec::Rectangle { half_widths: [a, b] } => format!("rectangle({}x{})", 2.0 * a, 2.0 * b),
        DomainSpec::Annulus { r_in, r_out } => format!("annulus({r_in},{r_out})"),
        DomainSpec::Polygon { vertices } => format!("polygon({})", vertices.len()),
        other => other.kind_name().to_string(),
    }
}

/// `C_p(rD) = r^{n−2−2n/p} C_p(D)` with `rD` rasterized at spacing `r·h`.
pub fn check_scaling_law(domain: &DomainSpec, p: f64, r: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let scaled = scale_domain(domain, r)?;
    let (m1, base) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    let (m2, big) = solve_domain(&scaled, p, cfg.h * r, &cfg.solve)?;
    let n = 2.0;
    let exponent = n - 2.0 - 2.0 * n / p;
    let measured = (big.c_p / base.c_p).ln() / r.ln();
    let v1 = volume(&m1).powf(2.0 / p) * base.c_p;
    let v2 = volume(&m2).powf(2.0 / p) * big.c_p;
    Ok(CheckReport::new(
        format!("scaling_law.{}.p={p}.r={r}", tag(domain)),
        big.c_p,
        Relation::Equal,
        r.powf(exponent) * base.c_p,
        GRID_SLACK,
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("r", r)
    .input("h", cfg.h)
    .input("expected_exponent", exponent)
    .input("measured_exponent", measured)
    .input("volume_normalized_ratio", v2 / v1)
    .input("volume_normalized_expected", r.powf(n - 2.0)))
}

/// `C_p(inner) ≥ C_p(outer)` when the inner mask is contained in the outer one.
pub fn check_domain_monotonicity(inner: &DomainSpec, outer: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let mi = Arc::new(rasterize(inner, cfg.h)?);
    let mo = Arc::new(rasterize(outer, cfg.h)?);
    if !mi.is_subset_of(&mo) {
        return Err(Error::NotNested);
    }
    let ci = solve_eigen(&mi, p, &cfg.solve)?.c_p;
    let co = solve_eigen(&mo, p, &cfg.solve)?.c_p;
    Ok(CheckReport::new(
        format!("domain_monotonicity.{}_in_{}.p={p}", tag(inner), tag(outer)),
        ci,
        Relation::GreaterEqual,
        co,
        cfg.solver_tolerance(),
    )
    .input("inner", domain_value(inner))
    .input("outer", domain_value(outer))
    .input("p", p)
    .input("h", cfg.h))
}

fn holder_sides(domain: &DomainSpec, p: f64, q: f64, cfg: &CheckConfig) -> Result<(f64, f64, f64, f64, f64)> {
    if !(p >= 1.0 && q > p) {
        return Err(Error::InvalidInput(format!("need 1 <= p < q, got p = {p}, q = {q}")));
    }
    let (mask, sp) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    let sq = solve_eigen(&mask, q, &cfg.solve)?;
    let v = volume(&mask);
    Ok((v.powf(2.0 / p) * sp.c_p, v.powf(2.0 / q) * sq.c_p, v, sp.c_p, sq.c_p))
}

/// `V^{2/p} C_p > V^{2/q} C_q` for `p < q`.
pub fn check_holder_comparison(domain: &DomainSpec, p: f64, q: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let (lhs, rhs, v, cp, cq) = holder_sides(domain, p, q, cfg)?;
    Ok(CheckReport::new(
        format!("holder_comparison.{}.p={p}.q={q}", tag(domain)),
        lhs,
        Relation::Greater,
        rhs,
        cfg.strict_tolerance(),
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("q", q)
    .input("h", cfg.h)
    .input("volume", v)
    .input("c_p", cp)
    .input("c_q", cq))
}

/// The `p = 1, q = 2` case in classical form, `λ < 4A/P`.
pub fn check_frequency_rigidity(domain: &DomainSpec, cfg: &CheckConfig) -> Result<CheckReport> {
    let (mask, torsion) = solve_domain(domain, 1.0, cfg.h, &cfg.solve)?;
    let lambda = solve_eigen(&mask, 2.0, &cfg.solve)?.c_p;
    let area = volume(&mask);
    let rigidity = torsion.r_p;
    Ok(CheckReport::new(
        format!("frequency_rigidity.{}", tag(domain)),
        lambda,
        Relation::Less,
        4.0 * area / rigidity,
        cfg.strict_tolerance(),
    )
    .input("domain", domain_value(domain))
    .input("h", cfg.h)
    .input("area", area)
    .input("torsional_rigidity", rigidity))
}

/// `C_p(D) ≥ C_p(B)` against a lattice disk with the same cell count.
pub fn check_faber_krahn(domain: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let (mask, sd) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    let (disk, radius) = equal_count_disk(&mask)?;
    let sb = solve_eigen(&Arc::new(disk.clone()), p, &cfg.solve)?;
    let tol = cfg.solver_tolerance();
    let mut report = CheckReport::new(
        format!("faber_krahn.{}.p={p}", tag(domain)),
        sd.c_p,
        Relation::GreaterEqual,
        sb.c_p,
        tol,
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("h", cfg.h)
    .input("cells", mask.len())
    .input("ball_cells", disk.len())
    .input("ball_radius", radius)
    .input("relative_margin_to_ball", (sd.c_p - sb.c_p) / sb.c_p);
    if report.margin.abs() < tol {
        report = report.note("near equality: the domain is a ball at this resolution");
    }
    Ok(report)
}

/// `C_p(D) ≤ C_p(B_R)` for the inball, with `2%` slack.
///
/// The inball is the lattice disk of radius `R = inradius(mask)`; centered on
/// the deepest cell it lies inside the mask, and lattice translations do not
/// change the discrete problem, so it is solved centered at the origin.
pub fn check_inradius_ball_maximizes(domain: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let (mask, sd) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    let r = inradius(&mask);
    let (_, sb) = solve_domain(&DomainSpec::Disk { radius: r }, p, cfg.h, &cfg.solve)?;
    let exact_ball = shoot_ball(2, p, 1e-14).ok().map(|prof| radial_c_p(&prof) * r.powf(-4.0 / p));
    Ok(CheckReport::new(
        format!("inradius_ball_maximizes.{}.p={p}", tag(domain)),
        sd.c_p,
        Relation::LessEqual,
        sb.c_p,
        GRID_SLACK,
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("h", cfg.h)
    .input("inradius", r)
    .input("radial_ball_value", exact_ball))
}

/// `u_M^{2−p} ≤ 2ΛR²/(pA_p²)` from the calibrated solution, with `2%` slack.
/// Convex kinds only.
pub fn check_pfunction_bound(domain: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    if !matches!(domain, DomainSpec::Disk { .. } | DomainSpec::Rectangle { .. }) {
        return Err(Error::NonConvexDomainRefused(domain.kind_name().to_string()));
    }
    let (mask, res) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    let r = inradius(&mask);
    let u_m = res.calibrated_u.max();
    let lam = res.calibrated_lambda;
    let ap = a_p(p);
    let mut report = CheckReport::new(
        format!("pfunction_bound.{}.p={p}", tag(domain)),
        u_m.powf(2.0 - p),
        Relation::LessEqual,
        2.0 * lam * r * r / (p * ap * ap),
        GRID_SLACK,
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("h", cfg.h)
    .input("u_max", u_m)
    .input("lambda", lam)
    .input("inradius", r)
    .input("a_p", ap);
    if p == 1.0 {
        report = report.note(format!("p = 1 form: u_M = {u_m:.6} <= R^2 = {:.6}", r * r));
    } else if p == 2.0 {
        report = report.note(format!("p = 2 form: lambda = {lam:.6} >= pi^2/(4R^2) = {:.6}", PI * PI / (4.0 * r * r)));
    }
    Ok(report)
}

/// The P-function bound on the slab cross-section, where it is an equality.
pub fn check_pfunction_slab(p: f64, tol: f64) -> Result<CheckReport> {
    let prof = solve_slab(p, 1.0, 1e-13)?;
    let ap = a_p(p);
    Ok(CheckReport::new(
        format!("pfunction_bound.slab.p={p}"),
        prof.u_max().powf(2.0 - p),
        Relation::Equal,
        2.0 * prof.lambda / (p * ap * ap),
        tol,
    )
    .input("p", p)
    .input("lambda", prof.lambda)
    .input("u_max", prof.u_max())
    .input("half_width", 1.0)
    .note("equality case"))
}

/// The radial tent function of the unit disk: 1 for `r < δ`, then linear down to 0 at `r = 1`.
pub fn tent_field(mask: &Arc<GridMask>, delta: f64) -> GridField {
    GridField::from_fn(Arc::clone(mask), |x, y| {
        let r = x.hypot(y);
        if r < delta {
            1.0
        } else {
            ((1.0 - r) / (1.0 - delta)).max(0.0)
        }
    })
}

/// Numerical evidence about `C_∞`. Produces:
/// `V^{2/p}C_p` decreasing along `p_list` on the unit disk; the tent energies
/// against `π(1+δ)/(1−δ)` and their decrease as `δ → 0`; `C_p ≤ Φ_p(tent)` at
/// the largest `p`; and the disk/square gap in `C_p` shrinking from the
/// smallest to the largest `p`. No limit value is asserted.
pub fn probe_c_infinity(p_list: &[f64], delta_list: &[f64], cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    if p_list.len() < 2 || p_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("p_list must be increasing with at least two entries".into()));
    }
    if delta_list.is_empty() || delta_list.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(Error::InvalidInput("deltas must lie in (0, 1)".into()));
    }
    let disk = DomainSpec::Disk { radius: 1.0 };
    let square = DomainSpec::Rectangle { half_widths: [1.0, 1.0] };
    let dmask = Arc::new(rasterize(&disk, cfg.h)?);
    let smask = Arc::new(rasterize(&square, cfg.h)?);
    let solves: Vec<(f64, f64)> = p_list
        .par_iter()
        .map(|&p| Ok((solve_eigen(&dmask, p, &cfg.solve)?.c_p, solve_eigen(&smask, p, &cfg.solve)?.c_p)))
        .collect::<Result<_>>()?;
    let vd = volume(&dmask);
    let mut out = Vec::new();
    for (i, w) in p_list.windows(2).enumerate() {
        let (a, b) = (vd.powf(2.0 / w[0]) * solves[i].0, vd.powf(2.0 / w[1]) * solves[i + 1].0);
        out.push(
            CheckReport::new(format!("c_infinity.holder_trend.p={}.q={}", w[0], w[1]), a, Relation::Greater, b, cfg.strict_tolerance())
                .input("p", w[0])
                .input("q", w[1])
                .input("h", cfg.h),
        );
    }
    let mut energies = Vec::new();
    for &delta in delta_list {
        let e = dirichlet_energy(&tent_field(&dmask, delta));
        energies.push((delta, e));
        out.push(
            CheckReport::new(
                format!("c_infinity.tent_energy.delta={delta}"),
                e,
                Relation::Equal,
                PI * (1.0 + delta) / (1.0 - delta),
                GRID_SLACK,
            )
            .input("delta", delta)
            .input("h", cfg.h),
        );
    }
    energies.sort_by(|a, b| a.0.total_cmp(&b.0));
    if energies.len() > 1 {
        let (small, large) = (energies[0], energies[energies.len() - 1]);
        out.push(
            CheckReport::new("c_infinity.tent_trend", small.1, Relation::Less, large.1, cfg.solver_tolerance())
                .input("delta_small", small.0)
                .input("delta_large", large.0)
                .input("limit", PI)
                .note("energies decrease toward pi as delta shrinks"),
        );
    }
    let p_max = p_list[p_list.len() - 1];
    let tent = tent_field(&dmask, energies[0].0);
    let tent_phi = phi_p(&tent, p_max)?;
    out.push(
        CheckReport::new("c_infinity.tent_upper_bound", solves[solves.len() - 1].0, Relation::LessEqual, tent_phi, cfg.solver_tolerance())
            .input("p", p_max)
            .input("delta", energies[0].0)
            .input("h", cfg.h)
            .note("the tent is admissible, so it bounds the minimum"),
    );
    let gap = |k: usize| (solves[k].1 - solves[k].0).abs() / solves[k].0;
    out.push(
        CheckReport::new("c_infinity.domain_independence", gap(solves.len() - 1), Relation::Less, gap(0), cfg.solver_tolerance())
            .input("p_min", p_list[0])
            .input("p_max", p_max)
            .input("disk", solves.iter().map(|s| s.0).collect::<Vec<_>>())
            .input("square", solves.iter().map(|s| s.1).collect::<Vec<_>>())
            .note("relative disk/square gap at the largest p against the smallest p; qualitative"),
    );
    Ok(out)
}

/// Along a sorted `p_grid`, each jump `|C(p_{i+1}) − C(p_i)|` is at most five
/// times the neighbouring secant slope times the spacing. `lhs` is the largest
/// ratio of jump to that allowance divided by five.
pub fn check_continuity_in_p(domain: &DomainSpec, p_grid: &[f64], cfg: &CheckConfig) -> Result<CheckReport> {
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("p_grid must be strictly increasing".into()));
    }
    let mask = Arc::new(rasterize(domain, cfg.h)?);
    let values: Vec<f64> = p_grid
        .par_iter()
        .map(|&p| Ok(solve_eigen(&mask, p, &cfg.solve)?.c_p))
        .collect::<Result<_>>()?;
    let slopes: Vec<f64> = (1..values.len())
        .map(|i| (values[i] - values[i - 1]).abs() / (p_grid[i] - p_grid[i - 1]))
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..slopes.len() {
        let neighbour = [i.checked_sub(1), Some(i + 1).filter(|&j| j < slopes.len())]
            .into_iter()
            .flatten()
            .map(|j| slopes[j])
            .fold(0.0, f64::max);
        if neighbour > 0.0 {
            worst = worst.max(slopes[i] / neighbour);
        }
    }
    let max_spacing = p_grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(CheckReport::new(format!("continuity_in_p.{}", tag(domain)), worst, Relation::LessEqual, 5.0, 0.0)
        .input("domain", domain_value(domain))
        .input("p_grid", p_grid.to_vec())
        .input("c_p", values)
        .input("max_spacing", max_spacing)
        .input("h", cfg.h)
        .note("lhs is the largest jump slope over its neighbouring secant slope"))
}

/// `|Φ_p − Λ(∫u^p)^{(p−2)/p}| / Φ_p ≤ 1e−6` with `Λ` from the discrete PDE.
pub fn check_energy_identity(domain: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let (_, res) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    Ok(CheckReport::new(format!("energy_identity.{}.p={p}", tag(domain)), res.energy_identity_defect(), Relation::LessEqual, 1e-6, 0.0)
        .input("domain", domain_value(domain))
        .input("p", p)
        .input("h", cfg.h)
        .input("c_p", res.c_p)
        .input("r_p", res.r_p))
}

/// `C_p · R_p` as defined, which equals 4.
pub fn check_rigidity_product(domain: &DomainSpec, p: f64, cfg: &CheckConfig) -> Result<CheckReport> {
    let (_, res) = solve_domain(domain, p, cfg.h, &cfg.solve)?;
    Ok(CheckReport::new(
        format!("rigidity_product.{}.p={p}", tag(domain)),
        res.rigidity_product(),
        Relation::Equal,
        4.0,
        1e-10,
    )
    .input("domain", domain_value(domain))
    .input("p", p)
    .input("h", cfg.h)
    .note("R_p = (4/Lambda)(int u^p)^((2-p)/p) makes the product 4; a product of 1 would need R_p without the factor 4"))
}

/// Environment block and sorted reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub environment: Value,
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(cfg: &CheckConfig, extra: Value, mut reports: Vec<CheckReport>) -> Self {
        reports.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
        let environment = json!({
            "h": cfg.h,
            "solve": cfg.solve,
            "solver_tolerance": cfg.solver_tolerance(),
            "strict_tolerance": cfg.strict_tolerance(),
            "extra": extra,
        });
        SuiteReport { environment, reports }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == verdict).count()
    }

    /// `claim_id,pass,margin` rows.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("claim_id,pass,margin\n");
        for r in &self.reports {
            out.push_str(&format!("{},{},{:.17e}\n", r.claim_id, r.pass, r.margin));
        }
        out
    }
}

/// Named groups of checks run by [`run_suite`].
pub const SUITES: [&str; 11] = [
    "identities",
    "scaling",
    "monotonicity",
    "holder",
    "faber_krahn",
    "inradius",
    "pfunction",
    "c_infinity",
    "continuity",
    "korevaar",
    "exit_time",
];

type Job = Box<dyn Fn(&CheckConfig) -> Result<Vec<CheckReport>> + Send + Sync>;

fn one(f: impl Fn(&CheckConfig) -> Result<CheckReport> + Send + Sync + 'static) -> Job {
    Box::new(move |c| f(c).map(|r| vec![r]))
}

fn jobs(suite: &str, seed: u64) -> Vec<Job> {
    let disk = DomainSpec::Disk { radius: 1.0 };
    let square = DomainSpec::Rectangle { half_widths: [0.5, 0.5] };
    let mut out: Vec<Job> = Vec::new();
    match suite {
        "identities" => {
            for d in [disk.clone(), square.clone()] {
                for p in [1.0, 1.5, 2.0, 3.0] {
                    let d2 = d.clone();
                    out.push(one(move |c| check_energy_identity(&d2, p, c)));
                    let d3 = d.clone();
                    out.push(one(move |c| check_rigidity_product(&d3, p, c)));
                }
            }
        }
        "scaling" => {
            for d in [disk.clone(), square.clone()] {
                for p in [1.0, 2.0, 3.0] {
                    for r in [0.5, 2.0] {
                        let d = d.clone();
                        out.push(one(move |c| check_scaling_law(&d, p, r, c)));
                    }
                }
            }
        }
        "monotonicity" => {
            out.push(one(|c| {
                check_domain_monotonicity(&DomainSpec::Disk { radius: 1.0 }, &DomainSpec::Disk { radius: 2.0 }, 2.0, c)
            }));
            out.push(one(|c| {
                check_domain_monotonicity(
                    &DomainSpec::Rectangle { half_widths: [1.0, 1.0] },
                    &DomainSpec::Disk { radius: 2f64.sqrt() },
                    1.0,
                    c,
                )
            }));
        }
        "holder" => {
            for d in [disk.clone(), square.clone()] {
                for (p, q) in [(1.0, 2.0), (2.0, 3.0), (1.5, 2.5)] {
                    let d = d.clone();
                    out.push(one(move |c| check_holder_comparison(&d, p, q, c)));
                }
            }
            out.push(one(move |c| check_frequency_rigidity(&DomainSpec::Disk { radius: 1.0 }, c)));
        }
        "faber_krahn" => {
            for p in [1.0, 1.5, 2.0, 3.0] {
                let s = square.clone();
                out.push(one(move |c| check_faber_krahn(&s, p, c)));
            }
            out.push(one(|c| check_faber_krahn(&DomainSpec::Disk { radius: 1.0 }, 2.0, c)));
        }
        "inradius" => {
            for d in [
                DomainSpec::Rectangle { half_widths: [1.0, 0.5] },
                DomainSpec::Rectangle { half_widths: [4.0, 0.5] },
                DomainSpec::Disk { radius: 1.0 },
            ] {
                out.push(one(move |c| check_inradius_ball_maximizes(&d, 2.0, c)));
            }
        }
        "pfunction" => {
            for d in [disk.clone(), DomainSpec::Rectangle { half_widths: [1.0, 0.5] }] {
                for p in [1.0, 2.0, 3.0] {
                    let d = d.clone();
                    out.push(one(move |c| check_pfunction_bound(&d, p, c)));
                }
            }
            for p in [1.0, 1.5, 2.0, 3.0] {
                out.push(one(move |_| check_pfunction_slab(p, 1e-6)));
            }
        }
        "c_infinity" => {
            out.push(Box::new(|c| probe_c_infinity(&[2.0, 4.0, 8.0, 16.0], &[0.5, 0.2, 0.1, 0.05], c)));
        }
        "continuity" => {
            let grid: Vec<f64> = (0..=20).map(|k| 1.0 + 0.1 * k as f64).collect();
            for d in [disk.clone(), square.clone()] {
                let g = grid.clone();
                out.push(one(move |c| check_continuity_in_p(&d, &g, c)));
            }
        }
        "korevaar" => {
            for p in [1.0, 2.0] {
                out.push(one(move |c| {
                    let d = DomainSpec::Disk { radius: 1.0 };
                    let (_, res) = solve_domain(&d, p, c.h, &c.solve)?;
                    log_concavity_check(&res, &d)
                }));
            }
        }
        "exit_time" => {
            out.push(one(move |c| {
                let pts: Vec<[f64; 2]> = [0.0, 0.2, 0.4, 0.6, 0.8].iter().map(|&r| [r, 0.0]).collect();
                exitwalk::compare_torsion(&DomainSpec::Disk { radius: 1.0 }, &pts, 100_000, seed, c.h)
            }));
            out.push(one(move |c| {
                exitwalk::compare_torsion(&DomainSpec::Rectangle { half_widths: [0.5, 0.5] }, &[[0.0, 0.0]], 100_000, seed, c.h)
            }));
        }
        _ => {}
    }
    out
}

/// Runs the named suite (or `"all"`) in parallel; reports are sorted by claim id.
pub fn run_suite(suite: &str, cfg: &CheckConfig, seed: u64) -> Result<SuiteReport> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(Error::InvalidInput(format!("unknown suite `{other}`; expected all or one of {SUITES:?}"))),
    };
    let all: Vec<Job> = names.iter().flat_map(|s| jobs(s, seed)).collect();
    let reports: Vec<Vec<CheckReport>> = all.par_iter().map(|job| job(cfg)).collect::<Result<_>>()?;
    Ok(SuiteReport::new(cfg, json!({"suite": suite, "seed": seed, "suites": names}), reports.into_iter().flatten().collect()))
}
