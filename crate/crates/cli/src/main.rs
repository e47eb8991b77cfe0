mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptorsion::exitwalk::{compare_torsion, default_eps, wos_exit_time};
use ptorsion::geometry::{inradius, scale_domain, volume, DomainSpec};
use ptorsion::inequalities::{run_suite, solve_domain, CheckConfig, SUITES};
use ptorsion::radial::{
    phase_portrait, radial_c_p, radial_r_p, shoot_ball, solve_slab, PortraitParams, PortraitSystem, Variant, Window,
};
use ptorsion::solver::{Scheme, SolveOptions};
use rayon::prelude::*;
use serde_json::{json, Value};

use output::{metadata, resolve_out_dir, unix_seconds, Sink};

#[derive(Parser, Debug)]
#[command(name = "ptorsion", version, about = "p-torsional rigidity and the interpolating constant C_p")]
struct Cli {
    /// Output directory; falls back to $PTORSION_OUT_DIR, then ./ptorsion-out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grid solve of C_p and R_p on a planar domain.
    Solve(SolveArgs),
    /// Radial profile on a ball or slab by shooting.
    Radial(RadialArgs),
    /// Energy level sets in the phase plane.
    Phase(PhaseArgs),
    /// Run the inequality suites.
    Verify(VerifyArgs),
    /// Walk-on-spheres exit times.
    Exitwalk(ExitwalkArgs),
    /// C_p and R_p over a grid of exponents and scales.
    Sweep(SweepArgs),
}

/// Rounds `h` to the nearest `1/N`, so that edges of unit-scale domains fall
/// on lattice lines. Without this a spacing like 0.0156 leaves the first
/// exterior node of the unit square 3% outside it.
fn lattice_spacing(h: f64, literal: bool) -> f64 {
    if literal || h > 1.0 {
        h
    } else {
        1.0 / (1.0 / h).round()
    }
}

#[derive(Args, Debug, Clone)]
struct SolverFlags {
    /// Grid spacing, rounded to the nearest 1/N unless --literal-h is given.
    #[arg(long, default_value_t = 1.0 / 64.0)]
    h: f64,
    /// Use --h exactly as given.
    #[arg(long)]
    literal_h: bool,
    /// Relative spread of Φ_p over the stabilization window.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    residual_tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::FixedPoint)]
    scheme: SchemeArg,
    /// Step of the gradient-flow scheme.
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// Start from a random positive field instead of the torsion function.
    #[arg(long)]
    init_seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    FixedPoint,
    GradientFlow,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            residual_tol: self.residual_tol,
            max_iter: self.max_iter,
            seed: self.init_seed,
            scheme: match self.scheme {
                SchemeArg::FixedPoint => Scheme::FixedPoint,
                SchemeArg::GradientFlow => Scheme::GradientFlow { step: self.step },
            },
            ..SolveOptions::default()
        }
    }

    fn spacing(&self) -> f64 {
        lattice_spacing(self.h, self.literal_h)
    }

    fn check_config(&self) -> CheckConfig {
        CheckConfig { h: self.spacing(), solve: self.options() }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Domain description (JSON).
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    p: f64,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RadialKind {
    Ball,
    Slab,
}

#[derive(Args, Debug)]
struct RadialArgs {
    #[arg(long, value_enum)]
    kind: RadialKind,
    #[arg(long)]
    p: f64,
    /// Dimension of the ball.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Multiplier of the slab equation (initial guess when p = 2).
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SystemArg {
    Slab,
    Ball,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Printed,
    Conserved,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[arg(long, value_enum)]
    system: SystemArg,
    /// Required for the slab; the ball defaults to the critical exponent.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<f64>,
    #[arg(long, value_enum, default_value_t = VariantArg::Conserved)]
    variant: VariantArg,
    /// Horizontal range `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    u_range: Option<Vec<f64>>,
    /// Vertical range `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    v_range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 400)]
    resolution: usize,
    /// Also write phase.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args, Debug)]
struct ExitwalkArgs {
    #[arg(long)]
    domain: PathBuf,
    /// Start point `x,y`; repeat for several.
    #[arg(long = "point", value_parser = parse_point, required = true)]
    points: Vec<[f64; 2]>,
    #[arg(long, default_value_t = 10_000)]
    paths: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shell width; defaults to a fixed fraction of the inradius.
    #[arg(long)]
    eps: Option<f64>,
    /// Also compare with the grid torsion function at spacing `h`.
    #[arg(long)]
    compare: bool,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    h: f64,
    #[arg(long)]
    literal_h: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    /// Dilation factors; the grid spacing is dilated with the domain.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    scales: Vec<f64>,
    #[command(flatten)]
    solver: SolverFlags,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x,y`, got `{s}`"));
    }
    let x = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let y = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([x, y])
}

enum Failure {
    /// Bad input discovered after parsing; exit 2.
    Usage(String),
    /// The computation itself failed; exit 1 with error.json.
    Numerical { kind: String, message: String },
}

impl From<ptorsion::Error> for Failure {
    fn from(e: ptorsion::Error) -> Self {
        Failure::Numerical { kind: e.kind().to_string(), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numerical { kind: "io".into(), message: e.to_string() }
    }
}

/// `Ok(true)` when every invoked check passed.
type Outcome = Result<bool, Failure>;

fn read_domain(path: &PathBuf) -> Result<DomainSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read domain file {}: {e}", path.display())))?;
    DomainSpec::from_json(&text).map_err(|e| Failure::Usage(format!("invalid domain file {}: {e}", path.display())))
}

fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(",")
}

fn solve(args: &SolveArgs, sink: &mut Sink) -> Outcome {
    let domain = read_domain(&args.domain)?;
    let (mask, res) = solve_domain(&domain, args.p, args.solver.spacing(), &args.solver.options())?;
    let report = json!({
        "domain": domain,
        "options": args.solver.options(),
        "report": res.report(),
        "cells": mask.len(),
        "volume": volume(&mask),
        "inradius": inradius(&mask),
        "lp_integral": res.lp_integral(),
        "calibrated_lambda": res.calibrated_lambda,
        "rigidity_product": res.rigidity_product(),
        "final_spread": res.final_spread(),
    });
    sink.json("solve.json", &report)?;
    sink.with("field.csv", |b| res.calibrated_u.write_csv(b))?;
    println!(
        "solve {} p={}: c_p={:.10e} r_p={:.10e} lambda={:.10e} iterations={} residual={:.3e}",
        domain.kind_name(),
        res.p,
        res.c_p,
        res.r_p,
        res.lambda,
        res.iterations,
        res.pde_residual
    );
    Ok(true)
}

fn radial(args: &RadialArgs, sink: &mut Sink) -> Outcome {
    let profile = match args.kind {
        RadialKind::Ball => shoot_ball(args.n, args.p, args.tol)?,
        RadialKind::Slab => solve_slab(args.p, args.lambda, args.tol)?,
    };
    let (c_p, r_p) = (radial_c_p(&profile), radial_r_p(&profile));
    let report = json!({
        "kind": match args.kind { RadialKind::Ball => "ball", RadialKind::Slab => "slab" },
        "n": profile.n,
        "p": profile.p,
        "lambda": profile.lambda,
        "c_p": c_p,
        "r_p": r_p,
        "u_max": profile.u_max(),
        "lp_integral": profile.lp_integral(),
        "first_zero": profile.first_zero,
        "step_error": profile.step_error,
        "samples": profile.samples.len(),
    });
    sink.json("radial.json", &report)?;
    sink.with("profile.csv", |b| profile.write_csv(b))?;
    println!(
        "radial n={} p={}: c_p={:.10e} r_p={:.10e} lambda={:.10e} first_zero={:.12} step_error={:.3e}",
        profile.n, profile.p, c_p, r_p, profile.lambda, profile.first_zero, profile.step_error
    );
    Ok(true)
}

fn range(flag: &Option<Vec<f64>>, default: [f64; 2], name: &str) -> Result<[f64; 2], Failure> {
    match flag {
        None => Ok(default),
        Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
        Some(_) => Err(Failure::Usage(format!("--{name} expects `lo,hi`"))),
    }
}

fn phase(args: &PhaseArgs, sink: &mut Sink) -> Outcome {
    let (system, p) = match args.system {
        SystemArg::Slab => {
            (PortraitSystem::SlabEnergy, args.p.ok_or_else(|| Failure::Usage("--p is required for the slab".into()))?)
        }
        SystemArg::Ball => {
            if args.n < 3 {
                return Err(Failure::Usage("the ball system needs --n >= 3".into()));
            }
            let critical = 2.0 * args.n as f64 / (args.n as f64 - 2.0);
            (PortraitSystem::BallCriticalEnergy, args.p.unwrap_or(critical))
        }
    };
    let top = args.levels.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let (du, dv) = match system {
        // the level set E = L reaches |u| = (pL/2Λ)^{1/p} and |u'| = √L
        PortraitSystem::SlabEnergy => (1.25 * (p * top / (2.0 * args.lambda)).powf(1.0 / p), 1.25 * top.sqrt()),
        PortraitSystem::BallCriticalEnergy => (2.0, 2.0),
    };
    let window = Window {
        u: range(&args.u_range, [-du.max(0.5), du.max(0.5)], "u-range")?,
        u_prime: range(&args.v_range, [-dv.max(0.5), dv.max(0.5)], "v-range")?,
    };
    let params = PortraitParams {
        p,
        n: args.n,
        lambda: args.lambda,
        variant: match args.variant {
            VariantArg::Printed => Variant::Printed,
            VariantArg::Conserved => Variant::Conserved,
        },
    };
    let data = phase_portrait(system, params, &args.levels, window, args.resolution)?;
    let mut files = Vec::new();
    for k in 0..data.levels.len() {
        let name = format!("phase_level_{k}.csv");
        sink.text(&name, &data.level_csv(k))?;
        files.push(name);
    }
    if args.svg {
        sink.text("phase.svg", &data.to_svg())?;
        files.push("phase.svg".into());
    }
    sink.json("phase_manifest.json", &data.manifest(&files))?;
    for (k, level) in data.levels.iter().enumerate() {
        println!("phase level {k} E={level}: {} polyline(s)", data.curves[k].len());
    }
    Ok(true)
}

fn verify(args: &VerifyArgs, sink: &mut Sink) -> Outcome {
    if args.suite != "all" && !SUITES.contains(&args.suite.as_str()) {
        return Err(Failure::Usage(format!("unknown suite `{}`; expected all or one of {SUITES:?}", args.suite)));
    }
    let suite = run_suite(&args.suite, &args.solver.check_config(), args.seed)?;
    sink.json("verify.json", &suite)?;
    sink.text("verify_summary.csv", &suite.summary_csv())?;
    for r in &suite.reports {
        println!("{}", r.summary_line());
    }
    Ok(suite.all_pass())
}

fn exitwalk(args: &ExitwalkArgs, sink: &mut Sink) -> Outcome {
    let domain = read_domain(&args.domain)?;
    let mut estimates = Vec::new();
    let mut csv = String::from("x,y,mean,std_error,paths,seed,eps\n");
    for (i, &pt) in args.points.iter().enumerate() {
        let eps = match args.eps {
            Some(e) => e,
            None => default_eps(&domain, pt)?,
        };
        let seed = args.seed.wrapping_add(i as u64);
        let est = wos_exit_time(&domain, pt, args.paths, eps, seed)?;
        csv.push_str(&format!(
            "{},{},{},{seed},{:.17e}\n",
            csv_row(&est.point),
            csv_row(&[est.mean, est.std_error]),
            est.paths,
            est.eps
        ));
        println!("exitwalk ({}, {}): mean={:.8e} std_error={:.3e} paths={}", pt[0], pt[1], est.mean, est.std_error, est.paths);
        estimates.push(est);
    }
    let mut pass = true;
    let comparison = if args.compare {
        let report = compare_torsion(&domain, &args.points, args.paths, args.seed, lattice_spacing(args.h, args.literal_h))?;
        println!("{}", report.summary_line());
        pass = report.pass;
        serde_json::to_value(&report).unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    sink.text("exitwalk.csv", &csv)?;
    sink.json("exitwalk.json", &json!({"domain": domain, "estimates": estimates, "comparison": comparison}))?;
    Ok(pass)
}

fn sweep(args: &SweepArgs, sink: &mut Sink) -> Outcome {
    let domain = read_domain(&args.domain)?;
    if args.scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Failure::Usage("--scales must be positive".into()));
    }
    let jobs: Vec<(f64, f64)> = args.scales.iter().flat_map(|&s| args.p_list.iter().map(move |&p| (s, p))).collect();
    let opts = args.solver.options();
    let rows = jobs
        .par_iter()
        .map(|&(s, p)| {
            let scaled = scale_domain(&domain, s)?;
            let (_, res) = solve_domain(&scaled, p, args.solver.spacing() * s, &opts)?;
            Ok((s, res.report()))
        })
        .collect::<ptorsion::Result<Vec<_>>>()?;
    let mut csv = String::from("scale,p,h,lambda,c_p,r_p,u_max,residual,iterations\n");
    for (s, r) in &rows {
        csv.push_str(&format!("{},{}\n", csv_row(&[*s, r.p, r.h, r.lambda, r.c_p, r.r_p, r.u_max, r.residual]), r.iterations));
        println!("sweep scale={s} p={}: c_p={:.10e} r_p={:.10e}", r.p, r.c_p, r.r_p);
    }
    let rows: Vec<Value> = rows.iter().map(|(s, r)| json!({"scale": s, "report": r})).collect();
    sink.json("sweep.json", &json!({"domain": domain, "options": opts, "rows": rows}))?;
    sink.text("sweep.csv", &csv)?;
    Ok(true)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Radial(_) => "radial",
        Command::Phase(_) => "phase",
        Command::Verify(_) => "verify",
        Command::Exitwalk(_) => "exitwalk",
        Command::Sweep(_) => "sweep",
    }
}

fn main() -> ExitCode {
    let started = unix_seconds();
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let name = command_name(&cli.command);
    let h = match &cli.command {
        Command::Solve(SolveArgs { solver, .. })
        | Command::Verify(VerifyArgs { solver, .. })
        | Command::Sweep(SweepArgs { solver, .. }) => Some(solver.h),
        Command::Exitwalk(a) => Some(a.h),
        _ => None,
    };
    if h.is_some_and(|h| !(h > 0.0 && h.is_finite())) {
        eprintln!("error: --h must be positive");
        return ExitCode::from(2);
    }
    let mut sink = match Sink::new(resolve_out_dir(cli.out.clone())) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot create output directory: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => solve(a, &mut sink),
        Command::Radial(a) => radial(a, &mut sink),
        Command::Phase(a) => phase(a, &mut sink),
        Command::Verify(a) => verify(a, &mut sink),
        Command::Exitwalk(a) => exitwalk(a, &mut sink),
        Command::Sweep(a) => sweep(a, &mut sink),
    };
    let code: u8 = match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Numerical { kind, message }) => {
            eprintln!("error ({kind}): {message}");
            let err = json!({"error": {"command": name, "kind": kind, "message": message}});
            if let Err(e) = sink.json("error.json", &err) {
                eprintln!("error: could not write error.json: {e}");
            }
            1
        }
    };
    let files = sink.written().to_vec();
    if let Err(e) = sink.json("metadata.json", &metadata(name, &args, started, &files, code as i32)) {
        eprintln!("warning: could not write metadata.json: {e}");
    }
    ExitCode::from(code)
}
