//! Walk-on-spheres estimate of the expected exit time of planar Brownian
//! motion (generator `½Δ`), which solves `Δw + 2 = 0` with zero boundary data.
//!
//! Paths are split into a fixed number of chunks, each drawing from its own
//! ChaCha8 stream of the seed, and chunk statistics are merged in chunk order.
//! Results are therefore bit-identical for any thread count.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::check::{CheckReport, Relation};
use crate::error::{Error, Result};
use crate::geometry::{rasterize, DomainSpec};
use crate::solver::solve_torsion;

/// Recorded in every estimate.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), one stream per chunk";

/// Number of independent streams the paths are divided among.
pub const CHUNKS: u64 = 64;

/// Default shell width relative to the inradius.
pub const DEFAULT_EPS_FRACTION: f64 = 1e-4;

/// Allowance for the grid torsion solve in [`compare_torsion`], relative to its value.
pub const PDE_ALLOWANCE: f64 = 0.02;

const MAX_JUMPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitEstimate {
    pub point: [f64; 2],
    pub mean: f64,
    /// Sample standard deviation over `√paths`.
    pub std_error: f64,
    pub paths: u64,
    pub seed: u64,
    pub eps: f64,
    pub chunks: u64,
    pub rng: String,
}

/// Shell width used when none is given: a fixed fraction of the inradius.
/// Polygons have no closed-form inradius, so the start point's distance to the
/// boundary stands in for it.
pub fn default_eps(domain: &DomainSpec, x0: [f64; 2]) -> Result<f64> {
    let scale = match domain.exact_inradius() {
        Some(r) => r,
        None => domain.distance_to_boundary(x0[0], x0[1])?,
    };
    Ok(DEFAULT_EPS_FRACTION * scale)
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

fn one_path(domain: &DomainSpec, x0: [f64; 2], eps: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let [mut x, mut y] = x0;
    let mut time = 0.0;
    for _ in 0..MAX_JUMPS {
        let r = domain.distance_to_boundary(x, y)?;
        if r < eps {
            return Ok(time);
        }
        // mean exit time of the radius-r disk from its center, generator ½Δ
        time += r * r / 2.0;
        let theta = rng.random::<f64>() * TAU;
        x += r * theta.cos();
        y += r * theta.sin();
    }
    Err(Error::NoConvergence { iterations: MAX_JUMPS, residual: domain.distance_to_boundary(x, y)? })
}

/// Walk-on-spheres estimate of `E_{x0}[τ]`.
pub fn wos_exit_time(domain: &DomainSpec, x0: [f64; 2], paths: u64, eps: f64, seed: u64) -> Result<ExitEstimate> {
    if paths == 0 {
        return Err(Error::InvalidPathCount);
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    domain.validate()?;
    domain.distance_to_boundary(x0[0], x0[1])?;
    if !domain.contains(x0[0], x0[1]) {
        return Err(Error::PointOutsideDomain { x: x0[0], y: x0[1] });
    }
    let chunks: Vec<Moments> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = paths / CHUNKS + u64::from(c < paths % CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(one_path(domain, x0, eps, &mut rng)?);
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let total = chunks.into_iter().fold(Moments::default(), Moments::merge);
    let variance = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(ExitEstimate {
        point: x0,
        mean: total.mean,
        std_error: (variance / total.n).sqrt(),
        paths,
        seed,
        eps,
        chunks: CHUNKS,
        rng: RNG_ALGORITHM.to_string(),
    })
}

/// Compares walk-on-spheres estimates with the grid torsion function at each
/// point. Point `i` uses seed `seed + i`. Passes when every
/// `|MC − PDE| ≤ 3·std_error + 2%·PDE`; the report's `lhs` is the largest
/// ratio of the gap to that allowance.
pub fn compare_torsion(domain: &DomainSpec, points: &[[f64; 2]], paths: u64, seed: u64, h: f64) -> Result<CheckReport> {
    if paths == 0 {
        return Err(Error::InvalidPathCount);
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("no points to compare".into()));
    }
    let mask = Arc::new(rasterize(domain, h)?);
    let torsion = solve_torsion(&mask)?.calibrated_u;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for (i, &pt) in points.iter().enumerate() {
        let eps = default_eps(domain, pt)?;
        let est = wos_exit_time(domain, pt, paths, eps, seed.wrapping_add(i as u64))?;
        let pde = torsion.sample(pt[0], pt[1]);
        let allowed = 3.0 * est.std_error + PDE_ALLOWANCE * pde;
        worst = worst.max((est.mean - pde).abs() / allowed);
        rows.push(json!({"point": pt, "mc": est.mean, "std_error": est.std_error, "pde": pde, "allowed": allowed}));
    }
    Ok(CheckReport::new(format!("exit_time.torsion.{}", domain.kind_name()), worst, Relation::LessEqual, 1.0, 0.0)
        .input("domain", serde_json::to_value(domain)?)
        .input("h", h)
        .input("paths", paths)
        .input("seed", seed)
        .input("points", rows)
        .input("rng", RNG_ALGORITHM)
        .note("lhs is max |MC - PDE| / (3 std_error + 2% PDE)")
        .note("Brownian motion with generator ½Δ, so E[τ] solves Δw + 2 = 0"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: DomainSpec = DomainSpec::Disk { radius: 1.0 };

    #[test]
    fn disk_center_and_off_center() {
        for (r, exact) in [(0.0, 0.5), (0.6, 0.32)] {
            let est = wos_exit_time(&DISK, [r, 0.0], 100_000, 1e-4, 7).unwrap();
            assert!((est.mean - exact).abs() <= 3.0 * est.std_error, "{est:?}");
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let a = wos_exit_time(&DISK, [0.3, 0.1], 5_000, 1e-4, 11).unwrap();
        let b = wos_exit_time(&DISK, [0.3, 0.1], 5_000, 1e-4, 11).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| wos_exit_time(&DISK, [0.3, 0.1], 5_000, 1e-4, 11).unwrap());
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn guards() {
        assert!(matches!(wos_exit_time(&DISK, [1.0, 0.0], 10, 1e-4, 0), Err(Error::PointOutsideDomain { .. })));
        assert!(matches!(wos_exit_time(&DISK, [0.0, 0.0], 0, 1e-4, 0), Err(Error::InvalidPathCount)));
        assert!(matches!(compare_torsion(&DISK, &[[0.0, 0.0]], 0, 0, 1.0 / 32.0), Err(Error::InvalidPathCount)));
        let ball = DomainSpec::Ball { n: 3, radius: 1.0 };
        assert!(matches!(wos_exit_time(&ball, [0.0, 0.0], 10, 1e-4, 0), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn halving_eps_is_below_noise() {
        let a = wos_exit_time(&DISK, [0.5, 0.0], 100_000, 1e-4, 3).unwrap();
        let b = wos_exit_time(&DISK, [0.5, 0.0], 100_000, 5e-5, 3).unwrap();
        assert!((a.mean - b.mean).abs() < a.std_error, "{} vs {}", a.mean, b.mean);
    }

    #[test]
    fn polygon_uses_segment_distances() {
        let tri = DomainSpec::Polygon { vertices: vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]] };
        let est = wos_exit_time(&tri, [0.5, 0.5], 2_000, 1e-4, 5).unwrap();
        assert!(est.mean > 0.0);
    }
}
