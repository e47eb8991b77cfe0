//! Level sets of the planar energies by marching squares, with every vertex
//! polished onto its level.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

use super::energy::{energy_ball_critical, energy_slab, Variant};

/// Largest accepted `|E(point) − level|` for an emitted vertex.
pub const LEVEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortraitSystem {
    /// `(u')² + (2Λ/p)|u|^p` in the `(u, u')` plane.
    SlabEnergy,
    /// The critical-ball energy in the `(v, v̇)` plane; requires `p = 2n/(n−2)`.
    BallCriticalEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortraitParams {
    pub p: f64,
    pub n: usize,
    pub lambda: f64,
    /// Only read by the ball system.
    pub variant: Variant,
}

/// Rectangle of the phase plane, `u` horizontal and `u'` vertical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub u: [f64; 2],
    pub u_prime: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetData {
    pub system: PortraitSystem,
    pub params: PortraitParams,
    pub window: Window,
    pub resolution: usize,
    pub levels: Vec<f64>,
    /// `curves[k]` holds the polylines of `levels[k]`; a closed curve repeats its first point.
    pub curves: Vec<Vec<Vec<[f64; 2]>>>,
}

impl LevelSetData {
    pub fn energy(&self, u: f64, u_prime: f64) -> f64 {
        evaluate(self.system, &self.params, u, u_prime)
    }

    /// Largest `|E − level|` over every emitted vertex.
    pub fn max_level_error(&self) -> f64 {
        self.levels
            .iter()
            .zip(&self.curves)
            .flat_map(|(&level, curves)| curves.iter().flatten().map(move |pt| (level, pt)))
            .map(|(level, pt)| (self.energy(pt[0], pt[1]) - level).abs())
            .fold(0.0, f64::max)
    }

    /// CSV of one level: `curve,u,u_prime`.
    pub fn level_csv(&self, k: usize) -> String {
        let mut out = String::from("curve,u,u_prime\n");
        for (c, curve) in self.curves[k].iter().enumerate() {
            for pt in curve {
                let _ = writeln!(out, "{c},{:.17e},{:.17e}", pt[0], pt[1]);
            }
        }
        out
    }

    /// Manifest describing the run and the per-level CSV file names.
    pub fn manifest(&self, files: &[String]) -> Value {
        let levels: Vec<Value> = self
            .levels
            .iter()
            .zip(&self.curves)
            .zip(files)
            .map(|((level, curves), file)| {
                json!({
                    "level": level,
                    "file": file,
                    "curves": curves.len(),
                    "points": curves.iter().map(Vec::len).sum::<usize>(),
                })
            })
            .collect();
        json!({
            "system": self.system,
            "params": self.params,
            "window": self.window,
            "resolution": self.resolution,
            "level_tolerance": LEVEL_TOL,
            "max_level_error": self.max_level_error(),
            "levels": levels,
        })
    }

    /// Self-contained SVG with a fixed 600×600 viewBox mapped from the window.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 600.0;
        const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
        let [u0, u1] = self.window.u;
        let [v0, v1] = self.window.u_prime;
        let map = |pt: &[f64; 2]| ((pt[0] - u0) / (u1 - u0) * SIZE, (v1 - pt[1]) / (v1 - v0) * SIZE);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n"
        );
        svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        if u0 < 0.0 && u1 > 0.0 {
            let (x, _) = map(&[0.0, v0]);
            let _ = writeln!(svg, "<line x1=\"{x:.3}\" y1=\"0\" x2=\"{x:.3}\" y2=\"{SIZE}\" stroke=\"#999\"/>");
        }
        if v0 < 0.0 && v1 > 0.0 {
            let (_, y) = map(&[u0, 0.0]);
            let _ = writeln!(svg, "<line x1=\"0\" y1=\"{y:.3}\" x2=\"{SIZE}\" y2=\"{y:.3}\" stroke=\"#999\"/>");
        }
        for (k, curves) in self.curves.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            for curve in curves {
                let points: Vec<String> = curve
                    .iter()
                    .map(|pt| {
                        let (x, y) = map(pt);
                        format!("{x:.3},{y:.3}")
                    })
                    .collect();
                let _ = writeln!(
                    svg,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    points.join(" ")
                );
            }
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn evaluate(system: PortraitSystem, params: &PortraitParams, u: f64, u_prime: f64) -> f64 {
    match system {
        PortraitSystem::SlabEnergy => energy_slab(u, u_prime, params.p, params.lambda),
        PortraitSystem::BallCriticalEnergy => energy_ball_critical(u, u_prime, params.n, params.lambda, params.variant),
    }
}

/// Contours of the system's energy at each level over the window, sampled on a
/// `resolution × resolution` cell grid.
pub fn phase_portrait(
    system: PortraitSystem,
    params: PortraitParams,
    levels: &[f64],
    window: Window,
    resolution: usize,
) -> Result<LevelSetData> {
    if levels.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidInput("levels must be finite".into()));
    }
    let nondegenerate = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
    if !nondegenerate(window.u) || !nondegenerate(window.u_prime) {
        return Err(Error::InvalidInput("window ranges must be finite with lo < hi".into()));
    }
    if resolution < 2 {
        return Err(Error::InvalidInput("resolution must be at least 2".into()));
    }
    match system {
        PortraitSystem::SlabEnergy if !(params.p >= 1.0 && params.p.is_finite()) => {
            return Err(Error::InvalidInput(format!("p must be a finite real >= 1, got {}", params.p)));
        }
        PortraitSystem::BallCriticalEnergy => {
            if params.n < 3 {
                return Err(Error::InvalidInput("the critical ball system needs n >= 3".into()));
            }
            let q = 2.0 * params.n as f64 / (params.n as f64 - 2.0);
            if (params.p - q).abs() > 1e-12 * q {
                return Err(Error::InvalidInput(format!("p = {} is not the critical exponent {q}", params.p)));
            }
        }
        _ => {}
    }
    let energy = |u: f64, v: f64| evaluate(system, &params, u, v);
    let curves = levels.iter().map(|&level| contour(&energy, level, window, resolution)).collect();
    Ok(LevelSetData { system, params, window, resolution, levels: levels.to_vec(), curves })
}

/// Edge ids: horizontal edge `(i, j)–(i+1, j)` is `2·(j·(res+1) + i)`,
/// vertical edge `(i, j)–(i, j+1)` is that plus one.
fn contour<E: Fn(f64, f64) -> f64>(energy: &E, level: f64, window: Window, res: usize) -> Vec<Vec<[f64; 2]>> {
    let du = (window.u[1] - window.u[0]) / res as f64;
    let dv = (window.u_prime[1] - window.u_prime[0]) / res as f64;
    let node = |i: usize, j: usize| [window.u[0] + i as f64 * du, window.u_prime[0] + j as f64 * dv];
    let f = |pt: [f64; 2]| energy(pt[0], pt[1]) - level;
    let stride = res + 1;
    let values: Vec<f64> = (0..stride * stride).map(|k| f(node(k % stride, k / stride))).collect();
    let val = |i: usize, j: usize| values[j * stride + i];
    let above = |i: usize, j: usize| val(i, j) >= 0.0;
    let h_edge = |i: usize, j: usize| 2 * (j * stride + i);
    let v_edge = |i: usize, j: usize| 2 * (j * stride + i) + 1;

    let mut points: BTreeMap<usize, [f64; 2]> = BTreeMap::new();
    let mut crossing = |id: usize, a: (usize, usize), b: (usize, usize)| {
        points.entry(id).or_insert_with(|| polish(&f, node(a.0, a.1), node(b.0, b.1), val(a.0, a.1)));
        id
    };
    let mut segments: Vec<[usize; 2]> = Vec::new();
    for j in 0..res {
        for i in 0..res {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let s: Vec<bool> = corners.iter().map(|&(a, b)| above(a, b)).collect();
            // bottom, right, top, left, each with its endpoints
            let edges = [
                (h_edge(i, j), corners[0], corners[1]),
                (v_edge(i + 1, j), corners[1], corners[2]),
                (h_edge(i, j + 1), corners[3], corners[2]),
                (v_edge(i, j), corners[0], corners[3]),
            ];
            let cut: Vec<usize> = (0..4).filter(|&e| s[e] != s[(e + 1) % 4]).collect();
            match cut.len() {
                2 => {
                    let a = crossing(edges[cut[0]].0, edges[cut[0]].1, edges[cut[0]].2);
                    let b = crossing(edges[cut[1]].0, edges[cut[1]].1, edges[cut[1]].2);
                    segments.push([a, b]);
                }
                4 => {
                    let ids: Vec<usize> = edges.iter().map(|&(id, a, b)| crossing(id, a, b)).collect();
                    let [ua, va] = node(i, j);
                    let center = f([ua + 0.5 * du, va + 0.5 * dv]) >= 0.0;
                    if center == s[0] {
                        // corners 0 and 2 join through the center
                        segments.push([ids[0], ids[1]]);
                        segments.push([ids[2], ids[3]]);
                    } else {
                        segments.push([ids[3], ids[0]]);
                        segments.push([ids[1], ids[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    chain(&segments, &points)
}

/// Bisection along the segment `a`–`b`, whose endpoints lie on opposite sides.
fn polish<F: Fn([f64; 2]) -> f64>(f: &F, a: [f64; 2], b: [f64; 2], fa: f64) -> [f64; 2] {
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_above = fa >= 0.0;
    let mut best = at(0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        best = at(mid);
        let v = f(best);
        if v.abs() <= 0.01 * LEVEL_TOL {
            break;
        }
        if (v >= 0.0) == lo_above {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < f64::EPSILON {
            break;
        }
    }
    if f(best).abs() > f(a).abs() {
        a
    } else {
        best
    }
}

fn chain(segments: &[[usize; 2]], points: &BTreeMap<usize, [f64; 2]>) -> Vec<Vec<[f64; 2]>> {
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (s, seg) in segments.iter().enumerate() {
        for &e in seg {
            incident.entry(e).or_default().push(s);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();
    // open chains start at edges touched once, then the remaining loops
    let starts: Vec<usize> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&e, _)| e)
        .chain(incident.keys().copied())
        .collect();
    for start in starts {
        let Some(&first) = incident[&start].iter().find(|&&s| !used[s]) else {
            continue;
        };
        let mut curve = vec![points[&start]];
        let mut edge = start;
        let mut seg = Some(first);
        while let Some(s) = seg {
            used[s] = true;
            edge = if segments[s][0] == edge { segments[s][1] } else { segments[s][0] };
            curve.push(points[&edge]);
            seg = incident[&edge].iter().copied().find(|&t| !used[t]);
        }
        curves.push(curve);
    }
    curves
}
