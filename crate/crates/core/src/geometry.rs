//! Domain descriptions, rasterization onto a uniform grid, and the geometric
//! functionals (volume, inradius, equal-volume ball) used by the solvers.
//!
//! Grid cells are centered on the lattice `h·Z²`, so a rectangle with
//! half-widths that are multiples of `h` has its edges exactly on a row of
//! exterior cell centers. A cell is interior when its center lies strictly
//! inside the continuous domain; the zero Dirichlet data then lives on the
//! exterior centers adjacent to the mask.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::unit_ball_volume;

/// Minimum number of cells across the inradius accepted by [`rasterize`].
pub const MIN_CELLS_ACROSS_INRADIUS: f64 = 8.0;

/// Symbolic description of a domain. Planar kinds are centered at the origin.
///
/// The JSON form is internally tagged by `kind`, and unknown keys are rejected:
///
/// ```
/// use ptorsion::geometry::DomainSpec;
///
/// let d: DomainSpec = serde_json::from_str(r#"{"kind":"disk","radius":1.0}"#).unwrap();
/// assert_eq!(d, DomainSpec::Disk { radius: 1.0 });
/// assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"disk","radius":1.0,"x":0}"#).is_err());
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disk { radius: f64 },
    Rectangle { half_widths: [f64; 2] },
    Polygon { vertices: Vec<[f64; 2]> },
    Annulus { r_in: f64, r_out: f64 },
    Ball { n: usize, radius: f64 },
    Slab { n: usize, half_width: f64 },
}

impl DomainSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainSpec::Disk { .. } => "disk",
            DomainSpec::Rectangle { .. } => "rectangle",
            DomainSpec::Polygon { .. } => "polygon",
            DomainSpec::Annulus { .. } => "annulus",
            DomainSpec::Ball { .. } => "ball",
            DomainSpec::Slab { .. } => "slab",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Ball { n, .. } | DomainSpec::Slab { n, .. } => *n,
            _ => 2,
        }
    }

    /// Disk and rectangle are the convex kinds accepted by the convexity-based checks.
    pub fn is_convex_kind(&self) -> bool {
        matches!(
            self,
            DomainSpec::Disk { .. } | DomainSpec::Rectangle { .. } | DomainSpec::Ball { .. }
        )
    }

    /// Parses a domain from JSON and validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidDomain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match self {
            DomainSpec::Disk { radius } => positive("radius", *radius),
            DomainSpec::Rectangle { half_widths } => {
                positive("half_widths[0]", half_widths[0])?;
                positive("half_widths[1]", half_widths[1])
            }
            DomainSpec::Annulus { r_in, r_out } => {
                positive("r_in", *r_in)?;
                positive("r_out", *r_out)?;
                if r_in >= r_out {
                    return Err(Error::InvalidDomain(format!("annulus needs r_in < r_out, got {r_in} >= {r_out}")));
                }
                Ok(())
            }
            DomainSpec::Ball { n, radius } | DomainSpec::Slab { n, half_width: radius } => {
                if *n < 2 {
                    return Err(Error::InvalidDomain(format!("dimension must be at least 2, got {n}")));
                }
                positive("radius", *radius)
            }
            DomainSpec::Polygon { vertices } => validate_polygon(vertices),
        }
    }

    /// Strict interior test for the planar kinds (balls with n = 2 count as disks).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { n: 2, radius } => x * x + y * y < radius * radius,
            DomainSpec::Rectangle { half_widths } => x.abs() < half_widths[0] && y.abs() < half_widths[1],
            DomainSpec::Annulus { r_in, r_out } => {
                let r2 = x * x + y * y;
                r2 > r_in * r_in && r2 < r_out * r_out
            }
            DomainSpec::Polygon { vertices } => polygon_contains(vertices, x, y),
            DomainSpec::Ball { .. } | DomainSpec::Slab { .. } => false,
        }
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, x: f64, y: f64) -> Result<f64> {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { n: 2, radius } => Ok((radius - x.hypot(y)).abs()),
            DomainSpec::Rectangle { half_widths } => {
                Ok((half_widths[0] - x.abs()).abs().min((half_widths[1] - y.abs()).abs()))
            }
            DomainSpec::Annulus { r_in, r_out } => {
                let r = x.hypot(y);
                Ok((r - r_in).abs().min((r_out - r).abs()))
            }
            DomainSpec::Polygon { vertices } => Ok(polygon_edges(vertices)
                .map(|(a, b)| point_segment_distance([x, y], a, b))
                .fold(f64::INFINITY, f64::min)),
            other => Err(Error::UnsupportedKind(other.kind_name().to_string())),
        }
    }

    /// Inradius of the continuous domain, where it has a closed form.
    pub fn exact_inradius(&self) -> Option<f64> {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius, .. } => Some(*radius),
            DomainSpec::Rectangle { half_widths } => Some(half_widths[0].min(half_widths[1])),
            DomainSpec::Annulus { r_in, r_out } => Some(0.5 * (r_out - r_in)),
            DomainSpec::Slab { half_width, .. } => Some(*half_width),
            DomainSpec::Polygon { .. } => None,
        }
    }

    fn bounding_box(&self) -> Option<[f64; 4]> {
        match self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { n: 2, radius } => Some([-radius, *radius, -radius, *radius]),
            DomainSpec::Annulus { r_out, .. } => Some([-r_out, *r_out, -r_out, *r_out]),
            DomainSpec::Rectangle { half_widths: [a, b] } => Some([-a, *a, -b, *b]),
            DomainSpec::Polygon { vertices } => {
                let mut bb = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
                for v in vertices {
                    bb[0] = bb[0].min(v[0]);
                    bb[1] = bb[1].max(v[0]);
                    bb[2] = bb[2].min(v[1]);
                    bb[3] = bb[3].max(v[1]);
                }
                Some(bb)
            }
            _ => None,
        }
    }
}

fn polygon_edges(vertices: &[[f64; 2]]) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
    (0..vertices.len()).map(move |i| (vertices[i], vertices[(i + 1) % vertices.len()]))
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

fn validate_polygon(vertices: &[[f64; 2]]) -> Result<()> {
    let m = vertices.len();
    if m < 3 {
        return Err(Error::InvalidDomain(format!("polygon needs at least 3 vertices, got {m}")));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::InvalidDomain("polygon vertex is not finite".into()));
    }
    let area2: f64 = polygon_edges(vertices).map(|(a, b)| a[0] * b[1] - b[0] * a[1]).sum();
    if area2.abs() < 1e-14 {
        return Err(Error::InvalidDomain("polygon has zero area".into()));
    }
    let edges: Vec<_> = polygon_edges(vertices).collect();
    for i in 0..m {
        for j in i + 1..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if adjacent {
                // Adjacent edges may only share their common vertex: reject folding back.
                let shared = if j == i + 1 { b } else { a };
                let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                if cross(shared, p, q) == 0.0 && (p[0] - shared[0]) * (q[0] - shared[0]) + (p[1] - shared[1]) * (q[1] - shared[1]) > 0.0 {
                    return Err(Error::InvalidDomain(format!("polygon edges {i} and {j} overlap")));
                }
            } else if segments_intersect(a, b, c, d) {
                return Err(Error::InvalidDomain(format!("polygon edges {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}

/// Ray casting with the half-open edge rule; points on an edge are outside.
fn polygon_contains(vertices: &[[f64; 2]], x: f64, y: f64) -> bool {
    let p = [x, y];
    let mut inside = false;
    for (a, b) in polygon_edges(vertices) {
        if cross(a, b, p) == 0.0 && on_segment(p, a, b) {
            return false;
        }
        if (a[1] > y) != (b[1] > y) {
            let xi = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x < xi {
                inside = !inside;
            }
        }
    }
    inside
}

const NONE: u32 = u32::MAX;

/// Boolean occupancy of a uniform grid; cell `(i, j)` is centered at
/// `((i0 + i)·h, (j0 + j)·h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    h: f64,
    origin_index: (i64, i64),
    nx: usize,
    ny: usize,
    occupancy: Vec<bool>,
    cells: Vec<(usize, usize)>,
    index: Vec<u32>,
    neighbors: Vec<[u32; 4]>,
}

impl GridMask {
    /// Builds a mask from row-major occupancy (`occupancy[j * nx + i]`).
    ///
    /// The grid is padded so that every interior cell has four grid neighbors.
    /// Fails with [`Error::InvalidMask`] when the mask is empty or not 4-connected.
    pub fn new(h: f64, origin_index: (i64, i64), nx: usize, ny: usize, occupancy: Vec<bool>) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidMask(format!("spacing must be positive, got {h}")));
        }
        if occupancy.len() != nx * ny {
            return Err(Error::InvalidMask("occupancy length does not match dimensions".into()));
        }
        let (mut origin_index, mut nx, mut ny, mut occupancy) = (origin_index, nx, ny, occupancy);
        let touches_border = (0..nx).any(|i| occupancy[i] || occupancy[(ny - 1) * nx + i])
            || (0..ny).any(|j| occupancy[j * nx] || occupancy[j * nx + nx - 1]);
        if touches_border {
            let (px, py) = (nx + 2, ny + 2);
            let mut padded = vec![false; px * py];
            for j in 0..ny {
                for i in 0..nx {
                    padded[(j + 1) * px + i + 1] = occupancy[j * nx + i];
                }
            }
            origin_index = (origin_index.0 - 1, origin_index.1 - 1);
            nx = px;
            ny = py;
            occupancy = padded;
        }

        let mut index = vec![NONE; nx * ny];
        let mut cells = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if occupancy[j * nx + i] {
                    index[j * nx + i] = cells.len() as u32;
                    cells.push((i, j));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::InvalidMask("mask has no interior cells".into()));
        }
        let neighbors = cells
            .iter()
            .map(|&(i, j)| {
                [
                    index[j * nx + i + 1],
                    index[j * nx + i - 1],
                    index[(j + 1) * nx + i],
                    index[(j - 1) * nx + i],
                ]
            })
            .collect();
        let mask = GridMask { h, origin_index, nx, ny, occupancy, cells, index, neighbors };
        if mask.component_count() != 1 {
            return Err(Error::InvalidMask("interior cells are not 4-connected".into()));
        }
        Ok(mask)
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.cells.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                for &nb in &self.neighbors[k] {
                    if nb != NONE && !seen[nb as usize] {
                        seen[nb as usize] = true;
                        queue.push_back(nb as usize);
                    }
                }
            }
        }
        components
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// World coordinates of grid cell `(0, 0)`.
    pub fn origin(&self) -> (f64, f64) {
        (self.origin_index.0 as f64 * self.h, self.origin_index.1 as f64 * self.h)
    }

    pub fn origin_index(&self) -> (i64, i64) {
        self.origin_index
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.occupancy[j * self.nx + i]
    }

    /// Number of interior cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Grid coordinates of the interior cells, in storage order.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    /// Interior neighbors of cell `k` in the order E, W, N, S (`None` for exterior).
    pub fn neighbors(&self, k: usize) -> [Option<usize>; 4] {
        self.neighbors[k].map(|nb| (nb != NONE).then_some(nb as usize))
    }

    pub(crate) fn raw_neighbors(&self) -> &[[u32; 4]] {
        &self.neighbors
    }

    /// Interior index of grid cell `(i, j)`, if it is interior.
    pub fn interior_index(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.nx && j < self.ny {
            let k = self.index[j * self.nx + i];
            (k != NONE).then_some(k as usize)
        } else {
            None
        }
    }

    /// Interior index of the cell at lattice coordinates `(I, J)` (center `(I·h, J·h)`).
    pub fn lattice_index(&self, li: i64, lj: i64) -> Option<usize> {
        let i = li - self.origin_index.0;
        let j = lj - self.origin_index.1;
        if i < 0 || j < 0 {
            return None;
        }
        self.interior_index(i as usize, j as usize)
    }

    /// Center of interior cell `k`.
    pub fn center(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.cells[k];
        (
            (self.origin_index.0 + i as i64) as f64 * self.h,
            (self.origin_index.1 + j as i64) as f64 * self.h,
        )
    }

    /// Lattice coordinates of interior cell `k`.
    pub fn lattice(&self, k: usize) -> (i64, i64) {
        let (i, j) = self.cells[k];
        (self.origin_index.0 + i as i64, self.origin_index.1 + j as i64)
    }

    /// Whether every interior cell of `self` is interior in `other` (same lattice spacing).
    pub fn is_subset_of(&self, other: &GridMask) -> bool {
        if (self.h - other.h).abs() > 1e-12 * self.h {
            return false;
        }
        (0..self.len()).all(|k| {
            let (li, lj) = self.lattice(k);
            other.lattice_index(li, lj).is_some()
        })
    }
}

/// Marks every cell whose center lies strictly inside `domain`.
pub fn rasterize(domain: &DomainSpec, h: f64) -> Result<GridMask> {
    domain.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("grid spacing must be positive, got {h}")));
    }
    if domain.dimension() != 2 {
        return Err(Error::UnsupportedDimension(domain.dimension()));
    }
    let Some([x0, x1, y0, y1]) = domain.bounding_box() else {
        return Err(Error::InvalidDomain(format!("{} is unbounded and cannot be rasterized", domain.kind_name())));
    };
    let i0 = (x0 / h).floor() as i64 - 1;
    let i1 = (x1 / h).ceil() as i64 + 1;
    let j0 = (y0 / h).floor() as i64 - 1;
    let j1 = (y1 / h).ceil() as i64 + 1;
    let nx = (i1 - i0 + 1) as usize;
    let ny = (j1 - j0 + 1) as usize;
    let mut occupancy = vec![false; nx * ny];
    for j in 0..ny {
        let y = (j0 + j as i64) as f64 * h;
        for i in 0..nx {
            let x = (i0 + i as i64) as f64 * h;
            occupancy[j * nx + i] = domain.contains(x, y);
        }
    }
    if !occupancy.iter().any(|&b| b) {
        return Err(Error::ResolutionTooCoarse { cells: 0.0 });
    }
    let ri = inradius_of(h, nx, ny, &occupancy);
    if ri / h < MIN_CELLS_ACROSS_INRADIUS {
        return Err(Error::ResolutionTooCoarse { cells: ri / h });
    }
    GridMask::new(h, (i0, j0), nx, ny, occupancy)
}

/// Number of interior cells times `h²`.
pub fn volume(mask: &GridMask) -> f64 {
    mask.len() as f64 * mask.h * mask.h
}

/// Largest distance from an interior cell center to the nearest exterior cell center.
pub fn inradius(mask: &GridMask) -> f64 {
    inradius_of(mask.h, mask.nx, mask.ny, &mask.occupancy)
}

fn inradius_of(h: f64, nx: usize, ny: usize, occupancy: &[bool]) -> f64 {
    let d2 = squared_distance_transform(nx, ny, occupancy);
    d2.iter()
        .zip(occupancy)
        .filter(|(_, &inside)| inside)
        .map(|(d, _)| *d)
        .fold(0.0, f64::max)
        .sqrt()
        * h
}

/// Exact squared Euclidean distance (in cells) to the nearest exterior cell,
/// by separable lower envelopes of parabolas.
fn squared_distance_transform(nx: usize, ny: usize, occupancy: &[bool]) -> Vec<f64> {
    let inf = ((nx * nx + ny * ny) as f64 + 1.0) * 4.0;
    let mut grid: Vec<f64> = occupancy.iter().map(|&inside| if inside { inf } else { 0.0 }).collect();
    let mut buf_in = vec![0.0; nx.max(ny)];
    let mut buf_out = vec![0.0; nx.max(ny)];
    for j in 0..ny {
        buf_in[..nx].copy_from_slice(&grid[j * nx..(j + 1) * nx]);
        envelope_1d(&buf_in[..nx], &mut buf_out[..nx]);
        grid[j * nx..(j + 1) * nx].copy_from_slice(&buf_out[..nx]);
    }
    for i in 0..nx {
        for j in 0..ny {
            buf_in[j] = grid[j * nx + i];
        }
        envelope_1d(&buf_in[..ny], &mut buf_out[..ny]);
        for j in 0..ny {
            grid[j * nx + i] = buf_out[j];
        }
    }
    grid
}

fn envelope_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let intersect = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    let mut k = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let mut s = intersect(q, v[k]);
        while s <= z[k] {
            k -= 1;
            s = intersect(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Multiplies every length parameter by `r`.
pub fn scale_domain(domain: &DomainSpec, r: f64) -> Result<DomainSpec> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonpositiveScale(r));
    }
    Ok(match domain {
        DomainSpec::Disk { radius } => DomainSpec::Disk { radius: radius * r },
        DomainSpec::Rectangle { half_widths } => DomainSpec::Rectangle { half_widths: half_widths.map(|a| a * r) },
        DomainSpec::Polygon { vertices } => DomainSpec::Polygon {
            vertices: vertices.iter().map(|v| [v[0] * r, v[1] * r]).collect(),
        },
        DomainSpec::Annulus { r_in, r_out } => DomainSpec::Annulus { r_in: r_in * r, r_out: r_out * r },
        DomainSpec::Ball { n, radius } => DomainSpec::Ball { n: *n, radius: radius * r },
        DomainSpec::Slab { n, half_width } => DomainSpec::Slab { n: *n, half_width: half_width * r },
    })
}

/// The disk whose area equals `volume(mask)`.
pub fn equal_volume_ball(mask: &GridMask) -> DomainSpec {
    DomainSpec::Disk { radius: (volume(mask) / PI).sqrt() }
}

/// Continuous volume of the n-ball of the given radius.
pub fn ball_volume(n: usize, radius: f64) -> f64 {
    unit_ball_volume(n) * radius.powi(n as i32)
}

/// Rasterized origin-centered disk on the same lattice whose cell count is
/// closest to that of `mask`; returns the mask and the radius used.
///
/// Lattice disks grow by whole shells of equal `i² + j²`, so the match is exact
/// whenever `mask` is itself a lattice disk.
pub fn equal_count_disk(mask: &GridMask) -> Result<(GridMask, f64)> {
    let h = mask.h();
    let target = mask.len();
    let reach = ((target as f64 / PI).sqrt() * 2.0).ceil() as i64 + 2;
    let mut shells: Vec<i64> = Vec::new();
    for i in -reach..=reach {
        for j in -reach..=reach {
            shells.push(i * i + j * j);
        }
    }
    shells.sort_unstable();
    // cumulative count after each distinct shell value
    let mut best: Option<(usize, i64, i64)> = None; // (|diff|, shell, next shell)
    let mut k = 0;
    while k < shells.len() {
        let s = shells[k];
        let mut end = k;
        while end < shells.len() && shells[end] == s {
            end += 1;
        }
        let next = shells.get(end).copied().unwrap_or(s + 1);
        let diff = end.abs_diff(target);
        if best.is_none_or(|b| diff < b.0) {
            best = Some((diff, s, next));
        }
        if end > target {
            break;
        }
        k = end;
    }
    let (_, shell, next) = best.expect("lattice shells are nonempty");
    let radius = 0.5 * ((shell as f64).sqrt() + (next as f64).sqrt()) * h;
    Ok((rasterize_unchecked_disk(radius, h)?, radius))
}

fn rasterize_unchecked_disk(radius: f64, h: f64) -> Result<GridMask> {
    let m = (radius / h).ceil() as i64 + 1;
    let n = (2 * m + 1) as usize;
    let mut occupancy = vec![false; n * n];
    for j in 0..n {
        for i in 0..n {
            let (x, y) = ((i as i64 - m) as f64 * h, (j as i64 - m) as f64 * h);
            occupancy[j * n + i] = x * x + y * y < radius * radius;
        }
    }
    GridMask::new(h, (-m, -m), n, n, occupancy)
}
