//! Grid functions with zero Dirichlet data and the discrete calculus on them.
//!
//! All integrals are midpoint cell sums (`Σ values · h²`). The Dirichlet energy
//! is the edge sum of squared differences, including edges that cross into the
//! zero exterior, so it coincides with the quadratic form `⟨u, −Δ_h u⟩ h²`.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::GridMask;

/// A real function on the interior cells of a mask, zero outside.
#[derive(Debug, Clone)]
pub struct GridField {
    mask: Arc<GridMask>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(mask: Arc<GridMask>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mask.len() {
            return Err(Error::InvalidInput(format!(
                "field has {} values for {} interior cells",
                values.len(),
                mask.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("field value {v} is not finite")));
        }
        Ok(GridField { mask, values })
    }

    pub fn zeros(mask: Arc<GridMask>) -> Self {
        let n = mask.len();
        GridField { mask, values: vec![0.0; n] }
    }

    pub fn constant(mask: Arc<GridMask>, c: f64) -> Self {
        let n = mask.len();
        GridField { mask, values: vec![c; n] }
    }

    /// Samples `f(x, y)` at interior cell centers.
    pub fn from_fn(mask: Arc<GridMask>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..mask.len())
            .map(|k| {
                let (x, y) = mask.center(k);
                f(x, y)
            })
            .collect();
        GridField { mask, values }
    }

    pub(crate) fn from_raw(mask: Arc<GridMask>, values: Vec<f64>) -> Self {
        debug_assert_eq!(mask.len(), values.len());
        GridField { mask, values }
    }

    pub fn mask(&self) -> &Arc<GridMask> {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn h(&self) -> f64 {
        self.mask.h()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index and value of the largest entry.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best })
    }

    pub fn scaled(&self, k: f64) -> GridField {
        self.map(|v| k * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { mask: Arc::clone(&self.mask), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Plain Euclidean inner product of the value vectors (no `h²` weight).
    pub fn dot(&self, other: &GridField) -> f64 {
        dot(&self.values, &other.values)
    }

    /// `∫ u v dV` as a cell sum.
    pub fn integral_product(&self, other: &GridField) -> f64 {
        self.dot(other) * self.h() * self.h()
    }

    /// `∫ u dV` as a cell sum.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.h() * self.h()
    }

    /// Bilinear interpolation at a world point, using zero outside the mask.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let h = self.h();
        let (oi, oj) = self.mask.origin_index();
        let gx = x / h - oi as f64;
        let gy = y / h - oj as f64;
        let (i0, j0) = (gx.floor(), gy.floor());
        let (tx, ty) = (gx - i0, gy - j0);
        let value_at = |i: f64, j: f64| {
            if i < 0.0 || j < 0.0 {
                return 0.0;
            }
            self.mask
                .interior_index(i as usize, j as usize)
                .map_or(0.0, |k| self.values[k])
        };
        (1.0 - tx) * (1.0 - ty) * value_at(i0, j0)
            + tx * (1.0 - ty) * value_at(i0 + 1.0, j0)
            + (1.0 - tx) * ty * value_at(i0, j0 + 1.0)
            + tx * ty * value_at(i0 + 1.0, j0 + 1.0)
    }

    /// Writes `i,j,value` rows after a `#`-prefixed header carrying `h`, origin and dims.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (ox, oy) = self.mask.origin();
        let (nx, ny) = self.mask.dims();
        writeln!(out, "# h={:e}", self.h())?;
        writeln!(out, "# origin={:e},{:e}", ox, oy)?;
        writeln!(out, "# dims={nx},{ny}")?;
        writeln!(out, "i,j,value")?;
        for (k, &(i, j)) in self.mask.cells().iter().enumerate() {
            writeln!(out, "{i},{j},{:e}", self.values[k])?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply_neg_laplacian(mask: &GridMask, u: &[f64], out: &mut [f64]) {
    let inv_h2 = 1.0 / (mask.h() * mask.h());
    for ((o, nbs), &uc) in out.iter_mut().zip(mask.raw_neighbors()).zip(u) {
        let mut sum = 0.0;
        for &nb in nbs {
            if nb != u32::MAX {
                sum += u[nb as usize];
            }
        }
        *o = (4.0 * uc - sum) * inv_h2;
    }
}

/// Five-point Laplacian `(u_E + u_W + u_N + u_S − 4u_C)/h²` with zero ghosts.
pub fn laplacian_apply(u: &GridField) -> GridField {
    let mut out = vec![0.0; u.values.len()];
    apply_neg_laplacian(&u.mask, &u.values, &mut out);
    out.iter_mut().for_each(|v| *v = -*v);
    GridField::from_raw(Arc::clone(&u.mask), out)
}

/// Outcome of a conjugate-gradient solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Iteration cap used by [`poisson_solve`]: 20 × the larger grid dimension.
pub fn cg_iteration_cap(mask: &GridMask) -> usize {
    let (nx, ny) = mask.dims();
    20 * nx.max(ny)
}

/// Solves `−Δ_h u = f` to relative residual `tol` by Jacobi-preconditioned CG.
pub fn poisson_solve(f: &GridField, tol: f64) -> Result<GridField> {
    poisson_solve_from(f, tol, None).map(|(u, _)| u)
}

/// [`poisson_solve`] with an optional warm start.
pub fn poisson_solve_from(f: &GridField, tol: f64, guess: Option<&GridField>) -> Result<(GridField, CgStats)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mask = &f.mask;
    let n = f.values.len();
    let b = &f.values;
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok((GridField::zeros(Arc::clone(mask)), CgStats { iterations: 0, relative_residual: 0.0 }));
    }
    // the diagonal of −Δ_h is 4/h² everywhere
    let inv_diag = mask.h() * mask.h() / 4.0;
    let mut x = guess.map_or_else(|| vec![0.0; n], |g| g.values.clone());
    let mut ax = vec![0.0; n];
    apply_neg_laplacian(mask, &x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut z: Vec<f64> = r.iter().map(|ri| ri * inv_diag).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let cap = cg_iteration_cap(mask);
    let mut res = dot(&r, &r).sqrt() / b_norm;
    let mut iterations = 0;
    while res > tol {
        if iterations >= cap {
            return Err(Error::NoConvergence { iterations, residual: res });
        }
        apply_neg_laplacian(mask, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag;
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        iterations += 1;
        res = dot(&r, &r).sqrt() / b_norm;
    }
    Ok((GridField::from_raw(Arc::clone(mask), x), CgStats { iterations, relative_residual: res }))
}

/// `∫|∇u|² dV` as the edge sum, boundary edges included.
pub fn dirichlet_energy(u: &GridField) -> f64 {
    let mut sum = 0.0;
    for (k, nbs) in u.mask.raw_neighbors().iter().enumerate() {
        let uc = u.values[k];
        // E and N edges once; exterior edges on every side
        for (side, &nb) in nbs.iter().enumerate() {
            if nb == u32::MAX {
                sum += uc * uc;
            } else if side == 0 || side == 2 {
                let d = uc - u.values[nb as usize];
                sum += d * d;
            }
        }
    }
    // (difference/h)² · h² in two dimensions
    sum
}

fn is_integer(p: f64) -> bool {
    p.fract() == 0.0 && p.abs() < 1e15
}

/// `∫ u^p dV` (the p-th power integral, not its root).
pub fn lp_norm_p(u: &GridField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!("p must be at least 1, got {p}")));
    }
    let h2 = u.h() * u.h();
    if is_integer(p) {
        let ip = p as i32;
        Ok(u.values.iter().map(|v| v.powi(ip)).sum::<f64>() * h2)
    } else {
        if let Some(&value) = u.values.iter().find(|&&v| v < 0.0) {
            return Err(Error::NegativeValueWithFractionalPower { value, p });
        }
        Ok(u.values.iter().map(|v| v.powf(p)).sum::<f64>() * h2)
    }
}

/// `Φ_p(u) = ∫|∇u|² / (∫u^p)^{2/p}`.
pub fn phi_p(u: &GridField, p: f64) -> Result<f64> {
    let denom = lp_norm_p(u, p)?;
    if !(denom > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(dirichlet_energy(u) / denom.powf(2.0 / p))
}
